"""Golden corpus and acceptance criteria.

The fixtures under ``fixtures/`` are problem files with expected values; the
criteria below recompute every headline number independently of the fixtures
and print one pass/fail line each when run through ``corpus``.
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass
from importlib import resources
from typing import Callable, TextIO

from . import killing as K
from . import liealg
from .connection import (
    Connection,
    commutator_identities,
    nabla_s_lie_commutator_vanishes,
    variation_check,
)
from .cotangent import (
    CotangentChart,
    PWReport,
    gradient_killing_complete_lift,
    lift_identities,
    lifted_connection_bar,
    pw_identities,
)
from .derivations import square_zero_derivations
from .geodesic import (
    conserved_quantity,
    integrate_geodesic,
    rk4_order_factor,
    spray_correspondence,
    sym_lie_flow_check,
)
from .ring import Chart
from .samples import random_field, random_symfield, random_vector, spanning_forms
from .symtensor import SymField
from .tasks import EXIT_ASSERT, EXIT_COMPUTE, EXIT_OK, Options, load_problem, run

# ---------------------------------------------------------------------------
# connection corpus


def plane_example(chart: Chart, f3, f4) -> Connection:
    """Γˣ_xy = Γˣ_yx = f₃/2 and Γʸ_xy = Γʸ_yx = f₄/2 on ℝ²."""
    a, b = chart.field(f3) / 2, chart.field(f4) / 2
    return Connection.from_entries(chart, {(0, 0, 1): a, (0, 1, 0): a, (1, 0, 1): b, (1, 1, 0): b})


def circle(f: str) -> Connection:
    S = Chart.angles("t")
    return Connection.from_entries(S, {(0, 0, 0): S.parse(f)})


def connection_corpus() -> dict[str, Connection]:
    plane = Chart.affine("x", "y")
    return {
        "euclidean_r1": Connection.flat(Chart.affine("x")),
        "euclidean_r2": Connection.flat(plane),
        "euclidean_r3": Connection.flat(Chart.affine("x", "y", "z")),
        "example_polynomial": plane_example(plane, "x*y", "y"),
        "example_constant": plane_example(plane, 1, 1),
        "example_rational": plane_example(plane, "-2*y*(1+2/(1+2*y^2))", "-2*x*(1+2/(1+2*x^2))"),
        "circle_f0": circle("0"),
        "circle_sin": circle("sin(t)"),
        "circle_1_plus_sin": circle("1+sin(t)"),
        "circle_cos2": circle("cos(t)^2"),
    }


CONSTANT_BASIS = [{"x": "exp(y)"}, {"y": "exp(x)"}, {"x": "1", "y": "-1"}]
RATIONAL_BASIS = [{"x": "exp(-y^2)/(1+2*y^2)"}, {"y": "exp(-x^2)/(1+2*x^2)"},
                  {"x": "y/(1+2*y^2)", "y": "-x/(1+2*x^2)"}]


# ---------------------------------------------------------------------------
# acceptance criteria

@dataclass
class Criterion:
    number: int
    title: str
    tags: tuple[str, ...]
    check: Callable[[Options], tuple[bool, dict]]


def _timed(fn, *args, **kw):
    t = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t


def c1_euclidean(opt: Options):
    detail, ok = {}, True
    for n, want in ((1, (1, 0)), (2, (3, 1)), (3, (6, 3))):
        names = ("x", "y", "z")[:n]
        rep, secs = _timed(K.cohomology, Connection.flat(Chart.affine(*names)), 1)
        got = (rep.dim_kill, rep.dim_H)
        detail[f"R{n}"] = {"dims": got, "stable": rep.stable, "seconds": round(secs, 3)}
        ok &= got == want and rep.stable and secs < 1.0
    return ok, detail


def c2_plane_examples(opt: Options):
    C = connection_corpus()
    ex0 = K.killing_solve(C["example_polynomial"], 1, K.AnsatzSpec(1, 6))
    const = K.closed_form_h1(C["example_constant"], CONSTANT_BASIS, 100, 1e-9, opt.seed)
    rat = K.closed_form_h1(C["example_rational"], RATIONAL_BASIS, 100, 1e-9, opt.seed)
    within = K.cohomology(C["example_constant"], 1)
    detail = {"polynomial_kill_dim_D6": ex0.dim,
              "constant": const.__dict__, "rational": rat.__dict__,
              "constant_within_polynomial_ansatz": {"dim_kill": within.dim_kill, "dim_H": within.dim_H}}
    ok = (ex0.dim == 0 and const.verified and const.spans_kill and const.dim_H == 2
          and rat.verified and rat.spans_kill and rat.dim_H == 3)
    return ok, detail


def c3_circle(opt: Options):
    S = Chart.angles("t")
    want = {"0": (1, True), "sin(t)": (1, True), "1+sin(t)": (0, False)}
    detail, ok = {}, True
    for f, expected in want.items():
        res = K.circle_classify(S.parse(f))
        detail[f] = {"dim_H": res.dim_H, "is_levi_civita": res.is_levi_civita, "exact": res.exact}
        ok &= (res.dim_H, res.is_levi_civita) == expected and res.exact
    return ok, detail


def c4_identities(opt: Options):
    start = time.perf_counter()
    detail, ok = {}, True
    for name, nabla in connection_corpus().items():
        rng = random.Random(opt.seed)
        chart = nabla.chart
        forms = spanning_forms(chart, 3, rng)
        X, Y = random_vector(chart, rng).values(), random_vector(chart, rng).values()
        com = commutator_identities(nabla, X, Y, forms)
        other = Connection.flat(chart) if name != "euclidean_r2" else connection_corpus()["example_constant"]
        var = variation_check(nabla, other, forms, [(X, Y)])
        keys = ("iota_iota", "nabla_nabla", "iota_nabla", "lie_iota", "com1", "com2", "covLL")
        detail[name] = {k: com[k] for k in keys} | {"variation": var["ok"]}
        ok &= com["ok"] and var["ok"]
    secs = time.perf_counter() - start
    detail["seconds"] = round(secs, 2)
    return ok and secs < 60, detail


def _random_bivector(chart, rng):
    n = chart.dim
    pi = [[chart.zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            pi[i][j] = random_field(chart, rng, 1)
            pi[j][i] = -pi[i][j]
    return pi


def c5_patterson_walker(opt: Options):
    detail, ok = {}, True
    for name, nabla in connection_corpus().items():
        chart = nabla.chart
        T = CotangentChart(chart)
        checks = PWReport(T, nabla).checks()
        rng = random.Random(opt.seed)
        X, Y = random_vector(chart, rng).values(), random_vector(chart, rng).values()
        a, b = random_symfield(chart, 1, rng), random_symfield(chart, 1, rng)
        pw = pw_identities(T, nabla, X, Y, a, _random_bivector(chart, rng))
        lifts = lift_identities(T, nabla, X, Y, a, b, random_field(chart, rng, 2))
        detail[name] = {"report": checks["ok"], "d_alpha_can": pw["d_alpha_can"], "pw2": pw["pw2"],
                        "pi_lift": pw["pi_lift"], "lifts": lifts["ok"]}
        ok &= checks["ok"] and pw["ok"] and lifts["ok"]
    return ok, detail


def c6_pw_lift(opt: Options):
    start = time.perf_counter()
    nabla = Connection.flat(Chart.affine("x", "y"))
    lift = K.pw_cohomology_lift(nabla)
    bar = lifted_connection_bar(CotangentChart(nabla.chart), nabla)
    direct = K.cohomology(bar, 1, 3, escalate=False)
    secs = time.perf_counter() - start
    comps = (lift.dim_bivectors, lift.dim_aff, lift.dim_aff0, lift.dim_H1)
    detail = {"components": comps, "total": lift.total, "direct_H1": direct.dim_H, "seconds": round(secs, 2)}
    return comps == (1, 6, 2, 1) and lift.total == 6 and direct.dim_H == 6 and secs < 30, detail


def c7_kunneth(opt: Options):
    S, Sb = Chart.angles("t"), Chart.angles("s")
    cases = {
        "cylinder": (Connection.flat(S), Connection.flat(Chart.affine("u")), 1, 1),
        "plane": (Connection.flat(Chart.affine("x")), Connection.flat(Chart.affine("y")), 0, 1),
        "torus": (Connection.flat(S), Connection.flat(Sb), 2, 2),
    }
    detail, ok = {}, True
    for name, (a, b, kd, full) in cases.items():
        res = K.kunneth_subspace(a, b, 1)
        detail[name] = {"kunneth_dim": res.dim, "full_dim_H": res.full.dim_H, "members": res.members_killing}
        ok &= res.dim == kd and res.full.dim_H == full and res.members_killing
    return ok, detail


def c8_liealg(opt: Options):
    start = time.perf_counter()
    ok = True
    trivial = {}
    for n in range(1, 5):
        A = liealg.Algebra.trivial(n)
        dims = [liealg.cohomology(A, r).dim_H for r in range(4)]
        trivial[n] = dims
        ok &= dims == [math.comb(n + r - 1, r) for r in range(4)]
    line = liealg.Algebra(1, [[[1]]])
    line_dims = [liealg.cohomology(line, r).dim_H for r in (1, 2)]
    su2 = liealg.bracket_as_product(liealg.su2_bracket(), 3, "1/2")
    su2_h1 = liealg.cohomology(su2, 1).dim_H
    secs = time.perf_counter() - start
    ok &= line_dims == [0, 0] and su2_h1 == 3 and secs < 5
    return ok, {"trivial": trivial, "line": line_dims, "su2_half_H1": su2_h1, "seconds": round(secs, 3)}


def _corpus_killing_tensors() -> list[tuple[str, Connection, SymField]]:
    out = []
    C = connection_corpus()
    for name in ("euclidean_r1", "euclidean_r2", "euclidean_r3", "example_polynomial",
                 "example_constant", "circle_f0", "circle_sin"):
        for r in (1, 2):
            if name == "euclidean_r3" and r == 2:
                continue
            for Kt in K.killing_solve(C[name], r, K.AnsatzSpec(r, r + 2)).basis:
                out.append((name, C[name], Kt))
    return out


def c9_numeric(opt: Options):
    detail = {}
    worst_drift = 0.0
    tensors = _corpus_killing_tensors()
    for name, nabla, Kt in tensors:
        n = nabla.dim
        start = [0.1 * (i + 1) for i in range(n)]
        vel = [0.6 - 0.25 * i for i in range(n)]
        run_ = integrate_geodesic(nabla, start, vel, 1e-3, 1.0)
        worst_drift = max(worst_drift, conserved_quantity(run_, Kt))
    detail["killing_tensors"] = len(tensors)
    detail["max_drift"] = worst_drift
    worst_spray = 0.0
    for name, nabla in connection_corpus().items():
        rng = random.Random(opt.seed)
        for r in range(4):
            worst_spray = max(worst_spray, spray_correspondence(nabla, random_symfield(nabla.chart, r, rng),
                                                                50, opt.seed))
    detail["max_spray_residual"] = worst_spray
    plane = Chart.affine("x", "y")
    flat = Connection.flat(plane)
    flows = [
        sym_lie_flow_check(flat, [plane.one, plane.zero], SymField.from_components(plane, 1, {(1,): "x"}),
                           [0.2, 0.3]),
        sym_lie_flow_check(flat, [plane.parse("-y"), plane.parse("x")],
                           SymField.from_components(plane, 2, {(0, 0): 1, (1, 1): 1}), [0.2, 0.3]),
        sym_lie_flow_check(flat, [plane.parse("-y"), plane.parse("x")], SymField.scalar(plane.parse("x^2*y")),
                           [0.2, 0.3]),
    ]
    detail["flow_residuals"] = flows
    factor = rk4_order_factor()
    detail["rk4_order_factor"] = factor
    ok = worst_drift < 1e-8 and worst_spray < 1e-6 and max(flows) < 1e-4 and 12 <= factor <= 20
    return ok, detail


def c10_derivations(opt: Options):
    reports = [square_zero_derivations(Chart.affine(*names), 2, opt.seed)
               for names in (("x",), ("x", "y"))]
    return all(r.only_zero for r in reports), {f"dim{r.dim}": r.to_json() for r in reports}


def c11_gradient_gate(opt: Options):
    C = connection_corpus()
    plane, space = C["euclidean_r2"].chart, C["euclidean_r3"].chart
    S = C["circle_f0"].chart
    # curved product with a flat line: ∂z is parallel and ι_{∂z}R = 0
    C["polynomial_times_line"] = K.product_connection(C["example_polynomial"],
                                                      Connection.flat(Chart.affine("z")))
    prod = C["polynomial_times_line"].chart
    pairs = [
        ("polynomial_times_line", [prod.zero, prod.zero, prod.one]),
        ("polynomial_times_line", [prod.one, prod.zero, prod.zero]),
        ("euclidean_r2", [plane.one, plane.zero]),
        ("euclidean_r2", [plane.parse("-y"), plane.parse("x")]),
        ("euclidean_r2", [plane.parse("x"), plane.zero]),
        ("euclidean_r3", [space.zero, space.zero, space.one]),
        ("euclidean_r3", [space.parse("-y"), space.parse("x"), space.zero]),
        ("example_polynomial", [plane.one, plane.zero]),
        ("example_constant", [plane.one, plane.parse("-1")]),
        ("example_rational", [plane.zero, plane.one]),
        ("circle_f0", [S.one]),
        ("circle_sin", [S.one]),
        ("circle_1_plus_sin", [S.parse("cos(t)")]),
    ]
    detail, ok = [], True
    for name, X in pairs:
        nabla = C[name]
        forms = spanning_forms(nabla.chart, 3, random.Random(opt.seed))
        lhs = nabla_s_lie_commutator_vanishes(nabla, X, forms)
        rhs = gradient_killing_complete_lift(nabla, X)
        detail.append({"connection": name, "X": [str(c) for c in X], "commutator_vanishes": lhs,
                       "gradient_killing": rhs})
        ok &= lhs == rhs
    return ok and any(d["gradient_killing"] for d in detail), {"pairs": detail}


CRITERIA = [
    Criterion(1, "Euclidean Kill¹ and H¹ dimensions", ("killing", "euclidean"), c1_euclidean),
    Criterion(2, "plane examples: Killing forms and H¹", ("killing", "examples"), c2_plane_examples),
    Criterion(3, "circle classification", ("circle",), c3_circle),
    Criterion(4, "identity suite on the connection corpus", ("identities",), c4_identities),
    Criterion(5, "Patterson–Walker metric and lifted connections", ("pw",), c5_patterson_walker),
    Criterion(6, "first cohomology of the lifted Euclidean plane", ("pw",), c6_pw_lift),
    Criterion(7, "Künneth subspaces", ("kunneth",), c7_kunneth),
    Criterion(8, "Lie-admissible cohomology", ("liealg",), c8_liealg),
    Criterion(9, "numeric harness", ("geodesic",), c9_numeric),
    Criterion(10, "square-zero degree-1 derivations", ("derivations",), c10_derivations),
    Criterion(11, "gradient-Killing gate", ("identities",), c11_gradient_gate),
]


def run_criterion(c: Criterion, opt: Options) -> dict:
    start = time.perf_counter()
    try:
        ok, detail = c.check(opt)
        status = "pass" if ok else "fail"
    except Exception as exc:  # noqa: BLE001
        ok, detail, status = False, {"error": f"{type(exc).__name__}: {exc}"}, "error"
    return {"criterion": c.number, "title": c.title, "status": status, "ok": ok,
            "detail": detail, "seconds": round(time.perf_counter() - start, 3)}


def criterion_line(entry: dict) -> str:
    mark = "PASS" if entry["ok"] else "FAIL"
    return f"[{mark}] criterion {entry['criterion']:>2}: {entry['title']} ({entry['seconds']:.2f}s)"


# ---------------------------------------------------------------------------
# corpus runner

def fixture_names() -> list[str]:
    root = resources.files("symcartan") / "fixtures"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def load_fixture(name: str) -> dict:
    return json.loads((resources.files("symcartan") / "fixtures" / name).read_text())


def _matches(filt: str | None, name: str, tags) -> bool:
    return filt is None or filt in name or any(filt in t for t in tags)


def corpus(filt: str | None = None, opt: Options | None = None, acceptance: bool = True,
           echo: TextIO | None = None) -> tuple[dict, int]:
    opt = opt or Options()
    code = EXIT_OK
    cases = []
    for name in fixture_names():
        data = load_fixture(name)
        if not _matches(filt, name, data.get("tags", [])):
            continue
        report, rc = run(load_problem(data), opt)
        code = max(code, rc)
        cases.append({"file": name, "status": report["status"], "exit_code": rc,
                      "tasks": [{"name": t["name"], "status": t["status"]} for t in report["tasks"]],
                      "seconds": round(sum(t["seconds"] for t in report["tasks"]), 3)})
        if echo:
            print(f"[{'PASS' if rc == EXIT_OK else 'FAIL'}] {name}", file=echo)
    criteria = []
    if acceptance:
        for c in CRITERIA:
            if not _matches(filt, f"criterion{c.number}", c.tags):
                continue
            entry = run_criterion(c, opt)
            criteria.append(entry)
            if entry["status"] == "error":
                code = max(code, EXIT_COMPUTE)
            elif not entry["ok"]:
                code = max(code, EXIT_ASSERT)
            if echo:
                print(criterion_line(entry), file=echo)
    return {"filter": filt, "cases": cases, "criteria": criteria,
            "status": "ok" if code == EXIT_OK else "failed", "exit_code": code}, code
