"""Task runners behind the CLI and the problem-file report format.

Each runner takes the built problem, the task parameters and the run options,
and returns a JSON-ready dict. ``run`` executes the tasks of a problem in
order and compares each result with the task's ``expect`` block.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from typing import Any, Callable

from pydantic import ValidationError

from . import killing as K
from . import liealg
from .connection import (
    TorsionError,
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
from .geodesic import conserved_quantity, integrate_geodesic, spray_correspondence
from .problem import Problem, ProblemFile, TaskModel, build_connection, build_symfield, build_vector
from .ring import to_expr
from .samples import random_field, random_symfield, random_vector, spanning_forms

EXIT_OK, EXIT_ASSERT, EXIT_SCHEMA, EXIT_COMPUTE = 0, 1, 2, 3


@dataclass
class Options:
    seed: int = 0
    tol: float | None = None

    def tolerance(self, params: dict, default: float) -> float:
        if "tol" in params:
            return float(params["tol"])
        return default if self.tol is None else self.tol


class SchemaError(ValueError):
    """Problem or task parameters are invalid (exit code 2)."""


def _int(params: dict, key: str, default: int | None, lo: int = 0, hi: int = 12) -> int | None:
    if key not in params:
        return default
    v = params[key]
    if not isinstance(v, int) or isinstance(v, bool) or not lo <= v <= hi:
        raise SchemaError(f"parameter {key!r} must be an integer in [{lo}, {hi}]")
    return v


def _vec_json(v) -> list[str]:
    return [to_expr(c) for c in v]


# ---------------------------------------------------------------------------
# runners

def task_kill(p: Problem, params: dict, opt: Options, ctx: dict) -> dict:
    nabla = p.connection
    r = _int(params, "r", 1, 0, 4)
    if "closed_form" in params:
        basis = params["closed_form"]
        samples = _int(params, "samples", 100, 1, 10000)
        tol = opt.tolerance(params, 1e-9)
        reports = [K.killing_verify(nabla, r, comps, samples, tol, opt.seed) for comps in basis]
        out = {"r": r, "verified": all(rep.ok for rep in reports),
               "verify": [rep.to_json() for rep in reports], "samples": samples, "tol": tol}
        if r == 1:
            h = K.closed_form_h1(nabla, basis, samples, tol, opt.seed)
            out.update(dim_kill=h.dim_kill, spans_kill=h.spans_kill, dim_H=h.dim_H)
        return out
    degree = _int(params, "degree", None, 0, 12)
    bounds = tuple(sorted(params.get("bounds", {}).items()))
    if params.get("escalate", degree is None) and not bounds:
        res, stable = K.killing_dimension(nabla, r, degree)
    else:
        res = K.killing_solve(nabla, r, K.AnsatzSpec(r, r + 2 if degree is None else degree, bounds))
        stable = None
    ctx["killing_basis"] = res.basis
    return {"r": r, "dim_kill": res.dim, "stable": stable, "ansatz": res.ansatz.to_json(),
            "ansatz_relative": True, "basis": [b.to_json() for b in res.basis],
            "matrix": res.problem.summary()}


def task_cohomology(p: Problem, params: dict, opt: Options, ctx: dict) -> dict:
    rep = K.cohomology(p.connection, _int(params, "r", 1, 0, 4), _int(params, "degree", None),
                       _int(params, "potential_degree", None), bool(params.get("escalate", True)),
                       _int(params, "cap", K.DEFAULT_CAP, 1, 12))
    ctx["killing_basis"] = rep.basis
    return rep.to_json()


def task_affine(p: Problem, params: dict, opt: Options, ctx: dict) -> dict:
    deg = _int(params, "degree", None)
    aff = K.affine_fields(p.connection, deg)
    aff0 = K.parallel_fields(p.connection, deg)
    biv = K.parallel_bivectors(p.connection, deg)
    return {"dim_aff": aff.dim, "dim_aff0": aff0.dim, "dim_bivectors": biv.dim,
            "stable": aff.stable and aff0.stable and biv.stable, "ansatz_relative": True,
            "aff_basis": [_vec_json(v) for v in aff.basis],
            "aff0_basis": [_vec_json(v) for v in aff0.basis],
            "bivector_basis": [[_vec_json(row) for row in M] for M in biv.basis]}


def task_pw(p: Problem, params: dict, opt: Options, ctx: dict) -> dict:
    nabla = p.connection
    chart = nabla.chart
    T = CotangentChart(chart)
    report = PWReport(T, nabla)
    checks = report.checks()
    rng = random.Random(opt.seed)
    trials = _int(params, "trials", 2, 0, 20)
    pw_ok = lift_ok = True
    for _ in range(trials):
        X, Y = random_vector(chart, rng).values(), random_vector(chart, rng).values()
        a, b = random_symfield(chart, 1, rng), random_symfield(chart, 1, rng)
        n = chart.dim
        pi = [[chart.zero] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                pi[i][j] = random_field(chart, rng, 1)
                pi[j][i] = -pi[i][j]
        pw_ok &= pw_identities(T, nabla, X, Y, a, pi)["ok"]
        lift_ok &= lift_identities(T, nabla, X, Y, a, b, random_field(chart, rng, 2))["ok"]
    checks["pw_identities"] = pw_ok
    checks["lift_identities"] = lift_ok
    checks["ok"] = all(v for k, v in checks.items() if k != "ok")
    return {"checks": checks, "ok": checks["ok"], "trials": trials,
            "total_chart": T.total.names, "metric": report.metric.to_json()}


def task_pw_lift(p: Problem, params: dict, opt: Options, ctx: dict) -> dict:
    lift = K.pw_cohomology_lift(p.connection, _int(params, "degree", None))
    out = lift.to_json()
    out["ansatz_relative"] = True
    if params.get("cross_check", False):
        T = CotangentChart(p.connection.chart)
        bar = lifted_connection_bar(T, p.connection)
        rep = K.cohomology(bar, 1, _int(params, "cross_degree", 3), escalate=False)
        out["cross_check"] = {"dim_kill": rep.dim_kill, "dim_H": rep.dim_H,
                              "agrees": rep.dim_H == lift.total}
    return out


def task_kunneth(p: Problem, params: dict, opt: Options, ctx: dict) -> dict:
    factor = params.get("factor")
    if not isinstance(factor, dict):
        raise SchemaError("kunneth needs a 'factor' with manifold and connection")
    other = load_problem({"name": "factor", "manifold": factor.get("manifold"),
                          "connection": factor.get("connection", {"gamma": {}})})
    res = K.kunneth_subspace(p.connection, other.connection, _int(params, "r", 1, 1, 3),
                             _int(params, "degree", None), full=bool(params.get("full", True)))
    return res.to_json()


def task_circle(p: Problem, params: dict, opt: Options, ctx: dict) -> dict:
    nabla = p.connection
    if nabla.chart.dim != 1:
        raise SchemaError("circle needs a one-dimensional angle chart")
    res = K.circle_classify(nabla.gamma[0][0][0], opt.tolerance(params, 1e-10))
    out = res.to_json()
    out["f"] = to_expr(nabla.gamma[0][0][0])
    return out


def task_lieadm(p: Problem, params: dict, opt: Options, ctx: dict) -> dict:
    A = p.algebra
    rmax = _int(params, "rmax", 3, 0, 4)
    table = liealg.cohomology_table(A, rmax)
    adm = liealg.admissibility(A.c, A.dim, params.get("bracket"))
    return {"dim": A.dim, "dims": [row["dim_H"] for row in table], "table": table,
            "admissibility": adm.to_json()}


def task_geodesic(p: Problem, params: dict, opt: Options, ctx: dict) -> dict:
    nabla = p.connection
    n = nabla.chart.dim
    start = [float(x) for x in params.get("start", [0.0] * n)]
    velocity = [float(x) for x in params.get("velocity", [1.0] + [0.0] * (n - 1))]
    run = integrate_geodesic(nabla, start, velocity, float(params.get("h", 1e-3)),
                             float(params.get("T", 1.0)))
    out = run.to_json()
    tol = opt.tolerance(params, 1e-8)
    tensors = [build_symfield(nabla.chart, int(t["degree"]), t["components"])
               for t in params.get("conserved", [])]
    if params.get("conserved_from_previous"):
        tensors += [b for b in ctx.get("killing_basis", []) if b.degree > 0]
    drifts = [conserved_quantity(run, t) for t in tensors]
    out["drifts"] = drifts
    out["conserved"] = all(d < tol for d in drifts)
    if params.get("spray", True):
        rng = random.Random(opt.seed)
        phis = [random_symfield(nabla.chart, r, rng) for r in range(3)]
        out["spray_residual"] = max(spray_correspondence(nabla, phi, _int(params, "samples", 50, 1, 10000),
                                                         opt.seed) for phi in phis)
    if "csv" in params:
        with open(params["csv"], "w") as fh:
            fh.write(run.csv())
    return out


def task_identities(p: Problem, params: dict, opt: Options, ctx: dict) -> dict:
    nabla = p.connection
    chart = nabla.chart
    rng = random.Random(opt.seed)
    forms = spanning_forms(chart, _int(params, "max_degree", 3, 1, 4), rng)
    X = build_vector(chart, params["X"]) if "X" in params else random_vector(chart, rng).values()
    Y = build_vector(chart, params["Y"]) if "Y" in params else random_vector(chart, rng).values()
    out: dict[str, Any] = {"forms": len(forms)}
    try:
        out["commutators"] = commutator_identities(nabla, X, Y, forms)
    except TorsionError as exc:
        out["commutators"] = {"ok": None, "skipped": str(exc)}
    other = build_connection(chart, params.get("compare"))
    out["variation"] = variation_check(nabla, other, forms, [(X, Y)])
    gate_vector = build_vector(chart, params["gate_X"]) if "gate_X" in params else X
    lhs = nabla_s_lie_commutator_vanishes(nabla, gate_vector, forms)
    rhs = gradient_killing_complete_lift(nabla, gate_vector)
    out["gradient_gate"] = {"commutator_vanishes": lhs, "gradient_killing": rhs, "agrees": lhs == rhs}
    out["ok"] = bool(out["commutators"].get("ok") is not False and out["variation"]["ok"]
                     and out["gradient_gate"]["agrees"])
    return out


RUNNERS: dict[str, Callable] = {
    "kill": task_kill, "cohomology": task_cohomology, "affine": task_affine, "pw": task_pw,
    "pw-lift": task_pw_lift, "kunneth": task_kunneth, "circle": task_circle,
    "lieadm": task_lieadm, "geodesic": task_geodesic, "identities": task_identities,
}


# ---------------------------------------------------------------------------
# problem execution

def _lookup(result: dict, path: str):
    cur: Any = result
    for part in path.split("."):
        if isinstance(cur, list):
            cur = cur[int(part)]
        elif isinstance(cur, dict) and part in cur:
            cur = cur[part]
        else:
            raise KeyError(path)
    return cur


def compare(result: dict, expect: dict) -> list[dict]:
    """Mismatches between a result and the expected values (dotted paths allowed)."""
    bad = []
    for path, want in expect.items():
        try:
            got = _lookup(result, path)
        except (KeyError, IndexError, ValueError):
            bad.append({"path": path, "expected": want, "got": None, "reason": "missing"})
            continue
        if isinstance(want, dict) and set(want) <= {"lt", "gt", "le", "ge"}:
            ok = all({"lt": got < v, "gt": got > v, "le": got <= v, "ge": got >= v}[k]
                     for k, v in want.items())
        else:
            ok = got == want
        if not ok:
            bad.append({"path": path, "expected": want, "got": got})
    return bad


def error_object(kind: str, exc: BaseException) -> dict:
    out = {"type": kind, "exception": type(exc).__name__, "message": str(exc)}
    if exc.args and isinstance(exc.args[0], list):
        out["details"] = exc.args[0]
        out["message"] = "; ".join(f"{'.'.join(map(str, e.get('loc', ())))}: {e.get('msg')}"
                                   for e in exc.args[0])
    return out


def load_problem(data: Any) -> Problem:
    try:
        return Problem(ProblemFile.model_validate(data))
    except ValidationError as exc:
        raise SchemaError(exc.errors(include_url=False, include_context=False)) from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise SchemaError(str(exc)) from exc


def run(problem: Problem, opt: Options | None = None, only: str | None = None,
        extra: dict | None = None) -> tuple[dict, int]:
    """Execute tasks in order; returns (report, exit code).

    With ``only`` a single task of that type runs: the first one declared in the
    problem (or a default one) with ``extra`` merged into its parameters. Its
    expectations are kept only when ``extra`` overrides nothing.
    """
    opt = opt or Options()
    tasks = list(problem.source.tasks)
    if only is not None:
        first = next((t for t in tasks if t.task == only), TaskModel(task=only))
        params = {**first.params, **(extra or {})}
        expect = first.expect if not extra else {}
        tasks = [TaskModel(task=only, name=first.name, params=params, expect=expect)]
        extra = None
    entries = []
    code = EXIT_OK
    ctx: dict = {}
    for t in tasks:
        params = dict(t.params)
        if extra:
            params.update(extra)
        entry = {"task": t.task, "name": t.name or t.task}
        start = time.perf_counter()
        try:
            result = RUNNERS[t.task](problem, params, opt, ctx)
        except SchemaError as exc:
            entry.update(status="error", error=error_object("schema", exc))
            code = max(code, EXIT_SCHEMA)
        except Exception as exc:  # noqa: BLE001 - reported as a computation error
            entry.update(status="error", error=error_object("computation", exc))
            code = max(code, EXIT_COMPUTE)
        else:
            entry["result"] = result
            mismatches = compare(result, t.expect)
            if t.expect:
                entry["expect"] = t.expect
            if mismatches:
                entry.update(status="failed", mismatches=mismatches)
                code = max(code, EXIT_ASSERT)
            else:
                entry["status"] = "ok"
        if t.name:
            ctx[t.name] = entry.get("result")
        entry["seconds"] = round(time.perf_counter() - start, 4)
        entries.append(entry)
    report = {"problem": problem.source.name, "tags": problem.source.tags, "seed": opt.seed,
              "tasks": entries, "status": "ok" if code == EXIT_OK else "failed", "exit_code": code}
    return report, code


def strip_timings(report: Any) -> Any:
    """Copy of a report without timing fields, for determinism comparisons."""
    if isinstance(report, dict):
        return {k: strip_timings(v) for k, v in report.items() if k != "seconds"}
    if isinstance(report, list):
        return [strip_timings(v) for v in report]
    return report
