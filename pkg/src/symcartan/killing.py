"""Killing tensors, affine fields and symmetric cohomology by exact ansatz.

Every solver follows one recipe: enumerate an ansatz basis of bounded degree,
apply a linear operator to each basis element, and turn the images into an
exact homogeneous system over Q (one row per residual key and numerator
monomial after clearing denominators). Kernels and ranks of these systems give
the reported spaces and dimensions, which are always relative to the ansatz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations, combinations_with_replacement
from typing import Callable, Hashable, Mapping, Sequence

import numpy as np
from scipy import integrate
from scipy.stats import qmc

from . import expr as _expr
from .connection import (
    Connection,
    _vals,
    com2_sigma,
    riemann,
    sym_derivative_components,
)
from .linalg import LinearProblem, rank
from .ring import ANGLE, Chart, ScalarField, generator_values
from .samples import monomials
from .symtensor import SymField, exponents

Image = Mapping[Hashable, ScalarField]

DEFAULT_CAP = 10


# ---------------------------------------------------------------------------
# ansatz and assembly

@dataclass(frozen=True)
class AnsatzSpec:
    """Coefficient family: ring monomials of total degree ≤ ``degree``.

    For angle coordinates the degree counts cos/sin generators, so the family
    is the trigonometric polynomials of that degree. ``bounds`` optionally caps
    the degree in individual coordinates (by name).
    """

    tensor_degree: int
    degree: int
    bounds: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        if self.degree < 0 or self.tensor_degree < 0:
            raise ValueError("ansatz degrees must be nonnegative")

    def coefficients(self, chart: Chart) -> list[ScalarField]:
        mons = monomials(chart, self.degree)
        if not self.bounds:
            return mons
        caps = [(chart.slots[chart.index(name)], b) for name, b in self.bounds]
        out = []
        for m in mons:
            (mon,) = m.num.monoms()
            if all(sum(mon[s] for s in slot) <= b for slot, b in caps):
                out.append(m)
        return out

    def basis(self, chart: Chart) -> list[SymField]:
        coeffs = self.coefficients(chart)
        return [SymField._wrap(chart, self.tensor_degree, {e: c})
                for e in exponents(chart.dim, self.tensor_degree) for c in coeffs]

    def to_json(self) -> dict:
        out = {"tensor_degree": self.tensor_degree, "degree": self.degree}
        if self.bounds:
            out["bounds"] = dict(self.bounds)
        return out


def _lcm(polys):
    return reduce(lambda a, b: a.lcm(b), polys)


def assemble(images: Sequence[Image], col_labels: Sequence[Hashable] | None = None) -> LinearProblem:
    """Exact system Σ_c x_c·images[c] = 0.

    For each key the images are brought to a common (sin-free) denominator;
    each numerator monomial then gives one row. Monomials with sin-degree ≤ 1
    are linearly independent in the ring, so the rows are exact equivalents.
    """
    by_key: dict[Hashable, list[tuple[int, ScalarField]]] = {}
    for c, img in enumerate(images):
        for key, value in img.items():
            if not value.is_zero:
                by_key.setdefault(key, []).append((c, value))
    rows, labels = [], []
    for key in sorted(by_key, key=repr):
        entries = by_key[key]
        L = _lcm([v.den for _, v in entries])
        acc: dict[tuple, dict[int, object]] = {}
        for c, v in entries:
            num = v.num if v.den == L else v.num * L.exquo(v.den)
            for mon, coef in num.items():
                row = acc.setdefault(mon, {})
                row[c] = row.get(c, 0) + coef
        for mon in sorted(acc):
            row = {c: q for c, q in acc[mon].items() if q}
            if row:
                rows.append(row)
                labels.append((key, mon))
    if col_labels is None:
        col_labels = list(range(len(images)))
    return LinearProblem(rows, list(col_labels), labels)


def _sym_image(phi: SymField) -> dict:
    return dict(phi.fiber)


def combine(fields: Sequence, coeffs: Mapping[int, Fraction]):
    """Σ coeffs[c]·fields[c] (SymFields)."""
    out = None
    for c, q in sorted(coeffs.items()):
        term = fields[c] * q
        out = term if out is None else out + term
    return out


# ---------------------------------------------------------------------------
# Killing tensors

@dataclass
class KillingResult:
    basis: list[SymField]
    problem: LinearProblem
    ansatz: AnsatzSpec
    kernel: list[dict[int, Fraction]] = field(repr=False, default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)


def killing_solve(nabla: Connection, r: int, ansatz: AnsatzSpec | None = None,
                  verify: bool = True) -> KillingResult:
    """Basis of Killʳ within the ansatz (echelon-normalized), plus the assembled system."""
    ansatz = ansatz or AnsatzSpec(r, r + 2)
    if ansatz.tensor_degree != r:
        raise ValueError("ansatz tensor degree does not match r")
    cols = ansatz.basis(nabla.chart)
    if not cols:
        raise ValueError("empty ansatz")
    images = [_sym_image(nabla.sym_derivative(c)) for c in cols]
    problem = assemble(images, [_col_label(c) for c in cols])
    kernel = problem.kernel()
    basis = [combine(cols, v) for v in kernel]
    if verify:
        for K in basis:
            if not sym_derivative_components(nabla, K).is_zero:
                raise AssertionError("Killing basis element fails the component-path check")
    return KillingResult(basis, problem, ansatz, kernel)


def _col_label(phi: SymField) -> str:
    ((e, c),) = phi.fiber.items()
    return f"{c}*v^{e}"


# ---------------------------------------------------------------------------
# cohomology

@dataclass
class CohomologyReport:
    r: int
    dim_kill: int
    dim_exact_in_kill: int
    basis: list[SymField]
    representatives: list[SymField]
    ansatz: dict
    stable: bool
    history: list[dict]
    problem: LinearProblem = field(repr=False, default=None)

    @property
    def dim_H(self) -> int:
        return self.dim_kill - self.dim_exact_in_kill

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "dim_kill": self.dim_kill,
            "dim_exact_in_kill": self.dim_exact_in_kill,
            "dim_H": self.dim_H,
            "ansatz": self.ansatz,
            "ansatz_relative": True,
            "stable": self.stable,
            "history": self.history,
            "kill_basis": [b.to_json() for b in self.basis],
            "representatives": [b.to_json() for b in self.representatives],
            "matrix": self.problem.summary() if self.problem is not None else None,
        }


def _cohomology_once(nabla: Connection, r: int, degree: int, potential_degree: int):
    kill = killing_solve(nabla, r, AnsatzSpec(r, degree))
    if r == 0:
        return kill, [], 0, []
    pots = AnsatzSpec(r - 1, potential_degree).basis(nabla.chart)
    exact = [nabla.sym_derivative(p) for p in pots]
    exact = [e for e in exact if not e.is_zero]
    A = [_sym_image(k) for k in kill.basis]
    B = [_sym_image(e) for e in exact]
    joint = assemble(A + B)
    nA, nB = len(A), len(B)
    rows = joint.rows
    rank_A = nA  # the Killing basis is linearly independent
    rank_B = rank([{c - nA: v for c, v in row.items() if c >= nA} for row in rows])
    rank_AB = joint.rank()
    dim_exact = rank_A + rank_B - rank_AB
    # representatives: Killing basis elements that raise the rank over Im ∇ˢ
    def cols_rank(cols):
        return rank([{c: v for c, v in row.items() if c in cols} for row in rows])

    chosen = set(range(nA, nA + nB))
    current = rank_B
    reps = []
    for idx in range(nA):
        rk = cols_rank(chosen | {idx})
        if rk > current:
            chosen.add(idx)
            current = rk
            reps.append(kill.basis[idx])
    return kill, reps, dim_exact, exact


def cohomology(nabla: Connection, r: int, degree: int | None = None,
               potential_degree: int | None = None, escalate: bool = True,
               cap: int = DEFAULT_CAP) -> CohomologyReport:
    """Hʳ = Killʳ/(Killʳ ∩ Im ∇ˢ) within the ansatz.

    Default Killing degree D = r + 2 and potential degree D + 1; with
    ``escalate`` both are raised by 2 until two consecutive runs agree (the
    stability flag) or D exceeds ``cap``.
    """
    D = r + 2 if degree is None else degree
    Dp = D + 1 if potential_degree is None else potential_degree
    history = []
    prev = None
    while True:
        kill, reps, dim_exact, _ = _cohomology_once(nabla, r, D, Dp)
        dims = (kill.dim, dim_exact)
        history.append({"degree": D, "potential_degree": Dp, "dim_kill": dims[0],
                        "dim_exact_in_kill": dims[1]})
        stable = prev == dims
        if not escalate or stable or D + 2 > cap:
            break
        prev = dims
        D, Dp = D + 2, Dp + 2
    return CohomologyReport(r, kill.dim, dim_exact, kill.basis, reps,
                            {"degree": D, "potential_degree": Dp}, stable, history, kill.problem)


def killing_dimension(nabla: Connection, r: int, degree: int | None = None, cap: int = DEFAULT_CAP):
    """(dim, stable, degree) of Killʳ with the same escalation rule as ``cohomology``."""
    D = r + 2 if degree is None else degree
    prev = None
    while True:
        res = killing_solve(nabla, r, AnsatzSpec(r, D))
        if prev == res.dim or D + 2 > cap:
            return res, prev == res.dim
        prev = res.dim
        D += 2


# ---------------------------------------------------------------------------
# numeric verification of closed-form tensors

@dataclass
class VerifyReport:
    ok: bool
    max_residual: float
    samples: int
    resampled: int

    def to_json(self) -> dict:
        return {"ok": self.ok, "max_residual": self.max_residual, "samples": self.samples,
                "resampled": self.resampled}


def sample_points(chart: Chart, count: int, seed: int = 0, box: float = 1.0):
    """Halton points in [−box, box] per affine coordinate and [0, 2π) per angle."""
    sampler = qmc.Halton(d=chart.dim, scramble=seed != 0, seed=seed or None)
    while True:
        for u in sampler.random(max(count, 16)):
            yield [2 * math.pi * t if c.kind == ANGLE else box * (2 * t - 1)
                   for t, c in zip(u, chart.coords)]


def _parse_components(chart: Chart, r: int, components: Mapping[str, str]):
    from .symtensor import parse_index

    out = {}
    for key, text in components.items():
        idx = tuple(sorted(parse_index(chart, key, r)))
        tree = _expr.parse(text, numeric=True)
        unknown = _expr.variables(tree) - set(chart.names)
        if unknown:
            raise ValueError(f"unknown identifiers {sorted(unknown)} in {text!r}")
        out[idx] = tree
    return out


def _eval_jet(trees: Mapping[tuple, object], chart: Chart, point: Sequence[float]):
    n = chart.dim
    env = {name: _expr.Dual.variable(v, i, n) for i, (name, v) in enumerate(zip(chart.names, point))}
    jet = {}
    for idx, tree in trees.items():
        val = _expr.evaluate(tree, env)
        if not isinstance(val, _expr.Dual):
            val = _expr.Dual.const(float(val), n)
        jet[idx] = val
    return jet


def numeric_sym_derivative(nabla: Connection, trees, r: int, point: Sequence[float]) -> dict:
    """Components of ∇ˢK at a point for K given by expression trees (dual-number AD)."""
    chart = nabla.chart
    n = chart.dim
    jet = _eval_jet(trees, chart, point)
    gens = generator_values(chart, point)
    G = [[[nabla.gamma[k][i][j].eval_generators(gens) for j in range(n)] for i in range(n)]
         for k in range(n)]

    def comp(J):
        d = jet.get(tuple(sorted(J)))
        return d

    out = {}
    for I in combinations_with_replacement(range(n), r + 1):
        acc = 0.0
        for a in range(r + 1):
            k = I[a]
            J = I[:a] + I[a + 1:]
            d = comp(J)
            if d is not None:
                acc += d.grad[k]
            for b in range(r):
                for m in range(n):
                    g = G[m][k][J[b]]
                    if g:
                        e = comp(J[:b] + (m,) + J[b + 1:])
                        if e is not None:
                            acc -= g * e.val
        out[I] = acc
    return out


def killing_verify(nabla: Connection, r: int, components: Mapping[str, str], samples: int = 100,
                   tol: float = 1e-9, seed: int = 0, box: float = 1.0) -> VerifyReport:
    """Pointwise residual of ∇ˢK at quasi-random points; poles are skipped and resampled."""
    trees = _parse_components(nabla.chart, r, components)
    worst = 0.0
    taken = skipped = 0
    for point in sample_points(nabla.chart, samples, seed, box):
        if taken >= samples:
            break
        try:
            res = numeric_sym_derivative(nabla, trees, r, point)
        except (_expr.PoleError, ZeroDivisionError, ValueError, OverflowError):
            skipped += 1
            if skipped > 10 * samples:
                raise
            continue
        taken += 1
        worst = max(worst, max((abs(v) for v in res.values()), default=0.0))
    return VerifyReport(worst < tol, worst, taken, skipped)


@dataclass
class ClosedFormH1:
    """H¹ from a numerically verified Killing basis on a star-shaped affine chart."""

    dim_kill: int
    spans_kill: bool
    dim_H: int
    verified: bool


def closed_form_h1(nabla: Connection, basis: Sequence[Mapping[str, str]], samples: int = 100,
                   tol: float = 1e-9, seed: int = 0) -> ClosedFormH1:
    """Dimension count for Killing 1-forms known in closed form.

    Each form is verified Killing numerically. The rank of the sampled values is
    dim span; dim Kill¹ ≤ n(n+1)/2, so a basis of that size spans Kill¹. On a
    box in ℝⁿ a 1-form is exact iff closed, so dim(Kill¹ ∩ Im ∇ˢ) is the nullity
    of the curl map on the span and dim H¹ is the rank of the sampled curls.
    """
    chart = nabla.chart
    if any(c.kind == ANGLE for c in chart.coords):
        raise ValueError("closed/exact equivalence is used on affine charts only")
    n = chart.dim
    verified = all(killing_verify(nabla, 1, b, samples, tol, seed).ok for b in basis)
    parsed = [_parse_components(chart, 1, b) for b in basis]
    m = len(basis)
    values, curls = [], []
    count = 0
    zero = _expr.Dual.const(0.0, n)
    for point in sample_points(chart, samples, seed):
        if count >= samples:
            break
        try:
            jets = [_eval_jet(p, chart, point) for p in parsed]
        except (_expr.PoleError, ZeroDivisionError):
            continue
        count += 1
        a = [[jets[b].get((i,), zero) for i in range(n)] for b in range(m)]
        values.append([[a[b][i].val for i in range(n)] for b in range(m)])
        curls.append([[a[b][j].grad[i] - a[b][i].grad[j] for i, j in combinations(range(n), 2)]
                      for b in range(m)])
    # row b: the sampled values (resp. curls) of the b-th form
    V = np.array([np.concatenate([v[b] for v in values]) for b in range(m)])
    C = np.array([np.concatenate([c[b] for c in curls]) for b in range(m)])
    dim_kill = _numeric_rank(V)
    dim_H = _numeric_rank(C) if C.size else 0
    return ClosedFormH1(dim_kill, dim_kill == n * (n + 1) // 2, dim_H, verified)


def _numeric_rank(M: np.ndarray, rel: float = 1e-9) -> int:
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rel * max(1.0, s[0])))


# ---------------------------------------------------------------------------
# the circle

@dataclass
class CircleResult:
    integral: float
    exact: bool
    dim_kill: int
    dim_H: int
    is_levi_civita: bool

    def to_json(self) -> dict:
        return {"integral_over_2pi": self.integral, "exact": self.exact, "dim_kill": self.dim_kill,
                "dim_H": self.dim_H, "is_levi_civita": self.is_levi_civita}


def _trig_mean(f: ScalarField) -> Fraction:
    """(1/2π)∫₀^{2π} f dθ for a trig polynomial in cos θ, sin θ (sin-degree ≤ 1)."""
    total = Fraction(0)
    for (a, b), coef in f.num.items():
        if b or a % 2:
            continue
        total += Fraction(int(coef.numerator), int(coef.denominator)) * Fraction(math.comb(a, a // 2), 2 ** a)
    return total


def circle_mean(f: ScalarField) -> tuple[float, bool]:
    """Mean of f over the circle: exact for trig polynomials, adaptive quadrature otherwise."""
    chart = f.chart
    if chart.dim != 1 or chart.coords[0].kind != ANGLE:
        raise ValueError("circle_classify needs a one-dimensional angle chart")
    if f.is_polynomial:
        return float(_trig_mean(f)), True
    val, _ = integrate.quad(lambda t: f.eval_generators([math.cos(t), math.sin(t)]), 0.0, 2 * math.pi,
                            epsabs=1e-13, epsrel=1e-13, limit=200)
    return val / (2 * math.pi), False


def circle_classify(f: ScalarField, tol: float = 1e-10) -> CircleResult:
    """The connection ∇_{∂θ}∂θ = f∂θ: Kill¹ = H¹ ≅ ℝ and Levi-Civita iff ∫f dθ = 0."""
    mean, exact = circle_mean(f)
    vanishes = mean == 0 if exact else abs(mean) < tol
    d = 1 if vanishes else 0
    return CircleResult(mean * 2 * math.pi, exact, d, d, vanishes)


def circle_connection(chart: Chart, f) -> Connection:
    return Connection.from_entries(chart, {(0, 0, 0): f})


# ---------------------------------------------------------------------------
# vector fields and bivectors

def _vector_columns(chart: Chart, degree: int):
    coeffs = monomials(chart, degree)
    n = chart.dim
    cols = []
    for m in range(n):
        for c in coeffs:
            cols.append([c if a == m else chart.zero for a in range(n)])
    return cols


def _combine_vectors(cols, coeffs):
    n = len(cols[0])
    out = [cols[0][0].chart.zero] * n
    for c, q in sorted(coeffs.items()):
        out = [o + v * q for o, v in zip(out, cols[c])]
    return out


def _affine_image(nabla: Connection, X) -> dict:
    sigma = com2_sigma(nabla, X)
    return {(m,) + e: v for m, comp in enumerate(sigma.comps) for e, v in comp.fiber.items()}


def _parallel_image(nabla: Connection, X) -> dict:
    from .connection import sym_iota_curvature

    out = {}
    DX = nabla.cov_matrix(X)
    for m, row in enumerate(DX):
        for j, v in enumerate(row):
            if not v.is_zero:
                out[("D", m, j)] = v
    s = sym_iota_curvature(nabla, X)
    for m, comp in enumerate(s.comps):
        for e, v in comp.fiber.items():
            out[("R", m) + e] = v
    return out


@dataclass
class FieldSpace:
    basis: list
    problem: LinearProblem
    degree: int
    stable: bool

    @property
    def dim(self) -> int:
        return len(self.basis)


def _solve_vectors(nabla: Connection, degree: int | None, image: Callable, cap: int,
                   escalate: bool = True) -> FieldSpace:
    nabla.require_torsion_free()
    D = 2 if degree is None else degree
    prev = None
    while True:
        cols = _vector_columns(nabla.chart, D)
        problem = assemble([image(nabla, c) for c in cols])
        basis = [_combine_vectors(cols, v) for v in problem.kernel()]
        stable = prev == len(basis)
        if not escalate or stable or D + 2 > cap:
            return FieldSpace(basis, problem, D, stable)
        prev = len(basis)
        D += 2


def affine_fields(nabla: Connection, degree: int | None = None, cap: int = DEFAULT_CAP,
                  escalate: bool = True) -> FieldSpace:
    """aff_∇: 2 sym ι_X R + RˢX = 0."""
    return _solve_vectors(nabla, degree, _affine_image, cap, escalate)


def parallel_fields(nabla: Connection, degree: int | None = None, cap: int = DEFAULT_CAP,
                    escalate: bool = True) -> FieldSpace:
    """aff⁰_∇: ∇X = 0 and sym ι_X R = 0."""
    return _solve_vectors(nabla, degree, _parallel_image, cap, escalate)


def bivector_conditions(nabla: Connection, pi: Sequence[Sequence[ScalarField]]) -> dict:
    """Residuals of ∇π = 0 and of the curvature condition on π.

    ∇π: (∇_kπ)^{ij} = ∂_kπ^{ij} + Γ^i_{kl}π^{lj} + Γ^j_{kl}π^{il}. The curvature
    condition is the p_l p_m coefficient
    Σ_k π^{mk}(R^l_{ijk} + R^l_{jik}) + π^{lk}(R^m_{ijk} + R^m_{jik}) with the
    argument-first layout R^l_{ijk} = dx^l(R(∂_j,∂_k)∂_i).
    """
    n = nabla.dim
    G = nabla.gamma
    zero = nabla.chart.zero
    out = {}
    for k in range(n):
        for i in range(n):
            for j in range(i + 1, n):
                acc = pi[i][j].partial(k)
                for l in range(n):
                    acc = acc + G[i][k][l] * pi[l][j] + G[j][k][l] * pi[i][l]
                if not acc.is_zero:
                    out[("D", k, i, j)] = acc
    R = riemann(nabla)
    if R.is_zero:
        return out
    af = R.argument_first
    for i in range(n):
        for j in range(i, n):
            for l in range(n):
                for m in range(l, n):
                    acc = zero
                    for k in range(n):
                        acc = acc + pi[m][k] * (af(l, i, j, k) + af(l, j, i, k)) \
                            + pi[l][k] * (af(m, i, j, k) + af(m, j, i, k))
                    if not acc.is_zero:
                        out[("R", i, j, l, m)] = acc
    return out


def parallel_bivectors(nabla: Connection, degree: int | None = None, cap: int = DEFAULT_CAP,
                       escalate: bool = True) -> FieldSpace:
    """X²_∇: parallel bivectors satisfying the curvature condition."""
    nabla.require_torsion_free()
    chart = nabla.chart
    n = chart.dim
    D = 2 if degree is None else degree
    prev = None
    while True:
        cols = []
        for i, j in combinations(range(n), 2):
            for c in monomials(chart, D):
                M = [[chart.zero] * n for _ in range(n)]
                M[i][j], M[j][i] = c, -c
                cols.append(M)
        if cols:
            problem = assemble([bivector_conditions(nabla, M) for M in cols])
            basis = []
            for v in problem.kernel():
                M = [[chart.zero] * n for _ in range(n)]
                for c, q in v.items():
                    M = [[a + b * q for a, b in zip(ra, rb)] for ra, rb in zip(M, cols[c])]
                basis.append(M)
        else:
            problem, basis = LinearProblem([], []), []
        stable = prev == len(basis)
        if not escalate or stable or D + 2 > cap:
            return FieldSpace(basis, problem, D, stable)
        prev = len(basis)
        D += 2


@dataclass
class PWLift:
    dim_bivectors: int
    dim_aff: int
    dim_aff0: int
    dim_H1: int
    stable: bool

    @property
    def dim_aff_quotient(self) -> int:
        return self.dim_aff - self.dim_aff0

    @property
    def total(self) -> int:
        return self.dim_bivectors + self.dim_aff_quotient + self.dim_H1

    def to_json(self) -> dict:
        return {"dim_bivectors": self.dim_bivectors, "dim_aff": self.dim_aff,
                "dim_aff0": self.dim_aff0, "dim_aff_quotient": self.dim_aff_quotient,
                "dim_H1": self.dim_H1, "total": self.total, "stable": self.stable}


def pw_cohomology_lift(nabla: Connection, degree: int | None = None,
                       cap: int = DEFAULT_CAP) -> PWLift:
    """Dimensions of X²_∇ ⊕ aff/aff⁰ ⊕ H¹_∇, the first cohomology of the lifted connection."""
    biv = parallel_bivectors(nabla, degree, cap)
    aff = affine_fields(nabla, degree, cap)
    aff0 = parallel_fields(nabla, degree, cap)
    h1 = cohomology(nabla, 1, degree, cap=cap)
    return PWLift(biv.dim, aff.dim, aff0.dim, h1.dim_H,
                  biv.stable and aff.stable and aff0.stable and h1.stable)


# ---------------------------------------------------------------------------
# products

def embed(f: ScalarField, target: Chart, offset: int) -> ScalarField:
    """Pull back along the projection onto a factor whose generators start at ``offset``."""
    R = target.ring
    k = f.chart.ring.ngens
    pre, post = (0,) * offset, (0,) * (R.ngens - offset - k)
    num = R({pre + m + post: c for m, c in f.num.items()})
    den = R({pre + m + post: c for m, c in f.den.items()})
    return ScalarField._make(target, num, den)


def embed_form(phi: SymField, target: Chart, gen_offset: int, coord_offset: int) -> SymField:
    n = target.dim
    fiber = {}
    for e, c in phi.fiber.items():
        ee = (0,) * coord_offset + e + (0,) * (n - coord_offset - len(e))
        fiber[ee] = embed(c, target, gen_offset)
    return SymField._wrap(target, phi.degree, fiber)


def product_connection(n1: Connection, n2: Connection) -> Connection:
    chart = n1.chart.product(n2.chart)
    a, b = n1.dim, n2.dim
    g1 = n1.chart.ring.ngens
    N = a + b
    gamma = [[[chart.zero] * N for _ in range(N)] for _ in range(N)]
    for k in range(a):
        for i in range(a):
            for j in range(a):
                gamma[k][i][j] = embed(n1.gamma[k][i][j], chart, 0)
    for k in range(b):
        for i in range(b):
            for j in range(b):
                gamma[a + k][a + i][a + j] = embed(n2.gamma[k][i][j], chart, g1)
    return Connection(chart, gamma)


@dataclass
class KunnethResult:
    dim: int
    basis: list[SymField]
    members_killing: bool
    full: CohomologyReport | None

    def to_json(self) -> dict:
        return {"kunneth_dim": self.dim, "basis": [b.to_json() for b in self.basis],
                "members_killing": self.members_killing,
                "full_dim_H": None if self.full is None else self.full.dim_H,
                "full": None if self.full is None else self.full.to_json()}


def _h_reps(nabla: Connection, r: int, degree: int | None, cap: int) -> list[SymField]:
    if r == 0:
        return [SymField.scalar(nabla.chart.one)]  # H⁰: constants on a connected chart
    return cohomology(nabla, r, degree, cap=cap).representatives


def kunneth_subspace(n1: Connection, n2: Connection, r: int, degree: int | None = None,
                     cap: int = DEFAULT_CAP, full: bool = True) -> KunnethResult:
    """Σ_{i+j=r} Hⁱ(M₁)⊗Hʲ(M₂) mapped into Hʳ(M₁×M₂) by pullback products."""
    prod = product_connection(n1, n2)
    chart = prod.chart
    g1 = n1.chart.ring.ngens
    basis = []
    for i in range(r + 1):
        left = _h_reps(n1, i, degree, cap)
        right = _h_reps(n2, r - i, degree, cap)
        for a in left:
            for b in right:
                pa = embed_form(a, chart, 0, 0)
                pb = embed_form(b, chart, g1, n1.dim)
                basis.append(pa.odot(pb))
    members = all(prod.sym_derivative(b).is_zero for b in basis)
    report = cohomology(prod, r, degree, cap=cap) if full else None
    return KunnethResult(len(basis), basis, members, report)
