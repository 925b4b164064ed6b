"""Degree-1 derivations D = ∇ˢ_A + ιˢ_σ and the fact that none but D = 0 squares to zero.

D∘D = 0 is quadratic in (A, σ), so the check is staged. Each stage uses an
exact identity for D∘D on a test form to turn the quadratic condition into a
linear one, then solves that linear system exactly over the ansatz:

* D(Df²) − 2f·D(Df) = 2 Df⊙Df, and a square of a fiber polynomial vanishes
  only if the polynomial does, so D∘D = 0 forces Df = 0 (linear in A).
* With A = 0, (D(DC))~ = ½C(σ(σ(v,v),v),v) + ¼C(σ(v,v),σ(v,v)); the first
  term is a combination of the residuals (D(Dα))~ = ½α(σ(σ(v,v),v)), so for
  the Euclidean C the vanishing of D∘D forces Σ_m (σ̃ᵐ)² = 0, that is
  Dα = 0 for every 1-form α (linear in σ).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .connection import Connection
from .killing import assemble
from .linalg import LinearProblem
from .ring import Chart, ScalarField
from .samples import monomials, random_field
from .symtensor import SymField, VecSymField, exponents, fiber_dv, general_derivation


def _zero_vec(chart: Chart, degree: int) -> VecSymField:
    return VecSymField.zero(chart, degree)


def a_columns(chart: Chart, degree: int) -> list[VecSymField]:
    """Endomorphisms with a single monomial entry A^i_j."""
    n = chart.dim
    cols = []
    for i in range(n):
        for j in range(n):
            for c in monomials(chart, degree):
                M = [[chart.zero] * n for _ in range(n)]
                M[i][j] = c
                cols.append(VecSymField.endomorphism(chart, M))
    return cols


def sigma_columns(chart: Chart, degree: int) -> list[VecSymField]:
    """σ ∈ Υ²(M,TM) with a single monomial coefficient in one component."""
    n = chart.dim
    cols = []
    for m in range(n):
        for e in exponents(n, 2):
            for c in monomials(chart, degree):
                comps = [SymField.zero(chart, 2) for _ in range(n)]
                comps[m] = SymField._wrap(chart, 2, {e: c})
                cols.append(VecSymField(chart, 2, comps))
    return cols


def probe_functions(chart: Chart, rng: random.Random, extra: int = 2) -> list[ScalarField]:
    return [chart.coord(i) for i in range(chart.dim)] + \
        [random_field(chart, rng, 2) for _ in range(extra)]


def euclidean_metric(chart: Chart) -> SymField:
    n = chart.dim
    return SymField.from_components(chart, 2, {(i, i): 1 for i in range(n)})


def residual_identities(chart: Chart, A: VecSymField, sigma: VecSymField, aux: Connection,
                        f: ScalarField) -> dict[str, bool]:
    """The three identities behind the staged linearization, checked exactly."""
    n = chart.dim
    D = general_derivation(A, sigma, aux)
    F = SymField.scalar(f)
    Df = D(F)
    out = {"square": D(D(F.odot(F))) - D(D(F)) * (2 * f) == Df.odot(Df) * 2}
    D0 = general_derivation(_zero_vec(chart, 1), sigma, aux)
    sv = list(sigma.comps)  # σ̃ᵐ
    # Σ_k σ̃ᵏ ∂_{v_k} σ̃ᵐ is the fiber polynomial ½σᵐ(σ(v,v), v)
    nested = [sum((comp_k_dv(sv, k, m) for k in range(n)), SymField.zero(chart, 3)) for m in range(n)]
    ok_alpha = True
    for m in range(n):
        alpha = SymField.dx(chart, m)
        ok_alpha &= D0(D0(alpha)) == nested[m]
    out["one_forms"] = ok_alpha
    C = euclidean_metric(chart)
    lhs = D0(D0(C))
    rhs = SymField.zero(chart, 4)
    for m in range(n):
        rhs = rhs + nested[m].odot(SymField.dx(chart, m)) + sv[m].odot(sv[m])
    out["metric"] = lhs == rhs
    return out


def comp_k_dv(sv, k: int, m: int) -> SymField:
    """σ̃ᵏ ⊙ ∂_{v_k} σ̃ᵐ."""
    d = fiber_dv(sv[m].fiber, k)
    chart = sv[m].chart
    return sv[k].odot(SymField._wrap(chart, 1, d)) if d else SymField.zero(chart, 3)


@dataclass
class SquareZeroReport:
    dim: int
    degree: int
    stage_a: LinearProblem
    stage_sigma: LinearProblem
    a_kernel: int
    sigma_kernel: int
    identities_ok: bool

    @property
    def only_zero(self) -> bool:
        return self.a_kernel == 0 and self.sigma_kernel == 0 and self.identities_ok

    def to_json(self) -> dict:
        return {"dim": self.dim, "degree": self.degree, "a_kernel": self.a_kernel,
                "sigma_kernel": self.sigma_kernel, "identities_ok": self.identities_ok,
                "stage_a": self.stage_a.summary(), "stage_sigma": self.stage_sigma.summary(),
                "only_zero": self.only_zero}


def square_zero_derivations(chart: Chart, degree: int = 2, seed: int = 0, trials: int = 3,
                            aux: Connection | None = None) -> SquareZeroReport:
    """Exact staged kernel computation over coefficients of degree ≤ ``degree``."""
    rng = random.Random(seed)
    aux = aux or Connection.flat(chart)
    zero1, zero2 = _zero_vec(chart, 1), _zero_vec(chart, 2)
    fs = probe_functions(chart, rng)
    # stage 1: Df = 0 on the test functions (σ does not act on scalars)
    acols = a_columns(chart, degree)
    images = []
    for A in acols:
        D = general_derivation(A, zero2, aux)
        img = {}
        for t, f in enumerate(fs):
            for e, v in D(SymField.scalar(f)).fiber.items():
                img[(t, e)] = v
        images.append(img)
    stage_a = assemble(images)
    # stage 2: A = 0 and Dα = 0 on dx¹…dxⁿ
    scols = sigma_columns(chart, degree)
    images = []
    for s in scols:
        D = general_derivation(zero1, s, aux)
        img = {}
        for m in range(chart.dim):
            for e, v in D(SymField.dx(chart, m)).fiber.items():
                img[(m, e)] = v
        images.append(img)
    stage_sigma = assemble(images)
    ok = True
    for _ in range(trials):
        A = VecSymField.endomorphism(chart, [[random_field(chart, rng, degree) for _ in range(chart.dim)]
                                             for _ in range(chart.dim)])
        s = VecSymField(chart, 2, [SymField(chart, 2, {e: random_field(chart, rng, degree)
                                                       for e in exponents(chart.dim, 2)})
                                   for _ in range(chart.dim)])
        ok &= all(residual_identities(chart, A, s, aux, random_field(chart, rng, 2)).values())
    return SquareZeroReport(chart.dim, degree, stage_a, stage_sigma, stage_a.nullity(),
                            stage_sigma.nullity(), ok)
