"""The doubled chart T*U, lifts from the base, the Patterson-Walker metric and
the lifted connections.

Total coordinates are the base coordinates followed by one affine fiber
coordinate ``p_<name>`` per base coordinate. Vector fields on the total chart
are plain lists of 2n ScalarFields: entries ``0..n-1`` along ∂_{x^i}, entries
``n..2n-1`` along ∂_{p_i}.

Bivector convention: a bivector is given by its antisymmetric matrix
π^{ij} = π(dx^i, dx^j); π(α) denotes the vector π(·, α), i.e. π(α)^i = π^{ij}α_j.
With this reading the coordinate lift πʰ = p_i π^{ij} ∂ʰ_{x^j} satisfies
g_∇(πʰ, αᵛ) = (π(α))ᵛ.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .connection import (
    Connection,
    TorsionError,
    Vec,
    _vals,
    covariant_derivative,
    lie_bracket,
    matrix_inverse,
    metric_matrix,
    riemann,
    sym_bracket,
    sym_iota_curvature,
    torsion_free_part,
)
from .ring import AFFINE, Chart, Coord, ScalarField
from .symtensor import SymField, VecSymField, exponent_of, fiber_accumulate

FIBER_PREFIX = "p_"


class CotangentChart:
    """Natural coordinates (x^i, p_i) on T*U over a base chart."""

    def __init__(self, base: Chart):
        names = set(base.names)
        fiber = [Coord(FIBER_PREFIX + c.name, AFFINE) for c in base.coords]
        for c in fiber:
            if c.name in names:
                raise ValueError(f"fiber coordinate {c.name!r} collides with a base coordinate")
        self.base = base
        self.total = Chart(base.coords + tuple(fiber))

    def __eq__(self, other) -> bool:
        return isinstance(other, CotangentChart) and other.base == self.base

    def __hash__(self):
        return hash(("T*", self.base))

    @property
    def n(self) -> int:
        return self.base.dim

    @staticmethod
    def base_name(total_name: str) -> str:
        if not total_name.startswith(FIBER_PREFIX):
            raise ValueError(f"{total_name!r} is not a fiber coordinate")
        return total_name[len(FIBER_PREFIX):]

    def p(self, i: int) -> ScalarField:
        return self.total.coord(self.n + i)

    def pullback(self, f: ScalarField) -> ScalarField:
        """pr*f: base generators sit first in the total ring, so monomials are padded."""
        if f.chart != self.base:
            raise ValueError("chart mismatch")
        R = self.total.ring
        pad = (0,) * (R.ngens - f.chart.ring.ngens)
        num = R({m + pad: c for m, c in f.num.items()})
        den = R({m + pad: c for m, c in f.den.items()})
        # grlex leading terms and gcds are unchanged by unused generators
        return ScalarField._raw(self.total, num, den)

    def pull_vec(self, X) -> Vec:
        return [self.pullback(v) for v in _vals(X)]

    def zero_vec(self) -> Vec:
        return [self.total.zero] * (2 * self.n)


# ---------------------------------------------------------------------------
# lifts

def lift_vertical_1form(T: CotangentChart, alpha: SymField) -> Vec:
    """αᵛ = α_j ∂_{p_j}."""
    n = T.n
    return [T.total.zero] * n + [T.pullback(alpha.component((j,))) for j in range(n)]


def lift_horizontal_vec(T: CotangentChart, nabla: Connection, X) -> Vec:
    """Xʰ = Xⁱ(∂_{xⁱ} + p_k Γᵏᵢⱼ ∂_{p_j})."""
    x = T.pull_vec(X)
    return _horizontal(T, nabla, x)


def _horizontal(T: CotangentChart, nabla: Connection, x: Vec) -> Vec:
    # x are coefficients already on the total chart (possibly p-dependent)
    n = T.n
    out = list(x) + [T.total.zero] * n
    for j in range(n):
        acc = T.total.zero
        for i in range(n):
            if x[i].is_zero:
                continue
            for k in range(n):
                g = nabla.gamma[k][i][j]
                if not g.is_zero:
                    acc = acc + x[i] * T.p(k) * T.pullback(g)
        out[n + j] = acc
    return out


def lift_vertical_vec(T: CotangentChart, X) -> ScalarField:
    """Xᵛ = p_i Xⁱ."""
    return sum((T.p(i) * v for i, v in enumerate(T.pull_vec(X))), T.total.zero)


def lift_complete(T: CotangentChart, X) -> Vec:
    """Xᶜ = Xⁱ∂_{xⁱ} − p_i ∂_jXⁱ ∂_{p_j}."""
    n = T.n
    x = _vals(X)
    out = [T.pullback(v) for v in x] + [T.total.zero] * n
    for j in range(n):
        out[n + j] = -sum((T.p(i) * T.pullback(x[i].partial(j)) for i in range(n)), T.total.zero)
    return out


def lift_endo(T: CotangentChart, A) -> Vec:
    """A^υ = p_i Aⁱ_j ∂_{p_j} for A given as a matrix A[i][j] = dx^i(A∂_j) or a VecSymField."""
    M = A.matrix() if isinstance(A, VecSymField) else A
    n = T.n
    out = [T.total.zero] * (2 * n)
    for j in range(n):
        out[n + j] = sum((T.p(i) * T.pullback(M[i][j]) for i in range(n)), T.total.zero)
    return out


def lift_horizontal_bivec(T: CotangentChart, nabla: Connection, pi: Sequence[Sequence]) -> Vec:
    """πʰ = p_i π^{ij} ∂ʰ_{x^j}."""
    n = T.n
    check_bivector(pi)
    coeff = [sum((T.p(i) * T.pullback(T.base.field(pi[i][j])) for i in range(n)), T.total.zero)
             for j in range(n)]
    return _horizontal(T, nabla, coeff)


def check_bivector(pi: Sequence[Sequence]) -> None:
    n = len(pi)
    for i in range(n):
        for j in range(n):
            if pi[i][j] != -pi[j][i]:
                raise ValueError("bivector matrix must be antisymmetric")


def bivector_apply(pi: Sequence[Sequence[ScalarField]], alpha: SymField) -> Vec:
    """π(α)^i = π^{ij} α_j."""
    n = alpha.chart.dim
    a = [alpha.component((j,)) for j in range(n)]
    return [sum((alpha.chart.field(pi[i][j]) * a[j] for j in range(n)), alpha.chart.zero)
            for i in range(n)]


def apply_vector(U: Vec, f: ScalarField) -> ScalarField:
    """U(f) = U^a ∂_a f."""
    return sum((u * f.partial(a) for a, u in enumerate(U) if not u.is_zero), f.chart.zero)


def metric_apply(g: SymField, U: Vec, V: Vec) -> ScalarField:
    G = metric_matrix(g)
    chart = g.chart
    acc = chart.zero
    for a, u in enumerate(U):
        if u.is_zero:
            continue
        for b, v in enumerate(V):
            if not v.is_zero and not G[a][b].is_zero:
                acc = acc + G[a][b] * u * v
    return acc


# ---------------------------------------------------------------------------
# Patterson-Walker metric and canonical forms

def patterson_walker(T: CotangentChart, nabla: Connection) -> SymField:
    """g_∇ = dp_i⊙dxⁱ − p_k Γᵏᵢⱼ dxⁱ⊙dxʲ, built on the fiber polynomial w_i vⁱ − p_kΓᵏᵢⱼvⁱvʲ."""
    if nabla.chart != T.base:
        raise ValueError("chart mismatch")
    n, N = T.n, 2 * T.n
    fiber: dict = {}
    for i in range(n):
        fiber_accumulate(fiber, exponent_of((i, n + i), N), T.total.one)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                g = nabla.gamma[k][i][j]
                if not g.is_zero:
                    fiber_accumulate(fiber, exponent_of((i, j), N), -T.p(k) * T.pullback(g))
    return SymField._wrap(T.total, 2, fiber)


def canonical_one_form(T: CotangentChart) -> SymField:
    """α_can = p_i dxⁱ."""
    return SymField.from_components(T.total, 1, {(i,): T.p(i) for i in range(T.n)})


def canonical_symplectic(T: CotangentChart) -> list[list[ScalarField]]:
    """ω_can = dp_i ∧ dxⁱ as an antisymmetric matrix ω[a][b] = ω(∂_a, ∂_b)."""
    n, N = T.n, 2 * T.n
    z, one = T.total.zero, T.total.one
    w = [[z] * N for _ in range(N)]
    for i in range(n):
        w[n + i][i] = one
        w[i][n + i] = -one
    return w


def canonical_forms(T: CotangentChart):
    return canonical_one_form(T), canonical_symplectic(T)


def exterior_derivative(alpha: SymField) -> list[list[ScalarField]]:
    """(dα)[a][b] = ∂_a α_b − ∂_b α_a for a 1-form."""
    if alpha.degree != 1:
        raise ValueError("exterior derivative is implemented for 1-forms only")
    N = alpha.chart.dim
    comps = [alpha.component((b,)) for b in range(N)]
    return [[comps[b].partial(a) - comps[a].partial(b) for b in range(N)] for a in range(N)]


def two_form_apply(w: Sequence[Sequence[ScalarField]], U: Vec, V: Vec) -> ScalarField:
    acc = U[0].chart.zero
    for a, u in enumerate(U):
        if u.is_zero:
            continue
        for b, v in enumerate(V):
            if not v.is_zero and not w[a][b].is_zero:
                acc = acc + w[a][b] * u * v
    return acc


def one_form_apply(alpha: SymField, U: Vec) -> ScalarField:
    return sum((alpha.component((a,)) * u for a, u in enumerate(U)), alpha.chart.zero)


# ---------------------------------------------------------------------------
# lifted connections

@dataclass(frozen=True)
class FrameConnection:
    """A connection given on a frame: ∇_{E_A} E_B = Σ_C omega[C][A][B] E_C.

    ``frame[A]`` lists the coordinate components of E_A.
    """

    chart: Chart
    frame: tuple
    omega: tuple

    def to_connection(self) -> Connection:
        """Coordinate Christoffels by exact change of frame.

        With E_A = P^c_A ∂_c and ∂_a = Q^A_a E_A:
        Γ^c_{ab} = Q^A_a (E_A(Q^B_b) P^c_B + Q^B_b ω^C_{AB} P^c_C).
        """
        N = self.chart.dim
        P = [[self.frame[A][c] for A in range(N)] for c in range(N)]  # P[c][A]
        Q = matrix_inverse(P)  # Q[A][a]
        zero = self.chart.zero
        # V[B][a] = E_B-image of ∂_a's second slot: per (a, b) needed terms
        EQ = [[[apply_vector(list(self.frame[A]), Q[B][b]) for b in range(N)] for B in range(N)]
              for A in range(N)]
        gamma = [[[zero] * N for _ in range(N)] for _ in range(N)]
        for a in range(N):
            for b in range(N):
                # inner[C] = coefficient of E_C in ∇_{∂_a} ∂_b
                inner = [zero] * N
                for A in range(N):
                    qa = Q[A][a]
                    if qa.is_zero:
                        continue
                    for B in range(N):
                        d = EQ[A][B][b]
                        if not d.is_zero:
                            inner[B] = inner[B] + qa * d
                        qb = Q[B][b]
                        if qb.is_zero:
                            continue
                        for C in range(N):
                            w = self.omega[C][A][B]
                            if not w.is_zero:
                                inner[C] = inner[C] + qa * qb * w
                for c in range(N):
                    gamma[c][a][b] = sum((P[c][C] * inner[C] for C in range(N)
                                          if not inner[C].is_zero), zero)
        return Connection(self.chart, gamma)


def _lift_frame(T: CotangentChart, nabla: Connection) -> tuple:
    n = T.n
    frame = []
    for i in range(n):
        e = [T.total.one if a == i else T.total.zero for a in range(n)]
        frame.append(tuple(_horizontal(T, nabla, e)))
    for j in range(n):
        frame.append(tuple(T.total.one if a == n + j else T.total.zero for a in range(2 * n)))
    return tuple(frame)


def _hat_omega(T: CotangentChart, nabla: Connection) -> list:
    n, N = T.n, 2 * T.n
    z = T.total.zero
    w = [[[z] * N for _ in range(N)] for _ in range(N)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                g = nabla.gamma[k][i][j]
                if g.is_zero:
                    continue
                g = T.pullback(g)
                w[k][i][j] = g  # ∇̂_{E_i} E_j = Γᵏᵢⱼ E_k
                w[n + j][i][n + k] = -g  # ∇̂_{E_i} F^k = −Γᵏᵢⱼ F^j
    return w


def lifted_connection_hat_frame(T: CotangentChart, nabla: Connection) -> FrameConnection:
    w = _hat_omega(T, nabla)
    return FrameConnection(T.total, _lift_frame(T, nabla), _freeze(w))


def lifted_connection_hat(T: CotangentChart, nabla: Connection) -> Connection:
    """∇̂ in coordinates: ∇̂_{Xʰ}Yʰ = (∇_XY)ʰ, ∇̂_{Xʰ}αᵛ = (∇_Xα)ᵛ, ∇̂_{αᵛ} = 0."""
    return lifted_connection_hat_frame(T, nabla).to_connection()


def lifted_connection_bar(T: CotangentChart, nabla: Connection) -> Connection:
    """∇̄ = ∇̂ corrected by −(R(pr₁b, ·) pr₁a)^υ on horizontal pairs."""
    if not nabla.is_torsion_free:
        raise TorsionError("the Levi-Civita lift needs a torsion-free base connection")
    n = T.n
    R = riemann(nabla)
    w = _hat_omega(T, nabla)
    for i in range(n):  # a = E_i
        for j in range(n):  # b = E_j
            for k in range(n):
                # Z = ∂_k ↦ R(∂_j, ∂_k)∂_i, lifted: p_m R^m_{jki} F^k
                acc = T.total.zero
                for m in range(n):
                    c = R.components[m][j][k][i]
                    if not c.is_zero:
                        acc = acc + T.p(m) * T.pullback(c)
                if not acc.is_zero:
                    w[n + k][i][j] = w[n + k][i][j] - acc
    return FrameConnection(T.total, _lift_frame(T, nabla), _freeze(w)).to_connection()


def _freeze(w):
    return tuple(tuple(tuple(r) for r in p) for p in w)


def levi_civita(g: SymField) -> Connection:
    """Koszul formula Γᵏᵢⱼ = ½ g^{kl}(∂_i g_{lj} + ∂_j g_{li} − ∂_l g_{ij})."""
    chart = g.chart
    N = chart.dim
    G = metric_matrix(g)
    Ginv = matrix_inverse(G)
    dG = [[[G[a][b].partial(c) for c in range(N)] for b in range(N)] for a in range(N)]
    gamma = [[[chart.zero] * N for _ in range(N)] for _ in range(N)]
    for i in range(N):
        for j in range(i, N):
            lower = [(dG[l][j][i] + dG[l][i][j] - dG[i][j][l]) / 2 for l in range(N)]
            for k in range(N):
                v = sum((Ginv[k][l] * lower[l] for l in range(N)
                         if not Ginv[k][l].is_zero and not lower[l].is_zero), chart.zero)
                gamma[k][i][j] = v
                gamma[k][j][i] = v
    return Connection(chart, gamma)


def gradient_killing_complete_lift(nabla: Connection, X) -> bool:
    """Xᶜ is a gradient Killing field of g_∇ iff ∇X = 0 and sym ι_X R = 0."""
    nabla.require_torsion_free()
    x = _vals(X)
    if any(not v.is_zero for row in nabla.cov_matrix(x) for v in row):
        return False
    return sym_iota_curvature(nabla, x).is_zero


# ---------------------------------------------------------------------------
# identity checks

def _vec_eq(a: Vec, b: Vec) -> bool:
    return all(p == q for p, q in zip(a, b))


def _vec_sub(a: Vec, b: Vec) -> Vec:
    return [p - q for p, q in zip(a, b)]


def _vec_add(a: Vec, b: Vec) -> Vec:
    return [p + q for p, q in zip(a, b)]


def lift_identities(T: CotangentChart, nabla: Connection, X, Y, alpha: SymField, beta: SymField,
                    f: ScalarField) -> dict:
    """Coordinate lemmas and bracket relations between lifts, checked exactly."""
    base = T.base
    x, y = _vals(X), _vals(Y)
    Xh, Yh = lift_horizontal_vec(T, nabla, x), lift_horizontal_vec(T, nabla, y)
    av, bv = lift_vertical_1form(T, alpha), lift_vertical_1form(T, beta)
    acan = canonical_one_form(T)
    R = riemann(nabla)
    n = base.dim
    Rxy = [[R.apply(x, y, [base.one if a == j else base.zero for a in range(n)])[i]
            for j in range(n)] for i in range(n)]
    out = {
        "alpha_can_horizontal": one_form_apply(acan, Xh) == lift_vertical_vec(T, x),
        "horizontal_on_vertical": apply_vector(Xh, lift_vertical_vec(T, y))
        == lift_vertical_vec(T, nabla.cov(x, y)),
        "vertical_on_vertical": apply_vector(av, lift_vertical_vec(T, y))
        == T.pullback(sum((alpha.component((i,)) * y[i] for i in range(n)), base.zero)),
        "horizontal_on_basic": apply_vector(Xh, T.pullback(f))
        == T.pullback(sum((x[i] * f.partial(i) for i in range(n)), base.zero)),
        "vertical_on_basic": apply_vector(av, T.pullback(f)).is_zero,
        "bracket_hh": _vec_eq(lie_bracket(Xh, Yh),
                              _vec_add(lift_horizontal_vec(T, nabla, lie_bracket(x, y)),
                                       lift_endo(T, Rxy))),
        "bracket_hv": _vec_eq(lie_bracket(Xh, av),
                              lift_vertical_1form(T, covariant_derivative(nabla, x, alpha))),
        "bracket_vv": all(v.is_zero for v in lie_bracket(av, bv)),
    }
    if nabla.is_torsion_free:
        out["complete_lift"] = _vec_eq(lift_complete(T, x),
                                       _vec_sub(Xh, lift_endo(T, nabla.cov_matrix(x))))
    out["ok"] = all(out.values())
    return out


def pw_identities(T: CotangentChart, nabla: Connection, X, Y, alpha: SymField, pi) -> dict:
    """PW metric relations: PW2, ω_can on complete lifts, pi-lift, isotropy, dα_can = ω_can.

    2-forms are evaluated as (a∧b)(U,V) = a(U)b(V) − a(V)b(U), the convention in
    which dα(U,V) = Uα(V) − Vα(U) − α([U,V]). Under it ω_can(Xᶜ,Yᶜ) = [X,Y]ᵛ.
    """
    g = patterson_walker(T, nabla)
    x, y = _vals(X), _vals(Y)
    Xc, Yc = lift_complete(T, x), lift_complete(T, y)
    acan, omega = canonical_forms(T)
    n = T.n
    vertical = [[T.total.one if a == n + j else T.total.zero for a in range(2 * n)]
                for j in range(n)]
    out = {
        "pw2": metric_apply(g, Xc, Yc) == -lift_vertical_vec(T, sym_bracket(nabla, x, y)),
        "omega_complete": two_form_apply(omega, Xc, Yc) == lift_vertical_vec(T, lie_bracket(x, y)),
        "d_alpha_can": exterior_derivative(acan) == omega,
        "pi_lift": metric_apply(g, lift_horizontal_bivec(T, nabla, pi), lift_vertical_1form(T, alpha))
        == lift_vertical_vec(T, bivector_apply(pi, alpha)),
        "isotropic": all(metric_apply(g, u, v).is_zero for u in vertical for v in vertical),
        "torsion_free_part_only": g == patterson_walker(T, torsion_free_part(nabla)),
    }
    out["ok"] = all(out.values())
    return out


def hat_torsion_identity(T: CotangentChart, nabla: Connection, hat: Connection, X, Y) -> bool:
    """T_{∇̂}(Xʰ,Yʰ) = T_∇(X,Y)ʰ − R(X,Y)^υ."""
    x, y = _vals(X), _vals(Y)
    Xh, Yh = lift_horizontal_vec(T, nabla, x), lift_horizontal_vec(T, nabla, y)
    lhs = _vec_sub(_vec_sub(hat.cov(Xh, Yh), hat.cov(Yh, Xh)), lie_bracket(Xh, Yh))
    base = T.base
    n = base.dim
    tor = _vec_sub(_vec_sub(nabla.cov(x, y), nabla.cov(y, x)), lie_bracket(x, y))
    R = riemann(nabla)
    Rxy = [[R.apply(x, y, [base.one if a == j else base.zero for a in range(n)])[i]
            for j in range(n)] for i in range(n)]
    rhs = _vec_sub(lift_horizontal_vec(T, nabla, tor), lift_endo(T, Rxy))
    return _vec_eq(lhs, rhs)


def metric_parallel(nabla: Connection, g: SymField) -> bool:
    return all(covariant_derivative(nabla, [nabla.chart.one if a == k else nabla.chart.zero
                                            for a in range(nabla.dim)], g).is_zero
               for k in range(nabla.dim))


@dataclass
class PWReport:
    """Checks of the Patterson-Walker metric and its lifted connections for one base connection."""

    T: CotangentChart
    nabla: Connection

    @cached_property
    def metric(self) -> SymField:
        return patterson_walker(self.T, self.nabla)

    @cached_property
    def hat(self) -> Connection:
        return lifted_connection_hat(self.T, self.nabla)

    @cached_property
    def bar(self) -> Connection:
        return lifted_connection_bar(self.T, torsion_free_part(self.nabla))

    @cached_property
    def koszul(self) -> Connection:
        return levi_civita(self.metric)

    def checks(self) -> dict:
        acan = canonical_one_form(self.T)
        out = {
            "hat_sym_alpha_can": self.hat.sym_derivative(acan) == self.metric,
            "hat_metric_parallel": metric_parallel(self.hat, self.metric),
            "bar_sym_alpha_can": self.bar.sym_derivative(acan) == self.metric,
            "bar_equals_koszul": self.bar == self.koszul,
            "bar_torsion_free": self.bar.is_torsion_free,
            "bar_metric_parallel": metric_parallel(self.bar, self.metric),
        }
        out["ok"] = all(out.values())
        return out
