"""Affine connections on a chart and the operators of symmetric Cartan calculus.

Conventions: ``gamma[k][i][j]`` is dx^k(∇_{∂_i} ∂_j). Curvature is stored in
operator form ``R[l][i][j][k] = dx^l(R(∂_i, ∂_j) ∂_k)``; the layout with the
argument index first is available through ``CurvatureField.argument_first``.

Vector fields are ``VecSymField`` of degree 0. Internally most routines work on
plain lists of component functions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations_with_replacement, product
from typing import Mapping, Sequence

from .ring import Chart, ScalarField
from .symtensor import (
    Fiber,
    SymField,
    VecSymField,
    contract,
    exponent_of,
    fiber_accumulate,
    fiber_add,
    fiber_dv,
    fiber_dx,
    fiber_mul,
    fiber_scale,
    indices_of,
    parse_index,
    sym_contract,
    sym_contract_or_zero,
    unit,
)

Vec = list[ScalarField]


class TorsionError(ValueError):
    """Raised when an operation requires a torsion-free connection."""


def _vals(X) -> Vec:
    if isinstance(X, VecSymField):
        return X.values()
    return list(X)


def _vec(chart: Chart, values: Sequence[ScalarField]) -> VecSymField:
    return VecSymField.vector(chart, list(values))


class Connection:
    """Christoffel symbols of an affine connection (torsion allowed)."""

    def __init__(self, chart: Chart, gamma: Sequence[Sequence[Sequence]]):
        n = chart.dim
        if len(gamma) != n or any(len(g) != n or any(len(h) != n for h in g) for g in gamma):
            raise ValueError(f"Christoffel array must be {n}x{n}x{n}")
        self.chart = chart
        self.gamma = tuple(tuple(tuple(chart.field(v) for v in row) for row in g) for g in gamma)

    @classmethod
    def flat(cls, chart: Chart) -> "Connection":
        n = chart.dim
        z = chart.zero
        return cls(chart, [[[z] * n for _ in range(n)] for _ in range(n)])

    @classmethod
    def from_entries(cls, chart: Chart, entries: Mapping[tuple[int, int, int], object]) -> "Connection":
        n = chart.dim
        g = [[[chart.zero] * n for _ in range(n)] for _ in range(n)]
        for (k, i, j), v in entries.items():
            g[k][i][j] = chart.field(v)
        return cls(chart, g)

    @classmethod
    def from_json(cls, chart: Chart, data: Mapping) -> "Connection":
        gamma = data.get("gamma", data)
        entries = {}
        for key, value in gamma.items():
            entries[parse_index(chart, key, 3)] = value
        return cls.from_entries(chart, entries)

    def to_json(self) -> dict:
        n = self.chart.dim
        out = {}
        for k, i, j in product(range(n), repeat=3):
            g = self.gamma[k][i][j]
            if not g.is_zero:
                out[f"{k},{i},{j}"] = str(g)
        return {"gamma": out}

    def __eq__(self, other) -> bool:
        if not isinstance(other, Connection):
            return NotImplemented
        return self.chart == other.chart and self.gamma == other.gamma

    def __hash__(self):
        return hash((self.chart, self.gamma))

    def __repr__(self) -> str:
        return f"Connection({self.to_json()['gamma']})"

    @property
    def dim(self) -> int:
        return self.chart.dim

    @cached_property
    def is_torsion_free(self) -> bool:
        n = self.dim
        return all(self.gamma[k][i][j] == self.gamma[k][j][i]
                   for k in range(n) for i in range(n) for j in range(i + 1, n))

    @cached_property
    def curvature(self) -> "CurvatureField":
        return _riemann(self)

    def require_torsion_free(self) -> None:
        if not self.is_torsion_free:
            raise TorsionError("identity is stated for torsion-free connections only")

    # -- vector-field calculus ------------------------------------------------------

    def cov(self, X: Sequence[ScalarField], Y: Sequence[ScalarField]) -> Vec:
        """∇_X Y."""
        n = self.dim
        out = []
        for k in range(n):
            acc = self.chart.zero
            for i in range(n):
                if X[i].is_zero:
                    continue
                acc = acc + X[i] * Y[k].partial(i)
                for j in range(n):
                    g = self.gamma[k][i][j]
                    if not g.is_zero and not Y[j].is_zero:
                        acc = acc + X[i] * g * Y[j]
            out.append(acc)
        return out

    def cov_matrix(self, X: Sequence[ScalarField]) -> list[Vec]:
        """(∇X)^m_j = dx^m(∇_{∂_j} X)."""
        n = self.dim
        cols = [self.cov(_basis(self.chart, j), X) for j in range(n)]
        return [[cols[j][m] for j in range(n)] for m in range(n)]

    @cached_property
    def spray(self) -> list[Fiber]:
        """Fiber polynomials Σ_ij Γᵏᵢⱼ vⁱvʲ, one per k (only the symmetric part survives)."""
        n = self.dim
        out = []
        for k in range(n):
            poly: Fiber = {}
            for i in range(n):
                for j in range(n):
                    fiber_accumulate(poly, exponent_of((i, j), n), self.gamma[k][i][j])
            out.append(poly)
        return out

    def sym_derivative(self, phi: SymField) -> SymField:
        """∇ˢφ as the geodesic spray vⁱ∂_{xⁱ} − vⁱvʲΓᵏᵢⱼ∂_{vᵏ} acting on φ̃."""
        if phi.chart != self.chart:
            raise ValueError("chart mismatch")
        n = self.dim
        out: Fiber = {}
        for e, c in phi.fiber.items():
            for i in range(n):
                fiber_accumulate(out, _bump(e, i), c.partial(i))
        for k in range(n):
            d = fiber_dv(phi.fiber, k)
            if d and self.spray[k]:
                out = fiber_add(out, fiber_mul(self.spray[k], d), -1)
        return SymField._wrap(self.chart, phi.degree + 1, out)

    def a_sym_derivative(self, A: VecSymField, phi: SymField) -> SymField:
        """∇ˢ_A = [ιˢ_A, ∇ˢ]."""
        first = sym_contract(A, self.sym_derivative(phi))
        if phi.degree == 0:
            return first
        return first - self.sym_derivative(sym_contract(A, phi))


def _bump(e, i):
    return e[:i] + (e[i] + 1,) + e[i + 1:]


def _basis(chart: Chart, j: int) -> Vec:
    return [chart.one if m == j else chart.zero for m in range(chart.dim)]


def coordinate_field(chart: Chart, j: int) -> VecSymField:
    return VecSymField.coordinate_vector(chart, j)


# ---------------------------------------------------------------------------
# torsion and torsion-free part

@dataclass(frozen=True)
class TorsionField:
    """T[k][i][j] = dx^k(T(∂_i, ∂_j)), antisymmetric in i, j."""

    chart: Chart
    components: tuple

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for plane in self.components for row in plane for c in row)

    def apply(self, X, Y) -> VecSymField:
        x, y = _vals(X), _vals(Y)
        n = self.chart.dim
        return _vec(self.chart, [sum((self.components[k][i][j] * x[i] * y[j]
                                      for i in range(n) for j in range(n)), self.chart.zero)
                                 for k in range(n)])


def torsion(nabla: Connection) -> TorsionField:
    n = nabla.dim
    g = nabla.gamma
    comps = tuple(tuple(tuple(g[k][i][j] - g[k][j][i] for j in range(n)) for i in range(n))
                  for k in range(n))
    return TorsionField(nabla.chart, comps)


def torsion_free_part(nabla: Connection) -> Connection:
    if nabla.is_torsion_free:
        return nabla
    n = nabla.dim
    g = nabla.gamma
    return Connection(nabla.chart, [[[(g[k][i][j] + g[k][j][i]) / 2 for j in range(n)]
                                     for i in range(n)] for k in range(n)])


# ---------------------------------------------------------------------------
# symmetric derivative: spray path and component path

def sym_derivative(nabla: Connection, phi: SymField) -> SymField:
    return nabla.sym_derivative(phi)


def _symmetric_lookup(comps: Mapping[tuple, ScalarField], idx, zero) -> ScalarField:
    return comps.get(tuple(sorted(idx)), zero)


def covariant_components(nabla: Connection, phi: SymField, k: int) -> dict[tuple, ScalarField]:
    """Components of ∇_{∂_k} φ from ∂_kφ_J − Σ_a Γᵐ_{k j_a} φ_{J[a→m]}."""
    chart, n, r = nabla.chart, nabla.dim, phi.degree
    comps = phi.components()
    zero = chart.zero
    out = {}
    for J in _sorted_indices(n, r):
        acc = _symmetric_lookup(comps, J, zero).partial(k)
        for a in range(r):
            for m in range(n):
                g = nabla.gamma[m][k][J[a]]
                if g.is_zero:
                    continue
                acc = acc - g * _symmetric_lookup(comps, J[:a] + (m,) + J[a + 1:], zero)
        if not acc.is_zero:
            out[J] = acc
    return out


def _sorted_indices(n: int, r: int):
    return list(combinations_with_replacement(range(n), r))


def sym_derivative_components(nabla: Connection, phi: SymField) -> SymField:
    """∇ˢφ from (∇ˢφ)_{i₁…i_{r+1}} = Σ_j (∇_{i_j}φ)_{i₁…î_j…i_{r+1}}; independent of the spray."""
    n, r = nabla.dim, phi.degree
    zero = nabla.chart.zero
    cov = [covariant_components(nabla, phi, k) for k in range(n)]
    out = {}
    for I in _sorted_indices(n, r + 1):
        acc = zero
        for j in range(r + 1):
            acc = acc + cov[I[j]].get(I[:j] + I[j + 1:], zero)
        out[I] = acc
    return SymField.from_components(nabla.chart, r + 1, out)


def covariant_derivative(nabla: Connection, X, phi: SymField) -> SymField:
    """∇_X φ for a symmetric form φ."""
    x = _vals(X)
    out: Fiber = {}
    n = nabla.dim
    for k in range(n):
        if x[k].is_zero:
            continue
        out = fiber_add(out, fiber_scale(fiber_dx(phi.fiber, k), x[k]))
    # −X^k Γ^m_{kj} v^j ∂_{v^m}
    for m in range(n):
        d = fiber_dv(phi.fiber, m)
        if not d:
            continue
        lin: Fiber = {}
        for j in range(n):
            coef = sum((x[k] * nabla.gamma[m][k][j] for k in range(n)), nabla.chart.zero)
            fiber_accumulate(lin, unit(n, j), coef)
        if lin:
            out = fiber_add(out, fiber_mul(lin, d), -1)
    return SymField._wrap(nabla.chart, phi.degree, out)


# ---------------------------------------------------------------------------
# Lie-type derivatives and brackets

def sym_lie(nabla: Connection, X, phi: SymField) -> SymField:
    """Lˢ_X = [ι_X, ∇ˢ]."""
    Xv = X if isinstance(X, VecSymField) else _vec(nabla.chart, X)
    first = contract(Xv, nabla.sym_derivative(phi))
    if phi.degree == 0:
        return first
    return first - nabla.sym_derivative(contract(Xv, phi))


def sym_lie_components(nabla: Connection, X, phi: SymField) -> SymField:
    """(Lˢ_Xφ)(X₁…X_r) = (∇⁰_Xφ)(…) − Σ_j φ(∇⁰_{X_j}X, …), computed on components."""
    tf = torsion_free_part(nabla)
    x = _vals(X)
    n, r = nabla.dim, phi.degree
    zero = nabla.chart.zero
    comps = phi.components()
    DX = tf.cov_matrix(x)  # DX[m][j] = dx^m(∇⁰_j X)
    cov = covariant_derivative(tf, x, phi).components()
    out = {}
    for J in _sorted_indices(n, r):
        acc = cov.get(J, zero)
        for a in range(r):
            for m in range(n):
                if DX[m][J[a]].is_zero:
                    continue
                acc = acc - DX[m][J[a]] * _symmetric_lookup(comps, J[:a] + (m,) + J[a + 1:], zero)
        out[J] = acc
    return SymField.from_components(nabla.chart, r, out)


def lie_derivative(X, phi: SymField) -> SymField:
    """Ordinary Lie derivative by the component formula X^k∂_kφ_J + Σ_a φ_{J[a→k]} ∂_{j_a}X^k."""
    chart = phi.chart
    x = _vals(X)
    n, r = chart.dim, phi.degree
    zero = chart.zero
    comps = phi.components()
    out = {}
    for J in _sorted_indices(n, r):
        acc = zero
        base = comps.get(J, zero)
        for k in range(n):
            if not x[k].is_zero:
                acc = acc + x[k] * base.partial(k)
        for a in range(r):
            for k in range(n):
                dXk = x[k].partial(J[a])
                if dXk.is_zero:
                    continue
                acc = acc + dXk * _symmetric_lookup(comps, J[:a] + (k,) + J[a + 1:], zero)
        out[J] = acc
    return SymField.from_components(chart, r, out)


def lie_bracket(X, Y) -> Vec:
    x, y = _vals(X), _vals(Y)
    n = len(x)
    return [sum((x[i] * y[k].partial(i) - y[i] * x[k].partial(i) for i in range(n)), x[0].chart.zero)
            for k in range(n)]


def sym_bracket(nabla: Connection, X, Y) -> VecSymField:
    """[X,Y]_s = ∇_X Y + ∇_Y X."""
    x, y = _vals(X), _vals(Y)
    a, b = nabla.cov(x, y), nabla.cov(y, x)
    return _vec(nabla.chart, [p + q for p, q in zip(a, b)])


def nabla_endomorphism(nabla: Connection, X) -> VecSymField:
    """∇X as the endomorphism Y ↦ ∇_Y X."""
    return VecSymField.endomorphism(nabla.chart, nabla.cov_matrix(_vals(X)))


# ---------------------------------------------------------------------------
# curvature

@dataclass(frozen=True)
class CurvatureField:
    """R[l][i][j][k] = dx^l(R(∂_i, ∂_j) ∂_k)."""

    chart: Chart
    components: tuple

    def __call__(self, l: int, i: int, j: int, k: int) -> ScalarField:
        return self.components[l][i][j][k]

    def argument_first(self, l: int, i: int, j: int, k: int) -> ScalarField:
        """Layout dx^l(R(∂_j, ∂_k) ∂_i): the first lower index is the argument."""
        return self.components[l][j][k][i]

    @property
    def is_zero(self) -> bool:
        return all(v.is_zero for a in self.components for b in a for c in b for v in c)

    def apply(self, X, Y, Z) -> Vec:
        x, y, z = _vals(X), _vals(Y), _vals(Z)
        n = self.chart.dim
        out = []
        for l in range(n):
            acc = self.chart.zero
            for i in range(n):
                if x[i].is_zero:
                    continue
                for j in range(n):
                    if y[j].is_zero:
                        continue
                    for k in range(n):
                        c = self.components[l][i][j][k]
                        if not c.is_zero and not z[k].is_zero:
                            acc = acc + c * x[i] * y[j] * z[k]
            out.append(acc)
        return out

    def antisymmetric(self) -> bool:
        n = self.chart.dim
        return all(self.components[l][i][j][k] == -self.components[l][j][i][k]
                   for l, i, j, k in product(range(n), repeat=4))

    def bianchi_residual(self) -> list[ScalarField]:
        n = self.chart.dim
        R = self.components
        return [R[l][i][j][k] + R[l][j][k][i] + R[l][k][i][j]
                for l, i, j, k in product(range(n), repeat=4)]


def riemann(nabla: Connection) -> CurvatureField:
    return nabla.curvature


def _riemann(nabla: Connection) -> CurvatureField:
    n = nabla.dim
    G = nabla.gamma
    comps = []
    for l in range(n):
        plane_i = []
        for i in range(n):
            plane_j = []
            for j in range(n):
                row = []
                for k in range(n):
                    acc = G[l][j][k].partial(i) - G[l][i][k].partial(j)
                    for m in range(n):
                        acc = acc + G[m][j][k] * G[l][i][m] - G[m][i][k] * G[l][j][m]
                    row.append(acc)
                plane_j.append(tuple(row))
            plane_i.append(tuple(plane_j))
        comps.append(tuple(plane_i))
    return CurvatureField(nabla.chart, tuple(comps))


def second_cov(nabla: Connection, X) -> list[list[Vec]]:
    """N[m][i][j] = dx^m((∇²X)(∂_i, ∂_j)) with (∇²X)(Y,Z) = ∇_Y∇_Z X − ∇_{∇_Y Z} X."""
    x = _vals(X)
    n = nabla.dim
    G = nabla.gamma
    DX = nabla.cov_matrix(x)
    out = []
    for m in range(n):
        rows = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = DX[m][j].partial(i)
                for k in range(n):
                    acc = acc + G[m][i][k] * DX[k][j] - G[k][i][j] * DX[m][k]
                row.append(acc)
            rows.append(row)
        out.append(rows)
    return out


def sym_curvature(nabla: Connection, X) -> VecSymField:
    """Rˢ X ∈ Υ²(M,TM): (RˢX)(Y,Z) = ∇_Y∇_Z X + ∇_Z∇_Y X − ∇_{[Y,Z]_s} X."""
    N = second_cov(nabla, X)
    n = nabla.dim
    vals = {}
    for m in range(n):
        for i in range(n):
            for j in range(i, n):
                vals[(m, (i, j))] = N[m][i][j] + N[m][j][i]
    return VecSymField.from_components(nabla.chart, 2, vals)


def sym_iota_curvature(nabla: Connection, X) -> VecSymField:
    """2 sym ι_X R: (Y, Z) ↦ R(X,Y)Z + R(X,Z)Y."""
    R = riemann(nabla)
    x = _vals(X)
    n = nabla.dim
    zero = nabla.chart.zero
    vals = {}
    for m in range(n):
        for i in range(n):
            for j in range(i, n):
                acc = zero
                for a in range(n):
                    if x[a].is_zero:
                        continue
                    acc = acc + x[a] * (R.components[m][a][i][j] + R.components[m][a][j][i])
                vals[(m, (i, j))] = acc
    return VecSymField.from_components(nabla.chart, 2, vals)


def a_sym_derivative(nabla: Connection, A: VecSymField, phi: SymField) -> SymField:
    return nabla.a_sym_derivative(A, phi)


# ---------------------------------------------------------------------------
# identity reports

def _iota(X: VecSymField, phi: SymField) -> SymField | None:
    return None if phi.degree == 0 else contract(X, phi)


def _diff(a: SymField | None, b: SymField | None) -> SymField | None:
    if a is None:
        return None if b is None else -b
    if b is None:
        return a
    return a - b


def _is_zero(x: SymField | None) -> bool:
    return x is None or x.is_zero


def variation_check(nabla: Connection, nabla2: Connection, forms: Sequence[SymField],
                    vectors: Sequence[tuple]) -> dict:
    """Relations between the calculi of ∇ and ∇′ with σ = 2 sym(Γ − Γ′)."""
    chart = nabla.chart
    n = chart.dim
    diff = [[[nabla.gamma[k][i][j] - nabla2.gamma[k][i][j] for j in range(n)] for i in range(n)]
            for k in range(n)]
    sigma = VecSymField.from_components(chart, 2, {
        (k, (i, j)): diff[k][i][j] + diff[k][j][i] for k in range(n) for i in range(n)
        for j in range(i, n)})
    derivative_ok = all(
        nabla2.sym_derivative(phi) == nabla.sym_derivative(phi) + sym_contract_or_zero(sigma, phi)
        for phi in forms)
    lie_ok = True
    bracket_ok = True
    for X, Y in vectors:
        x = _vals(X)
        sx = VecSymField.endomorphism(chart, [[sum((sigma.component(m, (i, j)) * x[i]
                                                     for i in range(n)), chart.zero)
                                                for j in range(n)] for m in range(n)])
        for phi in forms:
            lhs = sym_lie(nabla2, X, phi)
            rhs = sym_lie(nabla, X, phi) + sym_contract_or_zero(sx, phi)
            lie_ok &= lhs == rhs
        y = _vals(Y)
        sxy = [sum((sigma.component(m, (i, j)) * x[i] * y[j] for i in range(n) for j in range(n)),
                   chart.zero) for m in range(n)]
        b2 = sym_bracket(nabla2, x, y).values()
        b1 = sym_bracket(nabla, x, y).values()
        bracket_ok &= all(p == q - s for p, q, s in zip(b2, b1, sxy))
    return {
        "sigma_zero": sigma.is_zero,
        "sym_derivative": derivative_ok,
        "sym_lie": lie_ok,
        "sym_bracket": bracket_ok,
        "ok": derivative_ok and lie_ok and bracket_ok,
    }


def com1_endomorphism(nabla: Connection, X, Y) -> VecSymField:
    """W: Z ↦ 2(∇_{∇_Z X} Y − ∇_{∇_Z Y} X − R(X,Y)Z)."""
    chart = nabla.chart
    n = chart.dim
    x, y = _vals(X), _vals(Y)
    R = riemann(nabla)
    cols = []
    for j in range(n):
        z = _basis(chart, j)
        a = nabla.cov(nabla.cov(z, x), y)
        b = nabla.cov(nabla.cov(z, y), x)
        c = R.apply(x, y, z)
        cols.append([(a[m] - b[m] - c[m]) * 2 for m in range(n)])
    return VecSymField.endomorphism(chart, [[cols[j][m] for j in range(n)] for m in range(n)])


def com2_sigma(nabla: Connection, X) -> VecSymField:
    return sym_iota_curvature(nabla, X) + sym_curvature(nabla, X)


def commutator_identities(nabla: Connection, X, Y, forms: Sequence[SymField]) -> dict:
    """Check the commutation relations of symmetric Cartan calculus on ``forms``.

    Left and right sides are computed by separate routes: Lˢ on the left via
    the commutator [ι_X, ∇ˢ] on fiber polynomials; where Lˢ itself is the
    claim, the right side uses the component formula.
    """
    nabla.require_torsion_free()
    chart = nabla.chart
    Xv = X if isinstance(X, VecSymField) else _vec(chart, X)
    Yv = Y if isinstance(Y, VecSymField) else _vec(chart, Y)
    bracket = _vec(chart, lie_bracket(Xv, Yv))
    sbracket = sym_bracket(nabla, Xv, Yv)
    W = com1_endomorphism(nabla, Xv, Yv)
    sigma_x = com2_sigma(nabla, Xv)
    grad_x = nabla_endomorphism(nabla, Xv)
    ns = nabla.sym_derivative

    checks = {"iota_iota": True, "nabla_nabla": True, "iota_nabla": True, "lie_iota": True,
              "com1": True, "com2": True, "covLL": True}
    residual_nonzero = {"com2": False, "com1": False}
    nabla0 = torsion_free_part(nabla)
    for phi in forms:
        # [ι_X, ι_Y] = 0
        if phi.degree >= 2:
            checks["iota_iota"] &= (contract(Xv, contract(Yv, phi))
                                    == contract(Yv, contract(Xv, phi)))
        # [∇ˢ, ∇ˢ] = 0, evaluated literally
        checks["nabla_nabla"] &= (ns(ns(phi)) - ns(ns(phi))).is_zero
        # [ι_X, ∇ˢ] = Lˢ_X (component formula on the right)
        lhs = _diff(contract(Xv, ns(phi)), None if phi.degree == 0 else ns(contract(Xv, phi)))
        checks["iota_nabla"] &= lhs == sym_lie_components(nabla, Xv, phi)
        # [Lˢ_X, ι_Y] = ι_{[X,Y]_s}
        if phi.degree >= 1:
            a = sym_lie(nabla, Xv, contract(Yv, phi))
            b = contract(Yv, sym_lie(nabla, Xv, phi))
            checks["lie_iota"] &= (a - b) == contract(sbracket, phi)
        # com1
        lhs = sym_lie(nabla, Xv, sym_lie(nabla, Yv, phi)) - sym_lie(nabla, Yv, sym_lie(nabla, Xv, phi))
        rhs = sym_lie(nabla, bracket, phi) + sym_contract_or_zero(W, phi)
        checks["com1"] &= lhs == rhs
        # com2
        lhs = ns(sym_lie(nabla, Xv, phi)) - sym_lie(nabla, Xv, ns(phi))
        rhs = nabla.a_sym_derivative(grad_x, phi) * 2 + sym_contract_or_zero(sigma_x, phi)
        checks["com2"] &= lhs == rhs
        residual_nonzero["com2"] |= not lhs.is_zero
        # covLL: ∇⁰_X = ½(Lˢ_X + L_X)
        checks["covLL"] &= (covariant_derivative(nabla0, Xv, phi) * 2
                            == sym_lie(nabla, Xv, phi) + lie_derivative(Xv, phi))
    # Second commutator for Y too, so the report is symmetric in its inputs.
    sigma_y = com2_sigma(nabla, Yv)
    grad_y = nabla_endomorphism(nabla, Yv)
    lie_xy_nonzero = False
    for phi in forms:
        lhs = ns(sym_lie(nabla, Yv, phi)) - sym_lie(nabla, Yv, ns(phi))
        rhs = nabla.a_sym_derivative(grad_y, phi) * 2 + sym_contract_or_zero(sigma_y, phi)
        checks["com2"] &= lhs == rhs
        comm = sym_lie(nabla, Xv, sym_lie(nabla, Yv, phi)) - sym_lie(nabla, Yv, sym_lie(nabla, Xv, phi))
        lie_xy_nonzero |= not comm.is_zero
    checks["ok"] = all(checks.values())
    checks["nabla_s_lie_x_vanishes"] = not residual_nonzero["com2"]
    checks["lie_x_lie_y_vanishes"] = not lie_xy_nonzero
    return checks


def nabla_s_lie_commutator_vanishes(nabla: Connection, X, forms: Sequence[SymField]) -> bool:
    """[∇ˢ, Lˢ_X] = 0 on every form of the family."""
    Xv = X if isinstance(X, VecSymField) else _vec(nabla.chart, X)
    ns = nabla.sym_derivative
    return all((ns(sym_lie(nabla, Xv, phi)) - sym_lie(nabla, Xv, ns(phi))).is_zero for phi in forms)


# ---------------------------------------------------------------------------
# metrics

def matrix_inverse(M: Sequence[Sequence[ScalarField]]) -> list[list[ScalarField]]:
    """Exact inverse over the rational-function field; ZeroDivisionError if singular."""
    n = len(M)
    chart = M[0][0].chart
    A = [list(row) + [chart.one if i == j else chart.zero for j in range(n)]
         for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not A[r][col].is_zero), None)
        if piv is None:
            raise ZeroDivisionError("degenerate metric: determinant is zero")
        A[col], A[piv] = A[piv], A[col]
        inv = A[col][col].inverse()
        A[col] = [v * inv for v in A[col]]
        for r in range(n):
            if r != col and not A[r][col].is_zero:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]


def metric_matrix(g: SymField) -> list[list[ScalarField]]:
    if g.degree != 2:
        raise ValueError("metric must have degree 2")
    n = g.chart.dim
    return [[g.component((i, j)) for j in range(n)] for i in range(n)]


def raise_index(g: SymField, alpha: SymField) -> VecSymField:
    """g⁻¹α, the vector X with ι_X g = α."""
    ginv = matrix_inverse(metric_matrix(g))
    n = g.chart.dim
    a = [alpha.component((j,)) for j in range(n)]
    return _vec(g.chart, [sum((ginv[i][j] * a[j] for j in range(n)), g.chart.zero)
                          for i in range(n)])


def levi_civita_check(nabla: Connection, g: SymField, samples: int = 5, seed: int = 0) -> bool:
    """True iff ∇ is torsion-free and ∇g = 0; then also asserts ∇ˢα = L_{g⁻¹α} g."""
    from .samples import random_symfield

    ginv = matrix_inverse(metric_matrix(g))  # raises on degenerate g
    del ginv
    if not nabla.is_torsion_free:
        return False
    n = nabla.dim
    for k in range(n):
        if not covariant_derivative(nabla, _basis(nabla.chart, k), g).is_zero:
            return False
    rng = random.Random(seed)
    for _ in range(samples):
        alpha = random_symfield(nabla.chart, 1, rng, coeff_degree=2)
        X = raise_index(g, alpha)
        if nabla.sym_derivative(alpha) != lie_derivative(X, g):
            raise AssertionError("Levi-Civita symmetric derivative differs from L_{g⁻¹α} g")
    return True
