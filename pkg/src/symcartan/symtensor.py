"""Symmetric covariant tensor fields through their fiber polynomials.

A degree-r field φ is stored as φ̃(v) = (1/r!) φ(v, …, v), a homogeneous
polynomial in velocity variables v¹..vⁿ with ScalarField coefficients, keyed
by exponent tuples. With that convention ⊙ is polynomial multiplication and
every contraction is a first-order operator in v.

Public components follow the tensor convention: for a multi-index α with
|α| = r, φ(∂_{i₁}, …, ∂_{i_r}) = α! · (coefficient of v^α).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

from .ring import Chart, ScalarField

Exp = tuple[int, ...]
Fiber = dict[Exp, ScalarField]


# ---------------------------------------------------------------------------
# multi-index helpers

def exponent_of(indices: Sequence[int], n: int) -> Exp:
    e = [0] * n
    for i in indices:
        e[i] += 1
    return tuple(e)


def indices_of(e: Exp) -> tuple[int, ...]:
    return tuple(i for i, a in enumerate(e) for _ in range(a))


def multi_factorial(e: Exp) -> int:
    out = 1
    for a in e:
        out *= factorial(a)
    return out


def exponents(n: int, r: int) -> list[Exp]:
    """All exponent tuples of total degree r in n variables, in sorted-index order."""
    return [exponent_of(c, n) for c in itertools.combinations_with_replacement(range(n), r)]


def unit(n: int, i: int) -> Exp:
    return tuple(1 if j == i else 0 for j in range(n))


def _shift(e: Exp, plus: Exp) -> Exp:
    return tuple(a + b for a, b in zip(e, plus))


# ---------------------------------------------------------------------------
# fiber-polynomial arithmetic (dicts without zero entries)

def fiber_add(a: Fiber, b: Fiber, sign: int = 1) -> Fiber:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        v = (c if sign > 0 else -c) if v is None else (v + c if sign > 0 else v - c)
        if v.is_zero:
            out.pop(e, None)
        else:
            out[e] = v
    return out


def fiber_scale(a: Fiber, f) -> Fiber:
    out = {}
    for e, c in a.items():
        v = c * f
        if not v.is_zero:
            out[e] = v
    return out


def fiber_mul(a: Fiber, b: Fiber) -> Fiber:
    out: Fiber = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = _shift(ea, eb)
            v = ca * cb
            if e in out:
                v = out[e] + v
            if v.is_zero:
                out.pop(e, None)
            else:
                out[e] = v
    return out


def fiber_dv(a: Fiber, k: int) -> Fiber:
    """∂/∂v^k."""
    out = {}
    for e, c in a.items():
        if e[k]:
            out[e[:k] + (e[k] - 1,) + e[k + 1:]] = c * e[k]
    return out


def fiber_dx(a: Fiber, i: int) -> Fiber:
    """∂/∂x^i acting on coefficients."""
    out = {}
    for e, c in a.items():
        d = c.partial(i)
        if not d.is_zero:
            out[e] = d
    return out


def fiber_accumulate(out: Fiber, e: Exp, value: ScalarField) -> None:
    if value.is_zero:
        return
    if e in out:
        v = out[e] + value
        if v.is_zero:
            del out[e]
        else:
            out[e] = v
    else:
        out[e] = value


# ---------------------------------------------------------------------------

class SymField:
    """A symmetric covariant r-tensor field (degree 0 = scalar field)."""

    __slots__ = ("chart", "degree", "fiber")

    def __init__(self, chart: Chart, degree: int, fiber: Mapping[Exp, ScalarField]):
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        clean = {}
        for e, c in fiber.items():
            if len(e) != chart.dim or sum(e) != degree:
                raise ValueError(f"exponent {e} is not homogeneous of degree {degree}")
            c = chart.field(c)
            if not c.is_zero:
                clean[tuple(e)] = c
        self.chart = chart
        self.degree = degree
        self.fiber = clean

    @classmethod
    def _wrap(cls, chart: Chart, degree: int, fiber: Fiber) -> "SymField":
        self = object.__new__(cls)
        self.chart = chart
        self.degree = degree
        self.fiber = fiber
        return self

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "SymField":
        return cls._wrap(chart, degree, {})

    @classmethod
    def scalar(cls, f: ScalarField) -> "SymField":
        return cls._wrap(f.chart, 0, {} if f.is_zero else {(0,) * f.chart.dim: f})

    @classmethod
    def dx(cls, chart: Chart, i: int) -> "SymField":
        return cls._wrap(chart, 1, {unit(chart.dim, i): chart.one})

    @classmethod
    def from_components(cls, chart: Chart, degree: int,
                        components: Mapping[Sequence[int], object]) -> "SymField":
        """Build from symmetric components keyed by (any ordering of) index tuples.

        Only one representative per multiset is needed; supplying several
        orderings of the same multiset with different values is an error.
        """
        fiber: Fiber = {}
        seen: dict[Exp, ScalarField] = {}
        for idx, value in components.items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise ValueError(f"index {idx} has arity {len(idx)}, expected {degree}")
            if any(not 0 <= i < chart.dim for i in idx):
                raise ValueError(f"index {idx} out of range")
            e = exponent_of(idx, chart.dim)
            v = chart.field(value)
            if e in seen:
                if seen[e] != v:
                    raise ValueError(f"inconsistent values for symmetric index {idx}")
                continue
            seen[e] = v
            if not v.is_zero:
                fiber[e] = v / multi_factorial(e)
        return cls._wrap(chart, degree, fiber)

    # -- access ---------------------------------------------------------------------

    def component(self, indices: Sequence[int]) -> ScalarField:
        e = exponent_of(indices, self.chart.dim)
        c = self.fiber.get(e)
        return self.chart.zero if c is None else c * multi_factorial(e)

    def components(self) -> dict[tuple[int, ...], ScalarField]:
        """Nonzero components keyed by sorted index tuples."""
        return {indices_of(e): c * multi_factorial(e) for e, c in sorted(self.fiber.items(),
                                                                          key=_exp_key)}

    @property
    def is_zero(self) -> bool:
        return not self.fiber

    def scalar_value(self) -> ScalarField:
        if self.degree != 0:
            raise ValueError("not a degree-0 field")
        return self.fiber.get((0,) * self.chart.dim, self.chart.zero)

    # -- algebra ------------------------------------------------------------------------

    def _check(self, other: "SymField") -> None:
        if other.chart != self.chart:
            raise ValueError("chart mismatch")

    def __add__(self, other: "SymField") -> "SymField":
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("cannot add fields of different degree")
        return SymField._wrap(self.chart, self.degree, fiber_add(self.fiber, other.fiber))

    def __sub__(self, other: "SymField") -> "SymField":
        self._check(other)
        if other.degree != self.degree:
            raise ValueError("cannot subtract fields of different degree")
        return SymField._wrap(self.chart, self.degree, fiber_add(self.fiber, other.fiber, -1))

    def __neg__(self) -> "SymField":
        return SymField._wrap(self.chart, self.degree, {e: -c for e, c in self.fiber.items()})

    def __mul__(self, f) -> "SymField":
        """Pointwise scaling by a function or number."""
        if isinstance(f, SymField):
            return NotImplemented
        return SymField._wrap(self.chart, self.degree, fiber_scale(self.fiber, self.chart.field(f)))

    __rmul__ = __mul__

    def odot(self, other: "SymField") -> "SymField":
        return sym_product(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymField):
            return NotImplemented
        return (self.chart == other.chart and self.degree == other.degree
                and self.fiber == other.fiber)

    def __hash__(self):
        return hash((self.chart, self.degree, frozenset(self.fiber.items())))

    def __repr__(self) -> str:
        return f"SymField(degree={self.degree}, {self.to_json()})"

    # -- serialization ---------------------------------------------------------------------

    def to_json(self) -> dict[str, str]:
        return {",".join(map(str, idx)): str(c) for idx, c in self.components().items()}

    @classmethod
    def from_json(cls, chart: Chart, degree: int, data: Mapping[str, str]) -> "SymField":
        return cls.from_components(chart, degree,
                                   {parse_index(chart, k, degree): v for k, v in data.items()})

    def evaluate(self, gens: Sequence, velocity: Sequence):
        """Numeric value of φ̃ at generator values ``gens`` and velocity ``velocity``."""
        total = 0.0
        for e, c in self.fiber.items():
            t = c.eval_generators(gens)
            for v, a in zip(velocity, e):
                if a:
                    t = t * v ** a
            total = total + t
        return total


def _exp_key(item):
    e = item[0]
    return indices_of(e)


def parse_index(chart: Chart, key: str, arity: int | None = None) -> tuple[int, ...]:
    """Parse "i,j,k" where each entry is a 0-based index or a coordinate name."""
    key = key.strip()
    parts = [] if key == "" else [p.strip() for p in key.split(",")]
    out = []
    for p in parts:
        if p.isdigit():
            i = int(p)
            if i >= chart.dim:
                raise ValueError(f"index {i} out of range in key {key!r}")
        else:
            try:
                i = chart.index(p)
            except KeyError:
                raise ValueError(f"unknown coordinate {p!r} in key {key!r}") from None
        out.append(i)
    if arity is not None and len(out) != arity:
        raise ValueError(f"key {key!r} has arity {len(out)}, expected {arity}")
    return tuple(out)


class VecSymField:
    """σ ∈ Υᵏ(M, TM): one degree-k symmetric field per output component.

    k = 0 are vector fields, k = 1 endomorphism fields (A(∂_j) = Σ_m A^m_j ∂_m).
    """

    __slots__ = ("chart", "degree", "comps")

    def __init__(self, chart: Chart, degree: int, comps: Sequence[SymField]):
        if len(comps) != chart.dim:
            raise ValueError("one component per coordinate direction is required")
        for c in comps:
            if c.chart != chart or c.degree != degree:
                raise ValueError("component chart or degree mismatch")
        self.chart = chart
        self.degree = degree
        self.comps = tuple(comps)

    @classmethod
    def vector(cls, chart: Chart, values: Sequence) -> "VecSymField":
        return cls(chart, 0, [SymField.scalar(chart.field(v)) for v in values])

    @classmethod
    def coordinate_vector(cls, chart: Chart, i: int) -> "VecSymField":
        return cls.vector(chart, [1 if j == i else 0 for j in range(chart.dim)])

    @classmethod
    def endomorphism(cls, chart: Chart, matrix: Sequence[Sequence]) -> "VecSymField":
        """matrix[m][j] = dx^m(A ∂_j)."""
        return cls(chart, 1, [SymField.from_components(chart, 1, {(j,): matrix[m][j]
                                                                  for j in range(chart.dim)})
                              for m in range(chart.dim)])

    @classmethod
    def identity(cls, chart: Chart) -> "VecSymField":
        n = chart.dim
        return cls.endomorphism(chart, [[1 if m == j else 0 for j in range(n)] for m in range(n)])

    @classmethod
    def zero(cls, chart: Chart, degree: int) -> "VecSymField":
        return cls(chart, degree, [SymField.zero(chart, degree)] * chart.dim)

    @classmethod
    def from_components(cls, chart: Chart, degree: int,
                        values: Mapping[tuple[int, tuple[int, ...]], object]) -> "VecSymField":
        """values[(m, (i1..ik))] = σ^m(∂_{i1}, …, ∂_{ik}) (symmetric in the i's)."""
        per = [dict() for _ in range(chart.dim)]
        for (m, idx), v in values.items():
            per[m][tuple(idx)] = v
        return cls(chart, degree, [SymField.from_components(chart, degree, p) for p in per])

    def component(self, m: int, indices: Sequence[int] = ()) -> ScalarField:
        return self.comps[m].component(indices)

    def values(self) -> list[ScalarField]:
        """Component functions of a vector field (k = 0)."""
        if self.degree != 0:
            raise ValueError("not a vector field")
        return [c.scalar_value() for c in self.comps]

    def matrix(self) -> list[list[ScalarField]]:
        if self.degree != 1:
            raise ValueError("not an endomorphism field")
        n = self.chart.dim
        return [[self.comps[m].component((j,)) for j in range(n)] for m in range(n)]

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.comps)

    def __add__(self, other: "VecSymField") -> "VecSymField":
        return VecSymField(self.chart, self.degree, [a + b for a, b in zip(self.comps, other.comps)])

    def __sub__(self, other: "VecSymField") -> "VecSymField":
        return VecSymField(self.chart, self.degree, [a - b for a, b in zip(self.comps, other.comps)])

    def __neg__(self) -> "VecSymField":
        return VecSymField(self.chart, self.degree, [-a for a in self.comps])

    def __mul__(self, f) -> "VecSymField":
        if isinstance(f, (SymField, VecSymField)):
            return NotImplemented
        return VecSymField(self.chart, self.degree, [a * f for a in self.comps])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, VecSymField):
            return NotImplemented
        return self.chart == other.chart and self.degree == other.degree and self.comps == other.comps

    def __hash__(self):
        return hash((self.chart, self.degree, self.comps))

    def __repr__(self) -> str:
        return f"VecSymField(degree={self.degree}, {[c.to_json() for c in self.comps]})"

    def to_json(self) -> list[dict[str, str]]:
        return [c.to_json() for c in self.comps]


# ---------------------------------------------------------------------------
# operations

def sym_projection(chart: Chart, degree: int, tensor: Mapping[Sequence[int], object]) -> SymField:
    """Symmetric part of a covariant tensor given by (possibly partial) component map.

    The fiber polynomial of sym(t) is (1/r!) t(v, …, v), so no explicit
    permutation average is needed.
    """
    fiber: Fiber = {}
    scale = Fraction(1, factorial(degree))
    for idx, value in tensor.items():
        idx = tuple(idx)
        if len(idx) != degree:
            raise ValueError(f"index {idx} has arity {len(idx)}, expected {degree}")
        fiber_accumulate(fiber, exponent_of(idx, chart.dim), chart.field(value) * scale)
    return SymField._wrap(chart, degree, fiber)


def sym_product(phi: SymField, psi: SymField) -> SymField:
    if phi.chart != psi.chart:
        raise ValueError("chart mismatch")
    return SymField._wrap(phi.chart, phi.degree + psi.degree, fiber_mul(phi.fiber, psi.fiber))


def contract(X: VecSymField, phi: SymField) -> SymField:
    """ι_X φ = Σ Xⁱ ∂φ̃/∂vⁱ."""
    if X.degree != 0:
        raise ValueError("contract expects a vector field")
    if phi.degree == 0:
        raise ValueError("cannot contract a degree-0 field")
    if X.chart != phi.chart:
        raise ValueError("chart mismatch")
    out: Fiber = {}
    for i, Xi in enumerate(X.values()):
        if Xi.is_zero:
            continue
        out = fiber_add(out, fiber_scale(fiber_dv(phi.fiber, i), Xi))
    return SymField._wrap(phi.chart, phi.degree - 1, out)


def sym_contract(sigma: VecSymField, phi: SymField) -> SymField:
    """ιˢ_σ φ = Σ_m σ̃ᵐ ∂φ̃/∂vᵐ, a derivation of degree k − 1 killing scalars."""
    if sigma.chart != phi.chart:
        raise ValueError("chart mismatch")
    if phi.degree == 0:
        raise ValueError("symmetric contraction of a degree-0 field")
    out: Fiber = {}
    for m, comp in enumerate(sigma.comps):
        if comp.is_zero:
            continue
        d = fiber_dv(phi.fiber, m)
        if d:
            out = fiber_add(out, fiber_mul(comp.fiber, d))
    return SymField._wrap(phi.chart, phi.degree + sigma.degree - 1, out)


def sym_contract_or_zero(sigma: VecSymField, phi: SymField) -> SymField:
    """ιˢ_σ extended by zero to functions (it is a derivation annihilating scalars)."""
    if phi.degree == 0:
        if sigma.degree == 0:
            raise ValueError("ι_X of a function has no degree −1 representative")
        return SymField.zero(phi.chart, sigma.degree - 1)
    return sym_contract(sigma, phi)


def general_derivation(A: VecSymField, sigma: VecSymField, aux) -> Callable[[SymField], SymField]:
    """D = ∇ˢ_A + ιˢ_σ for an endomorphism A, σ ∈ Υ²(M,TM) and auxiliary connection."""
    if A.degree != 1 or sigma.degree != 2:
        raise ValueError("general_derivation expects A of degree 1 and σ of degree 2")
    if A.chart != aux.chart or sigma.chart != aux.chart:
        raise ValueError("chart mismatch")

    def D(phi: SymField) -> SymField:
        out = aux.a_sym_derivative(A, phi)
        if phi.degree:
            out = out + sym_contract(sigma, phi)
        return out

    return D


def scalar(f: ScalarField) -> SymField:
    return SymField.scalar(f)
