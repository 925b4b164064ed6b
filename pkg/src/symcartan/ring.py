"""Exact scalar fields on a coordinate chart.

A scalar field is a quotient of multivariate polynomials over Q in the chart
generators. Affine coordinates are generators themselves; an angle coordinate
``t`` contributes the pair ``cos(t)``, ``sin(t)`` subject to cos² + sin² = 1.

Canonical form, kept after every operation:

* numerators and denominators have sin-degree at most 1 in each angle;
* denominators contain no sin generator at all (they are rationalized by the
  conjugate ``A - B*sin``), so the numerator is unique over the free basis {1, sin};
* gcd(numerator, denominator) = 1 and the denominator is monic in grlex order.

Equality is therefore structural. Polynomial arithmetic is delegated to
sympy's sparse ``PolyRing`` over QQ.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

from sympy import Symbol
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

from . import expr as _expr
from .expr import ParseError, PoleError

AFFINE = "affine"
ANGLE = "angle"
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*\Z")
_RESERVED = {"sin", "cos", "exp", "log", "sqrt"}

Number = Union[int, Fraction]


@dataclass(frozen=True)
class Coord:
    name: str
    kind: str = AFFINE


@dataclass(frozen=True)
class Chart:
    """An ordered list of named coordinates, each affine or angle."""

    coords: tuple[Coord, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(
            c if isinstance(c, Coord) else Coord(*c) for c in self.coords))
        if not self.coords:
            raise ValueError("a chart needs at least one coordinate")
        names = [c.name for c in self.coords]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate coordinate names in {names}")
        for c in self.coords:
            if not _IDENT.match(c.name) or c.name in _RESERVED:
                raise ValueError(f"invalid coordinate name {c.name!r}")
            if c.kind not in (AFFINE, ANGLE):
                raise ValueError(f"coordinate kind must be affine or angle, got {c.kind!r}")

    @classmethod
    def affine(cls, *names: str) -> "Chart":
        return cls(tuple(Coord(n, AFFINE) for n in names))

    @classmethod
    def angles(cls, *names: str) -> "Chart":
        return cls(tuple(Coord(n, ANGLE) for n in names))

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.coords]

    def index(self, name: str) -> int:
        for i, c in enumerate(self.coords):
            if c.name == name:
                return i
        raise KeyError(name)

    def product(self, other: "Chart") -> "Chart":
        return Chart(self.coords + other.coords)

    # -- polynomial ring plumbing ------------------------------------------

    @cached_property
    def _layout(self):
        symbols, slots = [], []
        for c in self.coords:
            if c.kind == AFFINE:
                slots.append((len(symbols),))
                symbols.append(Symbol(c.name))
            else:
                slots.append((len(symbols), len(symbols) + 1))
                symbols.append(Symbol(f"cos({c.name})"))
                symbols.append(Symbol(f"sin({c.name})"))
        ring = PolyRing(symbols, QQ, grlex)
        return ring, tuple(slots)

    @property
    def ring(self) -> PolyRing:
        return self._layout[0]

    @property
    def slots(self) -> tuple[tuple[int, ...], ...]:
        """Generator indices per coordinate: (g,) for affine, (cos, sin) for angle."""
        return self._layout[1]

    @cached_property
    def angle_slots(self) -> tuple[tuple[int, int], ...]:
        return tuple(s for s in self.slots if len(s) == 2)

    @cached_property
    def _one_minus_cos2(self) -> dict[int, PolyElement]:
        R = self.ring
        return {c: R.one - R.gens[c] ** 2 for c, _ in self.angle_slots}

    def reduce(self, p: PolyElement) -> PolyElement:
        """Rewrite sin² as 1 - cos² until every sin-degree is at most 1."""
        for c, s in self.angle_slots:
            if all(m[s] < 2 for m in p):
                continue
            R = self.ring
            low: dict = {}
            out = R.zero
            for m, coef in p.items():
                e = m[s]
                if e < 2:
                    low[m] = low.get(m, 0) + coef
                else:
                    mm = m[:s] + (e % 2,) + m[s + 1:]
                    out += R({mm: coef}) * self._one_minus_cos2[c] ** (e // 2)
            p = out + R(low)
        return p

    # -- constructors --------------------------------------------------------

    def const(self, value: Number) -> "ScalarField":
        return ScalarField._raw(self, self.ring.ground_new(QQ.convert(_as_fraction(value))),
                                self.ring.one)

    @cached_property
    def zero(self) -> "ScalarField":
        return ScalarField._raw(self, self.ring.zero, self.ring.one)

    @cached_property
    def one(self) -> "ScalarField":
        return ScalarField._raw(self, self.ring.one, self.ring.one)

    def coord(self, i: int) -> "ScalarField":
        """The coordinate function x^i (affine coordinates only)."""
        slot = self.slots[i]
        if len(slot) != 1:
            raise ValueError(f"{self.coords[i].name} is an angle; use cos/sin")
        return ScalarField._raw(self, self.ring.gens[slot[0]], self.ring.one)

    def cos(self, i: int) -> "ScalarField":
        return ScalarField._raw(self, self.ring.gens[self._angle(i)[0]], self.ring.one)

    def sin(self, i: int) -> "ScalarField":
        return ScalarField._raw(self, self.ring.gens[self._angle(i)[1]], self.ring.one)

    def _angle(self, i: int) -> tuple[int, int]:
        slot = self.slots[i]
        if len(slot) != 2:
            raise ValueError(f"sin/cos applied to affine coordinate {self.coords[i].name!r}")
        return slot

    def polynomial(self, p: PolyElement) -> "ScalarField":
        return ScalarField._make(self, p, self.ring.one)

    def parse(self, text: str) -> "ScalarField":
        return parse_expr(self, text)

    def field(self, value) -> "ScalarField":
        """Coerce a ScalarField, number or expression string to a field on this chart."""
        if isinstance(value, ScalarField):
            if value.chart != self:
                raise ValueError("chart mismatch")
            return value
        if isinstance(value, str):
            return parse_expr(self, value)
        return self.const(value)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"exact rational expected, got {type(value).__name__}")


def _to_fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


class ScalarField:
    """Exact rational function on a chart, always in canonical form."""

    __slots__ = ("chart", "num", "den", "_compiled", "_hash")

    def __init__(self):  # pragma: no cover - use the chart constructors
        raise TypeError("construct ScalarFields through a Chart or parse_expr")

    @classmethod
    def _raw(cls, chart: Chart, num: PolyElement, den: PolyElement) -> "ScalarField":
        self = object.__new__(cls)
        self.chart = chart
        self.num = num
        self.den = den
        self._compiled = None
        self._hash = None
        return self

    @classmethod
    def _make(cls, chart: Chart, num: PolyElement, den: PolyElement) -> "ScalarField":
        R = chart.ring
        if not den:
            raise ZeroDivisionError("division by the zero polynomial")
        num = chart.reduce(num)
        if not num:
            return chart.zero
        den = chart.reduce(den)
        for c, s in chart.angle_slots:
            if any(m[s] for m in den):
                a = R({m: k for m, k in den.items() if not m[s]})
                b = R({m[:s] + (0,) + m[s + 1:]: k for m, k in den.items() if m[s]})
                conj = a - b * R.gens[s]
                num = chart.reduce(num * conj)
                den = chart.reduce(den * conj)
        if den.is_ground:
            lc = den.LC
            return cls._raw(chart, num.quo_ground(lc) if lc != 1 else num, R.one)
        _, num, den = num.cofactors(den)
        lc = den.LC
        if lc != 1:
            num = num.quo_ground(lc)
            den = den.quo_ground(lc)
        return cls._raw(chart, num, den)

    # -- predicates ------------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.num

    @property
    def is_polynomial(self) -> bool:
        return self.den.is_one

    @property
    def is_constant(self) -> bool:
        return self.num.is_ground and self.den.is_one

    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise ValueError("field is not constant")
        return _to_fraction(self.num.LC) if self.num else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.num)

    # -- arithmetic --------------------------------------------------------------

    def _coerce(self, other) -> "ScalarField":
        if isinstance(other, ScalarField):
            if other.chart is not self.chart and other.chart != self.chart:
                raise ValueError("chart mismatch")
            return other
        if isinstance(other, (int, Fraction)):
            return self.chart.const(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.num:
            return self
        if not self.num:
            return o
        if self.den == o.den:
            if self.den.is_one:
                return ScalarField._raw(self.chart, self.num + o.num, self.den)
            return ScalarField._make(self.chart, self.num + o.num, self.den)
        return ScalarField._make(self.chart, self.num * o.den + o.num * self.den,
                                 self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return ScalarField._raw(self.chart, -self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not self.num or not o.num:
            return self.chart.zero
        if o.is_constant:
            c = o.num.LC
            return self if c == 1 else ScalarField._raw(self.chart, self.num * c, self.den)
        if self.is_constant:
            return o * self
        num = self.chart.reduce(self.num * o.num)
        if self.den.is_one and o.den.is_one:
            return ScalarField._raw(self.chart, num, self.den)
        return ScalarField._make(self.chart, num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "ScalarField":
        if not self.num:
            raise ZeroDivisionError("division by the zero polynomial")
        return ScalarField._make(self.chart, self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o.is_constant:
            if not o.num:
                raise ZeroDivisionError("division by the zero polynomial")
            return ScalarField._raw(self.chart, self.num.quo_ground(o.num.LC), self.den)
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            return self.chart.one
        if self.den.is_one:
            return ScalarField._raw(self.chart, self.chart.reduce(self.num ** n), self.den)
        return ScalarField._make(self.chart, self.num ** n, self.den ** n)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.chart.const(other)
        if not isinstance(other, ScalarField):
            return NotImplemented
        return self.chart == other.chart and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.chart, frozenset(self.num.items()),
                               frozenset(self.den.items())))
        return self._hash

    # -- calculus ------------------------------------------------------------------

    def _dpoly(self, p: PolyElement, i: int) -> PolyElement:
        R = self.chart.ring
        slot = self.chart.slots[i]
        if len(slot) == 1:
            return p.diff(R.gens[slot[0]])
        c, s = slot
        return self.chart.reduce(R.gens[c] * p.diff(R.gens[s]) - R.gens[s] * p.diff(R.gens[c]))

    def partial(self, i: int) -> "ScalarField":
        if not 0 <= i < self.chart.dim:
            raise IndexError(f"coordinate index {i} out of range")
        if not self.num:
            return self
        dn = self._dpoly(self.num, i)
        if self.den.is_one:
            return ScalarField._raw(self.chart, dn, self.den)
        dd = self._dpoly(self.den, i)
        return ScalarField._make(self.chart, dn * self.den - self.num * dd, self.den ** 2)

    # -- numerics --------------------------------------------------------------------

    def _compile(self):
        if self._compiled is None:
            def terms(p):
                return [(float(_to_fraction(c)), m) for m, c in p.items()]
            self._compiled = (terms(self.num), terms(self.den), self.den.is_one)
        return self._compiled

    def eval_generators(self, gens: Sequence, pole_tol: float = 1e-12):
        """Evaluate given numeric values of every ring generator (float or Dual)."""
        num_terms, den_terms, polynomial = self._compile()
        num = _eval_terms(num_terms, gens)
        if polynomial:
            return num
        den = _eval_terms(den_terms, gens)
        if abs(den.val if isinstance(den, _expr.Dual) else den) < pole_tol:
            raise PoleError("denominator vanishes at the evaluation point")
        return num / den

    # -- printing ---------------------------------------------------------------------

    def __str__(self) -> str:
        return to_expr(self)

    def __repr__(self) -> str:
        return f"ScalarField({to_expr(self)!r})"


def _eval_terms(terms, gens):
    total = 0.0
    for coef, mon in terms:
        t = coef
        for g, e in zip(gens, mon):
            if e:
                t = t * (g if e == 1 else g ** e)
        total = total + t
    return total


@dataclass(frozen=True)
class NumericPoint:
    chart: Chart
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.values) != self.chart.dim:
            raise ValueError("point dimension does not match chart")

    def generators(self) -> list[float]:
        return generator_values(self.chart, self.values)


def generator_values(chart: Chart, values: Sequence, cos=math.cos, sin=math.sin) -> list:
    """Map coordinate values to ring-generator values (angles become cos, sin)."""
    out = []
    for slot, v in zip(chart.slots, values):
        if len(slot) == 1:
            out.append(v)
        else:
            out.append(cos(v))
            out.append(sin(v))
    return out


def eval_numeric(f: ScalarField, p: NumericPoint) -> float:
    if p.chart != f.chart:
        raise ValueError("chart mismatch")
    return f.eval_generators(p.generators())


def partial(f: ScalarField, i: int) -> ScalarField:
    return f.partial(i)


# ---------------------------------------------------------------------------
# Parsing and printing

def parse_expr(chart: Chart, text: str) -> ScalarField:
    """Parse an expression in the ring grammar into a canonical ScalarField."""
    tree = _expr.parse(text, numeric=False)
    return _build(chart, tree, text)


def _build(chart: Chart, node, text: str) -> ScalarField:
    if isinstance(node, _expr.Num):
        return chart.const(node.value)
    if isinstance(node, _expr.Var):
        try:
            i = chart.index(node.name)
        except KeyError:
            raise ParseError(f"unknown identifier {node.name!r}", node.pos, text) from None
        if chart.coords[i].kind == ANGLE:
            raise ParseError(f"angle coordinate {node.name!r} may only appear inside sin/cos",
                             node.pos, text)
        return chart.coord(i)
    if isinstance(node, _expr.Call):
        name = node.arg.name
        try:
            i = chart.index(name)
        except KeyError:
            raise ParseError(f"unknown identifier {name!r}", node.arg.pos, text) from None
        if chart.coords[i].kind != ANGLE:
            raise ParseError(f"{node.func}() applied to affine coordinate {name!r}",
                             node.pos, text)
        return chart.cos(i) if node.func == "cos" else chart.sin(i)
    if isinstance(node, _expr.Neg):
        return -_build(chart, node.arg, text)
    if isinstance(node, _expr.Pow):
        base = _build(chart, node.base, text)
        if node.exponent < 0 and base.is_zero:
            raise ParseError("negative power of zero", 0, text)
        return base ** node.exponent
    left = _build(chart, node.left, text)
    right = _build(chart, node.right, text)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if right.is_zero:
        raise ParseError("division by the zero polynomial", node.pos, text)
    return left / right


def _gen_names(chart: Chart) -> list[str]:
    names = []
    for c in chart.coords:
        if c.kind == AFFINE:
            names.append(c.name)
        else:
            names += [f"cos({c.name})", f"sin({c.name})"]
    return names


def _fmt_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def poly_to_expr(chart: Chart, p: PolyElement) -> str:
    if not p:
        return "0"
    names = _gen_names(chart)
    parts = []
    for mon, coef in p.terms():
        q = _to_fraction(coef)
        factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, mon) if e]
        mag = abs(q)
        if not factors:
            body = _fmt_rational(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = _fmt_rational(mag) + "*" + "*".join(factors)
        if not parts:
            parts.append(("-" if q < 0 else "") + body)
        else:
            parts.append((" - " if q < 0 else " + ") + body)
    return "".join(parts)


def to_expr(f: ScalarField) -> str:
    """Render in the ring grammar; parse_expr(to_expr(f)) == f."""
    num = poly_to_expr(f.chart, f.num)
    if f.den.is_one:
        return num
    return f"({num})/({poly_to_expr(f.chart, f.den)})"


def fields(chart: Chart, values: Iterable) -> list[ScalarField]:
    return [chart.field(v) for v in values]
