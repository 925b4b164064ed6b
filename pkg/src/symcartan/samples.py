"""Seeded random fields for property checks and identity reports."""

from __future__ import annotations

import random
from fractions import Fraction

from .ring import AFFINE, Chart, ScalarField
from .symtensor import SymField, VecSymField, exponents


def monomials(chart: Chart, degree: int) -> list[ScalarField]:
    """Ring monomials of total generator degree ≤ ``degree``, sin-degree ≤ 1 per angle.

    Ordered by total degree, then by generator exponents, so the listing is
    reproducible; for angle coordinates it spans trigonometric polynomials of
    degree ≤ ``degree``.
    """
    R = chart.ring
    ngens = R.ngens
    sin_slots = {s for _, s in chart.angle_slots}
    out = []
    for total in range(degree + 1):
        for mon in _compositions(total, ngens):
            if any(mon[s] > 1 for s in sin_slots):
                continue
            out.append(chart.polynomial(R({mon: 1})))
    return out


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def random_field(chart: Chart, rng: random.Random, degree: int = 2, density: float = 0.6,
                 rational: bool = False) -> ScalarField:
    """Random polynomial (or, with ``rational``, pole-free quotient) of bounded degree."""
    f = chart.zero
    for m in monomials(chart, degree):
        if rng.random() < density:
            f = f + m * Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    if rational:
        affine = [i for i, c in enumerate(chart.coords) if c.kind == AFFINE]
        if affine:
            i = rng.choice(affine)
            f = f / (1 + chart.coord(i) ** 2)
    return f


def random_symfield(chart: Chart, degree: int, rng: random.Random, coeff_degree: int = 2,
                    rational: bool = False) -> SymField:
    fiber = {}
    for e in exponents(chart.dim, degree):
        c = random_field(chart, rng, coeff_degree, rational=rational)
        if not c.is_zero:
            fiber[e] = c
    return SymField(chart, degree, fiber)


def random_vector(chart: Chart, rng: random.Random, coeff_degree: int = 2) -> VecSymField:
    return VecSymField.vector(chart, [random_field(chart, rng, coeff_degree)
                                      for _ in range(chart.dim)])


def spanning_forms(chart: Chart, max_degree: int = 3, rng: random.Random | None = None) -> list[SymField]:
    """Test family for derivation identities: functions plus monomial forms dx^α times
    a constant, a coordinate-dependent and (when ``rng`` is given) a random coefficient.

    Derivations are determined by their action on functions and 1-forms, so this
    family exercises every identity in all degrees up to ``max_degree``.
    """
    n = chart.dim
    rng = rng or random.Random(0)
    coefficients = [chart.one]
    gens = monomials(chart, 1)[1:]
    coefficients += gens
    out = [SymField.scalar(c) for c in gens]
    out.append(SymField.scalar(random_field(chart, rng, 2)))
    for r in range(1, max_degree + 1):
        for e in exponents(n, r):
            base = SymField(chart, r, {e: chart.one})
            out.append(base)
            out.append(base * gens[sum(e) % len(gens)])
        out.append(random_symfield(chart, r, rng, coeff_degree=1))
    return out
