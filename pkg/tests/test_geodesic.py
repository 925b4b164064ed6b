import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symcartan.connection import Connection, TorsionError
from symcartan.geodesic import (
    conserved_quantity,
    integrate_geodesic,
    rk4,
    rk4_order_factor,
    spray_correspondence,
    sym_lie_flow_check,
)
from symcartan.golden import _corpus_killing_tensors, connection_corpus, plane_example
from symcartan.ring import Chart
from symcartan.samples import random_field, random_symfield
from symcartan.symtensor import SymField

PLANE = Chart.affine("x", "y")
LINE = Chart.affine("x")
seeds = st.integers(0, 10**6)


def test_rk4_exponential():
    (y,) = rk4(lambda t, y: y, np.array([1.0]), 0.01, 100, record=False)
    assert y[0] == pytest.approx(math.e, rel=1e-9)


def test_step_validation():
    with pytest.raises(ValueError):
        integrate_geodesic(Connection.flat(LINE), [0.0], [1.0], h=0.3, T=1.0)
    with pytest.raises(ValueError):
        integrate_geodesic(Connection.flat(LINE), [0.0, 1.0], [1.0])


def test_straight_lines():
    run = integrate_geodesic(Connection.flat(PLANE), [0.1, 0.2], [1.0, -0.5], h=0.01, T=1.0)
    assert run.steps == 100
    assert run.positions[-1] == pytest.approx([1.1, -0.3], abs=1e-13)


def test_logarithmic_geodesic():
    # Γ = 1 on the line: ẍ = −ẋ², solved by x(t) = ln(1 + t/2)
    nabla = Connection.from_entries(LINE, {(0, 0, 0): 1})
    run = integrate_geodesic(nabla, [0.0], [0.5], h=1e-3, T=1.0)
    assert abs(run.positions[-1][0] - math.log(1.5)) < 1e-12


def test_rk4_order():
    assert 12 <= rk4_order_factor() <= 20


def test_csv_output():
    run = integrate_geodesic(Connection.flat(PLANE), [0.0, 0.0], [1.0, 0.0], h=0.5, T=1.0)
    lines = run.csv().splitlines()
    assert lines[0] == "t,x,y,v_x,v_y" and len(lines) == 4
    assert run.to_json()["end"] == [1.0, 0.0]


@pytest.mark.parametrize("name, nabla, K", _corpus_killing_tensors(),
                         ids=lambda v: v if isinstance(v, str) else "")
def test_killing_tensors_are_conserved(name, nabla, K):
    n = nabla.dim
    run = integrate_geodesic(nabla, [0.1 * (i + 1) for i in range(n)], [0.6 - 0.25 * i for i in range(n)])
    assert conserved_quantity(run, K) < 1e-8


def test_non_killing_form_drifts():
    nabla = plane_example(PLANE, "x*y", "y")
    run = integrate_geodesic(nabla, [0.1, 0.2], [0.6, 0.35])
    assert conserved_quantity(run, SymField.dx(PLANE, 0) * PLANE.coord(0)) > 1e-3


@pytest.mark.parametrize("name", sorted(connection_corpus()))
def test_spray_correspondence_on_corpus(name):
    nabla = connection_corpus()[name]
    rng = random.Random(0)
    for r in range(4):
        assert spray_correspondence(nabla, random_symfield(nabla.chart, r, rng), 50) < 1e-6


def random_torsion_free(seed):
    rng = random.Random(seed)
    g = [[[random_field(PLANE, rng, 1) / 4 for _ in range(2)] for _ in range(2)] for _ in range(2)]
    for k in range(2):
        g[k][1][0] = g[k][0][1]
    return Connection(PLANE, g)


@pytest.mark.parametrize("X, phi", [
    (("1", "0"), {(1,): "x"}),
    (("-y", "x"), {(0, 0): 1, (1, 1): 1}),
    (("x*y", "1"), {(0, 1): "y", (1, 1): "x"}),
])
def test_flow_check_flat(X, phi):
    Xv = [PLANE.parse(c) for c in X]
    form = SymField.from_components(PLANE, len(next(iter(phi))), phi)
    assert sym_lie_flow_check(Connection.flat(PLANE), Xv, form, [0.2, 0.3]) < 1e-4


@given(seeds, seeds)
@settings(max_examples=5)
def test_flow_check_curved(a, b):
    nabla = random_torsion_free(a)
    rng = random.Random(b)
    X = [random_field(PLANE, rng, 1) for _ in range(2)]
    phi = random_symfield(PLANE, rng.randint(0, 2), rng, 1)
    # central differences are second order; a smaller step keeps large coefficients in bounds
    assert sym_lie_flow_check(nabla, X, phi, [0.2, -0.1], delta=2.5e-4) < 1e-4


def test_flow_check_requires_torsion_free():
    with pytest.raises(TorsionError):
        sym_lie_flow_check(Connection.from_entries(PLANE, {(0, 0, 1): 1}), [PLANE.one, PLANE.zero],
                           SymField.dx(PLANE, 0), [0.0, 0.0])
