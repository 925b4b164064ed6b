import random

import pytest
from hypothesis import given, settings, strategies as st

from symcartan.connection import Connection
from symcartan.derivations import euclidean_metric, residual_identities, square_zero_derivations
from symcartan.ring import Chart
from symcartan.samples import random_field
from symcartan.symtensor import SymField, VecSymField, exponents, general_derivation

CHARTS = [Chart.affine("x"), Chart.affine("x", "y")]


def random_pair(chart, rng, degree=1):
    n = chart.dim
    A = VecSymField.endomorphism(chart, [[random_field(chart, rng, degree) for _ in range(n)]
                                         for _ in range(n)])
    sigma = VecSymField(chart, 2, [SymField(chart, 2, {e: random_field(chart, rng, degree)
                                                       for e in exponents(n, 2)})
                                   for _ in range(n)])
    return A, sigma


@pytest.mark.parametrize("chart", CHARTS, ids=["dim1", "dim2"])
def test_only_zero_squares_to_zero(chart):
    rep = square_zero_derivations(chart, degree=2)
    assert rep.a_kernel == 0 and rep.sigma_kernel == 0 and rep.identities_ok
    assert rep.only_zero
    js = rep.to_json()
    assert js["stage_a"]["rank"] == js["stage_a"]["cols"]


@pytest.mark.parametrize("chart", CHARTS, ids=["dim1", "dim2"])
def test_curved_auxiliary_connection(chart):
    n = chart.dim
    aux = Connection(chart, [[[chart.coord(0) if k == i == j == 0 else chart.zero for j in range(n)]
                              for i in range(n)] for k in range(n)])
    assert square_zero_derivations(chart, degree=1, aux=aux).only_zero


@given(st.integers(0, 10**6), st.sampled_from([0, 1]))
@settings(max_examples=10)
def test_linearization_identities(seed, which):
    chart = CHARTS[which]
    rng = random.Random(seed)
    A, sigma = random_pair(chart, rng)
    checks = residual_identities(chart, A, sigma, Connection.flat(chart), random_field(chart, rng, 2))
    assert all(checks.values()), checks


def test_symmetric_derivative_does_not_square_to_zero():
    chart = CHARTS[1]
    D = general_derivation(VecSymField.identity(chart), VecSymField.zero(chart, 2), Connection.flat(chart))
    f = SymField.scalar(chart.parse("x^2"))
    assert D(D(f)) == SymField.dx(chart, 0).odot(SymField.dx(chart, 0)) * 2


def test_euclidean_metric():
    g = euclidean_metric(CHARTS[1])
    assert g.component((0, 0)) == CHARTS[1].one and g.component((0, 1)).is_zero
