import random

import pytest
from hypothesis import given, settings, strategies as st

from symcartan.connection import Connection, TorsionError, levi_civita_check
from symcartan.cotangent import (
    CotangentChart,
    PWReport,
    canonical_forms,
    exterior_derivative,
    gradient_killing_complete_lift,
    lift_complete,
    lift_horizontal_bivec,
    lift_identities,
    lift_vertical_1form,
    lifted_connection_bar,
    lifted_connection_hat,
    levi_civita,
    patterson_walker,
    pw_identities,
)
from symcartan.golden import connection_corpus, plane_example
from symcartan.ring import Chart
from symcartan.samples import random_field, random_symfield
from symcartan.symtensor import SymField

PLANE = Chart.affine("x", "y")
LINE = Chart.affine("x")
TP = CotangentChart(PLANE)
seeds = st.integers(0, 10**6)


def random_connection(seed, torsion_free=True):
    rng = random.Random(seed)
    g = [[[random_field(PLANE, rng, 1) for _ in range(2)] for _ in range(2)] for _ in range(2)]
    if torsion_free:
        for k in range(2):
            g[k][1][0] = g[k][0][1]
    return Connection(PLANE, g)


def random_inputs(seed):
    rng = random.Random(seed)
    X = [random_field(PLANE, rng, 1) for _ in range(2)]
    Y = [random_field(PLANE, rng, 1) for _ in range(2)]
    alpha = random_symfield(PLANE, 1, rng, 1)
    beta = random_symfield(PLANE, 1, rng, 1)
    a = random_field(PLANE, rng, 1)
    pi = [[PLANE.zero, a], [-a, PLANE.zero]]
    return X, Y, alpha, beta, pi, random_field(PLANE, rng, 2)


def test_chart_layout():
    T = CotangentChart(PLANE)
    assert T.total.names == ["x", "y", "p_x", "p_y"]
    assert CotangentChart.base_name("p_y") == "y"
    with pytest.raises(ValueError):
        CotangentChart(Chart.affine("x", "p_x"))


def test_lift_examples():
    T = CotangentChart(LINE)
    x, p = T.total.coord(0), T.p(0)
    assert lift_complete(T, [LINE.coord(0)]) == [x, -p]
    assert lift_vertical_1form(TP, SymField.dx(PLANE, 1)) == [TP.total.zero] * 3 + [TP.total.one]
    pi = [[0, 1], [-1, 0]]
    out = lift_horizontal_bivec(TP, Connection.flat(PLANE), [[PLANE.field(v) for v in r] for r in pi])
    assert out == [-TP.p(1), TP.p(0), TP.total.zero, TP.total.zero]


def test_pw_examples():
    T = CotangentChart(LINE)
    g = patterson_walker(T, Connection.flat(LINE))
    assert g == SymField.dx(T.total, 0).odot(SymField.dx(T.total, 1))
    nabla = plane_example(PLANE, "x*y", "y")
    g = patterson_walker(TP, nabla)
    # −p_k Γᵏ_xy (dx⊙dy): the xy component carries −(p_x·xy + p_y·y)
    assert g.component((0, 1)) == TP.total.parse("-(p_x*x*y + p_y*y)")
    assert g.component((0, 2)) == TP.total.one and g.component((2, 3)).is_zero


def test_pw_sees_only_torsion_free_part():
    nabla = Connection.from_entries(PLANE, {(0, 0, 1): "x", (1, 1, 0): 1})
    from symcartan.connection import torsion_free_part

    assert patterson_walker(TP, nabla) == patterson_walker(TP, torsion_free_part(nabla))


def test_canonical_forms():
    T = CotangentChart(LINE)
    alpha, omega = canonical_forms(T)
    assert alpha.component((0,)) == T.p(0)
    assert exterior_derivative(alpha) == omega


def test_bar_requires_torsion_free():
    with pytest.raises(TorsionError):
        lifted_connection_bar(TP, Connection.from_entries(PLANE, {(0, 0, 1): 1}))


def test_flat_base_gives_flat_lifts():
    flat = Connection.flat(PLANE)
    total_flat = Connection.flat(TP.total)
    assert lifted_connection_hat(TP, flat) == total_flat
    assert lifted_connection_bar(TP, flat) == total_flat
    assert levi_civita(patterson_walker(TP, flat)) == total_flat


def test_levi_civita_examples():
    h = SymField.from_components(LINE, 2, {(0, 0): "1+x^2"})
    nabla = levi_civita(h)
    assert nabla.gamma[0][0][0] == LINE.parse("x/(1+x^2)")
    g = SymField.from_components(PLANE, 2, {(0, 0): 1, (1, 1): 1})
    assert levi_civita(g) == Connection.flat(PLANE)


@pytest.mark.parametrize("name", sorted(connection_corpus()))
def test_pw_theorem_on_corpus(name):
    nabla = connection_corpus()[name]
    report = PWReport(CotangentChart(nabla.chart), nabla).checks()
    assert report["ok"], report


def test_bar_is_levi_civita_of_pw_metric():
    nabla = plane_example(PLANE, "x*y", "y")
    report = PWReport(TP, nabla)
    assert levi_civita_check(report.bar, report.metric, samples=2)


@given(seeds, seeds)
@settings(max_examples=10)
def test_lift_identities_random(a, b):
    nabla = random_connection(a)
    X, Y, alpha, beta, pi, f = random_inputs(b)
    report = lift_identities(TP, nabla, X, Y, alpha, beta, f)
    assert report["ok"], report


@given(seeds, seeds)
@settings(max_examples=10)
def test_lift_identities_with_torsion(a, b):
    nabla = random_connection(a, torsion_free=False)
    X, Y, alpha, beta, pi, f = random_inputs(b)
    report = lift_identities(TP, nabla, X, Y, alpha, beta, f)
    assert report["ok"], report


@given(seeds, seeds)
@settings(max_examples=10)
def test_pw_identities_random(a, b):
    nabla = random_connection(a)
    X, Y, alpha, _, pi, _ = random_inputs(b)
    report = pw_identities(TP, nabla, X, Y, alpha, pi)
    assert report["ok"], report


def test_gradient_killing_examples():
    flat = Connection.flat(PLANE)
    assert gradient_killing_complete_lift(flat, [PLANE.one, PLANE.zero])
    assert not gradient_killing_complete_lift(flat, [PLANE.coord(0), PLANE.zero])
    nabla = plane_example(PLANE, 1, 1)
    # ∂x is not parallel for this connection
    assert not gradient_killing_complete_lift(nabla, [PLANE.one, PLANE.zero])
