import random

import pytest
from hypothesis import given, settings, strategies as st

from symcartan.connection import (
    Connection,
    TorsionError,
    a_sym_derivative,
    commutator_identities,
    covariant_derivative,
    lie_bracket,
    lie_derivative,
    levi_civita_check,
    riemann,
    second_cov,
    sym_bracket,
    sym_curvature,
    sym_derivative,
    sym_derivative_components,
    sym_lie,
    sym_lie_components,
    torsion,
    torsion_free_part,
    variation_check,
)
from symcartan.golden import circle, plane_example
from symcartan.ring import Chart
from symcartan.samples import random_field, random_symfield, random_vector, spanning_forms
from symcartan.symtensor import SymField, VecSymField, contract

PLANE = Chart.affine("x", "y")
LINE = Chart.affine("x")
seeds = st.integers(0, 10**6)


def dx(i, chart=PLANE):
    return SymField.dx(chart, i)


def vec(*exprs, chart=PLANE):
    return VecSymField.vector(chart, [chart.field(e) for e in exprs])


def random_connection(seed, torsion_free=True, chart=PLANE, degree=1):
    rng = random.Random(seed)
    n = chart.dim
    g = [[[random_field(chart, rng, degree) for _ in range(n)] for _ in range(n)] for _ in range(n)]
    if torsion_free:
        for k in range(n):
            for i in range(n):
                for j in range(i):
                    g[k][i][j] = g[k][j][i]
    return Connection(chart, g)


def test_gamma_shape_is_checked():
    with pytest.raises(ValueError):
        Connection(PLANE, [[[0, 0]]])


def test_torsion_examples():
    assert torsion(Connection.flat(PLANE)).is_zero
    nabla = Connection.from_entries(PLANE, {(0, 0, 1): 1})
    T = torsion(nabla).apply(vec(1, 0), vec(0, 1))
    assert T.values() == [PLANE.one, PLANE.zero]
    assert torsion(plane_example(PLANE, "x*y", "y")).is_zero


def test_torsion_free_part_examples():
    sym = plane_example(PLANE, "x", 2)
    assert torsion_free_part(sym) is sym
    tf = torsion_free_part(Connection.from_entries(PLANE, {(0, 0, 1): 1}))
    assert tf.gamma[0][0][1] == tf.gamma[0][1][0] == PLANE.const("1/2")
    assert torsion_free_part(tf) == tf


@given(seeds, seeds)
def test_torsion_free_part_has_same_sym_derivative(a, b):
    nabla = random_connection(a, torsion_free=False)
    phi = random_symfield(PLANE, 1, random.Random(b))
    assert sym_derivative(nabla, phi) == sym_derivative(torsion_free_part(nabla), phi)


@given(seeds, seeds, st.integers(0, 3))
def test_spray_and_component_paths_agree(a, b, r):
    nabla = random_connection(a, torsion_free=False)
    phi = random_symfield(PLANE, r, random.Random(b), coeff_degree=1, rational=True)
    assert sym_derivative(nabla, phi) == sym_derivative_components(nabla, phi)


def test_sym_derivative_examples():
    flat = Connection.flat(PLANE)
    x, y = PLANE.coord(0), PLANE.coord(1)
    assert sym_derivative(flat, dx(1) * x) == dx(0).odot(dx(1))
    assert sym_derivative(flat, dx(1) * x - dx(0) * y).is_zero
    f = SymField.scalar(x * y)
    assert sym_derivative(flat, f) == dx(0) * y + dx(1) * x


def test_circle_killing_equation():
    nabla = circle("sin(t)")
    S = nabla.chart
    for a1 in (S.cos(0), S.one, S.cos(0) * S.sin(0) + 2):
        out = sym_derivative(nabla, SymField.from_components(S, 1, {(0,): a1}))
        assert out.component((0, 0)) == (a1.partial(0) - S.sin(0) * a1) * 2


@given(seeds, seeds, seeds)
def test_sym_derivative_is_a_derivation(a, b, c):
    nabla = random_connection(a)
    rng = random.Random(b)
    phi, psi = random_symfield(PLANE, 1, rng, 1), random_symfield(PLANE, 2, rng, 1)
    ns = nabla.sym_derivative
    assert ns(phi.odot(psi)) == ns(phi).odot(psi) + phi.odot(ns(psi))


def test_sym_lie_examples():
    flat = Connection.flat(PLANE)
    phi = random_symfield(PLANE, 2, random.Random(1))
    ex = vec(1, 0)
    assert sym_lie(flat, ex, phi) == SymField(PLANE, 2, {e: c.partial(0) for e, c in phi.fiber.items()})
    f = SymField.scalar(PLANE.parse("x^2*y"))
    X = vec("y", "x")
    assert sym_lie(flat, X, f).scalar_value() == PLANE.parse("2*x*y^2 + x^3")
    g = dx(0).odot(dx(0)) + dx(1).odot(dx(1))
    assert sym_lie(flat, vec("y", "-x"), g).is_zero


@given(seeds, seeds, seeds, st.integers(0, 2))
def test_sym_lie_commutator_matches_components(a, b, c, r):
    nabla = random_connection(a, torsion_free=False)
    phi = random_symfield(PLANE, r, random.Random(b), 1)
    X = random_vector(PLANE, random.Random(c), 1)
    assert sym_lie(nabla, X, phi) == sym_lie_components(nabla, X, phi)


@given(seeds, seeds, seeds, st.integers(1, 2))
def test_cov_is_half_sum_of_lie_derivatives(a, b, c, r):
    nabla = random_connection(a, torsion_free=False)
    phi = random_symfield(PLANE, r, random.Random(b), 1)
    X = random_vector(PLANE, random.Random(c), 1)
    lhs = covariant_derivative(torsion_free_part(nabla), X, phi) * 2
    assert lhs == sym_lie(nabla, X, phi) + lie_derivative(X, phi)


def test_sym_bracket_examples():
    flat = Connection.flat(PLANE)
    assert sym_bracket(flat, vec(0, "x"), vec(1, 0)) == vec(0, 1)
    nabla = random_connection(3)
    X = random_vector(PLANE, random.Random(4), 1)
    assert sym_bracket(nabla, X, X).values() == [c * 2 for c in nabla.cov(X.values(), X.values())]


@given(seeds, seeds, seeds)
def test_sym_lie_of_vector_is_sym_bracket(a, b, c):
    # on vector fields Lˢ_X Y = 2∇⁰_X Y − [X,Y]
    nabla = random_connection(a)
    X, Y = random_vector(PLANE, random.Random(b), 1), random_vector(PLANE, random.Random(c), 1)
    x, y = X.values(), Y.values()
    lhs = [2 * p - q for p, q in zip(nabla.cov(x, y), lie_bracket(x, y))]
    assert lhs == sym_bracket(nabla, X, Y).values() == sym_bracket(nabla, Y, X).values()
    lhs_y = [2 * p - q for p, q in zip(nabla.cov(y, x), lie_bracket(y, x))]
    assert lhs_y == lhs


def test_curvature_examples():
    assert riemann(Connection.flat(PLANE)).is_zero
    RsX = sym_curvature(Connection.flat(LINE), vec("x^2", chart=LINE))
    assert RsX.component(0, (0, 0)) == LINE.const(4)
    R = riemann(plane_example(PLANE, "x*y", "y"))
    assert R.antisymmetric() and all(c.is_zero for c in R.bianchi_residual())


def test_argument_first_layout():
    R = riemann(plane_example(PLANE, "x*y", "y"))
    assert R.argument_first(0, 1, 0, 1) == R(0, 0, 1, 1)


@given(seeds, seeds)
def test_second_derivative_decomposition(a, b):
    nabla = random_connection(a)
    X = random_vector(PLANE, random.Random(b), 2)
    N = second_cov(nabla, X)
    R = riemann(nabla)
    RsX = sym_curvature(nabla, X)
    x = X.values()
    for m in range(2):
        for i in range(2):
            for j in range(2):
                Rterm = sum((R(m, i, j, k) * x[k] for k in range(2)), PLANE.zero)
                assert N[m][i][j] * 2 == Rterm + RsX.component(m, (i, j))


@given(seeds)
def test_curvature_identities_random(a):
    R = riemann(random_connection(a, degree=2))
    assert R.antisymmetric()
    assert all(c.is_zero for c in R.bianchi_residual())


def test_a_sym_derivative_examples():
    nabla = random_connection(7)
    phi = random_symfield(PLANE, 2, random.Random(8))
    assert a_sym_derivative(nabla, VecSymField.identity(PLANE), phi) == sym_derivative(nabla, phi)
    assert a_sym_derivative(nabla, VecSymField.zero(PLANE, 1), phi).is_zero


@given(seeds, seeds)
def test_a_sym_derivative_on_functions(a, b):
    rng = random.Random(a)
    nabla = random_connection(b)
    M = [[random_field(PLANE, rng, 1) for _ in range(2)] for _ in range(2)]
    f = random_field(PLANE, rng, 2)
    out = a_sym_derivative(nabla, VecSymField.endomorphism(PLANE, M), SymField.scalar(f))
    # (df∘A)_j = Σ_i ∂_i f A^i_j
    for j in range(2):
        assert out.component((j,)) == sum((f.partial(i) * M[i][j] for i in range(2)), PLANE.zero)


def test_variation_examples():
    rng = random.Random(2)
    forms = [random_symfield(PLANE, 1, rng) for _ in range(10)]
    vectors = [(random_vector(PLANE, rng), random_vector(PLANE, rng)) for _ in range(3)]
    flat = Connection.flat(PLANE)
    same = variation_check(flat, flat, forms, vectors)
    assert same["sigma_zero"] and same["ok"]
    other = variation_check(flat, plane_example(PLANE, 1, 1), forms, vectors)
    assert not other["sigma_zero"] and other["ok"]


@given(seeds, seeds, seeds)
@settings(max_examples=8)
def test_variation_random(a, b, c):
    rng = random.Random(c)
    forms = spanning_forms(PLANE, 2, rng)
    vectors = [(random_vector(PLANE, rng, 1), random_vector(PLANE, rng, 1))]
    assert variation_check(random_connection(a, False), random_connection(b), forms, vectors)["ok"]


def test_commutator_identities_reject_torsion():
    with pytest.raises(TorsionError):
        commutator_identities(Connection.from_entries(PLANE, {(0, 0, 1): 1}), vec(1, 0), vec(0, 1),
                              [dx(0)])


def test_commutator_identities_euclidean_cases():
    flat = Connection.flat(PLANE)
    forms = spanning_forms(PLANE, 2)
    parallel = commutator_identities(flat, vec(1, 0), vec(0, 1), forms)
    assert parallel["ok"] and parallel["nabla_s_lie_x_vanishes"] and parallel["lie_x_lie_y_vanishes"]
    radial = commutator_identities(flat, vec("x", 0), vec(0, 1), forms)
    assert radial["ok"] and not radial["nabla_s_lie_x_vanishes"]


@given(seeds, seeds, seeds)
@settings(max_examples=6)
def test_commutator_identities_random(a, b, c):
    rng = random.Random(b)
    nabla = random_connection(a)
    X, Y = random_vector(PLANE, rng, 1), random_vector(PLANE, rng, 1)
    forms = spanning_forms(PLANE, 2, random.Random(c))
    report = commutator_identities(nabla, X, Y, forms)
    assert report["ok"], report


@given(seeds, seeds, seeds)
def test_contract_then_lie_is_iota_of_sym_bracket(a, b, c):
    rng = random.Random(b)
    nabla = random_connection(a)
    X, Y = random_vector(PLANE, rng, 1), random_vector(PLANE, rng, 1)
    phi = random_symfield(PLANE, 2, random.Random(c), 1)
    lhs = sym_lie(nabla, X, contract(Y, phi)) - contract(Y, sym_lie(nabla, X, phi))
    assert lhs == contract(sym_bracket(nabla, X, Y), phi)


def test_levi_civita_examples():
    g = dx(0).odot(dx(0)) + dx(1).odot(dx(1))
    assert levi_civita_check(Connection.flat(PLANE), g)
    h = SymField.from_components(LINE, 2, {(0, 0): "1+x^2"})
    assert levi_civita_check(Connection.from_entries(LINE, {(0, 0, 0): "x/(1+x^2)"}), h)
    euclid = SymField.from_components(LINE, 2, {(0, 0): 1})
    assert not levi_civita_check(Connection.from_entries(LINE, {(0, 0, 0): 1}), euclid)
    with pytest.raises(ZeroDivisionError):
        levi_civita_check(Connection.flat(PLANE), dx(0).odot(dx(0)))


def affine_condition(nabla, X):
    from symcartan.connection import sym_iota_curvature

    return (sym_iota_curvature(nabla, X) + sym_curvature(nabla, X)).is_zero


def lie_commutes_with_sym_derivative(nabla, X, forms):
    ns = nabla.sym_derivative
    return all(ns(lie_derivative(X, phi)) == lie_derivative(X, ns(phi)) for phi in forms)


@pytest.mark.parametrize("nabla, X", [
    (Connection.flat(PLANE), ("x", "y")),
    (Connection.flat(PLANE), ("y", "-x")),
    (Connection.flat(PLANE), ("x^2", 0)),
    (plane_example(PLANE, "x*y", "y"), (1, 0)),
    (plane_example(PLANE, 1, 1), (1, 0)),
    (plane_example(PLANE, 1, 1), (0, 1)),
    (plane_example(PLANE, "x", 0), ("x", 0)),
])
def test_affine_condition_iff_lie_commutes(nabla, X):
    Xv = vec(*X)
    forms = spanning_forms(PLANE, 2)
    assert affine_condition(nabla, Xv) == lie_commutes_with_sym_derivative(nabla, Xv, forms)


@given(seeds, seeds)
@settings(max_examples=8)
def test_affine_condition_iff_lie_commutes_random(a, b):
    nabla = random_connection(a)
    X = random_vector(PLANE, random.Random(b), 1)
    forms = spanning_forms(PLANE, 2)
    assert affine_condition(nabla, X) == lie_commutes_with_sym_derivative(nabla, X, forms)
