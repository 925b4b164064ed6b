import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from symcartan import killing
from symcartan import liealg as L
from symcartan.connection import Connection
from symcartan.ring import Chart
from symcartan.symtensor import exponents


def zeros(n):
    return [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]


def heisenberg():
    b = zeros(3)
    b[0][1][2], b[1][0][2] = 1, -1
    return b


def affine_line_plus(n):
    """[e₀,e₁] = e₁ padded with central directions up to dimension n."""
    b = zeros(n)
    b[0][1][1], b[1][0][1] = 1, -1
    return b


def gl2():
    # basis E11, E12, E21, E22 of 2x2 matrices
    E = [((0, 0)), (0, 1), (1, 0), (1, 1)]

    def mat(k):
        M = [[0, 0], [0, 0]]
        M[E[k][0]][E[k][1]] = 1
        return M

    def mul(A, B):
        return [[sum(A[i][t] * B[t][j] for t in range(2)) for j in range(2)] for i in range(2)]

    b = zeros(4)
    for i, j in product(range(4), repeat=2):
        AB, BA = mul(mat(i), mat(j)), mul(mat(j), mat(i))
        for k in range(4):
            r, c = E[k]
            b[i][j][k] = Fraction(AB[r][c] - BA[r][c])
    return b


BASE = [L.su2_bracket(), heisenberg(), affine_line_plus(2), affine_line_plus(3), gl2()]


def change_basis(b, rng):
    """Structure constants of the same Lie algebra in a random rational basis."""
    n = len(b)
    while True:
        P = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        try:
            Pinv = L._inverse(P)
            break
        except ValueError:
            continue
    out = zeros(n)
    for i, j in product(range(n), repeat=2):
        # [f_i, f_j] with f_i = Σ_a P[a][i] e_a
        v = [Fraction(0)] * n
        for a, bb in product(range(n), repeat=2):
            s = P[a][i] * P[bb][j]
            if s:
                for m in range(n):
                    v[m] += s * b[a][bb][m]
        for k in range(n):
            out[i][j][k] = sum(Pinv[k][m] * v[m] for m in range(n))
    return out


def random_lie(seed):
    rng = random.Random(seed)
    return change_basis(rng.choice(BASE), rng)


def random_admissible(seed):
    """½·bracket plus an arbitrary symmetric part has the bracket as commutator."""
    rng = random.Random(seed)
    b = random_lie(seed)
    n = len(b)
    c = zeros(n)
    for i in range(n):
        for j in range(i, n):
            s = [Fraction(rng.randint(-2, 2), rng.randint(1, 2)) for _ in range(n)]
            for k in range(n):
                c[i][j][k] = b[i][j][k] / 2 + s[k]
                c[j][i][k] = b[j][i][k] / 2 + s[k]
    return L.Algebra(n, c), b


def random_metric(rng, n):
    A = [[Fraction(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
    return [[sum(A[k][i] * A[k][j] for k in range(n)) + (n if i == j else 0) for j in range(n)]
            for i in range(n)]


seeds = st.integers(0, 10**6)


def test_validation():
    with pytest.raises(ValueError):
        L.Algebra(2, [[[0, 0]]])
    c = zeros(3)
    c[0][1] = [1, 0, 0]
    c[1][2] = [0, 1, 0]
    with pytest.raises(ValueError):
        L.Algebra(3, c)
    assert not L.is_lie_admissible(c)
    with pytest.raises(ValueError):
        L.Algebra.from_json({"dim": 2, "product": {"0,2": [1, 0]}})


def test_base_brackets_are_lie():
    for b in BASE:
        assert L.jacobi_holds(b, len(b))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_trivial_product(n):
    A = L.Algebra.trivial(n)
    for r in range(4):
        assert L.cohomology(A, r).dim_H == L.sym_dim(n, r)


def test_one_dimensional_nontrivial():
    A = L.Algebra.from_json({"dim": 1, "product": {"0,0": [1]}})
    assert [L.cohomology(A, r).dim_H for r in range(3)] == [1, 0, 0]


def test_su2_half_bracket():
    A = L.bracket_as_product(L.su2_bracket(), 3, Fraction(1, 2))
    assert L.cohomology(A, 1).dim_H == 3
    assert A == L.algebra_from_metric(3, L.su2_bracket())


def test_admissibility_report_gives_induced_bracket():
    A = L.bracket_as_product(L.su2_bracket(), 3)
    rep = L.admissibility(A.c, 3, bracket=L.su2_bracket())
    assert rep.lie_admissible and rep.bracket_matches is False
    # u·v = [u,v] has commutator 2[u,v]
    assert rep.induced_bracket[0][1][2] == 2
    rep = L.admissibility(A.c, 3, bracket=[[[2 * x for x in v] for v in row] for row in L.su2_bracket()])
    assert rep.bracket_matches


def test_left_symmetric_examples():
    assert L.is_left_symmetric(L.Algebra.trivial(2))
    assert L.is_left_symmetric(L.Algebra.from_json({"dim": 1, "product": {"0,0": [1]}}))


@given(seeds)
def test_metric_algebra_skew_part_is_bracket(seed):
    rng = random.Random(seed)
    b = random_lie(seed)
    n = len(b)
    A = L.algebra_from_metric(n, b, random_metric(rng, n))
    assert L.skew_constants(A.c, n) == [[[Fraction(x) for x in v] for v in row] for row in b]


@given(seeds, st.integers(0, 3), st.integers(0, 10**6))
@settings(max_examples=25)
def test_d_sym_matches_multilinear_formula(seed, r, zseed):
    A, _ = random_admissible(seed)
    rng = random.Random(zseed)
    zeta = {e: Fraction(rng.randint(-3, 3)) for e in exponents(A.dim, r)}
    zeta = {e: q for e, q in zeta.items() if q}
    assert L.components(L.d_sym(A, zeta)) == L.d_sym_multilinear(A, zeta, r)


@given(seeds)
@settings(max_examples=15)
def test_cohomology_invariants(seed):
    A, _ = random_admissible(seed)
    assert L.cohomology(A, 0).dim_H == 1
    for r in range(1, 3):
        rep = L.cohomology(A, r)
        assert 0 <= rep.dim_exact_in_ker <= rep.dim_ker
        for p in rep.ker_basis:
            assert not L.d_sym(A, p)


@given(seeds)
@settings(max_examples=10)
def test_skew_product_gives_trivial_dims(seed):
    # a product whose symmetric part vanishes has dˢ = 0 on every degree
    b = random_lie(seed)
    n = len(b)
    A = L.Algebra(n, [[[x / 2 for x in v] for v in row] for row in b])
    for r in range(3):
        assert L.cohomology(A, r).dim_H == L.sym_dim(n, r)


def test_flat_torus_bounds_abelian_cohomology():
    torus = Connection.flat(Chart.angles("s", "t"))
    for r in (1, 2):
        geometric = killing.cohomology(torus, r, degree=2, escalate=False).dim_H
        assert geometric >= L.cohomology(L.Algebra.trivial(2), r).dim_H


def test_table_json():
    rows = L.cohomology_table(L.Algebra.trivial(2), 2)
    assert [r["dim_H"] for r in rows] == [1, 2, 3]
