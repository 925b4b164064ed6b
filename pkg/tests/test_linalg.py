import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from symcartan.golden import connection_corpus
from symcartan.killing import AnsatzSpec, killing_solve
from symcartan.linalg import LinearProblem, kernel, numeric_rank, rank, rref


def random_rows(seed, nrows, ncols):
    rng = random.Random(seed)
    rows = [{c: Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for c in range(ncols)
             if rng.random() < 0.5} for _ in range(nrows)]
    # dependent rows keep rank deficient cases in play
    if rows:
        rows.append({c: 2 * v for c, v in rows[0].items()})
    return rows


def test_small_example():
    rows = [{0: 1, 1: 2}, {0: 2, 1: 4}, {2: 1}]
    assert rank(rows) == 2
    assert kernel(rows, 3) == [{1: Fraction(1), 0: Fraction(-2)}]


@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 6))
def test_rank_nullity(seed, nrows, ncols):
    p = LinearProblem(random_rows(seed, nrows, ncols), list(range(ncols)))
    assert p.rank() + p.nullity() == ncols
    for vec in p.kernel():
        for row in p.rows:
            assert sum(v * vec.get(c, 0) for c, v in row.items()) == 0


@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 6))
def test_kernel_is_reduced_echelon(seed, nrows, ncols):
    rows = random_rows(seed, nrows, ncols)
    pivots = set(rref(rows, ncols)[1])
    for vec in kernel(rows, ncols):
        free = [c for c in vec if c not in pivots]
        assert len(free) == 1 and vec[free[0]] == 1


@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 6))
def test_exact_and_numeric_rank_agree_on_random(seed, nrows, ncols):
    rows = random_rows(seed, nrows, ncols)
    assert rank(rows) == numeric_rank(rows, ncols)


@pytest.mark.parametrize("name", sorted(connection_corpus()))
def test_rank_oracle_on_corpus_systems(name):
    nabla = connection_corpus()[name]
    for r, degree in ((1, 2), (2, 1)):
        problem = killing_solve(nabla, r, AnsatzSpec(r, degree)).problem
        assert problem.rank() == problem.numeric_rank()
