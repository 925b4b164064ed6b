"""Exact sparse linear algebra over Q plus a floating-point rank oracle.

Rows are stored as ``{column: coefficient}`` dicts. Coefficients are whatever
exact rational type the caller supplies (``fractions.Fraction`` or the gmpy2
``mpq`` used by sympy's QQ); results are returned as ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

import numpy as np
from sympy.polys.domains import QQ

_Q = QQ.dtype
NUMERIC_RANK_THRESHOLD = 1e-8


def _q(value) -> object:
    if isinstance(value, _Q):
        return value
    if isinstance(value, Fraction):
        return _Q(value.numerator, value.denominator)
    return QQ.convert(value)


def _frac(value) -> Fraction:
    return Fraction(int(value.numerator), int(value.denominator))


def rref(rows: Iterable[dict], ncols: int | None = None) -> tuple[dict[int, dict], list[int]]:
    """Gauss-Jordan elimination, columns processed left to right.

    Returns ``(pivot_rows, pivot_columns)``: ``pivot_rows[c]`` is the reduced
    row whose pivot is column ``c`` (pivot entry 1, zero in every other pivot
    column). The pivot set is the leftmost possible one, so the result is the
    unique reduced row echelon form of the row space.
    """
    work: dict[int, dict] = {}
    by_col: dict[int, set[int]] = {}
    for rid, row in enumerate(rows):
        r = {c: _q(v) for c, v in row.items() if v}
        if not r:
            continue
        work[rid] = r
        for c in r:
            by_col.setdefault(c, set()).add(rid)

    pivots: dict[int, dict] = {}
    used: set[int] = set()
    for col in sorted(by_col):
        holders = by_col.get(col)
        if not holders:
            continue
        free = [r for r in holders if r not in used]
        if not free:
            continue
        rid = min(free, key=lambda r: (len(work[r]), r))
        prow = work[rid]
        inv = 1 / prow[col]
        if inv != 1:
            for c in prow:
                prow[c] *= inv
        for other in list(holders):
            if other == rid:
                continue
            orow = work[other]
            factor = orow[col]
            for c, v in prow.items():
                nv = orow.get(c, 0) - factor * v
                if nv:
                    if c not in orow:
                        by_col.setdefault(c, set()).add(other)
                    orow[c] = nv
                else:
                    if c in orow:
                        del orow[c]
                        by_col[c].discard(other)
        used.add(rid)
        pivots[col] = prow
    order = sorted(pivots)
    return pivots, order


def rank(rows: Iterable[dict]) -> int:
    return len(rref(rows)[1])


def kernel(rows: Iterable[dict], ncols: int) -> list[dict[int, Fraction]]:
    """Basis of {x : row·x = 0 for all rows}, one vector per free column.

    Vector for free column f has x_f = 1 and x_p = -R[p][f] on pivot columns;
    listed in increasing f this is the canonical reduced-echelon null basis.
    """
    return _null_basis(*rref(rows, ncols), ncols)


def _null_basis(pivots: dict[int, dict], order: list[int], ncols: int) -> list[dict[int, Fraction]]:
    pivot_set = set(order)
    basis = []
    for f in range(ncols):
        if f in pivot_set:
            continue
        vec = {f: Fraction(1)}
        for p in order:
            v = pivots[p].get(f)
            if v:
                vec[p] = -_frac(v)
        basis.append(vec)
    return basis


def numeric_rank(rows: Sequence[dict], ncols: int, threshold: float = NUMERIC_RANK_THRESHOLD) -> int:
    """Rank of the matrix sampled to doubles: count of singular values above threshold."""
    if not rows or ncols == 0:
        return 0
    dense = np.zeros((len(rows), ncols))
    for i, row in enumerate(rows):
        for c, v in row.items():
            dense[i, c] = float(v)
    s = np.linalg.svd(dense, compute_uv=False)
    return int(np.sum(s > threshold))


@dataclass
class LinearProblem:
    """Exact homogeneous system with labelled rows and columns."""

    rows: list[dict]
    col_labels: list[Hashable]
    row_labels: list[Hashable] = field(default_factory=list)

    @property
    def ncols(self) -> int:
        return len(self.col_labels)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def _rref(self):
        cached = getattr(self, "_cache", None)
        if cached is None:
            cached = self._cache = rref(self.rows, self.ncols)
        return cached

    def rank(self) -> int:
        return len(self._rref()[1])

    def nullity(self) -> int:
        return self.ncols - self.rank()

    def kernel(self) -> list[dict[int, Fraction]]:
        return _null_basis(*self._rref(), self.ncols)

    def numeric_rank(self, threshold: float = NUMERIC_RANK_THRESHOLD) -> int:
        return numeric_rank(self.rows, self.ncols, threshold)

    def summary(self) -> dict:
        return {"rows": self.nrows, "cols": self.ncols, "rank": self.rank()}
