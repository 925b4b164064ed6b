"""Lie-admissible algebras and their symmetric cohomology.

Elements of SymʳV* are stored like fiber polynomials: a dict from exponent
tuples of the dual basis w¹..wⁿ to rationals, encoding ζ̃(w) = (1/r!)ζ(w,…,w).
In this picture the symmetric differential is the polynomial derivation
dˢ = −Σ c^k_{ij} wⁱwʲ ∂_{wᵏ}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from typing import Mapping, Sequence

from .linalg import kernel, rank
from .symtensor import exponent_of, exponents, indices_of, multi_factorial

Poly = dict[tuple[int, ...], Fraction]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(str(x)) if isinstance(x, float) else Fraction(x)


@dataclass(frozen=True)
class Algebra:
    """Product u_i·u_j = Σ_k c[i][j][k] u_k with exact rational constants."""

    dim: int
    c: tuple

    def __post_init__(self):
        n = self.dim
        if n < 1:
            raise ValueError("algebra dimension must be positive")
        c = tuple(tuple(tuple(_frac(x) for x in cij) for cij in ci) for ci in self.c)
        if len(c) != n or any(len(ci) != n or any(len(cij) != n for cij in ci) for ci in c):
            raise ValueError(f"structure constants must have shape {n}x{n}x{n}")
        object.__setattr__(self, "c", c)
        if not is_lie_admissible(self):
            raise ValueError("the commutator of the product does not satisfy the Jacobi identity")

    @classmethod
    def from_product(cls, dim: int, product_: Mapping[tuple[int, int], Sequence]) -> "Algebra":
        c = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
        for (i, j), vec in product_.items():
            if len(vec) != dim:
                raise ValueError(f"product u_{i}·u_{j} needs {dim} coordinates")
            c[i][j] = [_frac(x) for x in vec]
        return cls(dim, c)

    @classmethod
    def from_json(cls, data: Mapping) -> "Algebra":
        n = int(data["dim"])
        prod = {}
        for key, vec in data.get("product", {}).items():
            i, j = (int(p) for p in key.split(","))
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"product key {key!r} out of range")
            prod[(i, j)] = [Fraction(str(x)) for x in vec]
        return cls.from_product(n, prod)

    @classmethod
    def trivial(cls, dim: int) -> "Algebra":
        return cls.from_product(dim, {})

    def mul(self, u: Sequence, v: Sequence) -> list[Fraction]:
        n = self.dim
        out = [Fraction(0)] * n
        for i in range(n):
            if u[i]:
                for j in range(n):
                    if v[j]:
                        s = u[i] * v[j]
                        for k in range(n):
                            out[k] += s * self.c[i][j][k]
        return out

    def basis(self, i: int) -> list[Fraction]:
        return [Fraction(int(k == i)) for k in range(self.dim)]


def skew_constants(c, n: int) -> list:
    """b^k_{ij} = c^k_{ij} − c^k_{ji}."""
    return [[[c[i][j][k] - c[j][i][k] for k in range(n)] for j in range(n)] for i in range(n)]


def _bracket(b, u, v, n):
    out = [Fraction(0)] * n
    for i in range(n):
        for j in range(n):
            s = u[i] * v[j]
            if s:
                for k in range(n):
                    out[k] += s * b[i][j][k]
    return out


def jacobi_holds(b, n: int) -> bool:
    e = [[Fraction(int(k == i)) for k in range(n)] for i in range(n)]
    for i, j, k in product(range(n), repeat=3):
        a = _bracket(b, e[i], _bracket(b, e[j], e[k], n), n)
        bb = _bracket(b, e[j], _bracket(b, e[k], e[i], n), n)
        cc = _bracket(b, e[k], _bracket(b, e[i], e[j], n), n)
        if any(x + y + z for x, y, z in zip(a, bb, cc)):
            return False
    return True


def is_lie_admissible(algebra_or_c, dim: int | None = None) -> bool:
    """The commutator u·v − v·u satisfies the Jacobi identity (checked on the basis)."""
    if isinstance(algebra_or_c, Algebra):
        c, n = algebra_or_c.c, algebra_or_c.dim
    else:
        c = algebra_or_c
        n = len(c) if dim is None else dim
    return jacobi_holds(skew_constants(c, n), n)


@dataclass
class AdmissibilityReport:
    lie_admissible: bool
    left_symmetric: bool
    induced_bracket: list
    bracket_matches: bool | None

    def to_json(self) -> dict:
        n = len(self.induced_bracket)
        return {
            "lie_admissible": self.lie_admissible,
            "left_symmetric": self.left_symmetric,
            "induced_bracket": {f"{i},{j}": [str(x) for x in self.induced_bracket[i][j]]
                                for i in range(n) for j in range(n) if any(self.induced_bracket[i][j])},
            "bracket_matches": self.bracket_matches,
        }


def admissibility(c, n: int, bracket=None) -> AdmissibilityReport:
    """Report the bracket induced by the commutator instead of assuming a normalization.

    If a target bracket is given, also report whether the commutator equals it.
    """
    c = [[[_frac(x) for x in cij] for cij in ci] for ci in c]
    b = skew_constants(c, n)
    ok = jacobi_holds(b, n)
    ls = ok and is_left_symmetric(Algebra(n, c))
    match = None
    if bracket is not None:
        match = all(b[i][j][k] == _frac(bracket[i][j][k]) for i, j, k in product(range(n), repeat=3))
    return AdmissibilityReport(ok, ls, b, match)


def associator(A: Algebra, u, v, w) -> list[Fraction]:
    """assoc(u,v,w) = u·(v·w) − (u·v)·w."""
    left = A.mul(u, A.mul(v, w))
    right = A.mul(A.mul(u, v), w)
    return [a - b for a, b in zip(left, right)]


def is_left_symmetric(A: Algebra) -> bool:
    """assoc(u,v,w) = assoc(v,u,w) on all basis triples."""
    e = [A.basis(i) for i in range(A.dim)]
    return all(associator(A, e[i], e[j], e[k]) == associator(A, e[j], e[i], e[k])
               for i, j, k in product(range(A.dim), repeat=3))


def algebra_from_metric(dim: int, bracket, metric=None) -> Algebra:
    """Product with ⟨u·v,w⟩ = ½(⟨[u,v],w⟩ − ⟨[v,w],u⟩ − ⟨[u,w],v⟩).

    ``bracket[i][j]`` gives [u_i,u_j] in the basis; ``metric`` defaults to the
    identity Gram matrix.
    """
    n = dim
    B = [[[_frac(x) for x in bij] for bij in bi] for bi in bracket]
    G = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)] if metric is None else \
        [[_frac(x) for x in row] for row in metric]
    Ginv = _inverse(G)

    def ip(x, y):
        return sum(x[a] * G[a][b] * y[b] for a in range(n) for b in range(n))

    e = [[Fraction(int(k == i)) for k in range(n)] for i in range(n)]
    c = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            rhs = [(ip(B[i][j], e[k]) - ip(B[j][k], e[i]) - ip(B[i][k], e[j])) / 2 for k in range(n)]
            c[i][j] = [sum(Ginv[a][k] * rhs[k] for k in range(n)) for a in range(n)]
    return Algebra(n, c)


def _inverse(M):
    n = len(M)
    A = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col]), None)
        if piv is None:
            raise ValueError("metric is degenerate")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


# ---------------------------------------------------------------------------
# the symmetric differential

def d_sym(A: Algebra, zeta: Mapping[tuple, object]) -> Poly:
    """dˢζ as a fiber polynomial of one degree higher."""
    n = A.dim
    out: Poly = {}
    degrees = {sum(e) for e in zeta}
    if len(degrees) > 1:
        raise ValueError("ζ must be homogeneous")
    for e, coef in zeta.items():
        if len(e) != n:
            raise ValueError(f"exponent {e} does not match dimension {n}")
        coef = _frac(coef)
        for k in range(n):
            if not e[k]:
                continue
            dk = list(e)
            dk[k] -= 1
            base = coef * e[k]
            for i in range(n):
                for j in range(n):
                    ck = A.c[i][j][k]
                    if ck:
                        m = list(dk)
                        m[i] += 1
                        m[j] += 1
                        m = tuple(m)
                        out[m] = out.get(m, Fraction(0)) - base * ck
    return {m: q for m, q in out.items() if q}


def components(zeta: Mapping[tuple, object]) -> dict[tuple[int, ...], Fraction]:
    """Tensor components ζ(u_{i1},…,u_{ir}) on sorted index tuples: α!·coefficient."""
    return {indices_of(e): _frac(q) * multi_factorial(e) for e, q in zeta.items()}


def d_sym_multilinear(A: Algebra, zeta: Mapping[tuple, object], r: int) -> dict[tuple[int, ...], Fraction]:
    """Components of dˢζ from the multi-argument formula (independent of ``d_sym``).

    (dˢζ)(u₁,…,u_{r+1}) = −Σ_{i<j} ζ(u_i·u_j + u_j·u_i, u₁,…,û_i,…,û_j,…,u_{r+1}).
    """
    n = A.dim
    comp = components(zeta)

    def z(idx):
        return comp.get(tuple(sorted(idx)), Fraction(0))

    out = {}
    for e in exponents(n, r + 1):
        I = indices_of(e)
        acc = Fraction(0)
        for a in range(r + 1):
            for b in range(a + 1, r + 1):
                rest = I[:a] + I[a + 1:b] + I[b + 1:]
                for k in range(n):
                    s = A.c[I[a]][I[b]][k] + A.c[I[b]][I[a]][k]
                    if s:
                        acc += s * z((k,) + rest)
        if acc:
            out[I] = -acc
    return out


def _matrix(A: Algebra, r: int):
    """Rows of dˢ: Sym^r → Sym^{r+1} with columns indexed by the monomial basis of Sym^r."""
    cols = exponents(A.dim, r)
    rows: dict[tuple, dict[int, Fraction]] = {}
    for c, e in enumerate(cols):
        for m, q in d_sym(A, {e: 1}).items():
            rows.setdefault(m, {})[c] = q
    return [rows[m] for m in sorted(rows)], cols


@dataclass
class LieCohomology:
    r: int
    dim_ker: int
    dim_exact_in_ker: int
    ker_basis: list[Poly]

    @property
    def dim_H(self) -> int:
        return self.dim_ker - self.dim_exact_in_ker

    def to_json(self) -> dict:
        return {"r": self.r, "dim_ker": self.dim_ker, "dim_exact_in_ker": self.dim_exact_in_ker,
                "dim_H": self.dim_H,
                "ker_basis": [{",".join(map(str, e)): str(q) for e, q in sorted(p.items())}
                              for p in self.ker_basis]}


def cohomology(A: Algebra, r: int) -> LieCohomology:
    """Hʳ(V,·) = ker dˢ|Symʳ / (ker ∩ Im dˢ|Sym^{r−1}) by exact ranks."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    rows, cols = _matrix(A, r)
    ker = kernel(rows, len(cols))
    ker_polys = [{cols[c]: q for c, q in v.items()} for v in ker]
    if r == 0:
        return LieCohomology(0, len(ker), 0, ker_polys)
    # image of Sym^{r−1} as vectors in the monomial basis of Sym^r
    index = {e: i for i, e in enumerate(cols)}
    prev = exponents(A.dim, r - 1)
    images = [d_sym(A, {e: 1}) for e in prev]
    img_vecs = [{index[m]: q for m, q in p.items()} for p in images if p]
    ker_vecs = [dict(v) for v in ker]
    rank_img = rank(img_vecs)
    rank_sum = rank(img_vecs + ker_vecs)
    inter = len(ker_vecs) + rank_img - rank_sum
    return LieCohomology(r, len(ker), inter, ker_polys)


def cohomology_table(A: Algebra, rmax: int) -> list[dict]:
    return [cohomology(A, r).to_json() for r in range(rmax + 1)]


def sym_dim(n: int, r: int) -> int:
    return math.comb(n + r - 1, r)


# standard test algebras

def su2_bracket() -> list:
    """[e₁,e₂] = e₃ and cyclic permutations."""
    b = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        b[i][j][k] = 1
        b[j][i][k] = -1
    return b


def bracket_as_product(bracket, n: int, scale=1) -> Algebra:
    s = _frac(scale)
    return Algebra(n, [[[s * _frac(x) for x in bij] for bij in bi] for bi in bracket])
