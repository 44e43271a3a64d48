"""Exact rational linear algebra on small integer matrices.

Everything is done with :class:`fractions.Fraction` or Python ints; there is no
floating point anywhere, so ranks and solutions are exact for any entry size.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Sequence

Matrix = Sequence[Sequence[int]]


def columns_to_rows(cols: Sequence[Sequence[int]], dim: int) -> list[list[int]]:
    """The dim x len(cols) matrix whose columns are ``cols``."""
    return [[c[i] for c in cols] for i in range(dim)]


def row_echelon(rows: Matrix) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(rows: Matrix) -> int:
    if not rows or not rows[0]:
        return 0
    return len(row_echelon(rows)[1])


def rank_of_vectors(vectors: Sequence[Sequence[int]]) -> int:
    """Rank of the matrix whose columns are ``vectors``."""
    if not vectors:
        return 0
    return rank([list(v) for v in vectors])


def solve(rows: Matrix, rhs: Sequence[int]) -> list[Fraction] | None:
    """Unique solution of ``rows @ x == rhs`` for a full-column-rank matrix, or None if inconsistent."""
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    m, pivots = row_echelon(aug)
    if ncols in pivots:
        return None
    if len(pivots) != ncols:
        raise ValueError("matrix does not have full column rank")
    return [m[i][ncols] for i in range(ncols)]


def primitive_kernel_vector(cols: Sequence[Sequence[int]]) -> list[int]:
    """Primitive integer vector spanning the kernel of a circuit (a minimal dependent column set)."""
    dim = len(cols[0])
    m, pivots = row_echelon(columns_to_rows(cols, dim))
    free = [c for c in range(len(cols)) if c not in pivots]
    if len(free) != 1:
        raise ValueError("columns do not form a circuit")
    f = free[0]
    x = [Fraction(0)] * len(cols)
    x[f] = Fraction(1)
    for i, p in enumerate(pivots):
        x[p] = -m[i][f]
    den = 1
    for v in x:
        den = den * v.denominator // gcd(den, v.denominator)
    ints = [int(v * den) for v in x]
    g = 0
    for v in ints:
        g = gcd(g, v)
    return [v // g for v in ints]


def circuits(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Index sets of all circuits among ``vectors`` (minimal linearly dependent subsets)."""
    n = len(vectors)
    r = rank_of_vectors(vectors)
    found: list[tuple[int, ...]] = []
    for k in range(1, r + 2):
        for idx in combinations(range(n), k):
            if any(set(c) <= set(idx) for c in found):
                continue
            sub = [vectors[i] for i in idx]
            if rank_of_vectors(sub) == k - 1 and all(
                rank_of_vectors([vectors[j] for j in idx if j != i]) == k - 1 for i in idx
            ):
                found.append(idx)
    return found


class FullRankSolver:
    """Membership oracle for ``x = Q @ lam`` with ``Q`` of full column rank.

    The pivot rows of ``Q`` form a square invertible block ``R``; the exact
    inverse is kept in integer form as ``adj / det`` so each query is a few
    integer dot products followed by a consistency check on the other rows.
    """

    def __init__(self, periods: Sequence[Sequence[int]], dim: int):
        self.periods = [tuple(p) for p in periods]
        self.dim = dim
        self.k = len(self.periods)
        if self.k == 0:
            self.rows, self.adj, self.det = [], [], 1
            return
        Q = columns_to_rows(self.periods, dim)
        _, pivot_rows = row_echelon([[Q[i][j] for i in range(dim)] for j in range(self.k)])
        if len(pivot_rows) != self.k:
            raise ValueError("periods are not linearly independent")
        self.rows = pivot_rows
        R = [[Fraction(Q[i][j]) for j in range(self.k)] for i in pivot_rows]
        inv = _inverse(R)
        den = 1
        for row in inv:
            for v in row:
                den = den * v.denominator // gcd(den, v.denominator)
        self.det = den
        self.adj = [[int(v * den) for v in row] for row in inv]

    def coefficients(self, x: Sequence[int]) -> list[int] | None:
        """The unique natural coefficients with ``Q @ lam == x``, or None."""
        if self.k == 0:
            return [] if not any(x) else None
        sub = [x[i] for i in self.rows]
        lam = []
        for row in self.adj:
            num = sum(a * b for a, b in zip(row, sub))
            if num < 0 or num % self.det:
                return None
            lam.append(num // self.det)
        for i in range(self.dim):
            if sum(lam[j] * self.periods[j][i] for j in range(self.k)) != x[i]:
                return None
        return lam


def _inverse(R: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(R)
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(R)]
    m, pivots = row_echelon(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return [r[n:] for r in m]
