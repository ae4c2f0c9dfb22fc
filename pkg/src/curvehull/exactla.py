"""Exact linear algebra over the rationals.

Vectors are sparse dicts mapping hashable keys to Fraction values.  The
incremental basis tracker certifies linear independence and solves for
coordinates without ever leaving Q, so rank decisions are reproducible
bit for bit.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, Hashable, List, Optional, Sequence

Vec = Dict[Hashable, Fraction]


def vec_is_zero(v: Vec) -> bool:
    return not any(c != 0 for c in v.values())


def vec_axpy(a: Fraction, x: Vec, y: Vec) -> Vec:
    """Return y + a*x, dropping zeros."""
    out = dict(y)
    for k, c in x.items():
        s = out.get(k, Fraction(0)) + a * c
        if s == 0:
            out.pop(k, None)
        else:
            out[k] = s
    return out


class IncrementalBasis:
    """Greedy independent-set tracker with exact coordinate solving.

    Keys are ordered by ``key_order`` (largest key is the pivot).  Each
    accepted vector becomes a basis element; ``coords`` expresses any
    vector in the accepted basis, or returns None if it is outside the
    span.
    """

    def __init__(self, key_order: Optional[Callable[[Hashable], object]] = None):
        self._key_order = key_order or (lambda k: k)
        # rows: list of (pivot_key, reduced_vec, combo) with combo expressing
        # reduced_vec in terms of the accepted basis vectors.
        self._rows: List[tuple] = []
        self.dim = 0

    def _reduce(self, v: Vec):
        r = {k: c for k, c in v.items() if c != 0}
        combo = [Fraction(0)] * self.dim
        for pivot, row, rcombo in self._rows:
            c = r.get(pivot)
            if c:
                r = vec_axpy(-c, row, r)
                for i, x in enumerate(rcombo):
                    combo[i] += c * x
        return r, combo

    def coords(self, v: Vec) -> Optional[List[Fraction]]:
        r, combo = self._reduce(v)
        if vec_is_zero(r):
            return combo
        return None

    def contains(self, v: Vec) -> bool:
        return self.coords(v) is not None

    def add(self, v: Vec) -> bool:
        """Accept v if independent of the current basis; return True if added."""
        r, combo = self._reduce(v)
        if vec_is_zero(r):
            return False
        pivot = max(r, key=self._key_order)
        p = r[pivot]
        row = {k: c / p for k, c in r.items()}
        # new basis vector is v itself: reduced_vec = (v - sum combo_i b_i)/p
        combo = [-c / p for c in combo] + [Fraction(1) / p]
        for i in range(len(self._rows)):
            piv_i, row_i, comb_i = self._rows[i]
            comb_i = list(comb_i) + [Fraction(0)]
            self._rows[i] = (piv_i, row_i, comb_i)
        self._rows.append((pivot, row, combo))
        self.dim += 1
        return True


def rank(vectors: Sequence[Vec]) -> int:
    b = IncrementalBasis()
    for v in vectors:
        b.add(v)
    return b.dim


def det(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    """Determinant by exact Gaussian elimination with partial pivoting."""
    n = len(matrix)
    a = [[Fraction(x) for x in row] for row in matrix]
    if any(len(row) != n for row in a):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[piv], a[col] = a[col], a[piv]
            sign = -sign
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] / a[col][col]
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    out = Fraction(sign)
    for i in range(n):
        out *= a[i][i]
    return out


def resultant(p: Sequence[Fraction], q: Sequence[Fraction]) -> Fraction:
    """Resultant of two univariate polynomials given as coefficient lists.

    Coefficients are ordered from constant to leading; leading
    coefficients must be nonzero.
    """
    p = [Fraction(c) for c in p]
    q = [Fraction(c) for c in q]
    while p and p[-1] == 0:
        p.pop()
    while q and q[-1] == 0:
        q.pop()
    if not p or not q:
        return Fraction(0)
    m, n = len(p) - 1, len(q) - 1
    if m == 0:
        return p[0] ** n
    if n == 0:
        return q[0] ** m
    size = m + n
    rows = []
    for i in range(n):  # rows of x^i * p
        row = [Fraction(0)] * size
        for j, c in enumerate(p):
            row[size - 1 - (i + j)] = c
        rows.append(row)
    for i in range(m):
        row = [Fraction(0)] * size
        for j, c in enumerate(q):
            row[size - 1 - (i + j)] = c
        rows.append(row)
    return det(rows)
