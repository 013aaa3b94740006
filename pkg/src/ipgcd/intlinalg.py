"""Exact integer linear algebra on arbitrary-precision matrices.

Everything here works over ZZ with no floating point.  The central
routine is a column-style Hermite normal form with a recorded unimodular
transform; integer kernels, lattice membership tests and minimal lattice
multipliers are all derived from it.

Normal form conventions (column style):
  * h = a * u for a unimodular u (|det u| = 1),
  * h is lower triangular: the pivot (first non-zero entry from the top)
    of each non-zero column is strictly below the pivot of the column
    before it,
  * pivots are positive, entries to the left of a pivot in its row are
    non-negative and smaller than the pivot,
  * zero columns are collected at the right.

These conventions make the form unique for a given column lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored row-major."""

    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative dimensions")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError("entry count does not match dimensions")
        for e in self.entries:
            if not isinstance(e, int):
                raise TypeError(f"non-integer entry {e!r}")

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        r = len(rows)
        if r == 0:
            return IntMatrix(0, cols or 0, ())
        c = len(rows[0])
        for row in rows:
            if len(row) != c:
                raise ValueError("ragged rows")
        return IntMatrix(r, c, tuple(int(x) for row in rows for x in row))

    @staticmethod
    def from_cols(cols: Sequence[Sequence[int]], rows: Optional[int] = None) -> "IntMatrix":
        if len(cols) == 0:
            return IntMatrix(rows or 0, 0, ())
        r = len(cols[0])
        for col in cols:
            if len(col) != r:
                raise ValueError("ragged columns")
        return IntMatrix(r, len(cols), tuple(int(cols[j][i]) for i in range(r) for j in range(len(cols))))

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(1 if i == j else 0 for i in range(n) for j in range(n)))

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(rows, cols, (0,) * (rows * cols))

    def at(self, i: int, j: int) -> int:
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError((i, j))
        return self.entries[i * self.cols + j]

    def row_tuple(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col_tuple(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list:
        return [list(self.row_tuple(i)) for i in range(self.rows)]

    def to_cols(self) -> list:
        return [list(self.col_tuple(j)) for j in range(self.cols)]

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        out = []
        for i in range(self.rows):
            ri = self.row_tuple(i)
            for j in range(other.cols):
                out.append(sum(ri[k] * other.entries[k * other.cols + j] for k in range(self.cols)))
        return IntMatrix(self.rows, other.cols, tuple(out))

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)


@dataclass(frozen=True)
class HnfResult:
    """Hermite normal form h together with the transform u (h = a*u)."""

    h: IntMatrix
    u: IntMatrix


def _euclidean_sweep(h: list, u: list, piv: int, r: int, n: int) -> bool:
    """One gcd-elimination pass on row r over columns piv..n-1.

    Returns True when only column piv is non-zero in row r afterwards.
    Mutates the column-major tables h and u in place.
    """
    cand = [j for j in range(piv, n) if h[j][r] != 0]
    if not cand:
        return True
    jmin = min(cand, key=lambda j: abs(h[j][r]))
    h[piv], h[jmin] = h[jmin], h[piv]
    u[piv], u[jmin] = u[jmin], u[piv]
    done = True
    p = h[piv][r]
    for j in range(piv + 1, n):
        if h[j][r] == 0:
            continue
        q = h[j][r] // p
        if q:
            h[j] = [x - q * y for x, y in zip(h[j], h[piv])]
            u[j] = [x - q * y for x, y in zip(u[j], u[piv])]
        if h[j][r] != 0:
            done = False
    return done


def hnf(a: IntMatrix) -> HnfResult:
    """Column-style Hermite normal form with unimodular transform.

    Args:
        a: any integer matrix.

    Returns:
        HnfResult(h, u) with h = a*u, u unimodular, h in the normal form
        described in the module docstring.
    """
    m, n = a.rows, a.cols
    h = [list(a.col_tuple(j)) for j in range(n)]
    u = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    piv = 0
    for r in range(m):
        if piv >= n:
            break
        if all(h[j][r] == 0 for j in range(piv, n)):
            continue
        while not _euclidean_sweep(h, u, piv, r, n):
            pass
        if h[piv][r] < 0:
            h[piv] = [-x for x in h[piv]]
            u[piv] = [-x for x in u[piv]]
        p = h[piv][r]
        for j in range(piv):
            q = h[j][r] // p
            if q:
                h[j] = [x - q * y for x, y in zip(h[j], h[piv])]
                u[j] = [x - q * y for x, y in zip(u[j], u[piv])]
        piv += 1
    return HnfResult(IntMatrix.from_cols(h, rows=m), IntMatrix.from_cols(u, rows=n))


def hnf_rank(h: IntMatrix) -> int:
    """Number of non-zero columns of a matrix already in normal form."""
    rank = 0
    for j in range(h.cols):
        if any(h.at(i, j) != 0 for i in range(h.rows)):
            rank += 1
    return rank


def integer_kernel(a: IntMatrix) -> IntMatrix:
    """Lattice basis of {v in ZZ^cols : a*v = 0}, as matrix columns.

    The kernel of a zero (or zero-column) matrix is the full lattice, so
    the identity matrix comes back in that case.
    """
    res = hnf(a)
    rank = hnf_rank(res.h)
    cols = [list(res.u.col_tuple(j)) for j in range(rank, res.u.cols)]
    return IntMatrix.from_cols(cols, rows=a.cols)


def lattice_member(basis: IntMatrix, v: Sequence[int]) -> bool:
    """Whether v lies in the lattice generated by the columns of basis."""
    if len(v) != basis.rows:
        raise ValueError("vector length does not match basis rows")
    h = hnf(basis).h
    rem = [int(x) for x in v]
    for j in range(h.cols):
        col = h.col_tuple(j)
        r = next((i for i, x in enumerate(col) if x != 0), None)
        if r is None:
            break
        if rem[r] % col[r] != 0:
            return False
        q = rem[r] // col[r]
        if q:
            rem = [x - q * y for x, y in zip(rem, col)]
    return all(x == 0 for x in rem)


def min_positive_multiplier(g: Sequence[int], basis: IntMatrix) -> Optional[int]:
    """Smallest lam >= 1 with lam*g in the column lattice of basis.

    Returns None when no positive multiple of g lies in the lattice.
    The set of valid multipliers is an ideal of ZZ, so the answer is the
    gcd of the first coordinates of the kernel of the matrix (-g | basis).
    """
    if len(g) != basis.rows:
        raise ValueError("vector length does not match basis rows")
    cols = [[-int(x) for x in g]] + [list(basis.col_tuple(j)) for j in range(basis.cols)]
    kern = integer_kernel(IntMatrix.from_cols(cols, rows=len(g)))
    lam = 0
    for j in range(kern.cols):
        lam = math.gcd(lam, kern.at(0, j))
    return lam if lam > 0 else None


def determinant(a: IntMatrix) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    if a.rows != a.cols:
        raise ValueError("determinant of non-square matrix")
    n = a.rows
    if n == 0:
        return 1
    m = a.to_rows()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def gcd_of(values: Iterable[int]) -> int:
    """gcd of arbitrarily many integers; gcd of nothing is 0."""
    g = 0
    for v in values:
        g = math.gcd(g, v)
    return g
