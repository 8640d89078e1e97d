"""Exact integer matrices and the column-style Hermite normal form.

Everything here runs on Python big integers (and :class:`fractions.Fraction`
for rational output), so there is no overflow and no rounding.  The HNF is
the workhorse: it yields integer kernels, integer solvability tests and
particular solutions of ``X u = t``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

IntVector = tuple[int, ...]


def _as_int(x) -> int:
    v = int(x)
    if v != x:
        raise ValueError(f"non-integer entry {x!r}")
    return v


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix with exact arithmetic."""

    rows: tuple[IntVector, ...]

    @staticmethod
    def from_rows(rows: Iterable[Iterable[int]]) -> "IntMatrix":
        r = tuple(tuple(_as_int(x) for x in row) for row in rows)
        if r and any(len(row) != len(r[0]) for row in r):
            raise ValueError("ragged rows")
        return IntMatrix(r)

    @staticmethod
    def from_columns(cols: Iterable[Iterable[int]]) -> "IntMatrix":
        cols = [list(c) for c in cols]
        return IntMatrix.from_rows(zip(*cols)) if cols else IntMatrix(())

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def row(self, i: int) -> IntVector:
        return self.rows[i]

    def column(self, j: int) -> IntVector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[IntVector]:
        return [self.column(j) for j in range(self.n_cols)]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows))) if self.rows else self

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            ocols = other.columns()
            return IntMatrix(
                tuple(tuple(dot(r, c) for c in ocols) for r in self.rows)
            )
        # vector
        v = tuple(_as_int(x) for x in other)
        if len(v) != self.n_cols:
            raise ValueError("dimension mismatch")
        return tuple(dot(r, v) for r in self.rows)

    def to_numpy(self, dtype=float) -> np.ndarray:
        return np.array([list(r) for r in self.rows], dtype=dtype)

    def to_text(self) -> str:
        return "\n".join(" ".join(str(x) for x in r) for r in self.rows)

    @staticmethod
    def from_text(text: str) -> "IntMatrix":
        rows = [line.split() for line in text.strip().splitlines() if line.strip()]
        return IntMatrix.from_rows([[int(tok) for tok in row] for row in rows])


def dot(a: Sequence[int], b: Sequence[int]) -> int:
    if len(a) != len(b):
        raise ValueError("dimension mismatch")
    return sum(x * y for x, y in zip(a, b))


def norm_sq(a: Sequence[int]) -> int:
    return sum(x * x for x in a)


def rational_to_text(rows: Sequence[Sequence[Fraction]]) -> str:
    """Serialize a rational matrix; entries are ``p`` or ``p/q`` tokens."""
    def tok(x: Fraction) -> str:
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return "\n".join(" ".join(tok(x) for x in row) for row in rows)


def rational_from_text(text: str) -> list[list[Fraction]]:
    return [
        [Fraction(tok) for tok in line.split()]
        for line in text.strip().splitlines()
        if line.strip()
    ]


def hnf_column(X: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Column-style Hermite normal form: returns (H, U) with X @ U = H.

    U is unimodular; H is lower column-echelon with positive pivots and the
    entries to the right of each pivot reduced.  Columns of U over the zero
    columns of H generate the integer kernel of X.
    """
    n, m = X.shape
    H = [list(r) for r in X.rows]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def swap_cols(a, b):
        for r in H:
            r[a], r[b] = r[b], r[a]
        for r in U:
            r[a], r[b] = r[b], r[a]

    def addmul_col(dst, src, k):
        # col_dst += k * col_src
        for r in H:
            r[dst] += k * r[src]
        for r in U:
            r[dst] += k * r[src]

    def scale_col(j, k):
        for r in H:
            r[j] *= k
        for r in U:
            r[j] *= k

    pivot_col = 0
    pivots: list[tuple[int, int]] = []
    for row in range(n):
        # eliminate within row using gcd column operations
        j = pivot_col
        nz = [c for c in range(pivot_col, m) if H[row][c] != 0]
        if not nz:
            continue
        if nz[0] != pivot_col:
            swap_cols(pivot_col, nz[0])
        while True:
            nz = [c for c in range(pivot_col + 1, m) if H[row][c] != 0]
            if not nz:
                break
            for c in nz:
                q = H[row][c] // H[row][pivot_col]
                addmul_col(c, pivot_col, -q)
                if H[row][c] != 0 and abs(H[row][c]) < abs(H[row][pivot_col]):
                    swap_cols(pivot_col, c)
        if H[row][pivot_col] < 0:
            scale_col(pivot_col, -1)
        # reduce earlier columns against the new pivot column
        for c in range(pivot_col):
            q = H[row][c] // H[row][pivot_col]
            if q:
                addmul_col(c, pivot_col, -q)
        pivots.append((row, pivot_col))
        pivot_col += 1
        if pivot_col == m:
            break
    Hm = IntMatrix.from_rows(H)
    Um = IntMatrix.from_rows(U)
    object.__setattr__(Hm, "_pivots", tuple(pivots))
    return Hm, Um


def hnf_pivots(H: IntMatrix) -> tuple[tuple[int, int], ...]:
    piv = getattr(H, "_pivots", None)
    if piv is not None:
        return piv
    # recover pivots: first nonzero row index of each nonzero column
    pivots = []
    for j in range(H.n_cols):
        col = H.column(j)
        nz = [i for i, x in enumerate(col) if x != 0]
        if nz:
            pivots.append((nz[0], j))
    return tuple(pivots)


def row_rank(X: IntMatrix) -> int:
    H, _ = hnf_column(X)
    return len(hnf_pivots(H))


def kernel_columns(X: IntMatrix) -> list[IntVector]:
    """Basis of the integer kernel {v in Z^m : X v = 0} as column vectors."""
    H, U = hnf_column(X)
    rank = len(hnf_pivots(H))
    ker = [U.column(j) for j in range(rank, X.n_cols)]
    for v in ker:
        assert all(x == 0 for x in X @ v)
    return ker


def solve_integer(X: IntMatrix, target: Sequence[int]) -> IntVector | None:
    """One integer solution of X u = target, or None if none exists."""
    n, m = X.shape
    t = [_as_int(x) for x in target]
    if len(t) != n:
        raise ValueError("dimension mismatch")
    H, U = hnf_column(X)
    pivots = hnf_pivots(H)
    y = [0] * m
    resid = list(t)
    for (row, col) in pivots:
        # rows above the pivot row in this column are zero by echelon shape
        if resid[row] % H.rows[row][col] != 0:
            return None
        y[col] = resid[row] // H.rows[row][col]
        for i in range(n):
            resid[i] -= y[col] * H.rows[i][col]
    if any(r != 0 for r in resid):
        return None
    u = U @ y
    assert tuple(X @ u) == tuple(t)
    return tuple(u)


def is_surjective(X: IntMatrix) -> bool:
    """True iff X maps Z^m onto Z^n."""
    H, _ = hnf_column(X)
    pivots = hnf_pivots(H)
    if len(pivots) != X.n_rows:
        return False
    return all(H.rows[r][c] == 1 for (r, c) in pivots)


def fraction_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over the rationals by exact Gaussian elimination."""
    M = [[Fraction(x) for x in row] for row in rows]
    if not M:
        return 0
    nr, nc = len(M), len(M[0])
    rank = 0
    col = 0
    for col in range(nc):
        piv = next((i for i in range(rank, nr) if M[i][col] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        pv = M[rank][col]
        for i in range(nr):
            if i != rank and M[i][col] != 0:
                f = M[i][col] / pv
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
        if rank == nr:
            break
    return rank
