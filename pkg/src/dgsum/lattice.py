"""Exact integer lattice linear algebra.

Integer kernels via the Hermite normal form, exact-rational LLL reduction,
dual bases, smoothing-parameter bounds and a desk-scale numeric smoothing
check over the dual lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .gaussian import ball_tail_bound, enumerate_affine
from .intmat import IntMatrix, dot, fraction_rank, kernel_columns, norm_sq


class RankError(ValueError):
    pass


@dataclass(frozen=True)
class LatticeBasis:
    """Columns of ``matrix`` generate the lattice; rank = number of columns."""

    matrix: IntMatrix
    provenance: str = "raw"

    def __post_init__(self):
        if self.matrix.n_cols and fraction_rank(self.matrix.T.rows) < self.matrix.n_cols:
            raise RankError("basis columns are linearly dependent")

    @property
    def rank(self) -> int:
        return self.matrix.n_cols

    @property
    def dim(self) -> int:
        return self.matrix.n_rows

    def vectors(self) -> list[tuple[int, ...]]:
        return self.matrix.columns()


@dataclass(frozen=True)
class SmoothingBound:
    """Upper bound on the smoothing parameter from the n-th minimum."""

    n: int
    eps: float
    lambda_n: float
    value: float


def integer_kernel(X: IntMatrix) -> LatticeBasis:
    """Basis of the orthogonal lattice {v in Z^m : X v = 0}.

    Requires X of full row rank n with m > n; the returned rank m - n basis
    generates all integer solutions.
    """
    n, m = X.shape
    if fraction_rank(X.rows) < n:
        raise RankError("X must have full row rank")
    ker = kernel_columns(X)
    if len(ker) != m - n:
        raise RankError(f"kernel rank {len(ker)} != m - n = {m - n}")
    return LatticeBasis(IntMatrix.from_columns(ker), provenance="raw")


def _gso(cols: list[list[int]]):
    """Exact Gram-Schmidt: returns (mu, Bstar_sq, ortho)."""
    r = len(cols)
    mu = [[Fraction(0)] * r for _ in range(r)]
    bsq: list[Fraction] = []
    ortho: list[list[Fraction]] = []
    for i in range(r):
        v = [Fraction(x) for x in cols[i]]
        for j in range(i):
            num = sum(Fraction(a) * b for a, b in zip(cols[i], ortho[j]))
            mu[i][j] = num / bsq[j]
            v = [a - mu[i][j] * b for a, b in zip(v, ortho[j])]
        ortho.append(v)
        bsq.append(sum(a * a for a in v))
    return mu, bsq, ortho


def lll_reduce(basis: LatticeBasis, delta: float = 0.99) -> LatticeBasis:
    """Exact-rational LLL reduction of the basis (same lattice)."""
    if not 0.25 < delta < 1:
        raise ValueError("delta must be in (0.25, 1)")
    d = Fraction(delta).limit_denominator(10 ** 6)
    b = [list(c) for c in basis.matrix.columns()]
    r = len(b)
    if r <= 1:
        return LatticeBasis(basis.matrix, provenance="reduced")
    mu, bsq, _ = _gso(b)
    k = 1
    while k < r:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [a - q * c for a, c in zip(b[k], b[j])]
                mu, bsq, _ = _gso(b)
        if bsq[k] >= (d - mu[k][k - 1] ** 2) * bsq[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            mu, bsq, _ = _gso(b)
            k = max(k - 1, 1)
    return LatticeBasis(IntMatrix.from_columns(b), provenance="reduced")


def successive_minima_upper(basis: LatticeBasis, delta: float = 0.99) -> list[float]:
    """Sorted lengths of an LLL-reduced basis: upper bounds on the minima."""
    red = basis if basis.provenance == "reduced" else lll_reduce(basis, delta)
    lens = sorted(math.sqrt(norm_sq(v)) for v in red.vectors())
    return lens


def nearest_plane(basis: LatticeBasis, target: Sequence[Fraction]) -> tuple[int, ...]:
    """Babai nearest-plane: a lattice vector close to ``target``.

    Expects a reduced basis for good quality; correctness (membership) holds
    for any basis.
    """
    cols = [list(c) for c in basis.matrix.columns()]
    _, bsq, ortho = _gso(cols)
    t = [Fraction(x) for x in target]
    coeff = [0] * len(cols)
    v = [Fraction(0)] * basis.dim
    for i in range(len(cols) - 1, -1, -1):
        c = round(sum(a * b for a, b in zip(t, ortho[i])) / bsq[i])
        coeff[i] = c
        t = [a - c * Fraction(x) for a, x in zip(t, cols[i])]
        v = [a + c * x for a, x in zip(v, cols[i])]
    return tuple(int(x) for x in v)


def _fraction_inverse(M: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(M)
    A = [[Fraction(M[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for col in range(n):
        piv = next((i for i in range(col, n) if A[i][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[col], A[piv] = A[piv], A[col]
        pv = A[col][col]
        A[col] = [x / pv for x in A[col]]
        for i in range(n):
            if i != col and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[col])]
    return [row[n:] for row in A]


def dual_basis(basis: LatticeBasis) -> list[tuple[Fraction, ...]]:
    """Exact rational dual basis; pairing with the primal is the identity.

    Full-rank lattices get the inverse-transpose dual; lower-rank bases get
    the dual within their span, B (B^T B)^{-1}.
    """
    B = basis.matrix
    cols = B.columns()
    G = [[Fraction(dot(a, b)) for b in cols] for a in cols]
    Ginv = _fraction_inverse(G)
    # dual columns: B @ Ginv
    dual = []
    for j in range(basis.rank):
        col = tuple(
            sum(Fraction(B.rows[i][k]) * Ginv[k][j] for k in range(basis.rank))
            for i in range(basis.dim)
        )
        dual.append(col)
    return dual


def smoothing_bound(n: int, eps: float, lambda_n: float) -> SmoothingBound:
    """lambda_n * sqrt(ln(2n(1 + 1/eps)) / pi), an upper bound on eta_eps."""
    if not 0 < eps < 1:
        raise ValueError("eps must be in (0, 1)")
    if not (lambda_n > 0 and n >= 1):
        raise ValueError("need lambda_n > 0 and n >= 1")
    value = lambda_n * math.sqrt(math.log(2 * n * (1 + 1 / eps)) / math.pi)
    return SmoothingBound(n=n, eps=eps, lambda_n=lambda_n, value=value)


def smoothing_check(
    basis: LatticeBasis,
    s: float,
    eps: float,
    radius: float = 12.0,
) -> tuple[bool, float, float]:
    """Numeric check that s is above the smoothing parameter of the lattice.

    Evaluates the truncated Gaussian weight with parameter 1/s over the
    nonzero dual points (desk-scale enumeration) and certifies the tail.
    Returns (holds, lhs, tail) with holds = (lhs + tail <= eps).
    """
    if not s > 0:
        raise ValueError("s must be positive")
    dual = dual_basis(basis)
    D = np.array([[float(x) for x in col] for col in zip(*dual)], dtype=float)
    # rho_{1/s}(y) = exp(-pi s^2 ||y||^2): whitening is s * I restricted to span
    A = s * D
    T = enumerate_affine(A, np.zeros(A.shape[0]), radius)
    w = T @ A.T
    nrm = np.einsum("ij,ij->i", w, w)
    nonzero = nrm > 1e-18
    lhs = float(np.sum(np.sort(np.exp(-math.pi * nrm[nonzero]))))
    tail = 2.0 * ball_tail_bound(basis.rank, radius) * (1.0 + lhs)
    return (lhs + tail <= eps), lhs, tail


def singular_values(S) -> np.ndarray:
    """Singular values of a real matrix, descending."""
    return np.linalg.svd(np.asarray(S, dtype=float), compute_uv=False)
