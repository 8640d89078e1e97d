"""Exact integer matrix algebra: HNF, kernels, integer solves."""

import numpy as np
import pytest

from dgsum.intmat import (
    IntMatrix,
    dot,
    fraction_rank,
    hnf_column,
    hnf_pivots,
    is_surjective,
    kernel_columns,
    norm_sq,
    rational_from_text,
    rational_to_text,
    row_rank,
    solve_integer,
)


def random_matrix(rng, n, m, lo=-5, hi=6):
    return IntMatrix.from_rows(rng.integers(lo, hi, size=(n, m)).tolist())


def test_construction_and_transpose():
    X = IntMatrix.from_rows([[1, 2, 3], [4, 5, 6]])
    assert X.shape == (2, 3)
    assert X.T.rows == ((1, 4), (2, 5), (3, 6))
    assert X.column(1) == (2, 5)
    assert IntMatrix.from_columns(X.columns()).rows == X.rows


def test_matmul_matrix_and_vector():
    A = IntMatrix.from_rows([[1, 2], [3, 4]])
    B = IntMatrix.from_rows([[0, 1], [1, 0]])
    assert (A @ B).rows == ((2, 1), (4, 3))
    assert A @ (1, 1) == (3, 7)
    with pytest.raises(ValueError):
        A @ (1, 1, 1)


def test_text_round_trip():
    X = IntMatrix.from_rows([[1, -2, 30], [0, 7, -100]])
    assert IntMatrix.from_text(X.to_text()).rows == X.rows


def test_rational_text_round_trip():
    from fractions import Fraction

    rows = [[Fraction(1, 2), Fraction(3)], [Fraction(-7, 5), Fraction(0)]]
    text = rational_to_text(rows)
    assert "1/2" in text and "3" in text
    assert rational_from_text(text) == rows


def test_dot_and_norms():
    assert dot((1, 2, 3), (4, 5, 6)) == 32
    assert norm_sq((3, 4)) == 25


def test_hnf_identity_on_unimodular():
    X = IntMatrix.from_rows([[1, 1], [0, 1]])
    H, U = hnf_column(X)
    assert (X @ U).rows == H.rows
    assert len(hnf_pivots(H)) == 2


def test_hnf_random_consistency():
    rng = np.random.default_rng(7)
    for _ in range(50):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(n, 6))
        X = random_matrix(rng, n, m)
        H, U = hnf_column(X)
        assert (X @ U).rows == H.rows
        # unimodular U: |det| = 1, checked via exact rank + numpy determinant
        assert abs(round(np.linalg.det(U.to_numpy()))) == 1
        assert len(hnf_pivots(H)) == fraction_rank(X.rows) == row_rank(X)


def test_kernel_columns_exact():
    X = IntMatrix.from_rows([[1, 1, 1]])
    ker = kernel_columns(X)
    assert len(ker) == 2
    for v in ker:
        assert all(x == 0 for x in X @ v)
    # (1,-1,0) and (0,1,-1) must be integer combinations of the kernel basis
    for target in [(1, -1, 0), (0, 1, -1)]:
        K = IntMatrix.from_columns(ker)
        sol = solve_integer(K, target)
        assert sol is not None


def test_solve_integer_basic():
    X = IntMatrix.from_rows([[1, 0, 1], [0, 1, 1]])
    u = solve_integer(X, (1, 0))
    assert u is not None and X @ u == (1, 0)
    assert solve_integer(IntMatrix.from_rows([[2]]), (1,)) is None


def test_solve_integer_random():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(n, 6))
        X = random_matrix(rng, n, m)
        if fraction_rank(X.rows) < n:
            continue
        w = rng.integers(-3, 4, size=m).tolist()
        t = X @ w
        u = solve_integer(X, t)
        assert u is not None and X @ u == tuple(t)


def test_is_surjective():
    assert is_surjective(IntMatrix.from_rows([[1, 0, 1], [0, 1, 1]]))
    assert not is_surjective(IntMatrix.from_rows([[2, 0], [0, 2]]))
    assert not is_surjective(IntMatrix.from_rows([[1, 1], [1, 1]]))


def test_fraction_rank():
    assert fraction_rank([[1, 2], [2, 4]]) == 1
    assert fraction_rank([[1, 0], [0, 1]]) == 2
    assert fraction_rank([]) == 0


def test_big_integer_exactness():
    big = 10 ** 30
    X = IntMatrix.from_rows([[big, big + 1]])
    ker = kernel_columns(X)
    assert len(ker) == 1
    v = ker[0]
    assert big * v[0] + (big + 1) * v[1] == 0
    assert v in ((big + 1, -big), (-(big + 1), big))
