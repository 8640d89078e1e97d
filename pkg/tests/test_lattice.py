"""Integer kernels, LLL, duals, and smoothing-parameter checks."""

import math
from fractions import Fraction

import numpy as np
import pytest

from dgsum.intmat import IntMatrix, dot, norm_sq, solve_integer
from dgsum.lattice import (
    LatticeBasis,
    RankError,
    dual_basis,
    integer_kernel,
    lll_reduce,
    nearest_plane,
    singular_values,
    smoothing_bound,
    smoothing_check,
    successive_minima_upper,
)


def test_kernel_forced_1d():
    K = integer_kernel(IntMatrix.from_rows([[1, 1]]))
    assert K.rank == 1
    v = K.vectors()[0]
    assert v in ((1, -1), (-1, 1))


def test_kernel_rank2_membership():
    X = IntMatrix.from_rows([[1, 1, 1]])
    K = integer_kernel(X)
    assert K.rank == 2
    for v in K.vectors():
        assert X @ v == (0,)
    for target in [(1, -1, 0), (0, 1, -1)]:
        assert solve_integer(K.matrix, target) is not None


def test_kernel_primitive_generator():
    X = IntMatrix.from_rows([[1, 0, 1], [0, 1, 1]])
    K = integer_kernel(X)
    assert K.rank == 1
    v = K.vectors()[0]
    assert v in ((-1, -1, 1), (1, 1, -1))


def test_kernel_rank_failure():
    with pytest.raises(RankError):
        integer_kernel(IntMatrix.from_rows([[1, 1], [2, 2]]))


def test_kernel_random_invariants():
    rng = np.random.default_rng(5)
    done = 0
    while done < 200:
        n = int(rng.integers(1, 4))
        m = int(rng.integers(n + 1, 8))
        X = IntMatrix.from_rows(rng.integers(-4, 5, size=(n, m)).tolist())
        try:
            K = integer_kernel(X)
        except RankError:
            continue
        assert K.rank == m - n
        for v in K.vectors():
            assert all(x == 0 for x in X @ v)
        done += 1


def test_lll_orthogonal_unchanged():
    basis = LatticeBasis(IntMatrix.from_columns([(2, 0), (0, 3)]))
    red = lll_reduce(basis)
    got = {tuple(abs(x) for x in v) for v in red.vectors()}
    assert got == {(2, 0), (0, 3)}


def test_lll_shears_off_large_multiple():
    basis = LatticeBasis(IntMatrix.from_columns([(1, 0), (100, 1)]))
    red = lll_reduce(basis)
    lens = sorted(norm_sq(v) for v in red.vectors())
    assert lens == [1, 1]


def test_lll_preserves_volume_and_membership():
    rng = np.random.default_rng(13)
    for _ in range(30):
        cols = rng.integers(-9, 10, size=(3, 3))
        if abs(round(np.linalg.det(cols.astype(float)))) < 1:
            continue
        basis = LatticeBasis(IntMatrix.from_columns(cols.tolist()))
        red = lll_reduce(basis)
        d0 = round(np.linalg.det(basis.matrix.to_numpy()))
        d1 = round(np.linalg.det(red.matrix.to_numpy()))
        assert abs(d0) == abs(d1)
        # original vectors lie in the reduced lattice
        for v in basis.vectors():
            assert solve_integer(red.matrix, v) is not None


def test_minima_integers():
    basis = LatticeBasis(IntMatrix.identity(3))
    assert successive_minima_upper(basis) == [1.0, 1.0, 1.0]


def test_minima_kernel_sqrt3():
    K = integer_kernel(IntMatrix.from_rows([[1, 0, 1], [0, 1, 1]]))
    lams = successive_minima_upper(K)
    assert lams == [pytest.approx(math.sqrt(3))]


def test_nearest_plane_membership():
    basis = lll_reduce(LatticeBasis(IntMatrix.from_columns([(2, 1), (1, 3)])))
    v = nearest_plane(basis, [Fraction(7), Fraction(5)])
    assert solve_integer(basis.matrix, v) is not None


def test_dual_integers_self_dual():
    dual = dual_basis(LatticeBasis(IntMatrix.identity(2)))
    assert dual == [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(1))]


def test_dual_scaling():
    dual = dual_basis(LatticeBasis(IntMatrix.from_columns([(2,)])))
    assert dual == [(Fraction(1, 2),)]


def test_dual_pairing_identity():
    basis = LatticeBasis(IntMatrix.from_columns([(1, 2, 0), (0, 1, 1)]))
    dual = dual_basis(basis)
    for i, b in enumerate(basis.matrix.columns()):
        for j, d in enumerate(dual):
            pair = sum(Fraction(x) * y for x, y in zip(b, d))
            assert pair == (1 if i == j else 0)


def test_smoothing_bound_values():
    assert smoothing_bound(1, 0.01, 1.0).value == pytest.approx(1.2999, abs=1e-4)
    assert smoothing_bound(1, 0.999999, 1.0).value == pytest.approx(
        math.sqrt(math.log(4) / math.pi), abs=1e-3
    )
    assert math.sqrt(math.log(4) / math.pi) == pytest.approx(0.664, abs=1e-3)


def test_smoothing_bound_monotonicity_and_scaling():
    b = smoothing_bound(1, 0.01, 1.0).value
    assert smoothing_bound(1, 0.001, 1.0).value > b
    assert smoothing_bound(2, 0.01, 1.0).value > b
    assert smoothing_bound(1, 0.01, 2.0).value == pytest.approx(2 * b, rel=1e-12)
    with pytest.raises(ValueError):
        smoothing_bound(1, 1.5, 1.0)


def test_smoothing_bound_symbolic_inverse():
    # squaring and exponentiating the formula recovers 2 n (1 + 1/eps)
    for n, eps in [(1, 0.1), (2, 0.01), (3, 0.001)]:
        v = smoothing_bound(n, eps, 1.0).value
        assert math.exp(math.pi * v * v) == pytest.approx(2 * n * (1 + 1 / eps), rel=1e-9)


def test_smoothing_check_at_bound():
    Z = LatticeBasis(IntMatrix.identity(1))
    s = smoothing_bound(1, 0.01, 1.0).value
    holds, lhs, tail = smoothing_check(Z, s, 0.01)
    assert holds and lhs + tail <= 0.01


def test_smoothing_check_fails_below():
    Z = LatticeBasis(IntMatrix.identity(1))
    holds, lhs, _ = smoothing_check(Z, 0.1, 0.01)
    assert not holds
    # the +-1 terms alone already contribute 2 e^{-pi/100} ~ 1.94 >> eps
    assert lhs >= 2 * math.exp(-math.pi / 100) - 1e-9


def test_smoothing_check_lhs_monotone_in_s():
    Z = LatticeBasis(IntMatrix.identity(2))
    prev = math.inf
    for s in (0.8, 1.2, 2.0, 4.0):
        _, lhs, _ = smoothing_check(Z, s, 0.01)
        assert lhs < prev
        prev = lhs


def test_singular_values_examples():
    assert np.allclose(singular_values(3 * np.eye(4)), 3.0)
    assert np.allclose(singular_values(np.diag([1.0, 3.0])), [3.0, 1.0])
    sv = singular_values([[1.0, 1.0], [0.0, 1.0]])
    assert sv[0] * sv[1] == pytest.approx(1.0, rel=1e-10)
    assert sv[0] ** 2 + sv[1] ** 2 == pytest.approx(3.0, rel=1e-10)
