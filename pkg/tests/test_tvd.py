"""Fiber enumeration, exact/Monte-Carlo statistical distance, bound evaluators."""

import math

import numpy as np
import pytest

from dgsum.gaussian import GaussianShape, LatticeCoset, SampleStream, sample_dg_coset
from dgsum.intmat import IntMatrix, solve_integer
from dgsum.lattice import integer_kernel, smoothing_bound
from dgsum.tvd import (
    FiberWorkspace,
    NotInSupport,
    exact_output_pmf,
    exact_tvd,
    fiber_mass,
    mc_tvd,
    ratio_band_check,
    region_radius_for_tail,
    shift_bound_eval,
    tail_bound_eval,
    target_pmf,
)
from dgsum.quality import distance_threshold

X11 = IntMatrix.from_rows([[1, 1]])
R2 = GaussianShape.spherical(2.0)


# ---------------------------------------------------------------- fibers


def test_fiber_zero_mass():
    fe = fiber_mass(X11, R2, [0.0, 0.0], [0])
    # sum_k exp(-pi * 2 k^2 / 4) over the kernel line k (1,-1)
    assert fe.mass == pytest.approx(1.419495, abs=1e-5)
    for v in fe.points:
        assert int(round(v[0] + v[1])) == 0


def test_fiber_shifted_smaller():
    f0 = fiber_mass(X11, R2, [0.0, 0.0], [0])
    f1 = fiber_mass(X11, R2, [0.0, 0.0], [1])
    assert f1.mass < f0.mass


def test_fiber_points_coset_structure():
    fe = fiber_mass(X11, R2, [0.0, 0.0], [2])
    K = integer_kernel(X11).matrix
    base = fe.points[0]
    for v in fe.points[1:]:
        diff = [int(round(a - b)) for a, b in zip(v, base)]
        assert solve_integer(K, diff) is not None


def test_fiber_unimodular_single_point():
    X = IntMatrix.from_rows([[1, 1], [0, 1]])
    fe = fiber_mass(X, R2, [0.0, 0.0], [3, 1])
    assert len(fe.points) == 1
    from dgsum.gaussian import rho

    v = fe.points[0]
    assert fe.mass == pytest.approx(rho(R2, v), rel=1e-12)
    assert tuple(int(round(x)) for x in X.to_numpy() @ v) == (3, 1)


def test_fiber_not_in_support():
    X = IntMatrix.from_rows([[2, 2]])
    with pytest.raises(NotInSupport):
        fiber_mass(X, R2, [0.0, 0.0], [1])


def test_fiber_weight_matches_fiber():
    ws = FiberWorkspace(X11, R2, [0.0, 0.0])
    for z in ([-2], [0], [3]):
        assert ws.fiber_weight(z) == pytest.approx(ws.fiber(z).mass, rel=1e-12)


def test_region_radius_for_tail():
    from dgsum.gaussian import ball_tail_bound

    r = region_radius_for_tail(2, 1e-10)
    assert ball_tail_bound(2, r) <= 1e-10
    assert ball_tail_bound(2, r - 0.25) > 1e-10


# ---------------------------------------------------------------- output/target pmfs


def test_output_pmf_identity_matches_exact_pmf():
    from dgsum.gaussian import exact_pmf

    X = IntMatrix.from_rows([[1]])
    for r in (1.0, 2.5):
        R = GaussianShape.spherical(r)
        p = exact_output_pmf(X, R)
        base = exact_pmf(LatticeCoset.integers(1), R)
        for pt in base.points:
            assert p.mass_at(pt) == pytest.approx(base.mass_at(pt), abs=1e-12)


def test_output_pmf_symmetry():
    p = exact_output_pmf(X11, R2)
    for z in p.points:
        assert p.mass_at(z) == pytest.approx(p.mass_at((-z[0],)), rel=1e-10)


def test_target_pmf_is_1d_gaussian_with_r_sqrt2():
    from dgsum.gaussian import exact_pmf

    q = target_pmf(X11, R2)
    base = exact_pmf(LatticeCoset.integers(1), GaussianShape.spherical(2.0 * math.sqrt(2)))
    for z in base.points:
        if q.mass_at(z):
            assert q.mass_at(z) == pytest.approx(base.mass_at(z), rel=1e-9)


def test_target_pmf_shifted_support():
    ws = FiberWorkspace(X11, R2, [0.25, 0.25])
    assert ws.Xc == pytest.approx(np.array([0.5]))
    q = target_pmf(X11, R2, c=[0.25, 0.25])
    assert float(q.masses.sum()) == pytest.approx(1.0, abs=1e-9)


def test_output_pmf_ratio_band_against_target():
    # the fiber-factorization mechanism: pmf(z)/pmf(0) tracks the target shape
    ws = FiberWorkspace(X11, R2, [0.0, 0.0])
    kw = ws.kernel_weight()
    eps = 0.01
    lo = (1 - eps) / (1 + eps)
    for z in ws.region(6.0):
        ratio = ws.fiber_weight(z) / (ws.target_weight(z) * kw)
        assert lo - 1e-9 <= ratio <= 1.0 + 1e-9


# ---------------------------------------------------------------- exact tvd


def test_exact_tvd_self_is_zero():
    p = exact_output_pmf(X11, R2)
    rep = exact_tvd(p, p)
    assert rep.tvd == 0.0


def test_exact_tvd_disjoint_supports():
    from dgsum.gaussian import DiscretePMF

    p = DiscretePMF(((0,),), np.array([1.0]), 0.0)
    q = DiscretePMF(((5,),), np.array([1.0]), 0.0)
    assert exact_tvd(p, q).tvd == pytest.approx(1.0)


def test_exact_tvd_symmetry_and_triangle():
    ps = [
        exact_output_pmf(X11, GaussianShape.spherical(r))
        for r in (1.5, 2.0, 3.0)
    ]
    d = lambda a, b: exact_tvd(a, b).tvd
    assert d(ps[0], ps[1]) == pytest.approx(d(ps[1], ps[0]), rel=1e-12)
    assert d(ps[0], ps[2]) <= d(ps[0], ps[1]) + d(ps[1], ps[2]) + 1e-12


def test_threshold_pipeline_small_instance():
    eps = 0.01
    r = distance_threshold(1.0, 1.0, 2, 1, eps)
    R = GaussianShape.spherical(r)
    ws = FiberWorkspace(X11, R, [0.0, 0.0])
    rep = exact_tvd(exact_output_pmf(X11, R, workspace=ws), target_pmf(X11, R, workspace=ws))
    assert rep.tvd <= 2 * eps + rep.truncation_error


# ---------------------------------------------------------------- monte carlo


def _sampler_for(X, R):
    m = X.n_cols
    Xf = X.to_numpy()

    def sampler(N, st):
        vs = sample_dg_coset(LatticeCoset.integers(m), R, st, size=N)
        return vs @ Xf.T

    return sampler


def test_mc_tvd_self_distance_small():
    q = target_pmf(X11, R2)
    rep = mc_tvd(_sampler_for(X11, R2), q, 100_000, SampleStream(55))
    # E_{X,r} at r=2 is within a few e-3 of the target; the plug-in estimate
    # should sit near the bias floor
    assert rep.estimate <= rep.bias_bound + 0.01
    assert rep.ci_lo <= rep.estimate <= rep.ci_hi


def test_mc_tvd_determinism():
    q = target_pmf(X11, R2)
    a = mc_tvd(_sampler_for(X11, R2), q, 20_000, SampleStream(7))
    b = mc_tvd(_sampler_for(X11, R2), q, 20_000, SampleStream(7))
    assert a.estimate == b.estimate


def test_mc_tvd_ci_shrinks_with_n():
    q = target_pmf(X11, R2)
    w = []
    for N in (10_000, 40_000):
        rep = mc_tvd(_sampler_for(X11, R2), q, N, SampleStream(8))
        w.append(rep.ci_hi - rep.ci_lo)
    # quadrupling N should halve the band width (same support, +-30% slack)
    assert 0.35 <= w[1] / w[0] <= 0.65


def test_mc_tvd_min_samples():
    q = target_pmf(X11, R2)
    with pytest.raises(ValueError):
        mc_tvd(_sampler_for(X11, R2), q, 100, SampleStream(9))


# ---------------------------------------------------------------- bound evaluators


def test_tail_bound_degenerate_endpoint():
    c = 1 / math.sqrt(2 * math.pi)
    v = tail_bound_eval(3, 0.01, c)
    assert v == pytest.approx((1.01 / 0.99), rel=1e-9)  # base is exactly 1
    with pytest.raises(ValueError):
        tail_bound_eval(1, 0.01, 0.1)


def test_tail_bound_formula_value():
    c = math.sqrt(math.log2(1024))  # sqrt(log 1024) = sqrt(10)
    base = c * math.sqrt(2 * math.pi * math.e) * math.exp(-math.pi * c * c)
    want = (1 + 1e-3) / (1 - 1e-3) * base ** 2
    assert tail_bound_eval(2, 1e-3, c) == pytest.approx(want, rel=1e-12)


def test_shift_bound_claim_constant():
    # sigma_n at 9 times the smoothing bound of Z: the evaluated constant
    # erf(3q/4)/erf(2q) (1+eps)/(1-eps) stays below 0.39
    eps = 1e-5
    sigma = 9 * smoothing_bound(1, eps, 1.0).value
    v = shift_bound_eval(1.0, sigma, eps, 8.0)
    assert v < 0.39


def test_shift_bound_monotone_in_sigma():
    vals = [shift_bound_eval(1.0, s, 0.01, 8.0) for s in (20.0, 10.0, 5.0)]
    assert vals[0] < vals[1] < vals[2]


def test_shift_bound_dominates_interval_shifts():
    # |Pr(x in S) - Pr(x in S+1)| for interval sets S under D_{Z,sigma}
    from dgsum.gaussian import exact_pmf

    eps = 0.01
    sigma = 9 * smoothing_bound(1, eps, 1.0).value
    bound = shift_bound_eval(1.0, sigma, eps, 8.0)
    pmf = exact_pmf(LatticeCoset.integers(1), GaussianShape.spherical(sigma)).as_dict()
    ks = sorted(k[0] for k in pmf)
    worst = 0.0
    for a in range(-15, 16):
        for b in range(a, 16):
            pS = sum(v for (k,), v in pmf.items() if a <= k <= b)
            pS1 = sum(v for (k,), v in pmf.items() if a + 1 <= k <= b + 1)
            worst = max(worst, abs(pS - pS1))
    assert worst <= bound


def test_ratio_band_check_zero_shift():
    rep = ratio_band_check(1, GaussianShape.spherical(1.3), 0.01, [(0.0,)], lambda_n=1.0)
    assert rep["max_ratio"] == pytest.approx(1.0, rel=1e-12)
    assert rep["precondition_ok"]


def test_ratio_band_check_half_shift():
    rep = ratio_band_check(1, GaussianShape.spherical(1.3), 0.01, [(0.5,)], lambda_n=1.0)
    assert rep["in_band"]
    assert rep["min_ratio"] == pytest.approx(0.98041, abs=1e-4)


def test_ratio_band_check_diagnostic_below_smoothing():
    rep = ratio_band_check(1, GaussianShape.spherical(0.2), 0.01, [(0.5,)], lambda_n=1.0)
    assert rep["precondition_ok"] is False
    assert not rep["in_band"]
