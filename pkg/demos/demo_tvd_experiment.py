"""Exact statistical distance between X-image samples and the matched Gaussian.

Pushing v ~ D_{Z^m, r} through v -> X v gives a distribution on Z^n that, for
r above a threshold driven by the quality (q1, q2) of X, is within 2 eps of
the discrete Gaussian with shape r X^T.  At desk scale both sides can be
computed exactly by fiber enumeration: the mass at z is the Gaussian weight
of the solution coset {v : X v = z}, a translate of the kernel lattice.
"""

from dgsum import (
    GaussianShape,
    IntMatrix,
    SampleStream,
    certify_quality,
    exact_dual_fallback,
    exact_output_pmf,
    exact_tvd,
    fiber_mass,
    mc_tvd,
    target_pmf,
    distance_threshold,
)
from dgsum.gaussian import LatticeCoset, sample_dg_coset
from dgsum.tvd import FiberWorkspace


def main():
    X = IntMatrix.from_rows([[1, 1]])
    eps = 0.01
    cert = certify_quality(X, exact_dual_fallback(X))
    r = distance_threshold(cert.q1, cert.q2, 2, 1, eps)
    print(f"X = [1 1], eps = {eps}, measured (q1, q2) = ({cert.q1:.3f}, {cert.q2:.3f})")
    print(f"threshold: r = {r:.4f}")

    R = GaussianShape.spherical(r)
    ws = FiberWorkspace(X, R, [0.0, 0.0])

    print("\nfiber masses (Gaussian weight of {v : v1 + v2 = z}):")
    for z in (0, 1, 2, 3):
        fe = fiber_mass(X, R, [0.0, 0.0], [z])
        print(f"  z={z}: mass {fe.mass:.6f}  ({len(fe.points)} enumerated points)")

    p = exact_output_pmf(X, R, workspace=ws)
    q = target_pmf(X, R, workspace=ws)
    rep = exact_tvd(p, q)
    print(f"\nexact TVD = {rep.tvd:.3e}  (truncation error {rep.truncation_error:.1e},"
          f" support {rep.support_size})")
    print(f"guarantee 2 eps = {2 * eps}: {'met' if rep.tvd <= 2 * eps else 'violated'}")

    def sampler(N, st):
        vs = sample_dg_coset(LatticeCoset.integers(2), R, st, size=N)
        return vs @ X.to_numpy().T

    mc = mc_tvd(sampler, q, 100_000, SampleStream(99))
    print(f"\nMonte-Carlo cross-check: estimate {mc.estimate:.4f}"
          f" (bias bound {mc.bias_bound:.4f}, 99% band +-{(mc.ci_hi - mc.ci_lo) / 2:.3f})")

    print("\nbelow the threshold the match degrades:")
    for frac in (1.0, 0.5, 0.25):
        Rf = GaussianShape.spherical(frac * r)
        wsf = FiberWorkspace(X, Rf, [0.0, 0.0])
        d = exact_tvd(exact_output_pmf(X, Rf, workspace=wsf), target_pmf(X, Rf, workspace=wsf))
        print(f"  r = {frac:.2f} * threshold: exact TVD {d.tvd:.3e}")


if __name__ == "__main__":
    main()
