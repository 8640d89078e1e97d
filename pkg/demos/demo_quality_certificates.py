"""Quality certificates and short orthogonal-lattice vectors.

Given an integer matrix X (n x m, full row rank), a quality certificate is a
pair (q1, q2) witnessed by pairwise-orthogonal integer vectors u_i with
u_i . x_j = delta_ij: q1 bounds the column norms, q2 bounds ||u_i||.  From a
certificate, the vectors v_k = e_k - sum_i x_ik u_i land in the orthogonal
lattice A(X) = {v : X v = 0} and bound its last successive minimum by
1 + q1 q2.  This script certifies a hand instance and a batch of random
Gaussian matrices, comparing the bound against LLL-reduced kernel lengths.
"""

import math

from dgsum import (
    IntMatrix,
    SampleStream,
    certify_quality,
    exact_dual_fallback,
    find_dual_vectors,
    integer_kernel,
    short_kernel_vectors,
    lll_reduce,
    successive_minima_upper,
    distance_threshold,
)
from dgsum.cli import best_certificate, draw_matrix


def main():
    print("== hand instance X = [[1,0,1],[0,1,1]] ==")
    X = IntMatrix.from_rows([[1, 0, 1], [0, 1, 1]])
    us = exact_dual_fallback(X)
    cert = certify_quality(X, us)
    print(f"  u = {cert.u}")
    print(f"  verified={cert.verified}  q1={cert.q1:.4f}  q2={cert.q2:.4f}")
    skv = short_kernel_vectors(X, cert)
    print(f"  kernel vectors v_k = {skv.v}")
    print(f"  independent subset {skv.independent_subset}, norm bound {skv.norm_bound:.4f}")
    lams = successive_minima_upper(lll_reduce(integer_kernel(X)))
    print(f"  LLL kernel lengths {[round(l, 4) for l in lams]}"
          f"  (last <= bound: {lams[-1] <= skv.norm_bound})")

    print("\n== collision search on random Gaussian matrices (n=2, m=32, s=3) ==")
    st = SampleStream(7)
    ok = 0
    for trial in range(20):
        Xr = draw_matrix(2, 32, 3.0, st.substream(trial), require_surjective=False)
        try:
            us = find_dual_vectors(Xr, stream=st.substream(1000 + trial))
        except Exception:
            continue
        c = certify_quality(Xr, us)
        if c.verified:
            ok += 1
    print(f"  collision search succeeded on {ok}/20 trials")

    print("\n== measured quality feeds the distance threshold ==")
    Xr = draw_matrix(2, 8, 2.0, st.substream(500))
    c = best_certificate(Xr, st.substream(501))
    if c is not None:
        for eps in (0.01, 0.001):
            thr = distance_threshold(c.q1, c.q2, 8, 2, eps)
            print(f"  q1 q2 = {c.q1 * c.q2:.3f}  eps={eps}: sigma_m(R) >= {thr:.4f}"
                  f"  guarantees distance <= {2 * eps}")


if __name__ == "__main__":
    main()
