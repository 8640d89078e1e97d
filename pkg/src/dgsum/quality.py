"""Quality certificates for integer matrices and short orthogonal-lattice vectors.

A matrix X (n x m) has quality (q1, q2) when every column has l2 norm at most
q1 and there are pairwise orthogonal integer vectors u_1..u_n with
u_i . x_j = delta_ij and ||u_i|| <= q2 (x_j the rows of X).  From such a
certificate the short kernel vectors v_k = e_k - sum_i x_ik u_i bound the last
successive minimum of the orthogonal lattice by 1 + q1 q2.

The u_i are found by a randomized collision search over {-1,0,1} combinations
of column prefixes (two combinations whose sums differ by a unit vector), with
an exact HNF-based solver as deterministic fallback.  Every candidate is
verified exactly before being returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .gaussian import SampleStream
from .intmat import IntMatrix, dot, fraction_rank, is_surjective, kernel_columns, norm_sq, solve_integer
from .lattice import LatticeBasis, lll_reduce, nearest_plane


class CollisionNotFound(RuntimeError):
    pass


class SurjectivityError(ValueError):
    pass


@dataclass(frozen=True)
class CollisionSearchParams:
    """Budgets for the collision search; ``t`` follows 3 n log2(sigma1 n)."""

    t: float
    prefix_budget: int
    memory_budget: int = 1 << 20
    max_probes: int = 200_000

    @staticmethod
    def for_matrix(X: IntMatrix, sigma1: float | None = None) -> "CollisionSearchParams":
        n, m = X.shape
        if sigma1 is None:
            sigma1 = float(np.linalg.svd(X.to_numpy(), compute_uv=False)[0])
        t = 3.0 * n * math.log2(max(sigma1 * n, 2.0))
        return CollisionSearchParams(t=t, prefix_budget=min(m, int(10 * t)))


@dataclass(frozen=True)
class QualityCertificate:
    q1: float
    q2: float
    u: tuple[tuple[int, ...], ...]
    verified: bool
    failure: str | None = None
    search_stats: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "q1": self.q1,
            "q2": self.q2,
            "u": [list(v) for v in self.u],
            "verified": self.verified,
            "failure": self.failure,
            "search_stats": self.search_stats,
        }


@dataclass(frozen=True)
class ShortKernelBasis:
    v: tuple[tuple[int, ...], ...]
    independent_subset: tuple[int, ...]
    norm_bound: float


def column_bound(X: IntMatrix) -> float:
    """Largest column l2 norm of X."""
    return math.sqrt(max(norm_sq(c) for c in X.columns()))


def _max_column_norm_sq(X: IntMatrix) -> int:
    return max(norm_sq(c) for c in X.columns())


def pigeonhole_collision(
    xs: Sequence[Sequence[int]],
    B: int,
    stream: SampleStream,
    max_probes: int = 500_000,
    memory_budget: int = 1 << 21,
) -> tuple[int, ...]:
    """Nonzero alpha in {-1,0,1}^l with sum_j alpha_j x_j = 0.

    Found as the difference of two colliding 0/1 subset sums (hash-based
    birthday search); the relation is verified exactly before returning.
    For ||x_j||_inf <= B and l = floor(2 n log2(B n)) a collision is
    guaranteed to exist.
    """
    xs_int = [tuple(int(v) for v in x) for x in xs]
    ell = len(xs_int)
    if any(abs(v) > B for x in xs_int for v in x):
        raise ValueError("infinity norm bound violated")
    M = np.array(xs_int, dtype=np.int64)  # ell x n
    gen = stream.generator()
    table: dict[tuple, np.ndarray] = {}
    probes = 0
    while probes < max_probes:
        batch = min(4096, max_probes - probes)
        masks = gen.integers(0, 2, size=(batch, ell), dtype=np.int8)
        sums = masks.astype(np.int64) @ M
        for mask, s in zip(masks, sums):
            key = tuple(int(v) for v in s)
            prev = table.get(key)
            if prev is not None:
                alpha = tuple(int(a) - int(b) for a, b in zip(mask, prev))
                if any(alpha):
                    assert all(
                        sum(a * x[k] for a, x in zip(alpha, xs_int)) == 0
                        for k in range(len(xs_int[0]))
                    )
                    return alpha
            elif len(table) < memory_budget:
                table[key] = mask.copy()
        probes += batch
    raise CollisionNotFound(f"no 0/1 collision within {max_probes} probes")


def _collision_dual_vector(
    rows: list[tuple[int, ...]],
    target_index: int,
    prefix: int,
    stream: SampleStream,
    max_probes: int,
    memory_budget: int,
) -> tuple[int, ...] | None:
    """e_{target_index} as a {-2..2} combination of the first ``prefix`` columns.

    Searches for two {-1,0,1} combinations of the prefix columns whose sums
    differ by the unit vector; their difference is the coefficient vector.
    """
    d = len(rows)
    m = len(rows[0])
    prefix = min(prefix, m)
    cols = np.array([[rows[i][j] for i in range(d)] for j in range(prefix)], dtype=np.int64)
    e = np.zeros(d, dtype=np.int64)
    e[target_index] = 1
    gen = stream.generator()
    if prefix < 16:
        # candidate space is tiny; no point probing past exhaustion-scale
        max_probes = min(max_probes, 4 * 3 ** prefix)
    table: dict[tuple, np.ndarray] = {}
    probes = 0
    while probes < max_probes:
        batch = min(4096, max_probes - probes)
        coeffs = gen.integers(-1, 2, size=(batch, prefix), dtype=np.int8)
        sums = coeffs.astype(np.int64) @ cols
        for coeff, s in zip(coeffs, sums):
            key = tuple(int(v) for v in s)
            hit = table.get(tuple(int(v) for v in (s - e)))
            if hit is not None:
                u = np.concatenate([hit.astype(np.int64) - coeff.astype(np.int64) + 0, np.zeros(m - prefix, dtype=np.int64)])
                # (hit) - (coeff) has sum (s - e) - s = -e; flip sign
                u = -u
                return tuple(int(v) for v in u)
            hit = table.get(tuple(int(v) for v in (s + e)))
            if hit is not None:
                u = np.concatenate([coeff.astype(np.int64) - hit.astype(np.int64), np.zeros(m - prefix, dtype=np.int64)])
                # sum(coeff) - sum(hit) = s - (s + e) = -e; flip sign
                u = -u
                return tuple(int(v) for v in u)
            if tuple(int(v) for v in s) not in table and len(table) < memory_budget:
                table[tuple(int(v) for v in s)] = coeff.copy()
        probes += batch
    return None


def _augmented_rows(X: IntMatrix, us: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    return list(X.rows) + list(us)


def find_dual_vectors(
    X: IntMatrix,
    params: CollisionSearchParams | None = None,
    stream: SampleStream | None = None,
    restarts: int = 8,
) -> list[tuple[int, ...]]:
    """Pairwise orthogonal u_i with u_i . x_j = delta_ij, by collision search.

    The i-th vector is found against X augmented with the rows u_1..u_{i-1}
    and target e_i (so orthogonality to earlier u's comes for free); entries
    live in {-2..2} on the searched prefix.  Raises CollisionNotFound when a
    budget is exhausted; callers may fall back to exact_dual_fallback.
    """
    if stream is None:
        stream = SampleStream(seed=0)
    if params is None:
        params = CollisionSearchParams.for_matrix(X)
    n, m = X.shape
    if fraction_rank(X.rows) < n:
        raise SurjectivityError("X must have full row rank")
    # an unlucky early u_i can make a later augmented search infeasible, so
    # restart the whole sequence with a fresh substream a few times
    for attempt in range(restarts):
        us: list[tuple[int, ...]] = []
        ok = True
        for i in range(n):
            rows = _augmented_rows(X, us)
            u = _collision_dual_vector(
                rows, i, params.prefix_budget,
                stream.substream(attempt * 64 + i),
                params.max_probes, params.memory_budget,
            )
            if u is None:
                ok = False
                break
            got = [dot(u, r) for r in rows]
            assert got == [1 if j == i else 0 for j in range(len(rows))]
            us.append(u)
        if ok:
            return us
    raise CollisionNotFound(f"no collision within {restarts} restarts")


def exact_dual_fallback(X: IntMatrix, lll_rank_cap: int = 12) -> list[tuple[int, ...]]:
    """Deterministic u_i via exact integer solves on augmented systems.

    Solves [X; u_1; ..; u_{i-1}] u = e_i over the integers (HNF), then
    shortens u modulo the kernel lattice with LLL + nearest-plane when the
    kernel rank is small enough.  No a-priori norm bound; the achieved q2 is
    whatever comes out.
    """
    n, m = X.shape
    if fraction_rank(X.rows) < n:
        raise SurjectivityError("X must have full row rank")
    if not is_surjective(X):
        raise SurjectivityError("X does not map Z^m onto Z^n")
    us: list[tuple[int, ...]] = []
    for i in range(n):
        rows = _augmented_rows(X, us)
        M = IntMatrix.from_rows(rows)
        target = [1 if j == i else 0 for j in range(len(rows))]
        u = solve_integer(M, target)
        if u is None:
            raise CollisionNotFound(f"augmented system for u_{i + 1} has no integer solution")
        ker = kernel_columns(M)
        if 0 < len(ker) <= lll_rank_cap:
            kb = lll_reduce(LatticeBasis(IntMatrix.from_columns(ker)))
            near = nearest_plane(kb, u)
            u = tuple(a - b for a, b in zip(u, near))
        got = [dot(u, r) for r in rows]
        assert got == target
        us.append(u)
    return us


def certify_quality(X: IntMatrix, u: Sequence[Sequence[int]]) -> QualityCertificate:
    """Exact verification of all certificate constraints; achieved (q1, q2)."""
    n, m = X.shape
    uu = tuple(tuple(int(v) for v in vec) for vec in u)
    q1 = column_bound(X)
    q2 = math.sqrt(max(norm_sq(vec) for vec in uu)) if uu else 0.0

    def fail(reason: str) -> QualityCertificate:
        return QualityCertificate(q1=q1, q2=q2, u=uu, verified=False, failure=reason)

    if len(uu) != n or any(len(vec) != m for vec in uu):
        return fail("shape")
    for i, ui in enumerate(uu):
        for j in range(n):
            if dot(ui, X.rows[j]) != (1 if i == j else 0):
                return fail(f"duality({i + 1},{j + 1})")
    for i in range(n):
        for j in range(i + 1, n):
            if dot(uu[i], uu[j]) != 0:
                return fail(f"orthogonality({i + 1},{j + 1})")
    # a verified certificate implies full row rank and surjectivity
    assert fraction_rank(X.rows) == n and is_surjective(X)
    return QualityCertificate(q1=q1, q2=q2, u=uu, verified=True)


def kernel_norm_bound_sq_ceil(X: IntMatrix, u: Sequence[Sequence[int]]) -> int:
    """ceil((1 + q1 q2)^2) with exact integer arithmetic."""
    a = _max_column_norm_sq(X) * max(norm_sq(vec) for vec in u)
    c = math.isqrt(4 * a)
    two_sqrt_a_ceil = c if c * c == 4 * a else c + 1
    return 1 + a + two_sqrt_a_ceil


def short_kernel_vectors(X: IntMatrix, cert: QualityCertificate) -> ShortKernelBasis:
    """Short kernel vectors v_k = e_k - sum_i x_ik u_i from a certificate.

    Each v_k satisfies X v_k = 0 exactly and ||v_k|| <= 1 + q1 q2; a size
    m - n linearly independent subset is extracted greedily by index.
    """
    if not cert.verified:
        raise ValueError("certificate not verified")
    n, m = X.shape
    bound_sq = kernel_norm_bound_sq_ceil(X, cert.u)
    vs = []
    for k in range(m):
        v = [1 if j == k else 0 for j in range(m)]
        for i in range(n):
            xik = X.rows[i][k]
            if xik:
                v = [a - xik * b for a, b in zip(v, cert.u[i])]
        assert all(x == 0 for x in X @ v)
        assert norm_sq(v) <= bound_sq
        vs.append(tuple(v))
    # greedy independent subset, exact rank updates
    subset: list[int] = []
    chosen: list[tuple[int, ...]] = []
    for k in range(m):
        if fraction_rank(chosen + [vs[k]]) > len(chosen):
            subset.append(k)
            chosen.append(vs[k])
        if len(subset) == m - n:
            break
    assert len(subset) == m - n
    return ShortKernelBasis(
        v=tuple(vs),
        independent_subset=tuple(subset),
        norm_bound=1.0 + cert.q1 * cert.q2,
    )


def distance_threshold(q1: float, q2: float, m: int, n: int, eps: float) -> float:
    """Least-singular-value threshold guaranteeing statistical distance 2 eps."""
    if not (m > n >= 1):
        raise ValueError("need m > n >= 1")
    if not 0 < eps < 1 / 3:
        raise ValueError("eps must be in (0, 1/3)")
    return (1.0 + q1 * q2) * math.sqrt(math.log(2 * (m - n) * (1 + 1 / eps)) / math.pi)


def parameter_check(n: int, m: int, eps: float, S, R) -> dict:
    """Evaluate the three threshold-parameter inequalities numerically.

    Also reports the applicability gate (n >= 100, eps < 1/1000) under which
    the probabilistic guarantee is stated; at desk scale the inequalities are
    reported as formula evaluations only.
    """
    s1 = S.sigma_max(n)
    sn = S.sigma_min(n)
    sm = R.sigma_min(m)
    m_rhs = 30.0 * n * math.log2(max(s1 * n, 2.0))
    r_rhs = (
        10.0 * n * s1 * math.log2(max(m, 2))
        * math.sqrt(max(math.log2(1 / eps), 0.0) * math.log2(max(n * s1, 2.0)))
    )
    s_rhs = 9.0 * math.sqrt(math.log(2 * n * (1 + 1 / eps)) / math.pi)
    return {
        "m_condition": {"lhs": m, "rhs": m_rhs, "holds": m >= m_rhs},
        "r_condition": {"lhs": sm, "rhs": r_rhs, "holds": sm >= r_rhs},
        "s_condition": {"lhs": sn, "rhs": s_rhs, "holds": sn >= s_rhs},
        "applicability_gate": {"n": n, "eps": eps, "holds": n >= 100 and eps < 1e-3},
    }
