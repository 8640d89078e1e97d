"""Seeded, manifest-driven command-line front end.

Subcommands: sample | quality | kernel | tvd | main.  Each run writes a
manifest (resolved config, tool version, RNG identity, wall clock, stage
status) plus machine-readable JSON/CSV reports.  Report files contain no
timestamps, so a re-run from the same manifest is byte-identical.

Exit codes: 0 = all gates passed, 2 = gates unmet, 3 = invariant violation.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .gaussian import GaussianShape, SampleStream, sample_dg_ints
from .intmat import IntMatrix
from .lattice import integer_kernel, lll_reduce, successive_minima_upper
from .quality import (
    CollisionNotFound,
    CollisionSearchParams,
    SurjectivityError,
    certify_quality,
    exact_dual_fallback,
    find_dual_vectors,
    short_kernel_vectors,
    distance_threshold,
    parameter_check,
)
from .tvd import (
    FiberWorkspace,
    exact_output_pmf,
    exact_tvd,
    mc_tvd,
    target_pmf,
)

EXIT_OK = 0
EXIT_GATE = 2
EXIT_INVARIANT = 3


def jround(obj, sig: int = 12):
    """Round floats to 12 significant digits for diffable reports."""
    if isinstance(obj, float):
        return float(f"{obj:.{sig}g}")
    if isinstance(obj, dict):
        return {k: jround(v, sig) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jround(v, sig) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(f"{float(obj):.{sig}g}")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(jround(obj), indent=2, sort_keys=True) + "\n")


def parse_config(path: str) -> dict:
    """Key-value config (``key = value`` lines) or a manifest JSON file."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        return dict(data.get("resolved_config", data))
    cfg = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {line!r}")
        key, val = line.split("=", 1)
        cfg[key.strip()] = val.strip()
    return cfg


def resolve(args: argparse.Namespace) -> dict:
    cfg = parse_config(args.config) if args.config else {}
    for key in ("seed", "eps", "samples", "radius", "trials", "n", "m", "s", "r", "out_dir", "x_file", "c", "mode", "push_basis_file"):
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    out = {
        "n": int(cfg.get("n", 1)),
        "m": int(cfg.get("m", 2)),
        "s": float(cfg.get("s", 3.0)),
        "r": float(cfg["r"]) if "r" in cfg and cfg["r"] is not None else None,
        "eps": float(cfg.get("eps", 0.01)),
        "seed": int(cfg.get("seed", 1)),
        "samples": int(cfg.get("samples", 100_000)),
        "radius": float(cfg.get("radius", 6.0)),
        "trials": int(cfg.get("trials", 10)),
        "out_dir": str(cfg.get("out_dir", ".")),
        "x_file": cfg.get("x_file"),
        "c": [float(t) for t in str(cfg.get("c", "")).split()] if cfg.get("c") else None,
        "mode": str(cfg.get("mode", "exact")),
        "push_basis_file": cfg.get("push_basis_file"),
    }
    if not 0 < out["eps"] < 1:
        raise ValueError("eps out of range")
    if out["n"] < 1 or out["m"] < out["n"]:
        raise ValueError("need m >= n >= 1")
    return out


def draw_matrix(n: int, m: int, s: float, stream: SampleStream, require_surjective: bool = True) -> IntMatrix:
    """X with columns drawn from D_{Z^n, s}; retries until full row rank."""
    from .intmat import fraction_rank, is_surjective

    for attempt in range(200):
        sub = stream.substream(attempt)
        cols = sample_dg_ints(s, n * m, sub).reshape(n, m)
        X = IntMatrix.from_rows(cols.tolist())
        if fraction_rank(X.rows) == n and (not require_surjective or is_surjective(X)):
            return X
    raise RuntimeError("could not draw a full row-rank matrix")


def load_or_draw_matrix(cfg: dict, stream: SampleStream) -> IntMatrix:
    if cfg["x_file"]:
        return IntMatrix.from_text(Path(cfg["x_file"]).read_text())
    return draw_matrix(cfg["n"], cfg["m"], cfg["s"], stream)


def best_certificate(X: IntMatrix, stream: SampleStream):
    """Collision search first, exact fallback second; best (smaller) q2 wins."""
    candidates = []
    try:
        candidates.append(find_dual_vectors(X, stream=stream))
    except (CollisionNotFound, SurjectivityError):
        pass
    try:
        candidates.append(exact_dual_fallback(X))
    except (CollisionNotFound, SurjectivityError):
        pass
    certs = [certify_quality(X, u) for u in candidates]
    certs = [c for c in certs if c.verified]
    if not certs:
        return None
    return min(certs, key=lambda c: c.q2)


def write_manifest(out_dir: Path, command: str, cfg: dict, stages: dict, t0: float) -> None:
    manifest = {
        "tool": "dgsum",
        "version": __version__,
        "command": command,
        "resolved_config": {k: v for k, v in cfg.items()},
        "rng": SampleStream(cfg["seed"]).identity(),
        "wall_clock_s": time.time() - t0,
        "stages": stages,
    }
    write_json(out_dir / "manifest.json", manifest)


def cmd_sample(cfg: dict) -> int:
    t0 = time.time()
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    stream = SampleStream(cfg["seed"])
    X = load_or_draw_matrix(cfg, stream.substream(0))
    n, m = X.shape
    r = cfg["r"] if cfg["r"] is not None else 3.0
    c = cfg["c"] or [0.0] * m
    N = cfg["samples"]
    vs = np.stack(
        [sample_dg_ints(r, N, stream.substream(100 + i)) for i in range(m)], axis=1
    )
    if any(abs(x) > 1e-12 for x in c):
        # integer shifts only on the sampling fast path
        if any(abs(x - round(x)) > 1e-12 for x in c):
            raise ValueError("cmd_sample supports integer shifts only")
        vs = vs + np.array([round(x) for x in c], dtype=np.int64)
    Xf = X.to_numpy(dtype=np.int64)
    zs = vs @ Xf.T
    lines = [",".join(f"z{i + 1}" for i in range(n))]
    lines += [",".join(str(int(v)) for v in row) for row in zs]
    (out / "samples.csv").write_text("\n".join(lines) + "\n")
    (out / "matrix.txt").write_text(X.to_text() + "\n")
    write_manifest(out, "sample", cfg, {"sample": "ok"}, t0)
    return EXIT_OK


def cmd_quality(cfg: dict) -> int:
    t0 = time.time()
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    stream = SampleStream(cfg["seed"])
    X = load_or_draw_matrix(cfg, stream.substream(0))
    n, m = X.shape
    (out / "matrix.txt").write_text(X.to_text() + "\n")
    cert = best_certificate(X, stream.substream(1))
    sigma1 = float(np.linalg.svd(X.to_numpy(), compute_uv=False)[0])
    params = CollisionSearchParams.for_matrix(X, sigma1)
    nominal = {
        "q1": sigma1 * math.sqrt(max(n * math.log2(max(m, 2)), 1e-12)),
        "q2": 2.0 * math.sqrt(max(30.0 * n * math.log2(max(sigma1 * n, 2.0)), 0.0)),
        "t": params.t,
        "prefix_budget": params.prefix_budget,
    }
    if cert is None:
        write_json(out / "certificate.json", {"verified": False, "nominal_bounds": nominal})
        write_manifest(out, "quality", cfg, {"quality": "failed"}, t0)
        return EXIT_GATE
    report = cert.to_json_dict()
    report["nominal_bounds"] = nominal
    write_json(out / "certificate.json", report)
    write_manifest(out, "quality", cfg, {"quality": "ok"}, t0)
    return EXIT_OK


def cmd_kernel(cfg: dict) -> int:
    t0 = time.time()
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    stream = SampleStream(cfg["seed"])
    X = load_or_draw_matrix(cfg, stream.substream(0))
    n, m = X.shape
    kernel = integer_kernel(X)
    reduced = lll_reduce(kernel)
    lams = successive_minima_upper(reduced)
    cert = best_certificate(X, stream.substream(1))
    report = {
        "kernel_basis": [list(v) for v in reduced.vectors()],
        "lambda_hat": lams,
    }
    status = EXIT_OK
    if cert is not None:
        skv = short_kernel_vectors(X, cert)
        report["short_vector_bound"] = skv.norm_bound
        report["independent_subset"] = list(skv.independent_subset)
        report["lambda_last_le_bound"] = lams[-1] <= skv.norm_bound + 1e-9
        if not report["lambda_last_le_bound"]:
            status = EXIT_INVARIANT
    else:
        report["short_vector_bound"] = None
    (out / "matrix.txt").write_text(X.to_text() + "\n")
    write_json(out / "kernel.json", report)
    write_manifest(out, "kernel", cfg, {"kernel": "ok"}, t0)
    return status


def _tvd_instance(X: IntMatrix, r: float, eps: float, c, mode: str, stream: SampleStream, samples: int, cert=None):
    m = X.n_cols
    R = GaussianShape.spherical(r)
    ws = FiberWorkspace(X, R, c if c is not None else [0.0] * m)
    result = {}
    p = exact_output_pmf(X, R, workspace=ws)
    q = target_pmf(X, R, workspace=ws)
    if mode in ("exact", "both"):
        rep = exact_tvd(p, q)
        result["exact"] = rep.to_json_dict()
    if mode in ("mc", "both"):
        def sampler(N, st):
            from .gaussian import LatticeCoset, sample_dg_coset

            coset = LatticeCoset.integers(m, tuple(ws.c))
            vs = sample_dg_coset(coset, R, st, size=N)
            return vs @ X.to_numpy().T - ws.Xc
        result["mc"] = mc_tvd(sampler, q, samples, stream).to_json_dict()
    threshold = None
    if cert is not None and cert.verified and X.n_cols > X.n_rows:
        threshold = distance_threshold(cert.q1, cert.q2, X.n_cols, X.n_rows, eps)
        result["threshold"] = threshold
        result["sigma_m"] = r
        result["precondition_met"] = r >= threshold - 1e-12
        measured = result.get("exact", result.get("mc", {})).get("tvd",
                   result.get("mc", {}).get("estimate"))
        if result["precondition_met"] and measured is not None:
            slack = result.get("exact", {}).get("truncation_error", 0.0)
            result["verdict"] = "pass" if measured <= 2 * eps + slack else "fail"
        else:
            result["verdict"] = "precondition unmet"
    return result


def cmd_tvd(cfg: dict) -> int:
    t0 = time.time()
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    stream = SampleStream(cfg["seed"])
    X = load_or_draw_matrix(cfg, stream.substream(0))
    cert = best_certificate(X, stream.substream(1))
    eps = cfg["eps"]
    r = cfg["r"]
    if r is None:
        if cert is None or X.n_cols == X.n_rows:
            print("no threshold available: give -r explicitly", file=sys.stderr)
            return EXIT_GATE
        r = distance_threshold(cert.q1, cert.q2, X.n_cols, X.n_rows, eps)
    result = _tvd_instance(X, r, eps, cfg["c"], cfg["mode"], stream.substream(2), cfg["samples"], cert)
    (out / "matrix.txt").write_text(X.to_text() + "\n")
    write_json(out / "tvd.json", result)
    write_manifest(out, "tvd", cfg, {"tvd": "ok"}, t0)
    if result.get("verdict") == "fail":
        return EXIT_INVARIANT
    if result.get("verdict") == "precondition unmet":
        return EXIT_GATE
    return EXIT_OK


def cmd_main_experiment(cfg: dict) -> int:
    t0 = time.time()
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    stream = SampleStream(cfg["seed"])
    n, m, s, eps = cfg["n"], cfg["m"], cfg["s"], cfg["eps"]
    trials = cfg["trials"]
    per_trial = []
    n_pass = n_fail = n_skip = 0
    for trial in range(trials):
        st = stream.substream(trial)
        entry = {"trial": trial}
        try:
            X = draw_matrix(n, m, s, st.substream(0))
            cert = best_certificate(X, st.substream(1))
            if cert is None:
                entry["status"] = "no-certificate"
                n_skip += 1
                per_trial.append(entry)
                continue
            threshold = distance_threshold(cert.q1, cert.q2, m, n, eps)
            result = _tvd_instance(X, threshold, eps, None, cfg["mode"], st.substream(2), cfg["samples"], cert)
            assert abs(result["threshold"] - threshold) < 1e-12
            entry.update({
                "q1": cert.q1, "q2": cert.q2, "threshold": threshold,
                "result": result, "status": result["verdict"],
            })
            if result["verdict"] == "pass":
                n_pass += 1
            else:
                n_fail += 1
        except Exception as exc:  # per-trial failures recorded, run continues
            entry["status"] = f"error: {exc}"
            n_skip += 1
        per_trial.append(entry)
    S = GaussianShape.spherical(s)
    R = GaussianShape.spherical(1.0)
    report = {
        "config": {"n": n, "m": m, "s": s, "eps": eps, "trials": trials},
        "parameter_checks": parameter_check(n, m, eps, S, R),
        "trials": sorted(per_trial, key=lambda e: e["trial"]),
        "n_pass": n_pass,
        "n_fail": n_fail,
        "n_skipped": n_skip,
        "pass_rate_over_certified": (n_pass / max(n_pass + n_fail, 1)),
    }
    write_json(out / "main_report.json", report)
    write_manifest(out, "main", cfg, {"main": "ok"}, t0)
    if n_fail > 0:
        return EXIT_INVARIANT
    if n_pass == 0:
        return EXIT_GATE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dgsum", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("sample", "quality", "kernel", "tvd", "main"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--eps", type=float, default=None)
        sp.add_argument("--samples", type=int, default=None)
        sp.add_argument("--radius", type=float, default=None)
        sp.add_argument("--out-dir", dest="out_dir", default=None)
        sp.add_argument("--trials", type=int, default=None)
        sp.add_argument("-n", type=int, default=None)
        sp.add_argument("-m", type=int, default=None)
        sp.add_argument("-s", type=float, default=None)
        sp.add_argument("-r", type=float, default=None)
        sp.add_argument("--x-file", dest="x_file", default=None)
        sp.add_argument("--c", dest="c", default=None)
        sp.add_argument("--push-basis-file", dest="push_basis_file", default=None)
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--exact", dest="mode", action="store_const", const="exact")
        g.add_argument("--mc", dest="mode", action="store_const", const="mc")
        g.add_argument("--both", dest="mode", action="store_const", const="both")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
    except (ValueError, KeyError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_GATE
    handler = {
        "sample": cmd_sample,
        "quality": cmd_quality,
        "kernel": cmd_kernel,
        "tvd": cmd_tvd,
        "main": cmd_main_experiment,
    }[args.command]
    try:
        return handler(cfg)
    except AssertionError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
