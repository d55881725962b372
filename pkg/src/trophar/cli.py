"""Command line front end: chain execution, the oracle, and diagnostics.

Subcommands: ``sample``, ``sample-trees``, ``oracle``, ``diagnose``.
Config files are JSON; samples are CSV (full double precision) or JSONL with
a JSON diagnostics sidecar.  Exit codes: 0 success, 2 config error,
3 runtime/mixing error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .core import DomainError
from .diagnostics import (OracleInfeasibleError, chi_square_pairwise,
                          ks_uniform, rejection_uniform)
from .polytope import TropicalPolytope
from .samplers import (KERNELS, ChainConfig, MixingError, TargetDensity,
                       mh_filter, run_chain)
from .ultrametrics import (har_ultrametric, is_ultrametric, n_pairs, pairs,
                           topology_histogram)


class ConfigError(Exception):
    pass


def load_polytope(source) -> TropicalPolytope:
    """Polytope from a JSON {"vertices": [...]} / bare matrix, or a CSV file
    with one vertex per row.  Rows are canonicalized on load."""
    if isinstance(source, (list, tuple)):
        return TropicalPolytope(source)
    path = Path(source)
    if not path.exists():
        raise ConfigError(f"polytope file not found: {path}")
    if path.suffix.lower() == ".json":
        data = json.loads(path.read_text())
        verts = data["vertices"] if isinstance(data, dict) else data
        return TropicalPolytope(verts)
    return TropicalPolytope(np.loadtxt(path, delimiter=",", ndmin=2))


def write_samples(samples: np.ndarray, out: Path, fmt: str = "csv",
                  header: list[str] | None = None) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        with open(out, "w") as fh:
            if header:
                fh.write(",".join(header) + "\n")
            for row in samples:
                fh.write(",".join("%.17g" % v for v in row) + "\n")
    elif fmt == "jsonl":
        with open(out, "w") as fh:
            for row in samples:
                fh.write(json.dumps(list(row)) + "\n")
    else:
        raise ConfigError(f"unknown output format {fmt!r}")


def read_samples(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"samples file not found: {path}")
    if path.suffix.lower() == ".jsonl":
        return np.array([json.loads(line) for line in path.read_text().splitlines() if line])
    with open(path) as fh:
        first = fh.readline()
    skip = 0
    try:
        [float(v) for v in first.strip().split(",")]
    except ValueError:
        skip = 1
    return np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)


def _chain_config(cfg: dict) -> ChainConfig:
    fields = {k: cfg[k] for k in
              ("iterations", "burn_in", "n_samples", "seed", "tol",
               "max_rejects", "extension_scale", "nu", "anchor",
               "direction_scale") if k in cfg}
    try:
        return ChainConfig(**fields)
    except (TypeError, DomainError) as exc:
        raise ConfigError(f"bad chain config: {exc}") from exc


def _load_config(path, overrides) -> dict:
    if path:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            cfg = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    else:
        cfg = {}
    for key, val in overrides.items():
        if val is not None:
            cfg[key] = val
    return cfg


def _write_report(out: Path, report: dict) -> None:
    side = out.with_suffix(out.suffix + ".report.json")
    side.write_text(json.dumps(report, indent=2, default=float) + "\n")


def cmd_sample(args) -> int:
    cfg = _load_config(args.config, {
        "kernel": args.kernel, "seed": args.seed, "out": args.out,
        "format": args.format, "tol": args.tol,
    })
    if "polytope" not in cfg:
        raise ConfigError("config must specify 'polytope'")
    if cfg.get("kernel") not in KERNELS:
        raise ConfigError(f"kernel must be one of {sorted(KERNELS)}")
    P = load_polytope(cfg["polytope"])
    chain = _chain_config(cfg)
    x0 = np.asarray(cfg["x0"], dtype=float) if "x0" in cfg else P.vertices[0]
    if "target" in cfg:
        t = cfg["target"]
        target = TargetDensity(mu=np.asarray(t["mu"], dtype=float),
                               sigma_tr=float(t["sigma_tr"]),
                               kind=t.get("kind", "squared"))
        result = mh_filter(P, cfg["kernel"], target, chain, x0=cfg.get("x0"))
    else:
        result = run_chain(cfg["kernel"], P, x0, chain)
    out = Path(cfg.get("out", "samples.csv"))
    write_samples(result.samples, out, cfg.get("format", "csv"))
    _write_report(out, {
        "kernel": cfg["kernel"], "n_samples": chain.n_samples,
        "iterations": chain.iterations, "burn_in": chain.burn_in,
        "seed": chain.seed, "accepted": result.accepted,
        "proposed": result.proposed,
        "rejected_segments": result.rejected_segments,
        "elapsed_s": result.elapsed,
    })
    print(f"wrote {len(result.samples)} samples to {out}")
    return 0


def cmd_sample_trees(args) -> int:
    cfg = _load_config(args.config, {"seed": args.seed, "out": args.out,
                                     "format": args.format, "tol": args.tol})
    if "m" not in cfg:
        raise ConfigError("config must specify the leaf count 'm'")
    m = int(cfg["m"])
    if "x0" not in cfg:
        raise ConfigError("config must specify the initial ultrametric 'x0'")
    x0 = np.asarray(cfg["x0"], dtype=float)
    if x0.size != n_pairs(m):
        raise ConfigError(f"x0 must have {n_pairs(m)} entries for m={m}")
    chain = _chain_config(cfg)
    result = har_ultrametric(x0, m, chain)
    out = Path(cfg.get("out", "tree_samples.csv"))
    header = [f"d_{i + 1}_{j + 1}" for i, j in pairs(m)]
    write_samples(result.samples, out, cfg.get("format", "csv"), header=header)
    hist = topology_histogram(result.samples, m)
    _write_report(out, {
        "m": m, "n_samples": chain.n_samples, "iterations": chain.iterations,
        "burn_in": chain.burn_in, "seed": chain.seed,
        "elapsed_s": result.elapsed,
        "topology_histogram": dict(sorted(hist.items())),
    })
    print(f"wrote {len(result.samples)} tree samples to {out} "
          f"({len(hist)} topologies)")
    return 0


def cmd_oracle(args) -> int:
    cfg = _load_config(args.config, {"seed": args.seed, "out": args.out,
                                     "format": args.format, "tol": args.tol})
    if "polytope" not in cfg:
        raise ConfigError("config must specify 'polytope'")
    P = load_polytope(cfg["polytope"])
    rng = np.random.default_rng(int(cfg.get("seed", 0)))
    samples, rate = rejection_uniform(P, int(cfg.get("n_samples", 1000)), rng,
                                      tol=float(cfg.get("tol", 1e-9)))
    out = Path(cfg.get("out", "oracle_samples.csv"))
    write_samples(samples, out, cfg.get("format", "csv"))
    _write_report(out, {"n_samples": len(samples), "acceptance_rate": rate,
                        "seed": int(cfg.get("seed", 0))})
    print(f"wrote {len(samples)} oracle samples to {out} "
          f"(acceptance {rate:.3f})")
    return 0


def cmd_diagnose(args) -> int:
    samples = read_samples(args.samples)
    if args.mode == "uniformity":
        if not args.reference:
            raise ConfigError("--reference is required for mode=uniformity")
        ref = read_samples(args.reference)
        reports = chi_square_pairwise(samples, ref, bins=args.bins)
        payload = [r.to_dict() for r in reports]
    elif args.mode == "segment":
        vals = samples.ravel() if samples.ndim > 1 and samples.shape[1] == 1 else samples[:, 0]
        payload = [ks_uniform(vals, float(vals.min()), float(vals.max())).to_dict()]
    elif args.mode == "topology":
        e = samples.shape[1]
        from .ultrametrics import leaf_count
        m = leaf_count(e)
        hist = topology_histogram(samples, m)
        payload = {"m": m, "n": len(samples),
                   "topology_histogram": dict(sorted(hist.items()))}
    else:
        raise ConfigError(f"unknown mode {args.mode!r}")
    print(json.dumps(payload, indent=2, default=float))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trophar",
                                     description="HAR sampling from tropically convex sets")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config path")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=["csv", "jsonl"], default=None)
        p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("sample", help="run a polytope HAR chain")
    common(p)
    p.add_argument("--kernel", choices=sorted(KERNELS), default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("sample-trees", help="run the ultrametric-space chain")
    common(p)
    p.set_defaults(func=cmd_sample_trees)

    p = sub.add_parser("oracle", help="rejection-sampling uniform oracle")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("diagnose", help="statistical checks on sample files")
    p.add_argument("samples", help="CSV/JSONL sample file")
    p.add_argument("--mode", choices=["uniformity", "segment", "topology"],
                   required=True)
    p.add_argument("--reference", help="reference sample file (uniformity)")
    p.add_argument("--bins", type=int, default=20)
    p.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DomainError, FileNotFoundError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (MixingError, OracleInfeasibleError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
