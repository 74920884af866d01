"""Command-line entry point.

Subcommands
-----------
decompose        dump x, k, k0, k1 sections of univariate kernels to CSV
fit-report       fit one model, emit its split, variance shares, diagnostics
replicate-g      replicated designs on the g benchmark, per-kernel tables
replicate-noise  replicated noisy fits across a list of ridge levels
verify           run the closed-form vs brute-force cross-check suite

Exit codes: 0 ok, 1 config error, 2 numerical failure, 3 verification
failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import experiments
from .config import ConfigError, load_config

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zanova", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, need_config=True):
        p.add_argument("--config", required=need_config, help="path to the JSON config")
        p.add_argument("--out", default=None, help="output directory for tables")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        p.add_argument("--nodes", type=int, default=None,
                       help="override the quadrature node count per dimension")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads for replicated runs")

    p = sub.add_parser("decompose", help="kernel split sections to CSV")
    common(p)
    p = sub.add_parser("fit-report", help="single fit with split and shares")
    common(p)
    p = sub.add_parser("replicate-g", help="replicated g-benchmark study")
    common(p)
    p.add_argument("--replicates", type=int, default=None, help="override replicate count")
    p = sub.add_parser("replicate-noise", help="replicated noisy-fit study")
    common(p)
    p.add_argument("--replicates", type=int, default=None, help="override replicate count")
    p = sub.add_parser("verify", help="closed-form vs oracle cross-checks")
    common(p, need_config=False)
    return parser


def _apply_overrides(args, cfg: dict) -> dict:
    if args.seed is not None:
        if args.command == "verify":
            cfg["seed"] = args.seed
        else:
            cfg.setdefault("design", {})["seed"] = args.seed
    if args.nodes is not None:
        if args.command == "verify":
            cfg["nodes"] = args.nodes
        elif args.command == "fit-report":
            for entry in cfg.get("kernel", {}).get("components", []):
                if isinstance(entry, dict) and isinstance(entry.get("measure"), dict):
                    entry["measure"]["nodes"] = args.nodes
        elif isinstance(cfg.get("measure"), dict):
            cfg["measure"]["nodes"] = args.nodes
    if getattr(args, "replicates", None) is not None:
        cfg["replicates"] = args.replicates
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else {}
        cfg = _apply_overrides(args, cfg)
        if args.command == "decompose":
            if args.out is None:
                raise ConfigError("$: decompose needs --out to place its CSV files")
            result = experiments.run_decompose(cfg, args.out)
            for path in result["files"]:
                print(f"wrote {path}")
            return EXIT_OK
        if args.command == "fit-report":
            report = experiments.run_fit_report(cfg, args.out)
            if args.out is None:
                print(json.dumps(experiments._to_jsonable(report), indent=2, sort_keys=True))
            else:
                for path in report.get("files", []):
                    print(f"wrote {path}")
            return EXIT_OK
        if args.command == "replicate-g":
            result = experiments.run_replicate_g(cfg, args.out, threads=args.threads)
            for name, subset, mean, std in result["rows"]:
                print(f"{name:>18s}  {subset:>8s}  mean={mean:.4f}  std={std:.4f}")
            for path in result["files"]:
                print(f"wrote {path}")
            return EXIT_OK
        if args.command == "replicate-noise":
            result = experiments.run_replicate_noise(cfg, args.out, threads=args.threads)
            for lam, subset, mean, std in result["rows"]:
                print(f"lambda={lam:>6s}  {subset:>6s}  mean={mean:.4f}  std={std:.4f}")
            for path in result["files"]:
                print(f"wrote {path}")
            return EXIT_OK
        if args.command == "verify":
            checks = experiments.run_verify(cfg)
            failed = [c for c in checks if not c["passed"]]
            for c in checks:
                status = "PASS" if c["passed"] else "FAIL"
                print(f"{status}  {c['name']:<32s} value={c['value']:.3e} "
                      f"{c['comparison']} threshold={c['threshold']:.3e}")
            if args.out is not None:
                os.makedirs(args.out, exist_ok=True)
                experiments.write_json(os.path.join(args.out, "verify.json"),
                                       {"schema": experiments.SCHEMA, "checks": checks,
                                        "passed": not failed})
                print(f"wrote {os.path.join(args.out, 'verify.json')}")
            if failed:
                print(f"{len(failed)} of {len(checks)} checks failed", file=sys.stderr)
                return EXIT_VERIFY
            return EXIT_OK
        raise ConfigError(f"$: unknown command {args.command!r}")
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (np.linalg.LinAlgError, ArithmeticError, ValueError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
