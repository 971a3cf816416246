"""Command-line interface.

Exit codes: 0 success, 1 configuration/validation failure, 2 runtime or usage
error (argparse itself exits 2 on bad flags).
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .configio import ConfigError, load_config
from .engine import run_cycles
from .export import export_csv, format_summary_table, summarize, write_manifest, write_summary, write_uav_logs


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavmarketsim",
        description="Deterministic UAV marketplace mission simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the configured experiment and export CSV + logs")
    run.add_argument("--config", required=True, help="path to the JSON configuration")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--seed", type=int, default=None, help="override the configured master seed")

    val = sub.add_parser("validate", help="check a configuration and print all violations")
    val.add_argument("--config", required=True, help="path to the JSON configuration")

    summ = sub.add_parser("summarize", help="aggregate exported CSVs into summary.csv")
    summ.add_argument("--dir", required=True, help="directory containing the per-strategy CSVs")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    sim = config.simulation
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            print("error: --seed must fit in 64 bits", file=sys.stderr)
            return 1
        sim = replace(sim, master_seed=args.seed)
    results = run_cycles(sim, config.marketplace(), config.mission())
    csv_paths = export_csv(results, args.out, list(sim.strategies))
    write_uav_logs(results, os.path.join(args.out, "logs"))
    write_manifest(results, args.out)
    summaries = summarize(args.out)
    write_summary(summaries, args.out)
    print(f"ran {len(results)} episodes ({sim.cycles} cycles x {len(sim.strategies)} strategies)")
    for path in csv_paths:
        print(f"wrote {path}")
    print(format_summary_table(summaries))
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    load_config(args.config)
    print("OK")
    return 0


def _cmd_summarize(args: argparse.Namespace) -> int:
    summaries = summarize(args.dir)
    print(format_summary_table(summaries))
    path = write_summary(summaries, args.dir)
    print(f"wrote {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "validate": _cmd_validate, "summarize": _cmd_summarize}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - runtime failures map to exit 2
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
