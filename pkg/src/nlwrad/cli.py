"""Command-line entry points.

    nlwrad run --config FILE [--out DIR]
    nlwrad preset NAME [--out DIR] [--config-only]
    nlwrad converge --config FILE --levels K [--out DIR]
    nlwrad list-presets

Exit codes: 0 ok, 1 a configured check failed, 2 bad input, 3 numeric abort.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiments import (
    ConfigError,
    ExperimentConfig,
    convergence_study,
    list_presets,
    preset,
    run_experiment,
    write_convergence_csv,
)
from .solver import NumericalAbortError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2
EXIT_NUMERIC_ABORT = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlwrad",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None, help="output directory (default from config)")

    p_preset = sub.add_parser("preset", help="run (or emit) a named preset")
    p_preset.add_argument("name")
    p_preset.add_argument("--out", default=None)
    p_preset.add_argument("--config-only", action="store_true",
                          help="write the preset config as JSON instead of running it")

    p_conv = sub.add_parser("converge", help="self-convergence study over dr refinements")
    p_conv.add_argument("--config", required=True)
    p_conv.add_argument("--levels", type=int, required=True)
    p_conv.add_argument("--out", default=None,
                        help="directory for convergence.csv (optional)")

    sub.add_parser("list-presets", help="list available presets")
    return parser


def _report(summary: dict) -> int:
    for name, ok in sorted(summary.get("checks", {}).items()):
        print(f"  [{'PASS' if ok else 'FAIL'}] {name}")
    print(f"done in {summary['runtime_seconds']:.1f}s "
          f"({summary['kernel']} kernel); passed={summary['passed']}")
    return EXIT_OK if summary["passed"] else EXIT_CHECK_FAILED


def _print_convergence(table: dict) -> None:
    cols = ["dr", "energy_drift", "identity_residual_rel", "state_self_diff"]
    print(f"{'dr':>12} {'drift':>12} {'residual':>12} {'self-diff':>12}")
    n = len(table["dr"])
    for i in range(n):
        drift = table["energy_drift"][i]
        res = table.get("identity_residual_rel", [float('nan')] * n)[i]
        diff = table["state_self_diff"][i - 1] if i > 0 else float("nan")
        print(f"{table['dr'][i]:>12.6g} {drift:>12.4e} {res:>12.4e} {diff:>12.4e}")
    print("orders (drift):   ", table["drift_orders"])
    if "residual_orders" in table:
        print("orders (residual):", table["residual_orders"])
    print("orders (states):  ", table["state_orders"])


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "list-presets":
            for name, desc in list_presets().items():
                print(f"{name:16s} {desc}")
            return EXIT_OK

        if args.command == "run":
            cfg = ExperimentConfig.from_json(args.config)
            summary = run_experiment(cfg, args.out)
            return _report(summary)

        if args.command == "preset":
            cfg = preset(args.name)
            out = args.out or cfg.name
            if args.config_only:
                path = Path(out)
                path.mkdir(parents=True, exist_ok=True)
                with open(path / "config.json", "w") as fh:
                    json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
                print(path / "config.json")
                return EXIT_OK
            summary = run_experiment(cfg, out)
            return _report(summary)

        if args.command == "converge":
            cfg = ExperimentConfig.from_json(args.config)
            table = convergence_study(cfg, args.levels)
            _print_convergence(table)
            if args.out:
                path = Path(args.out)
                path.mkdir(parents=True, exist_ok=True)
                write_convergence_csv(table, path / "convergence.csv")
            return EXIT_OK
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except NumericalAbortError as exc:
        print(f"numeric abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC_ABORT
    return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
