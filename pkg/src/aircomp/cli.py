"""Command-line entry point.

``aircomp run`` executes the configured experiment and writes CSV or
JSON results (stdout when --out is omitted); ``aircomp validate`` only
parses the config. Exit codes: 0 success, 2 config error, 3 runtime
error.
"""

import argparse
import sys
from dataclasses import replace

from .errors import ConfigError
from .harness import (parse_config, render_csv, render_json, run_experiment,
                      write_results, write_trial_dump)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aircomp",
        description="Movable-antenna over-the-air computation experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the configured experiment")
    run.add_argument("--config", required=True, help="path to YAML config")
    run.add_argument("--out", help="output file (stdout when omitted)")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--seed", type=int, help="override master_seed")
    run.add_argument("--trials", type=int, help="override trial count")
    run.add_argument("--dump-trials", help="write per-trial records to this JSON file")

    val = sub.add_parser("validate", help="parse and validate a config file")
    val.add_argument("--config", required=True, help="path to YAML config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
        if args.command == "run":
            overrides = {}
            if args.seed is not None:
                overrides["master_seed"] = args.seed
            if args.trials is not None:
                overrides["trials"] = args.trials
            if overrides:
                cfg = replace(cfg, **overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print(f"config OK: {args.config}")
        return 0

    try:
        results = run_experiment(cfg)
        if args.out:
            write_results(results, args.out, format=args.format)
        else:
            render = render_csv if args.format == "csv" else render_json
            sys.stdout.write(render(results))
        if args.dump_trials:
            write_trial_dump(results, args.dump_trials)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
