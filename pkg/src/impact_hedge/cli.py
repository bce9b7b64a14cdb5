"""Command-line interface: run, validate, list-scenarios.

Exit codes: 0 on success, 2 for invalid configuration or usage, 3 when a
terminal constraint fails the reachability check.
"""

from __future__ import annotations

import argparse
import json
import sys

from .costs import reachability_check
from .errors import ReachabilityError
from .scenarios import (
    BUILTIN_SCENARIOS,
    OUTPUT_DIR_ENV,
    resolve_out_dir,
    run_scenario,
    scenario_from_json,
    validate_scenario_dict,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impact-hedge",
        description="Optimal tracking of a frictionless hedge under "
                    "quadratic trading costs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a scenario and write its artifacts")
    run_p.add_argument("scenario", nargs="?", metavar="NAME",
                       help="built-in scenario name (see list-scenarios)")
    run_p.add_argument("--config", metavar="FILE",
                       help="scenario JSON document (instead of NAME)")
    run_p.add_argument("--out-dir", metavar="DIR", default=None,
                       help=f"output directory (default: ${OUTPUT_DIR_ENV} "
                            "or the working directory)")
    run_p.add_argument("--threads", type=int, default=1,
                       help="simulation worker threads (results do not depend "
                            "on this)")
    run_p.add_argument("--seed-override", type=int, default=None,
                       help="replace the scenario's simulation seed")

    val_p = sub.add_parser("validate", help="check a scenario document")
    val_p.add_argument("--config", metavar="FILE", required=True)

    sub.add_parser("list-scenarios", help="list the built-in scenarios")
    return parser


def _load_config(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh), None
    except OSError as exc:
        return None, f"{path}: {exc.strerror or exc}"
    except json.JSONDecodeError as exc:
        return None, f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}"


def _cmd_validate(args) -> int:
    """Schema, grid-alignment, and reachability checks without running."""
    obj, err = _load_config(args.config)
    if err is not None:
        print(err, file=sys.stderr)
        return 2
    diags = validate_scenario_dict(obj)
    if diags:
        for d in diags:
            print(f"{args.config}: {d}", file=sys.stderr)
        return 2
    try:
        scenario = scenario_from_json(obj)
        grid = scenario.grid()
    except ValueError as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return 2
    missing = [t for t in scenario.target.required_grid_times()
               if not grid.contains_time(t)]
    if missing:
        for t in missing:
            print(f"{args.config}: grid: structural time {t} is not a node",
                  file=sys.stderr)
        return 2
    reach = reachability_check(scenario.params, scenario.constraint)
    if not reach.converged:
        print(f"{args.config}: terminal: {reach.message}", file=sys.stderr)
        return 3
    print(f"OK: {obj.get('name', '<unnamed>')}")
    return 0


def _cmd_run(args) -> int:
    if (args.scenario is None) == (args.config is None):
        print("run: give exactly one of NAME or --config FILE", file=sys.stderr)
        return 2
    if args.config is not None:
        obj, err = _load_config(args.config)
        if err is not None:
            print(err, file=sys.stderr)
            return 2
        diags = validate_scenario_dict(obj)
        if diags:
            for d in diags:
                print(f"{args.config}: {d}", file=sys.stderr)
            return 2
        scenario = scenario_from_json(obj)
    else:
        scenario = BUILTIN_SCENARIOS.get(args.scenario)
        if scenario is None:
            known = ", ".join(sorted(BUILTIN_SCENARIOS))
            print(f"run: unknown scenario '{args.scenario}' (built-ins: {known})",
                  file=sys.stderr)
            return 2
    if args.threads < 1:
        print("run: --threads must be at least 1", file=sys.stderr)
        return 2
    out_dir = resolve_out_dir(args.out_dir)
    try:
        written = run_scenario(scenario, out_dir, threads=args.threads,
                               seed_override=args.seed_override)
    except ReachabilityError as exc:
        print(f"run: {exc}", file=sys.stderr)
        return 3
    for key in ("paths", "costs", "oracle"):
        if key in written:
            print(written[key])
    return 0


def _cmd_list() -> int:
    for name in sorted(BUILTIN_SCENARIOS):
        print(f"{name}\t{BUILTIN_SCENARIOS[name].description}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "validate":
        return _cmd_validate(args)
    return _cmd_list()


if __name__ == "__main__":
    sys.exit(main())
