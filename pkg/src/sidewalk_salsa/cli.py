"""Command-line entry point: run scenario batches and replay stored traces.

Exit codes: 0 success, 1 I/O failure, 2 invalid configuration or malformed
trace.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from .core import ModelParams, apply_param_overrides, load_config, load_params
from .metrics import histogram_rows, strategy_switches, summarize, summary_table
from .simulator import SCENARIO_NAMES, make_scenario, run_batch, scenario_from_config
from .trace import (
    TraceError,
    load_trial_json,
    write_effective_config,
    write_trial_files,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sidewalk-salsa",
        description="Simulate two-pedestrian sidewalk encounters in batches.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario batch and summarize it")
    run.add_argument("--scenario", default=None,
                     help=f"one of {', '.join(SCENARIO_NAMES)}, or 'all'")
    run.add_argument("--config", default=None,
                     help="config file with [params] and a custom [scenario]")
    run.add_argument("--trials", type=int, default=100)
    run.add_argument("--seed", type=int, default=0, help="base seed")
    run.add_argument("--out", default="out", help="output directory")
    run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                     help="override a model parameter (repeatable)")
    run.add_argument("--jobs", type=int, default=None,
                     help="parallel trial workers (default: available cores)")
    run.add_argument("--no-traces", action="store_true",
                     help="skip per-trial CSV/JSON trace files")
    run.add_argument("--belief-snapshots", action="store_true",
                     help="store belief snapshots at replan events in the JSON traces")

    replay = sub.add_parser("replay", help="recompute metrics from a stored trace")
    replay.add_argument("trace_path")
    replay.add_argument("--up-to", type=int, default=None, metavar="STEP",
                        help="compute prefix metrics up to this step")
    return parser


def _parse_overrides(pairs) -> dict[str, str]:
    overrides = {}
    for item in pairs:
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def _cmd_run(args) -> int:
    try:
        if args.config:
            cp = load_config(args.config)
            params = load_params(args.config)
            scenarios = [scenario_from_config(cp)]
        else:
            params = ModelParams()
            scenarios = None
        params = apply_param_overrides(params, _parse_overrides(args.set))
        if scenarios is None:
            name = args.scenario or "symmetric"
            if name == "all":
                scenarios = [make_scenario(n) for n in SCENARIO_NAMES]
            else:
                scenarios = [make_scenario(name)]
    except (KeyError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    jobs = args.jobs if args.jobs is not None else (os.cpu_count() or 1)
    try:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        summaries = []
        for scenario in scenarios:
            results = run_batch(scenario, args.trials, args.seed, params,
                                jobs=jobs, record_beliefs=args.belief_snapshots)
            if not args.no_traces:
                for r in results:
                    write_trial_files(r, out_dir / scenario.name,
                                      include_beliefs=args.belief_snapshots)
            write_effective_config(out_dir / f"effective_config_{scenario.name}.ini",
                                   params, scenario, args.trials, args.seed, jobs)
            summaries.append(summarize(results))
        with open(out_dir / "switch_histogram.csv", "w", newline="") as fh:
            csv.writer(fh).writerows(histogram_rows(summaries))
        print(summary_table(summaries))
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1
    return 0


def _cmd_replay(args) -> int:
    try:
        doc = load_trial_json(args.trace_path)
    except TraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    limit = args.up_to
    passing = doc["passing_step"]
    if limit is not None:
        passing = limit if passing is None else min(passing, limit)
    counts = {}
    for tag in ("a", "b"):
        pairs = [(m, c) for step, m, c in doc["plan_snapshots"][tag]
                 if passing is None or step <= passing]
        counts[tag] = strategy_switches(pairs)
    salsa = counts["a"] >= 2 and counts["b"] >= 2
    print(f"scenario={doc['scenario']} seed={doc['seed']} end_state={doc['end_state']}")
    print(f"switches: a={counts['a']} b={counts['b']} salsa={salsa}")
    if limit is None:
        stored = doc["switches"]
        if counts["a"] != stored["a"] or counts["b"] != stored["b"] or salsa != doc["salsa"]:
            print(
                f"error: recomputed metrics (a={counts['a']}, b={counts['b']}, "
                f"salsa={salsa}) disagree with stored values {stored}, "
                f"salsa={doc['salsa']}",
                file=sys.stderr,
            )
            return 2
        print("stored metrics validated")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    return _cmd_replay(args)


if __name__ == "__main__":
    sys.exit(main())
