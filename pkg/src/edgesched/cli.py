"""Command line entry point: ``edgesched compare`` and ``edgesched sweep``.

Exit codes: 0 success, 1 config error, 2 infeasible everywhere, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import (
    DEFAULT_POLICIES,
    load_scenario,
    load_sweep,
    parse_policies,
)
from .errors import ConfigParse, EdgeSchedError, InvalidModel, OutputWrite, ScenarioLoad, SearchSpaceTooLarge
from .harness import format_compare, rows_to_csv, run_compare, run_sweep, write_sweep
from .workload import WorkloadSpec, default_scenario

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_IO = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgesched", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", help="scenario JSON (default: built-in reference scenario)")
    common.add_argument("--config", help="sweep config JSON (compare reads only its workload)")
    common.add_argument("--seed", type=int, help="base seed (unsigned 64-bit)")
    common.add_argument("--out", help="CSV output path")
    common.add_argument("--policies", help="comma list from local,cloud,random[:seed],ebml")

    cmp_ = sub.add_parser("compare", parents=[common], help="compare policies on one batch")
    cmp_.add_argument("-q", "--tasks", type=int, default=100, help="batch size (default 100)")
    cmp_.add_argument("--verify", action="store_true", help="append a brute-force oracle row (q <= 10)")

    sw = sub.add_parser("sweep", parents=[common], help="run a parameter sweep")
    sw.add_argument("--workers", type=int, help="worker processes (overrides EDGESCHED_WORKERS)")
    return parser


def _scenario_doc(args):
    if args.scenario:
        return load_scenario(args.scenario)
    return None


def _compare(args) -> int:
    doc = _scenario_doc(args)
    scenario = doc.scenario if doc else default_scenario()
    workload = (doc.workload if doc else None) or WorkloadSpec()
    if args.config:
        workload = load_sweep(args.config, scenario=scenario).workload
    seed = args.seed if args.seed is not None else workload.seed
    policies = parse_policies(args.policies) if args.policies else DEFAULT_POLICIES
    if doc and doc.tasks and not args.config:
        # tasks declared in the scenario file take precedence over generation
        tasks, reqs = list(doc.tasks), list(doc.requirements)
        result = run_compare(len(tasks), scenario, seed, policies=policies, verify=args.verify,
                             tasks=tasks, requirements=reqs)
    else:
        result = run_compare(args.tasks, scenario, seed, workload, policies, verify=args.verify)
    print(format_compare(result))
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(rows_to_csv(result.rows))
        except OSError as exc:
            raise OutputWrite(str(exc)) from exc
    if result.oracle is not None and "EdgeBasedMultiLayer" in result.reports:
        ours = result.reports["EdgeBasedMultiLayer"].objective
        print(f"oracle check: {'match' if ours == result.oracle.objective else 'MISMATCH'}")
        if ours != result.oracle.objective:
            return EXIT_CONFIG
    if result.rows and all(r.feasible_fraction == 0 for r in result.rows):
        return EXIT_INFEASIBLE
    return EXIT_OK


def _sweep(args) -> int:
    if not args.config:
        raise ConfigParse("sweep needs --config")
    doc = _scenario_doc(args)
    config = load_sweep(args.config, scenario=doc.scenario if doc else None)
    changes = {}
    if args.seed is not None:
        changes["base_seed"] = args.seed
    if args.policies:
        changes["policies"] = parse_policies(args.policies)
    if changes:
        from dataclasses import replace

        config = replace(config, **changes)
    out = args.out or config.out
    if not out:
        raise ConfigParse("sweep needs --out (or 'out' in the config)")
    rows = run_sweep(config, workers=args.workers)
    paths = write_sweep(rows, out)
    print(f"wrote {len(rows)} rows to {paths[0]} and summary to {paths[1]}")
    if rows and all(r.feasible_fraction == 0 for r in rows):
        return EXIT_INFEASIBLE
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "compare":
            return _compare(args)
        return _sweep(args)
    except OutputWrite as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigParse, ScenarioLoad, InvalidModel, SearchSpaceTooLarge, EdgeSchedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
