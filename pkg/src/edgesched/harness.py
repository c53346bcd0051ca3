"""Policy comparisons and parameter sweeps written as CSV."""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .config import SweepConfig
from .domain import Scenario
from .errors import OutputWrite, SearchSpaceTooLarge
from .scheduler import Policy, SolveReport, run_policy, solve_bruteforce
from .workload import WorkloadSpec, generate_tasks, split

ROW_FIELDS = (
    "axis_value",
    "repetition",
    "policy",
    "mean_delay_s",
    "mean_energy_J",
    "feasible_fraction",
    "solver_nodes",
)
SUMMARY_FIELDS = (
    "axis_value",
    "policy",
    "repetitions",
    "mean_delay_s",
    "mean_energy_J",
    "feasible_fraction",
    "solver_nodes",
)
VERIFY_LIMIT = 10


@dataclass(frozen=True)
class Row:
    axis_value: float
    repetition: int
    policy: str
    mean_delay_s: float
    mean_energy_J: float
    feasible_fraction: float
    solver_nodes: int
    status: str = ""

    def as_csv(self) -> list:
        return [
            _fmt(self.axis_value),
            str(self.repetition),
            self.policy,
            _fmt(self.mean_delay_s),
            _fmt(self.mean_energy_J),
            _fmt(self.feasible_fraction),
            str(self.solver_nodes),
        ]


def _fmt(value) -> str:
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def _row(axis_value, repetition, policy_name, report: SolveReport) -> Row:
    return Row(
        axis_value=axis_value,
        repetition=repetition,
        policy=policy_name,
        mean_delay_s=report.schedule.mean_delay,
        mean_energy_J=report.schedule.mean_energy,
        feasible_fraction=report.feasible_fraction,
        solver_nodes=report.nodes_explored,
        status=report.status.value,
    )


def worker_count() -> int:
    raw = os.environ.get("EDGESCHED_WORKERS")
    if raw is None or not raw.strip():
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _run_point(args) -> list:
    config, value, repetition = args
    tasks, reqs = split(generate_tasks(config.workload_at(value, repetition)))
    rows = []
    for policy in config.policy_objects(repetition):
        rows.append(_row(value, repetition, policy.name, run_policy(policy, tasks, reqs, config.scenario)))
    return rows


def run_sweep(config: SweepConfig, workers: Optional[int] = None) -> list:
    """Every (axis value, repetition, policy) row, in that nesting order."""
    points = [(config, v, r) for v in config.values for r in range(config.repetitions)]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_point, points))
    else:
        chunks = [_run_point(p) for p in points]
    return [row for chunk in chunks for row in chunk]


def summarize(rows: Sequence[Row]) -> list:
    """Mean over repetitions for each (axis value, policy), first-seen order."""
    groups = {}
    for row in rows:
        groups.setdefault((row.axis_value, row.policy), []).append(row)
    out = []
    for (value, policy), group in groups.items():
        k = len(group)
        out.append(
            {
                "axis_value": value,
                "policy": policy,
                "repetitions": k,
                "mean_delay_s": math.fsum(r.mean_delay_s for r in group) / k,
                "mean_energy_J": math.fsum(r.mean_energy_J for r in group) / k,
                "feasible_fraction": math.fsum(r.feasible_fraction for r in group) / k,
                "solver_nodes": math.fsum(r.solver_nodes for r in group) / k,
            }
        )
    return out


def rows_to_csv(rows: Sequence[Row]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(ROW_FIELDS)
    for row in rows:
        writer.writerow(row.as_csv())
    return buf.getvalue()


def summary_to_csv(summary: Sequence[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SUMMARY_FIELDS)
    for entry in summary:
        writer.writerow([_fmt(entry[k]) if k != "policy" else entry[k] for k in SUMMARY_FIELDS])
    return buf.getvalue()


def summary_path(out) -> Path:
    out = Path(out)
    name = out.name[: -len(".csv")] if out.name.endswith(".csv") else out.name
    return out.with_name(name + ".summary.csv")


def write_sweep(rows: Sequence[Row], out) -> tuple:
    """Write the row CSV and its ``.summary.csv`` companion; return both paths."""
    out = Path(out)
    companion = summary_path(out)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(rows_to_csv(rows))
        with open(companion, "w", encoding="utf-8", newline="") as fh:
            fh.write(summary_to_csv(summarize(rows)))
    except OSError as exc:
        raise OutputWrite(f"cannot write {out}: {exc}") from exc
    return out, companion


@dataclass(frozen=True)
class CompareResult:
    rows: list
    reports: dict
    oracle: Optional[SolveReport] = None


def run_compare(
    q: int,
    scenario: Scenario,
    seed: int,
    workload: Optional[WorkloadSpec] = None,
    policies: Sequence[str] = ("local", "cloud", "random", "ebml"),
    verify: bool = False,
    tasks=None,
    requirements=None,
) -> CompareResult:
    """Run each policy on one batch. ``verify`` adds a brute-force oracle row."""
    if tasks is None:
        spec = (workload or WorkloadSpec()).with_(count=q, seed=seed)
        tasks, requirements = split(generate_tasks(spec))
    rows, reports = [], {}
    for text in policies:
        policy = Policy.parse(text, default_seed=seed)
        report = run_policy(policy, tasks, requirements, scenario)
        reports[policy.name] = report
        rows.append(_row(q, 0, policy.name, report))
    oracle = None
    if verify:
        if len(tasks) > VERIFY_LIMIT:
            raise SearchSpaceTooLarge(f"--verify is limited to q <= {VERIFY_LIMIT}")
        oracle = solve_bruteforce(tasks, requirements, scenario)
        rows.append(_row(q, 0, "BruteForceOracle", oracle))
    return CompareResult(rows=rows, reports=reports, oracle=oracle)


def format_compare(result: CompareResult) -> str:
    header = f"{'policy':<22}{'mean_delay_s':>16}{'mean_energy_J':>16}{'feasible':>10}  {'status':<20}{'nodes':>8}"
    lines = [header, "-" * len(header)]
    for row in result.rows:
        lines.append(
            f"{row.policy:<22}{row.mean_delay_s:>16.6f}{row.mean_energy_J:>16.6f}"
            f"{row.feasible_fraction:>10.3f}  {row.status:<20}{row.solver_nodes:>8d}"
        )
    return "\n".join(lines)
