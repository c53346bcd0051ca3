"""Offloading policies and exact solvers for the mean-energy assignment problem.

Each task picks one executor (its own device or a linked server) so that mean
device energy is minimal subject to the task's deadline and accuracy floor.

Tasks that no executor can serve within their requirement are not dropped:
they are pinned to their fastest executor, accrue its cost, and are listed
in ``SolveReport.infeasible_tasks``. The remaining tasks are optimised.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .domain import (
    LAYERS,
    Layer,
    Requirement,
    Scenario,
    Schedule,
    Task,
    pair_requirements,
)
from .errors import CapacityConfigured, ConfigParse, NoNodeOfLayer, SearchSpaceTooLarge
from .model import (
    achieved_accuracy,
    assign,
    build_schedule,
    combine_delay,
    combine_energy,
    cost_matrices,
)

BRUTEFORCE_LIMIT = 10**7


class PolicyKind(enum.Enum):
    LOCAL_ONLY = "LocalOnly"
    CLOUD_ONLY = "CloudOnly"
    RANDOM = "Random"
    EDGE_BASED_MULTI_LAYER = "EdgeBasedMultiLayer"


_ALIASES = {
    "local": PolicyKind.LOCAL_ONLY,
    "localonly": PolicyKind.LOCAL_ONLY,
    "cloud": PolicyKind.CLOUD_ONLY,
    "cloudonly": PolicyKind.CLOUD_ONLY,
    "random": PolicyKind.RANDOM,
    "edge": PolicyKind.EDGE_BASED_MULTI_LAYER,
    "ebml": PolicyKind.EDGE_BASED_MULTI_LAYER,
    "multilayer": PolicyKind.EDGE_BASED_MULTI_LAYER,
    "edgebasedmultilayer": PolicyKind.EDGE_BASED_MULTI_LAYER,
}


@dataclass(frozen=True)
class Policy:
    kind: PolicyKind
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind is PolicyKind.RANDOM and self.seed is None:
            raise ValueError("the random policy needs an explicit seed")

    @property
    def name(self) -> str:
        return self.kind.value

    @classmethod
    def parse(cls, text: str, default_seed: int = 0) -> "Policy":
        """Parse ``local``, ``cloud``, ``random[:seed]`` or ``ebml`` (case-insensitive)."""
        name, _, seed = text.strip().partition(":")
        kind = _ALIASES.get(name.strip().lower().replace("-", "").replace("_", ""))
        if kind is None:
            raise ConfigParse(f"unknown policy {text!r}")
        if kind is PolicyKind.RANDOM:
            return cls(kind, int(seed) if seed else int(default_seed))
        if seed:
            raise ConfigParse(f"policy {name!r} takes no seed")
        return cls(kind)


LOCAL_ONLY = Policy(PolicyKind.LOCAL_ONLY)
CLOUD_ONLY = Policy(PolicyKind.CLOUD_ONLY)
EDGE_BASED_MULTI_LAYER = Policy(PolicyKind.EDGE_BASED_MULTI_LAYER)


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    PARTIALLY_INFEASIBLE = "PartiallyInfeasible"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class SolveReport:
    schedule: Schedule
    objective: float
    nodes_explored: int
    status: Status
    infeasible_tasks: tuple = ()

    @property
    def feasible_fraction(self) -> float:
        q = len(self.schedule.assignments)
        if q == 0:
            return 1.0
        return (q - len(self.infeasible_tasks)) / q


def _status_for(task_ids, bad_rows) -> tuple:
    bad = tuple(task_ids[i] for i in bad_rows)
    if not bad:
        return Status.OPTIMAL, bad
    if len(bad) == len(task_ids):
        return Status.INFEASIBLE, bad
    return Status.PARTIALLY_INFEASIBLE, bad


def _report(tasks, requirements, scenario, executor_idx, nodes, bad_rows, status=None):
    ids = [scenario.nodes[j].id for j in executor_idx]
    schedule = build_schedule(tasks, requirements, ids, scenario)
    task_ids = [t.id for t in tasks]
    derived, bad = _status_for(task_ids, sorted(bad_rows))
    if status is Status.INFEASIBLE:
        derived, bad = Status.INFEASIBLE, tuple(task_ids)
    return SolveReport(
        schedule=schedule,
        objective=schedule.mean_energy,
        nodes_explored=int(nodes),
        status=derived,
        infeasible_tasks=bad,
    )


def _capacity_vector(scenario: Scenario) -> np.ndarray:
    return np.array([-1 if n.capacity is None else n.capacity for n in scenario.nodes], dtype=np.int64)


def feasible_executors(task: Task, requirement: Requirement, scenario: Scenario) -> set:
    """Node ids that meet both the deadline and the accuracy floor for ``task``."""
    out = set()
    for j in scenario.executors_for(task):
        a = assign(task, scenario.nodes[j].id, scenario)
        if (
            combine_delay(task, a, scenario) <= requirement.deadline
            and achieved_accuracy(task, a) >= requirement.accuracy_floor
        ):
            out.add(a.executor)
    return out


def _fallback(delay_row, energy_row, reachable_row) -> int:
    """Fastest reachable executor, then cheapest, then lowest index."""
    cols = np.flatnonzero(reachable_row)
    keys = np.lexsort((cols, energy_row[cols], delay_row[cols]))
    return int(cols[keys[0]])


def _admissible(delay, energy, reachable, feasible):
    """Allowed-executor mask with infeasible tasks pinned to their fallback."""
    allowed = feasible.copy()
    bad = []
    for i in range(allowed.shape[0]):
        if not allowed[i].any():
            allowed[i, _fallback(delay[i], energy[i], reachable[i])] = True
            bad.append(i)
    return allowed, bad


def _matrices(tasks, requirements, scenario):
    pair_requirements(tasks, requirements)
    cm = cost_matrices(tasks, scenario)
    deadline = np.array([r.deadline for r in requirements], dtype=np.float64)[:, None]
    floor = np.array([r.accuracy_floor for r in requirements], dtype=np.float64)[:, None]
    with np.errstate(invalid="ignore"):
        feasible = cm.reachable & (cm.delay <= deadline) & (cm.accuracy >= floor)
    allowed, bad = _admissible(cm.delay, cm.energy, cm.reachable, feasible)
    return cm, allowed, bad


def _cheapest(energy_row, delay_row, allowed_row) -> int:
    cols = np.flatnonzero(allowed_row)
    keys = np.lexsort((cols, delay_row[cols], energy_row[cols]))
    return int(cols[keys[0]])


def solve_greedy(tasks: Sequence[Task], requirements: Sequence[Requirement], scenario: Scenario) -> SolveReport:
    """Per-task cheapest admissible executor.

    Without capacities the objective is a sum of independent per-task terms,
    so this is exactly optimal.
    """
    if scenario.has_capacities:
        raise CapacityConfigured("node capacities couple the tasks; use solve_bnb")
    cm, allowed, bad = _matrices(tasks, requirements, scenario)
    choice = [_cheapest(cm.energy[i], cm.delay[i], allowed[i]) for i in range(len(tasks))]
    return _report(tasks, requirements, scenario, choice, len(tasks), bad)


def solve_bnb(tasks: Sequence[Task], requirements: Sequence[Requirement], scenario: Scenario) -> SolveReport:
    """Exact depth-first branch and bound, honouring optional node capacities."""
    cm, allowed, bad = _matrices(tasks, requirements, scenario)
    q, n = allowed.shape
    capacity = _capacity_vector(scenario)

    cycles = np.array([t.cycles for t in tasks], dtype=np.float64)
    order = np.lexsort((np.arange(q), -cycles)).astype(np.int64)

    children = np.full((q, max(n, 1)), -1, dtype=np.int64)
    nchild = np.zeros(q, dtype=np.int64)
    min_energy = np.zeros(q)
    greedy = np.full(q, -1, dtype=np.int64)
    for i in range(q):
        cols = np.flatnonzero(allowed[i])
        ranked = cols[np.lexsort((cols, cm.delay[i, cols], cm.energy[i, cols]))]
        children[i, : ranked.size] = ranked
        nchild[i] = ranked.size
        greedy[i] = ranked[0]
        min_energy[i] = cm.energy[i, ranked[0]]

    suffix = np.zeros(q + 1)
    for k in range(q - 1, -1, -1):
        suffix[k] = min_energy[order[k]] + suffix[k + 1]

    if not scenario.has_capacities:
        incumbent = greedy
    else:
        incumbent = np.array([scenario.node_index(scenario.device_of(t).id) for t in tasks], dtype=np.int64)
        load = np.bincount(incumbent, minlength=n) if q else np.zeros(n, dtype=np.int64)
        over = (capacity >= 0) & (load > capacity)
        if q and (not allowed[np.arange(q), incumbent].all() or over.any()):
            incumbent = np.full(q, -1, dtype=np.int64)
    inc_value = np.inf
    if q == 0 or incumbent[0] >= 0:
        inc_value = 0.0
        for k in range(q):
            inc_value += cm.energy[order[k], incumbent[order[k]]]

    best, value, nodes = _kernels.bnb_search(
        cm.energy, children, nchild, order, suffix, capacity, incumbent, inc_value
    )
    if not np.isfinite(value):
        return _report(tasks, requirements, scenario, greedy, nodes, bad, status=Status.INFEASIBLE)
    return _report(tasks, requirements, scenario, best, nodes, bad)


def _scalar_matrices(tasks, requirements, scenario):
    """Cost and admissibility matrices rebuilt one (task, node) pair at a time."""
    q, n = len(tasks), len(scenario.nodes)
    delay = np.full((q, n), np.inf)
    energy = np.full((q, n), np.inf)
    reachable = np.zeros((q, n), dtype=bool)
    feasible = np.zeros((q, n), dtype=bool)
    for i, (task, req) in enumerate(zip(tasks, requirements)):
        for j in scenario.executors_for(task):
            a = assign(task, scenario.nodes[j].id, scenario)
            delay[i, j] = combine_delay(task, a, scenario)
            energy[i, j] = combine_energy(task, a, scenario)
            reachable[i, j] = True
            feasible[i, j] = delay[i, j] <= req.deadline and achieved_accuracy(task, a) >= req.accuracy_floor
    return delay, energy, reachable, feasible


def solve_bruteforce(tasks: Sequence[Task], requirements: Sequence[Requirement], scenario: Scenario) -> SolveReport:
    """Reference solver: enumerate every executor vector and keep the cheapest admissible one.

    Ties go to the lexicographically first vector in scenario node order.
    """
    pair_requirements(tasks, requirements)
    q, n = len(tasks), len(scenario.nodes)
    if n**q > BRUTEFORCE_LIMIT:
        raise SearchSpaceTooLarge(f"{n}**{q} assignments exceed the {BRUTEFORCE_LIMIT} limit")
    delay, energy, reachable, feasible = _scalar_matrices(tasks, requirements, scenario)
    allowed, bad = _admissible(delay, energy, reachable, feasible)
    best, value, count = _kernels.enumerate_best(energy, allowed, _capacity_vector(scenario))
    if not np.isfinite(value):
        fallback = [_cheapest(energy[i], delay[i], allowed[i]) for i in range(q)]
        return _report(tasks, requirements, scenario, fallback, count, bad, status=Status.INFEASIBLE)
    return _report(tasks, requirements, scenario, best, count, bad)


# -- baseline policies -----------------------------------------------------


def _servers_of_layer(task, scenario, layer):
    device = scenario.device_of(task)
    return [
        j
        for j, node in enumerate(scenario.nodes)
        if node.layer is layer and scenario.has_link(device.id, node.id)
    ]


def _layer_executor(task, scenario, layer, load=None):
    if layer is Layer.LOCAL:
        return scenario.node_index(scenario.device_of(task).id)
    options = _servers_of_layer(task, scenario, layer)
    if not options:
        raise NoNodeOfLayer(f"task {task.id!r}: no reachable {layer.value} node")
    if load is None:
        return options[0]
    # least loaded, earliest in node order on ties
    return min(options, key=lambda j: (load[j], j))


def _forced(tasks, requirements, scenario, executor_idx):
    ids = [scenario.nodes[j].id for j in executor_idx]
    bad = []
    for i, (task, req, node_id) in enumerate(zip(tasks, requirements, ids)):
        a = assign(task, node_id, scenario)
        if combine_delay(task, a, scenario) > req.deadline or achieved_accuracy(task, a) < req.accuracy_floor:
            bad.append(i)
    return _report(tasks, requirements, scenario, executor_idx, 0, bad)


def run_policy(
    policy: Policy,
    tasks: Sequence[Task],
    requirements: Sequence[Requirement],
    scenario: Scenario,
) -> SolveReport:
    pair_requirements(tasks, requirements)
    kind = policy.kind
    if kind is PolicyKind.EDGE_BASED_MULTI_LAYER:
        return solve_bnb(tasks, requirements, scenario)
    if kind is PolicyKind.LOCAL_ONLY:
        chosen = [_layer_executor(t, scenario, Layer.LOCAL) for t in tasks]
    elif kind is PolicyKind.CLOUD_ONLY:
        load = [0] * len(scenario.nodes)
        chosen = []
        for t in tasks:
            j = _layer_executor(t, scenario, Layer.CLOUD, load)
            load[j] += 1
            chosen.append(j)
    else:
        rng = np.random.default_rng(policy.seed)
        draws = rng.integers(0, len(LAYERS), size=len(tasks))
        chosen = [_layer_executor(t, scenario, LAYERS[k]) for t, k in zip(tasks, draws)]
    return _forced(tasks, requirements, scenario, chosen)
