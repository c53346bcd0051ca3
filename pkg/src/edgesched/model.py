"""Combining per-layer costs into per-task delay and energy.

The layer indicators of an assignment pick exactly one of the local, edge or
cloud cost terms. ``combine_delay``/``combine_energy`` are the scalar reference
path; ``cost_matrices`` evaluates every (task, node) pair at once for the
solvers using the same primitives on numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import costs
from .domain import (
    LAYERS,
    Assignment,
    Layer,
    Requirement,
    Scenario,
    Schedule,
    Task,
)
from .errors import MissingAccuracyEntry, UnknownExecutor


def assign(task: Task, executor, scenario: Scenario) -> Assignment:
    node = scenario.node(executor)
    return Assignment(task_id=task.id, executor=node.id, layer=node.layer)


def _executor_node(task: Task, assignment: Assignment, scenario: Scenario):
    node = scenario.node(assignment.executor)
    if node.layer is not assignment.layer:
        raise UnknownExecutor(f"{assignment.executor!r} is not a {assignment.layer.value} node")
    device = scenario.device_of(task)
    if node.layer is Layer.LOCAL and node.id != device.id:
        raise UnknownExecutor(f"task {task.id!r} cannot run on foreign device {node.id!r}")
    return device, node


def layer_costs(task: Task, assignment: Assignment, scenario: Scenario) -> costs.LayerCosts:
    device, node = _executor_node(task, assignment, scenario)
    if node.layer is Layer.LOCAL:
        return costs.local_costs(task, node)
    link = scenario.link(device.id, node.id)
    return costs.remote_costs(task, link, node, scenario.system)


def _combine(task, assignment, scenario, kind):
    device, node = _executor_node(task, assignment, scenario)
    terms = []
    for layer, flag in zip(LAYERS, assignment.indicators):
        if not flag:
            continue
        if layer is Layer.LOCAL:
            if kind == "delay":
                value = costs.local_delay(task.cycles, node.frequency)
            else:
                value = costs.local_energy(task.cycles, node)
        else:
            link = scenario.link(device.id, node.id)
            if kind == "delay":
                value = costs.remote_delay(task.cycles, task.input_size, link, node, scenario.system)
            else:
                value = costs.remote_energy(task.cycles, task.input_size, link, node)
        terms.append(float(value))
    # exclusivity guarantees exactly one weighted term
    return terms[0]


def combine_delay(task: Task, assignment: Assignment, scenario: Scenario) -> float:
    return _combine(task, assignment, scenario, "delay")


def combine_energy(task: Task, assignment: Assignment, scenario: Scenario) -> float:
    return _combine(task, assignment, scenario, "energy")


def achieved_accuracy(task: Task, assignment: Assignment) -> float:
    try:
        return task.accuracy_by_layer[assignment.layer]
    except KeyError:
        raise MissingAccuracyEntry(
            f"task {task.id!r} has no accuracy for layer {assignment.layer.value}"
        ) from None


def satisfies(task: Task, req: Requirement, assignment: Assignment, scenario: Scenario) -> bool:
    """Deadline and accuracy-floor check for one assigned task."""
    return (
        combine_delay(task, assignment, scenario) <= req.deadline
        and achieved_accuracy(task, assignment) >= req.accuracy_floor
    )


@dataclass(frozen=True)
class CostMatrices:
    """Dense (task x node) views used by the solvers.

    ``reachable[i, j]`` is False for foreign devices and unlinked servers; the
    matching delay/energy entries are +inf.
    """

    delay: np.ndarray
    energy: np.ndarray
    accuracy: np.ndarray
    reachable: np.ndarray


def cost_matrices(tasks: Sequence[Task], scenario: Scenario) -> CostMatrices:
    q, n = len(tasks), len(scenario.nodes)
    delay = np.full((q, n), np.inf)
    energy = np.full((q, n), np.inf)
    accuracy = np.full((q, n), np.nan)
    reachable = np.zeros((q, n), dtype=bool)
    if q == 0:
        return CostMatrices(delay, energy, accuracy, reachable)

    cycles = np.array([t.cycles for t in tasks], dtype=np.float64)
    sizes = np.array([t.input_size for t in tasks], dtype=np.float64)
    devices = [scenario.device_of(t).id for t in tasks]
    for j, node in enumerate(scenario.nodes):
        if node.layer is Layer.LOCAL:
            rows = np.array([d == node.id for d in devices])
            if not rows.any():
                continue
            delay[rows, j] = costs.local_delay(cycles[rows], node.frequency)
            energy[rows, j] = costs.local_energy(cycles[rows], node)
        else:
            for device_id in sorted(set(devices), key=devices.index):
                if not scenario.has_link(device_id, node.id):
                    continue
                rows = np.array([d == device_id for d in devices])
                link = scenario.link(device_id, node.id)
                delay[rows, j] = costs.remote_delay(cycles[rows], sizes[rows], link, node, scenario.system)
                energy[rows, j] = costs.remote_energy(cycles[rows], sizes[rows], link, node)
        reach = np.isfinite(delay[:, j])
        reachable[:, j] = reach
        for i in np.flatnonzero(reach):
            acc = tasks[i].accuracy_by_layer.get(node.layer)
            if acc is None:
                raise MissingAccuracyEntry(
                    f"task {tasks[i].id!r} has no accuracy for layer {node.layer.value}"
                )
            accuracy[i, j] = acc
    return CostMatrices(delay, energy, accuracy, reachable)


def build_schedule(
    tasks: Sequence[Task],
    requirements: Sequence[Requirement],
    executors: Sequence,
    scenario: Scenario,
) -> Schedule:
    """Evaluate a concrete executor choice per task with the scalar cost path."""
    assignments, delays, energies = [], [], []
    feasible = True
    load = {}
    for task, req, executor in zip(tasks, requirements, executors):
        a = assign(task, executor, scenario)
        d = combine_delay(task, a, scenario)
        e = combine_energy(task, a, scenario)
        if d > req.deadline or achieved_accuracy(task, a) < req.accuracy_floor:
            feasible = False
        load[a.executor] = load.get(a.executor, 0) + 1
        assignments.append(a)
        delays.append(d)
        energies.append(e)
    for node_id, count in load.items():
        cap = scenario.node(node_id).capacity
        if cap is not None and count > cap:
            feasible = False
    total = math.fsum(energies)
    mean = total / len(energies) if energies else 0.0
    return Schedule(
        assignments=tuple(assignments),
        per_task_delay=tuple(delays),
        per_task_energy=tuple(energies),
        total_energy=total,
        mean_energy=mean,
        feasible=feasible,
    )
