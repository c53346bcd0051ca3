"""Delay/energy modelling and offloading policies for device, edge and cloud layers."""

__version__ = "0.1.0"

from .domain import (
    MB_TO_BITS,
    Assignment,
    Layer,
    Link,
    LocalPower,
    Node,
    PowerMode,
    Requirement,
    Scenario,
    Schedule,
    SystemParams,
    Task,
)
from .model import achieved_accuracy, assign, combine_delay, combine_energy
from .scheduler import (
    Policy,
    PolicyKind,
    SolveReport,
    Status,
    feasible_executors,
    run_policy,
    solve_bnb,
    solve_bruteforce,
    solve_greedy,
)
from .workload import WorkloadSpec, default_scenario, generate_tasks

__all__ = [
    "MB_TO_BITS",
    "Assignment",
    "Layer",
    "Link",
    "LocalPower",
    "Node",
    "Policy",
    "PolicyKind",
    "PowerMode",
    "Requirement",
    "Scenario",
    "Schedule",
    "SolveReport",
    "Status",
    "SystemParams",
    "Task",
    "WorkloadSpec",
    "achieved_accuracy",
    "assign",
    "combine_delay",
    "combine_energy",
    "default_scenario",
    "feasible_executors",
    "generate_tasks",
    "run_policy",
    "solve_bnb",
    "solve_bruteforce",
    "solve_greedy",
]
