"""Seeded task batches and the reference device/edge/cloud scenario."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Union

import numpy as np

from .domain import (
    GIGA,
    MB_TO_BITS,
    Layer,
    Link,
    LocalPower,
    Node,
    PowerMode,
    Requirement,
    Scenario,
    SystemParams,
    Task,
    normalize_accuracy,
)
from .errors import InvalidModel

# Reference parameters: 1 MHz bandwidth, 1e-5 channel gain, 1e-9 W noise,
# 0.9/0.3/1.3 W local/idle/transmit power, 2/10/15 GHz local/edge/cloud CPUs.
BANDWIDTH_HZ = 1e6
CHANNEL_GAIN = 1e-5
NOISE_W = 1e-9
LOCAL_POWER_W = 0.9
IDLE_POWER_W = 0.3
TX_POWER_W = 1.3
LOCAL_HZ = 2e9
EDGE_HZ = 10e9
CLOUD_HZ = 15e9
KAPPA = 1e-26


def default_scenario(analytic: bool = False, gamma: float = 3.0) -> Scenario:
    """One device, one edge server and one cloud server with identical uplinks.

    ``analytic=True`` switches the device to the ``kappa f**gamma`` power model.
    """
    mode = PowerMode.ANALYTIC if analytic else PowerMode.MEASURED
    power = LocalPower(mode=mode, measured_power=LOCAL_POWER_W, kappa=KAPPA, gamma=gamma)
    nodes = (
        Node("device", Layer.LOCAL, LOCAL_HZ, power=power),
        Node("edge", Layer.EDGE, EDGE_HZ),
        Node("cloud", Layer.CLOUD, CLOUD_HZ),
    )
    link = dict(
        bandwidth=BANDWIDTH_HZ,
        gain=CHANNEL_GAIN,
        noise=NOISE_W,
        tx_power=TX_POWER_W,
        idle_power=IDLE_POWER_W,
    )
    links = (Link("device", "edge", **link), Link("device", "cloud", **link))
    return Scenario(nodes=nodes, links=links, system=SystemParams())


def _range(name, value):
    lo, hi = (float(v) for v in value)
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo < 0 or lo > hi:
        raise InvalidModel(f"{name} must be a finite range with 0 <= min <= max, got {value!r}")
    return (lo, hi)


@dataclass(frozen=True)
class WorkloadSpec:
    """Parameters of a generated task batch. Sizes are in bits."""

    count: int = 100
    cycles_range: tuple = (0.1 * GIGA, 10 * GIGA)
    size_range: tuple = (10 * MB_TO_BITS, 110 * MB_TO_BITS)
    output_size: float = 0.0
    deadline: float = math.inf
    accuracy_floor: float = 0.0
    accuracy: Union[float, Mapping] = 1.0
    distribution: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise InvalidModel(f"count must be a positive integer, got {self.count!r}")
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "cycles_range", _range("cycles_range", self.cycles_range))
        object.__setattr__(self, "size_range", _range("size_range", self.size_range))
        if self.distribution != "uniform":
            raise InvalidModel(f"unsupported distribution {self.distribution!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            raise InvalidModel(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))
        # validates floor/deadline early
        Requirement(self.accuracy_floor, self.deadline)
        normalize_accuracy(self.accuracy)

    def with_(self, **changes) -> "WorkloadSpec":
        return replace(self, **changes)


def generate_tasks(spec: WorkloadSpec) -> list:
    """Draw ``spec.count`` tasks i.i.d. from the configured ranges.

    Returns a list of ``(Task, Requirement)`` pairs. Cycles are drawn before
    sizes, so overriding one range never perturbs the other's draws.
    """
    rng = np.random.default_rng(spec.seed)
    # lo + (hi - lo) * u can round one ulp past hi
    cycles = np.minimum(rng.uniform(*spec.cycles_range, size=spec.count), spec.cycles_range[1])
    sizes = np.minimum(rng.uniform(*spec.size_range, size=spec.count), spec.size_range[1])
    requirement = Requirement(spec.accuracy_floor, spec.deadline)
    accuracy = normalize_accuracy(spec.accuracy)
    return [
        (
            Task(
                id=f"t{i}",
                cycles=float(c),
                input_size=float(s),
                output_size=spec.output_size,
                accuracy_by_layer=dict(accuracy),
            ),
            requirement,
        )
        for i, (c, s) in enumerate(zip(cycles, sizes))
    ]


def split(pairs) -> tuple:
    tasks = [t for t, _ in pairs]
    reqs = [r for _, r in pairs]
    return tasks, reqs
