"""Immutable domain types: tasks, requirements, nodes, links and scenarios.

Units are SI throughout: cycles, bits, Hz, W, J and seconds. Sizes quoted in
megabytes are converted with ``MB_TO_BITS`` at the edges (config files, CLI).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Optional, Sequence

from .errors import (
    GammaOutOfRange,
    InvalidModel,
    MissingLink,
    NonPositiveFrequency,
    UnknownExecutor,
)

MB_TO_BITS = 8e6
GIGA = 1e9


class Layer(enum.Enum):
    LOCAL = "local"
    EDGE = "edge"
    CLOUD = "cloud"

    @classmethod
    def parse(cls, value) -> "Layer":
        if isinstance(value, Layer):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InvalidModel(f"unknown layer {value!r}") from None


LAYERS = (Layer.LOCAL, Layer.EDGE, Layer.CLOUD)


class PowerMode(enum.Enum):
    MEASURED = "measured"
    ANALYTIC = "analytic"


def _finite_nonneg(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise InvalidModel(f"{name} must be finite and >= 0, got {value!r}")
    return value


def _finite_pos(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise InvalidModel(f"{name} must be finite and > 0, got {value!r}")
    return value


def check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not 2.0 <= gamma <= 3.0:
        raise GammaOutOfRange(f"gamma must lie in [2, 3], got {gamma!r}")
    return gamma


def normalize_accuracy(accuracy) -> dict:
    """Turn a scalar or a layer-keyed mapping into a ``{Layer: float}`` dict."""
    if isinstance(accuracy, Mapping):
        out = {Layer.parse(k): float(v) for k, v in accuracy.items()}
    else:
        out = {layer: float(accuracy) for layer in LAYERS}
    for layer, value in out.items():
        if not 0.0 <= value <= 1.0:
            raise InvalidModel(f"accuracy for {layer.value} must be in [0, 1], got {value!r}")
    return out


@dataclass(frozen=True)
class Task:
    """A unit of work originating at a local device.

    ``device`` names the originating local node; ``None`` means the first
    local node of whatever scenario the task is evaluated in.
    """

    id: Hashable
    cycles: float
    input_size: float
    output_size: float = 0.0
    accuracy_by_layer: Mapping[Layer, float] = field(default_factory=lambda: normalize_accuracy(1.0))
    device: Optional[Hashable] = None

    def __post_init__(self):
        object.__setattr__(self, "cycles", _finite_nonneg("cycles", self.cycles))
        object.__setattr__(self, "input_size", _finite_nonneg("input_size", self.input_size))
        object.__setattr__(self, "output_size", _finite_nonneg("output_size", self.output_size))
        object.__setattr__(self, "accuracy_by_layer", normalize_accuracy(self.accuracy_by_layer))


@dataclass(frozen=True)
class Requirement:
    accuracy_floor: float = 0.0
    deadline: float = math.inf

    def __post_init__(self):
        floor = float(self.accuracy_floor)
        if not 0.0 <= floor <= 1.0:
            raise InvalidModel(f"accuracy_floor must be in [0, 1], got {floor!r}")
        deadline = float(self.deadline)
        if math.isnan(deadline) or deadline <= 0:
            raise InvalidModel(f"deadline must be > 0, got {deadline!r}")
        object.__setattr__(self, "accuracy_floor", floor)
        object.__setattr__(self, "deadline", deadline)


@dataclass(frozen=True)
class LocalPower:
    """Power parameters of a local device.

    MEASURED charges ``measured_power`` for the execution time; ANALYTIC uses
    the ``kappa * f**gamma`` CPU model.
    """

    mode: PowerMode = PowerMode.MEASURED
    measured_power: float = 0.9
    kappa: float = 1e-26
    gamma: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "mode", PowerMode(self.mode))
        object.__setattr__(self, "measured_power", _finite_pos("measured_power", self.measured_power))
        object.__setattr__(self, "kappa", _finite_pos("kappa", self.kappa))
        gamma = float(self.gamma)
        if self.mode is PowerMode.ANALYTIC:
            check_gamma(gamma)
        object.__setattr__(self, "gamma", gamma)


@dataclass(frozen=True)
class Node:
    id: Hashable
    layer: Layer
    frequency: float
    power: Optional[LocalPower] = None
    capacity: Optional[int] = None

    def __post_init__(self):
        layer = Layer.parse(self.layer)
        object.__setattr__(self, "layer", layer)
        freq = float(self.frequency)
        if not math.isfinite(freq) or freq <= 0:
            raise NonPositiveFrequency(f"node {self.id!r}: frequency must be > 0, got {freq!r}")
        object.__setattr__(self, "frequency", freq)
        if layer is Layer.LOCAL and self.power is None:
            raise InvalidModel(f"local node {self.id!r} needs power parameters")
        if layer is not Layer.LOCAL and self.power is not None:
            raise InvalidModel(f"{layer.value} node {self.id!r} must not carry local power parameters")
        if self.capacity is not None:
            cap = int(self.capacity)
            if cap != self.capacity or cap < 1:
                raise InvalidModel(f"node {self.id!r}: capacity must be a positive integer")
            object.__setattr__(self, "capacity", cap)


@dataclass(frozen=True)
class Link:
    """Uplink from a local device to an edge or cloud server."""

    from_node: Hashable
    to_node: Hashable
    bandwidth: float = 1e6
    gain: float = 1e-5
    noise: float = 1e-9
    tx_power: float = 1.3
    idle_power: float = 0.3
    extra_rtt: float = 0.0

    def __post_init__(self):
        for name in ("bandwidth", "gain", "noise", "tx_power", "idle_power"):
            object.__setattr__(self, name, _finite_pos(name, getattr(self, name)))
        object.__setattr__(self, "extra_rtt", _finite_nonneg("extra_rtt", self.extra_rtt))


@dataclass(frozen=True)
class SystemParams:
    feedback_time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "feedback_time", _finite_nonneg("feedback_time", self.feedback_time))


@dataclass(frozen=True)
class Scenario:
    """Nodes, device-to-server links and system constants."""

    nodes: tuple
    links: tuple = ()
    system: SystemParams = SystemParams()

    def __post_init__(self):
        nodes = tuple(self.nodes)
        links = tuple(self.links)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "links", links)
        ids = [n.id for n in nodes]
        if len(set(ids)) != len(ids):
            raise InvalidModel("node ids must be unique")
        if not any(n.layer is Layer.LOCAL for n in nodes):
            raise InvalidModel("a scenario needs at least one local node")
        index = {n.id: i for i, n in enumerate(nodes)}
        link_map = {}
        for link in links:
            src = index.get(link.from_node)
            dst = index.get(link.to_node)
            if src is None or dst is None:
                raise InvalidModel(f"link {link.from_node!r}->{link.to_node!r} names an unknown node")
            if nodes[src].layer is not Layer.LOCAL or nodes[dst].layer is Layer.LOCAL:
                raise InvalidModel("links must run from a local node to an edge or cloud node")
            if (link.from_node, link.to_node) in link_map:
                raise InvalidModel(f"duplicate link {link.from_node!r}->{link.to_node!r}")
            link_map[(link.from_node, link.to_node)] = link
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_links", link_map)

    def node(self, node_id) -> Node:
        try:
            return self.nodes[self._index[node_id]]
        except KeyError:
            raise UnknownExecutor(node_id) from None

    def node_index(self, node_id) -> int:
        try:
            return self._index[node_id]
        except KeyError:
            raise UnknownExecutor(node_id) from None

    def link(self, from_node, to_node) -> Link:
        try:
            return self._links[(from_node, to_node)]
        except KeyError:
            raise MissingLink(f"no link from {from_node!r} to {to_node!r}") from None

    def has_link(self, from_node, to_node) -> bool:
        return (from_node, to_node) in self._links

    @property
    def local_nodes(self) -> list:
        return [n for n in self.nodes if n.layer is Layer.LOCAL]

    @property
    def has_capacities(self) -> bool:
        return any(n.capacity is not None for n in self.nodes)

    def device_of(self, task: Task) -> Node:
        """The local node a task originates from."""
        if task.device is None:
            return self.local_nodes[0]
        node = self.node(task.device)
        if node.layer is not Layer.LOCAL:
            raise InvalidModel(f"task {task.id!r} originates at non-local node {task.device!r}")
        return node

    def executors_for(self, task: Task) -> list:
        """Indices of the nodes able to run ``task``: its own device plus every linked server."""
        device = self.device_of(task)
        out = []
        for i, node in enumerate(self.nodes):
            if node.layer is Layer.LOCAL:
                if node.id == device.id:
                    out.append(i)
            elif self.has_link(device.id, node.id):
                out.append(i)
        return out


@dataclass(frozen=True)
class Assignment:
    """Which node runs a task. The layer indicators are derived, so exactly one is set."""

    task_id: Hashable
    executor: Hashable
    layer: Layer

    @property
    def indicators(self) -> tuple:
        return tuple(int(self.layer is layer) for layer in LAYERS)


@dataclass(frozen=True)
class Schedule:
    assignments: tuple
    per_task_delay: tuple
    per_task_energy: tuple
    total_energy: float
    mean_energy: float
    feasible: bool

    @property
    def mean_delay(self) -> float:
        if not self.per_task_delay:
            return 0.0
        return math.fsum(self.per_task_delay) / len(self.per_task_delay)

    def executors(self) -> list:
        return [a.executor for a in self.assignments]


def pair_requirements(tasks: Sequence[Task], requirements: Sequence[Requirement]) -> None:
    if len(tasks) != len(requirements):
        raise InvalidModel(f"{len(tasks)} tasks but {len(requirements)} requirements")
