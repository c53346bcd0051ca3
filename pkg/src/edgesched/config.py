"""JSON scenario files and sweep configs.

Scenario document::

    {
      "system_params": {"feedback_time": 0.0},
      "nodes": [
        {"id": "device", "layer": "local", "frequency": 2e9,
         "power": {"mode": "measured", "measured_power": 0.9, "kappa": 1e-26, "gamma": 3},
         "capacity": null},
        {"id": "edge", "layer": "edge", "frequency": 1e10}
      ],
      "links": [{"from": "device", "to": "edge", "bandwidth": 1e6, "gain": 1e-5,
                 "noise": 1e-9, "tx_power": 1.3, "idle_power": 0.3, "extra_rtt": 0}],
      "tasks": [{"id": "t0", "cycles": 1e9, "input_size_mb": 10, "accuracy": 0.8}],
      "requirements": [{"task": "t0", "accuracy_floor": 0.0, "deadline": 10}],
      "workload": {"count": 100, "cycles_range": [1e8, 1e10], "size_range_mb": [10, 110]}
    }

Only ``nodes`` is mandatory. Any size key may be given in megabytes with an
``_mb`` suffix (1 MB = 8e6 bits). A ``null`` or missing deadline is unbounded.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .domain import (
    MB_TO_BITS,
    Link,
    LocalPower,
    Node,
    Requirement,
    Scenario,
    SystemParams,
    Task,
)
from .errors import ConfigParse, EdgeSchedError, InvalidModel, ScenarioLoad
from .scheduler import Policy
from .workload import WorkloadSpec, default_scenario

DEFAULT_POLICIES = ("local", "cloud", "random", "ebml")


def _bits(obj: dict, key: str, default=None):
    """Read ``key`` in bits, or ``key_mb`` in megabytes."""
    mb_key = key + "_mb"
    if key in obj and mb_key in obj:
        raise ConfigParse(f"give either {key!r} or {mb_key!r}, not both")
    if mb_key in obj:
        value = obj[mb_key]
        if isinstance(value, (list, tuple)):
            return [float(v) * MB_TO_BITS for v in value]
        return float(value) * MB_TO_BITS
    return obj.get(key, default)


def _deadline(value):
    return math.inf if value is None else float(value)


def _node(obj: dict) -> Node:
    power = obj.get("power")
    return Node(
        id=obj["id"],
        layer=obj["layer"],
        frequency=obj["frequency"],
        power=LocalPower(**power) if power is not None else None,
        capacity=obj.get("capacity"),
    )


def _link(obj: dict) -> Link:
    fields = {k: v for k, v in obj.items() if k not in ("from", "to")}
    return Link(from_node=obj["from"], to_node=obj["to"], **fields)


def _task(obj: dict, i: int) -> Task:
    return Task(
        id=obj.get("id", f"t{i}"),
        cycles=obj["cycles"],
        input_size=_bits(obj, "input_size", 0.0),
        output_size=_bits(obj, "output_size", 0.0),
        accuracy_by_layer=obj.get("accuracy", 1.0),
        device=obj.get("device"),
    )


def workload_from_dict(obj: Optional[dict], base: Optional[WorkloadSpec] = None) -> WorkloadSpec:
    base = base or WorkloadSpec()
    if not obj:
        return base
    known = {
        "count", "cycles_range", "size_range", "size_range_mb", "output_size", "output_size_mb",
        "deadline", "accuracy_floor", "accuracy", "distribution", "seed",
    }
    unknown = set(obj) - known
    if unknown:
        raise ConfigParse(f"unknown workload keys: {sorted(unknown)}")
    changes = {}
    for key in ("count", "accuracy_floor", "accuracy", "distribution", "seed"):
        if key in obj:
            changes[key] = obj[key]
    if "cycles_range" in obj:
        changes["cycles_range"] = tuple(obj["cycles_range"])
    size = _bits(obj, "size_range")
    if size is not None:
        changes["size_range"] = tuple(size)
    out = _bits(obj, "output_size")
    if out is not None:
        changes["output_size"] = float(out)
    if "deadline" in obj:
        changes["deadline"] = _deadline(obj["deadline"])
    return base.with_(**changes)


@dataclass(frozen=True)
class ScenarioDocument:
    scenario: Scenario
    tasks: tuple
    requirements: tuple
    workload: Optional[WorkloadSpec]


def parse_scenario(doc: dict) -> ScenarioDocument:
    try:
        nodes = [_node(n) for n in doc["nodes"]]
        links = [_link(link) for link in doc.get("links", [])]
        system = SystemParams(**doc.get("system_params", {}))
        scenario = Scenario(nodes=tuple(nodes), links=tuple(links), system=system)
        tasks = tuple(_task(t, i) for i, t in enumerate(doc.get("tasks", [])))
        reqs_raw = doc.get("requirements")
        if reqs_raw is None:
            reqs = tuple(Requirement() for _ in tasks)
        else:
            by_task = {r["task"]: r for r in reqs_raw if "task" in r}
            if by_task:
                missing = [t.id for t in tasks if t.id not in by_task]
                if missing:
                    raise ConfigParse(f"no requirement for tasks {missing}")
                reqs_raw = [by_task[t.id] for t in tasks]
            elif len(reqs_raw) != len(tasks):
                raise ConfigParse("requirements must match tasks one to one")
            reqs = tuple(
                Requirement(r.get("accuracy_floor", 0.0), _deadline(r.get("deadline"))) for r in reqs_raw
            )
        workload = workload_from_dict(doc["workload"]) if doc.get("workload") else None
        for t in tasks:
            scenario.device_of(t)
    except (KeyError, TypeError, ValueError, InvalidModel, EdgeSchedError) as exc:
        if isinstance(exc, ScenarioLoad):
            raise
        raise ScenarioLoad(f"invalid scenario: {exc}") from exc
    return ScenarioDocument(scenario, tasks, reqs, workload)


def load_scenario(path) -> ScenarioDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioLoad(f"cannot read scenario {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioLoad(f"{path}: not valid JSON: {exc}") from exc
    return parse_scenario(doc)


def scenario_to_dict(scenario: Scenario) -> dict:
    nodes = []
    for n in scenario.nodes:
        entry = {"id": n.id, "layer": n.layer.value, "frequency": n.frequency}
        if n.power is not None:
            entry["power"] = {
                "mode": n.power.mode.value,
                "measured_power": n.power.measured_power,
                "kappa": n.power.kappa,
                "gamma": n.power.gamma,
            }
        if n.capacity is not None:
            entry["capacity"] = n.capacity
        nodes.append(entry)
    links = [
        {
            "from": link.from_node,
            "to": link.to_node,
            "bandwidth": link.bandwidth,
            "gain": link.gain,
            "noise": link.noise,
            "tx_power": link.tx_power,
            "idle_power": link.idle_power,
            "extra_rtt": link.extra_rtt,
        }
        for link in scenario.links
    ]
    return {
        "system_params": {"feedback_time": scenario.system.feedback_time},
        "nodes": nodes,
        "links": links,
    }


class SweepAxis(enum.Enum):
    TASK_COUNT = "task_count"
    DEADLINE = "deadline"
    DATA_SIZE = "data_size"
    CYCLES = "cycles"


@dataclass(frozen=True)
class SweepConfig:
    """One sweep: an axis with its values, repetitions and the policies to run.

    Values are in canonical units (tasks, seconds, bits, cycles). Repetition
    ``r`` draws its workload with seed ``base_seed + r``; a random policy
    without an explicit seed reuses that seed.
    """

    axis: SweepAxis
    values: tuple
    repetitions: int = 1
    policies: tuple = DEFAULT_POLICIES
    workload: WorkloadSpec = WorkloadSpec()
    scenario: Scenario = None
    base_seed: int = 0
    out: Optional[str] = None

    def __post_init__(self):
        if self.scenario is None:
            object.__setattr__(self, "scenario", default_scenario())
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ConfigParse("sweep needs at least one axis value")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigParse("sweep values must be strictly increasing")
        if self.axis is SweepAxis.TASK_COUNT:
            if any(v != int(v) or v < 1 for v in values):
                raise ConfigParse("task_count values must be positive integers")
            values = tuple(int(v) for v in values)
        object.__setattr__(self, "values", values)
        if int(self.repetitions) != self.repetitions or self.repetitions < 1:
            raise ConfigParse("repetitions must be a positive integer")
        for p in self.policies:
            Policy.parse(p)
        if not self.policies:
            raise ConfigParse("at least one policy is required")

    def workload_at(self, value, repetition: int) -> WorkloadSpec:
        spec = self.workload.with_(seed=self.base_seed + repetition)
        if self.axis is SweepAxis.TASK_COUNT:
            return spec.with_(count=int(value))
        if self.axis is SweepAxis.DEADLINE:
            return spec.with_(deadline=float(value))
        if self.axis is SweepAxis.DATA_SIZE:
            return spec.with_(size_range=(float(value), float(value)))
        return spec.with_(cycles_range=(float(value), float(value)))

    def policy_objects(self, repetition: int) -> list:
        return [Policy.parse(p, default_seed=self.base_seed + repetition) for p in self.policies]


def parse_policies(text) -> tuple:
    if isinstance(text, str):
        items = [p for p in (s.strip() for s in text.split(",")) if p]
    else:
        items = list(text)
    for p in items:
        Policy.parse(p)
    return tuple(items)


def sweep_from_dict(obj: dict, base_dir: Optional[Path] = None, scenario: Optional[Scenario] = None) -> SweepConfig:
    """Build a SweepConfig from a parsed JSON object.

    Keys: ``axis``, ``values`` (or ``values_mb`` / ``values_gigacycles``),
    ``repetitions``, ``seed``, ``policies``, ``workload``, ``scenario`` (path
    relative to the config file), ``out``.
    """
    try:
        axis = SweepAxis(str(obj["axis"]).lower())
        if "values_mb" in obj:
            if axis is not SweepAxis.DATA_SIZE:
                raise ConfigParse("values_mb only applies to the data_size axis")
            values = [float(v) * MB_TO_BITS for v in obj["values_mb"]]
        elif "values_gigacycles" in obj:
            if axis is not SweepAxis.CYCLES:
                raise ConfigParse("values_gigacycles only applies to the cycles axis")
            values = [float(v) * 1e9 for v in obj["values_gigacycles"]]
        else:
            values = obj["values"]
        if scenario is None and obj.get("scenario"):
            path = Path(obj["scenario"])
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            doc = load_scenario(path)
            scenario = doc.scenario
            base_workload = doc.workload
        else:
            base_workload = None
        workload = workload_from_dict(obj.get("workload"), base_workload)
        return SweepConfig(
            axis=axis,
            values=tuple(values),
            repetitions=obj.get("repetitions", 1),
            policies=parse_policies(obj.get("policies", DEFAULT_POLICIES)),
            workload=workload,
            scenario=scenario,
            base_seed=int(obj.get("seed", workload.seed)),
            out=obj.get("out"),
        )
    except ScenarioLoad:
        raise
    except (KeyError, TypeError, ValueError, InvalidModel) as exc:
        if isinstance(exc, ConfigParse):
            raise
        raise ConfigParse(f"invalid sweep config: {exc!r}") from exc


def load_sweep(path, scenario: Optional[Scenario] = None) -> SweepConfig:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigParse(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigParse(f"{path}: not valid JSON: {exc}") from exc
    return sweep_from_dict(doc, Path(path).parent, scenario)
