"""Per-layer delay and energy primitives.

Every function accepts python floats or numpy arrays for the task-dependent
arguments (cycles, sizes), so the matrix builder in ``model`` reuses the very
same arithmetic the scalar path uses.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import Layer, Link, Node, PowerMode, SystemParams, check_gamma
from .errors import InvalidModel, NonPositiveFrequency, WrongLayer


@dataclass(frozen=True)
class LayerCosts:
    delay: float
    energy: float
    uplink_time: float
    exec_time: float
    feedback_time: float


def local_delay(cycles, frequency):
    """Execution time of ``cycles`` on a CPU clocked at ``frequency``."""
    if not frequency > 0:
        raise NonPositiveFrequency(f"frequency must be > 0, got {frequency!r}")
    return cycles / frequency


def cpu_power(frequency, kappa, gamma):
    """Dynamic CPU power ``kappa * f**gamma`` in watts."""
    if not frequency > 0:
        raise NonPositiveFrequency(f"frequency must be > 0, got {frequency!r}")
    if not kappa > 0:
        raise InvalidModel(f"kappa must be > 0, got {kappa!r}")
    check_gamma(gamma)
    return kappa * frequency**gamma


def local_energy(cycles, node: Node):
    if node.layer is not Layer.LOCAL:
        raise WrongLayer(f"local_energy needs a local node, {node.id!r} is {node.layer.value}")
    power = node.power
    if power.mode is PowerMode.ANALYTIC:
        return power.kappa * node.frequency ** (power.gamma - 1.0) * cycles
    return power.measured_power * local_delay(cycles, node.frequency)


def uplink_rate(link: Link) -> float:
    """Achievable uplink rate in bit/s, ``B log2(1 + P h / N0)``."""
    return link.bandwidth * np.log2(1.0 + link.tx_power * link.gain / link.noise)


def _check_server(server: Node) -> None:
    if server.layer is Layer.LOCAL:
        raise WrongLayer(f"{server.id!r} is a local node, expected an edge or cloud server")


def remote_times(cycles, input_size, link: Link, server: Node):
    """(uplink_time, exec_time) for offloading to ``server`` over ``link``."""
    _check_server(server)
    if link.to_node != server.id:
        raise InvalidModel(f"link ends at {link.to_node!r}, not at server {server.id!r}")
    return input_size / uplink_rate(link), cycles / server.frequency


def remote_delay(cycles, input_size, link: Link, server: Node, system: SystemParams):
    """Total delay of an offloaded task. Edge and cloud share the formula."""
    uplink, execution = remote_times(cycles, input_size, link, server)
    return uplink + execution + system.feedback_time + link.extra_rtt


def remote_energy(cycles, input_size, link: Link, server: Node):
    """Device energy for an offloaded task: transmit while uploading, idle while the server works.

    Feedback time and ``extra_rtt`` cost no energy.
    """
    uplink, execution = remote_times(cycles, input_size, link, server)
    return link.tx_power * uplink + link.idle_power * execution


def remote_costs(task, link: Link, server: Node, system: SystemParams) -> LayerCosts:
    uplink, execution = remote_times(task.cycles, task.input_size, link, server)
    return LayerCosts(
        delay=remote_delay(task.cycles, task.input_size, link, server, system),
        energy=remote_energy(task.cycles, task.input_size, link, server),
        uplink_time=uplink,
        exec_time=execution,
        feedback_time=system.feedback_time + link.extra_rtt,
    )


def local_costs(task, node: Node) -> LayerCosts:
    delay = local_delay(task.cycles, node.frequency)
    return LayerCosts(
        delay=delay,
        energy=local_energy(task.cycles, node),
        uplink_time=0.0,
        exec_time=delay,
        feedback_time=0.0,
    )
