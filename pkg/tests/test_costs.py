import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp, mpf
from mpmath import log as mplog

from edgesched import costs
from edgesched.domain import Layer, Link, LocalPower, Node, PowerMode, SystemParams
from edgesched.errors import GammaOutOfRange, NonPositiveFrequency, WrongLayer
from edgesched.workload import default_scenario

from oracle_values import CLOUD_DELAY, CLOUD_ENERGY, EDGE_DELAY, EDGE_ENERGY, RATE, UPLINK

REL = 1e-9


@pytest.fixture
def scenario():
    return default_scenario()


@pytest.fixture
def link(scenario):
    return scenario.link("device", "edge")


class Job:
    def __init__(self, cycles, input_size):
        self.cycles = cycles
        self.input_size = input_size


def test_frozen_rate_matches_mpmath():
    mp.dps = 30
    assert float(mpf(10) ** 6 * mplog(13001, 2)) == pytest.approx(RATE, rel=1e-15)


@pytest.mark.parametrize(
    "cycles, freq, expected",
    [(1e9, 2e9, 0.5), (0.0, 2e9, 0.0), (5e9, 2e9, 2.5)],
)
def test_local_delay(cycles, freq, expected):
    assert costs.local_delay(cycles, freq) == pytest.approx(expected, rel=REL, abs=0)


def test_local_delay_rejects_bad_frequency():
    with pytest.raises(NonPositiveFrequency):
        costs.local_delay(1e9, 0.0)


def test_local_energy_modes(scenario):
    measured = scenario.node("device")
    assert costs.local_energy(1e9, measured) == pytest.approx(0.45, rel=REL)
    analytic = default_scenario(analytic=True).node("device")
    assert costs.local_energy(1e9, analytic) == pytest.approx(40.0, rel=REL)
    assert costs.local_energy(0.0, measured) == 0.0
    assert costs.local_energy(0.0, analytic) == 0.0


def test_local_energy_wrong_layer(scenario):
    with pytest.raises(WrongLayer):
        costs.local_energy(1e9, scenario.node("edge"))


def test_cpu_power():
    assert costs.cpu_power(2e9, 1e-26, 3) == pytest.approx(80.0, rel=REL)
    assert costs.cpu_power(2e9, 1e-26, 2) == pytest.approx(4e-8, rel=REL)
    assert costs.cpu_power(2e9, 2e-26, 3) == pytest.approx(2 * costs.cpu_power(2e9, 1e-26, 3), rel=1e-15)
    with pytest.raises(GammaOutOfRange):
        costs.cpu_power(2e9, 1e-26, 3.5)
    with pytest.raises(GammaOutOfRange):
        costs.cpu_power(2e9, 1e-26, 1.9)


def test_uplink_rate(link):
    assert costs.uplink_rate(link) == pytest.approx(RATE, rel=REL)
    assert costs.uplink_rate(Link("a", "b", gain=1e-300)) == pytest.approx(0.0, abs=1e-280)
    doubled = Link("a", "b", bandwidth=2e6)
    assert costs.uplink_rate(doubled) == pytest.approx(2 * RATE, rel=1e-15)


def test_remote_delay_and_energy(scenario):
    system = scenario.system
    edge, cloud = scenario.node("edge"), scenario.node("cloud")
    edge_link, cloud_link = scenario.link("device", "edge"), scenario.link("device", "cloud")
    assert costs.remote_delay(1e9, 8e7, edge_link, edge, system) == pytest.approx(EDGE_DELAY, rel=REL)
    assert costs.remote_energy(1e9, 8e7, edge_link, edge) == pytest.approx(EDGE_ENERGY, rel=REL)
    assert costs.remote_delay(1e9, 8e7, cloud_link, cloud, system) == pytest.approx(CLOUD_DELAY, rel=REL)
    assert costs.remote_energy(1e9, 8e7, cloud_link, cloud) == pytest.approx(CLOUD_ENERGY, rel=REL)
    assert costs.remote_delay(0.0, 0.0, edge_link, edge, system) == 0.0
    assert costs.remote_energy(0.0, 0.0, edge_link, edge) == 0.0


def test_remote_breakdown_sums(scenario):
    link = Link("device", "edge", extra_rtt=0.25)
    c = costs.remote_costs(Job(1e9, 8e7), link, scenario.node("edge"), SystemParams(feedback_time=0.1))
    assert c.uplink_time == pytest.approx(UPLINK, rel=REL)
    assert c.exec_time == pytest.approx(0.1, rel=REL)
    assert c.feedback_time == pytest.approx(0.35)
    assert c.delay == pytest.approx(c.uplink_time + c.exec_time + c.feedback_time, rel=1e-15)
    # feedback and rtt are free in energy
    assert c.energy == pytest.approx(EDGE_ENERGY, rel=REL)


def test_remote_rejects_local_server(scenario):
    with pytest.raises(WrongLayer):
        costs.remote_delay(1.0, 1.0, Link("device", "device"), scenario.node("device"), SystemParams())


finite_pos = st.floats(min_value=1e-3, max_value=1e3)


@settings(max_examples=200, deadline=None)
@given(
    # whole cycle counts; sub-unit counts only probe subnormal floats
    cycles=st.one_of(st.just(0.0), st.floats(min_value=1, max_value=1e12)),
    freq=st.floats(min_value=1e6, max_value=1e11),
    kappa=st.floats(min_value=1e-30, max_value=1e-20),
    gamma=st.floats(min_value=2, max_value=3),
)
def test_analytic_energy_is_power_times_delay(cycles, freq, kappa, gamma):
    node = Node("d", Layer.LOCAL, freq, power=LocalPower(PowerMode.ANALYTIC, kappa=kappa, gamma=gamma))
    energy = costs.local_energy(cycles, node)
    assert energy == pytest.approx(costs.cpu_power(freq, kappa, gamma) * costs.local_delay(cycles, freq), rel=1e-12, abs=0)


@settings(max_examples=100, deadline=None)
@given(cycles=st.floats(min_value=1e6, max_value=1e12), f1=st.floats(1e8, 1e10), f2=st.floats(1e8, 1e10))
def test_frequency_tension(cycles, f1, f2):
    lo, hi = sorted((f1, f2))
    if hi <= lo * (1 + 1e-9):
        return
    power = LocalPower(PowerMode.ANALYTIC, kappa=1e-26, gamma=3)
    e_lo = costs.local_energy(cycles, Node("d", Layer.LOCAL, lo, power=power))
    e_hi = costs.local_energy(cycles, Node("d", Layer.LOCAL, hi, power=power))
    assert e_hi > e_lo
    assert costs.local_delay(cycles, hi) < costs.local_delay(cycles, lo)


@settings(max_examples=100, deadline=None)
@given(
    cycles=st.floats(min_value=1e3, max_value=1e11),
    size=st.floats(min_value=0, max_value=1e9),
    f1=st.floats(1e8, 1e11),
    f2=st.floats(1e8, 1e11),
)
def test_remote_delay_monotone(cycles, size, f1, f2):
    lo, hi = sorted((f1, f2))
    if hi <= lo * (1 + 1e-6):
        return
    link = Link("d", "s")
    sys_ = SystemParams()
    slow = costs.remote_delay(cycles, size, link, Node("s", Layer.EDGE, lo), sys_)
    fast = costs.remote_delay(cycles, size, link, Node("s", Layer.EDGE, hi), sys_)
    assert fast < slow
    bigger = costs.remote_delay(cycles, size + 1e6, link, Node("s", Layer.EDGE, lo), sys_)
    assert bigger > slow


@settings(max_examples=100, deadline=None)
@given(cycles=st.floats(0, 1e11), size=st.floats(0, 1e9), freq=st.floats(1e8, 1e11), rtt=st.floats(0, 1))
def test_edge_cloud_symmetry(cycles, size, freq, rtt):
    sys_ = SystemParams(feedback_time=0.01)
    link_e, link_c = Link("d", "e", extra_rtt=rtt), Link("d", "c", extra_rtt=rtt)
    e, c = Node("e", Layer.EDGE, freq), Node("c", Layer.CLOUD, freq)
    assert costs.remote_delay(cycles, size, link_e, e, sys_) == costs.remote_delay(cycles, size, link_c, c, sys_)
    assert costs.remote_energy(cycles, size, link_e, e) == costs.remote_energy(cycles, size, link_c, c)


@settings(max_examples=100, deadline=None)
@given(b=finite_pos, h=finite_pos, n0=finite_pos, p=finite_pos, scale=st.floats(1.01, 10))
def test_uplink_rate_monotone(b, h, n0, p, scale):
    base = costs.uplink_rate(Link("a", "b", bandwidth=b, gain=h * 1e-6, noise=n0 * 1e-9, tx_power=p))
    assert costs.uplink_rate(Link("a", "b", bandwidth=b, gain=h * 1e-6 * scale, noise=n0 * 1e-9, tx_power=p)) > base
    assert costs.uplink_rate(Link("a", "b", bandwidth=b, gain=h * 1e-6, noise=n0 * 1e-9, tx_power=p * scale)) > base
    assert costs.uplink_rate(Link("a", "b", bandwidth=b, gain=h * 1e-6, noise=n0 * 1e-9 * scale, tx_power=p)) < base


def test_array_and_scalar_paths_agree(scenario):
    cycles = np.array([0.0, 1e9, 3.3e9])
    sizes = np.array([0.0, 8e7, 1.7e6])
    link, edge = scenario.link("device", "edge"), scenario.node("edge")
    vec = costs.remote_delay(cycles, sizes, link, edge, scenario.system)
    for i in range(3):
        assert vec[i] == costs.remote_delay(float(cycles[i]), float(sizes[i]), link, edge, scenario.system)
    assert math.isfinite(float(vec.sum()))
