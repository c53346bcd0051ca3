import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgesched import Layer, PowerMode, WorkloadSpec, default_scenario, generate_tasks
from edgesched.costs import uplink_rate
from edgesched.errors import InvalidModel

from oracle_values import RATE


def test_default_scenario_shape():
    s = default_scenario()
    assert len(s.nodes) == 3
    assert [n.layer for n in s.nodes] == [Layer.LOCAL, Layer.EDGE, Layer.CLOUD]
    assert [n.frequency for n in s.nodes] == [2e9, 10e9, 15e9]
    device = s.node("device")
    assert device.power.mode is PowerMode.MEASURED
    assert device.power.measured_power == 0.9
    for link in s.links:
        assert uplink_rate(link) == pytest.approx(RATE, rel=1e-9)
        assert (link.tx_power, link.idle_power) == (1.3, 0.3)
    assert default_scenario(analytic=True).node("device").power.kappa == 1e-26


def test_same_seed_same_tasks():
    spec = WorkloadSpec(count=50, seed=9)
    assert generate_tasks(spec) == generate_tasks(spec)


def test_degenerate_range():
    tasks = generate_tasks(WorkloadSpec(count=20, cycles_range=(3e9, 3e9)))
    assert {t.cycles for t, _ in tasks} == {3e9}


def test_uniform_mean():
    tasks = generate_tasks(WorkloadSpec(count=100_000, cycles_range=(1e8, 1e10), seed=1))
    mean = np.mean([t.cycles for t, _ in tasks])
    assert abs(mean - 0.5 * (1e8 + 1e10)) < 0.01 * 0.5 * (1e8 + 1e10)


def test_seed_changes_tasks():
    a = generate_tasks(WorkloadSpec(count=1000, seed=1))
    b = generate_tasks(WorkloadSpec(count=1000, seed=2))
    assert any(x[0].cycles != y[0].cycles or x[0].input_size != y[0].input_size for x, y in zip(a, b))


def test_overriding_size_keeps_cycles():
    base = WorkloadSpec(count=30, seed=5)
    a = generate_tasks(base)
    b = generate_tasks(base.with_(size_range=(1e6, 1e6)))
    assert [t.cycles for t, _ in a] == [t.cycles for t, _ in b]


def test_requirements_uniform():
    pairs = generate_tasks(WorkloadSpec(count=5, deadline=2.5, accuracy_floor=0.3))
    assert {(r.deadline, r.accuracy_floor) for _, r in pairs} == {(2.5, 0.3)}


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(count=0),
        dict(count=2.5),
        dict(cycles_range=(5, 1)),
        dict(size_range=(-1, 1)),
        dict(distribution="zipf"),
        dict(seed=-1),
        dict(seed=2**64),
        dict(deadline=0),
        dict(accuracy_floor=1.5),
    ],
)
def test_spec_invariants(kwargs):
    with pytest.raises(InvalidModel):
        WorkloadSpec(**kwargs)


@settings(max_examples=50, deadline=None)
@given(
    c=st.tuples(st.floats(0, 1e11), st.floats(0, 1e11)),
    s=st.tuples(st.floats(0, 1e9), st.floats(0, 1e9)),
    seed=st.integers(0, 2**64 - 1),
)
def test_values_inside_ranges(c, s, seed):
    cr, sr = tuple(sorted(c)), tuple(sorted(s))
    for task, _ in generate_tasks(WorkloadSpec(count=25, cycles_range=cr, size_range=sr, seed=seed)):
        assert cr[0] <= task.cycles <= cr[1]
        assert sr[0] <= task.input_size <= sr[1]
