"""Time the numba and numpy kernel backends against each other.

    python3 benchmarks/bench_kernels.py [--q-enum 12] [--q-bnb 30] [--repeat 3]

Both backends must return the same objective; the script exits non-zero if
they disagree.
"""

import argparse
import sys
import time
from dataclasses import replace

import numpy as np

from edgesched import _kernels, solve_bnb
from edgesched.workload import WorkloadSpec, default_scenario, generate_tasks, split


def _best_of(fn, repeat):
    times, result = [], None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - start)
    return min(times), result


def bench_enumeration(q, repeat, rng):
    energy = rng.uniform(0.1, 10.0, size=(q, 3))
    allowed = rng.random((q, 3)) < 0.8
    allowed[:, 0] = True
    capacity = np.array([-1, max(1, q // 3), -1], dtype=np.int64)
    out = {}
    for backend in _kernels.available_backends():
        _kernels.enumerate_best(energy[:2], allowed[:2], capacity, backend=backend)  # warm up / compile
        out[backend] = _best_of(lambda: _kernels.enumerate_best(energy, allowed, capacity, backend=backend), repeat)
    return out


def bench_bnb(q, repeat):
    base = default_scenario()
    nodes = tuple(replace(n, capacity=max(1, q // 4)) if n.id != "device" else n for n in base.nodes)
    scenario = replace(base, nodes=nodes)
    tasks, reqs = split(generate_tasks(WorkloadSpec(count=q, size_range=(1e6, 4e7), deadline=6.0, seed=3)))
    out = {}
    for backend in _kernels.available_backends():
        _kernels.set_backend(backend)
        solve_bnb(tasks[:2], reqs[:2], scenario)
        out[backend] = _best_of(lambda: solve_bnb(tasks, reqs, scenario), repeat)
    return out


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--q-enum", type=int, default=12, help="tasks for full enumeration (3^q leaves)")
    parser.add_argument("--q-bnb", type=int, default=30, help="tasks for capacitated branch and bound")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    original = _kernels.BACKEND
    ok = True
    try:
        enum = bench_enumeration(args.q_enum, args.repeat, np.random.default_rng(0))
        print(f"enumeration q={args.q_enum} ({3 ** args.q_enum} leaves)")
        for name, (t, (_, val, count)) in enum.items():
            print(f"  {name:6s} {t * 1e3:10.2f} ms  best={val!r} leaves={count}")
        ok &= len({res[1] for _, res in enum.values()}) == 1

        bnb = bench_bnb(args.q_bnb, args.repeat)
        print(f"branch and bound q={args.q_bnb}, capacity {max(1, args.q_bnb // 4)} on edge and cloud")
        for name, (t, rep) in bnb.items():
            print(f"  {name:6s} {t * 1e3:10.2f} ms  objective={rep.objective!r} nodes={rep.nodes_explored}")
        ok &= len({rep.objective for _, rep in bnb.values()}) == 1
    finally:
        _kernels.set_backend(original)
    if not ok:
        print("backends disagree", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
