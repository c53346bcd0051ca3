"""Search kernels over dense (task x executor) cost matrices.

Two backends share one contract:

* ``numba``: ``@njit`` compiled loops (default when numba imports).
* ``numpy``: chunked vectorised enumeration and an interpreted DFS.

Set ``EDGESCHED_DISABLE_NUMBA=1`` to force the numpy path. Both backends
return identical results; ``tests/test_kernels.py`` checks that.

Inputs are plain arrays: ``energy`` float64 (q, n), ``allowed`` bool (q, n)
and ``capacity`` int64 (n,) with -1 meaning unlimited.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

_CHUNK = 1 << 15


def _env_disabled() -> bool:
    return os.environ.get("EDGESCHED_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


# -- exhaustive enumeration ------------------------------------------------


def _enumerate_loop(energy, allowed, capacity):
    q, n = energy.shape
    best = np.full(q, -1, dtype=np.int64)
    best_val = np.inf
    total = 1
    for _ in range(q):
        total *= n
    digits = np.zeros(q, dtype=np.int64)
    load = np.zeros(n, dtype=np.int64)
    for _ in range(total):
        ok = True
        val = 0.0
        for j in range(n):
            load[j] = 0
        for i in range(q):
            e = digits[i]
            if not allowed[i, e]:
                ok = False
                break
            val += energy[i, e]
            load[e] += 1
        if ok:
            for j in range(n):
                if capacity[j] >= 0 and load[j] > capacity[j]:
                    ok = False
                    break
        if ok and val < best_val:
            best_val = val
            for i in range(q):
                best[i] = digits[i]
        # lexicographic successor, last task varies fastest
        k = q - 1
        while k >= 0:
            digits[k] += 1
            if digits[k] < n:
                break
            digits[k] = 0
            k -= 1
    return best, best_val, total


def _enumerate_numpy(energy, allowed, capacity):
    q, n = energy.shape
    total = n**q
    best = np.full(q, -1, dtype=np.int64)
    best_val = np.inf
    if q == 0:
        return best, 0.0, 1
    place = n ** np.arange(q - 1, -1, -1, dtype=np.int64)
    capped = np.flatnonzero(capacity >= 0)
    for start in range(0, total, _CHUNK):
        lin = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = (lin[:, None] // place[None, :]) % n
        ok = np.ones(lin.size, dtype=bool)
        val = np.zeros(lin.size)
        for i in range(q):
            ok &= allowed[i, digits[:, i]]
            val += energy[i, digits[:, i]]
        for j in capped:
            ok &= (digits == j).sum(axis=1) <= capacity[j]
        if not ok.any():
            continue
        val = np.where(ok, val, np.inf)
        k = int(np.argmin(val))
        if val[k] < best_val:
            best_val = float(val[k])
            best = digits[k].copy()
    return best, best_val, total


# -- branch and bound -------------------------------------------------------


def _bnb_loop(energy, children, nchild, order, suffix, capacity, inc_assign, inc_value):
    """Depth-first branch and bound over per-task executor choices.

    ``children[t]`` lists task t's admissible executors cheapest first and
    ``suffix[k]`` is the sum of the cheapest admissible energies of
    ``order[k:]``, an admissible bound since capacities only remove options.

    The node counter counts fathomed search nodes: complete leaves, bound
    prunes and capacity violations. Each covers a disjoint set of complete
    assignments, so the count never exceeds n**q.
    """
    q = order.shape[0]
    n = energy.shape[1]
    best = inc_assign.copy()
    best_val = inc_value
    if q == 0:
        return best, 0.0, 1
    if suffix[0] >= best_val:
        return best, best_val, 1
    nodes = 0
    assign = np.full(q, -1, dtype=np.int64)
    load = np.zeros(n, dtype=np.int64)
    g = np.zeros(q + 1)
    ptr = np.zeros(q, dtype=np.int64)
    depth = 0
    while depth >= 0:
        t = order[depth]
        if ptr[depth] >= nchild[t]:
            ptr[depth] = 0
            depth -= 1
            if depth >= 0:
                load[assign[order[depth]]] -= 1
                assign[order[depth]] = -1
                ptr[depth] += 1
            continue
        e = children[t, ptr[depth]]
        if capacity[e] >= 0 and load[e] >= capacity[e]:
            nodes += 1
            ptr[depth] += 1
            continue
        val = g[depth] + energy[t, e]
        if val + suffix[depth + 1] >= best_val:
            # siblings are no cheaper, fathom them together
            nodes += 1
            ptr[depth] = nchild[t]
            continue
        if depth + 1 == q:
            nodes += 1
            best_val = val
            for i in range(q):
                best[i] = assign[i]
            best[t] = e
            ptr[depth] += 1
            continue
        assign[t] = e
        load[e] += 1
        g[depth + 1] = val
        depth += 1
    return best, best_val, nodes


_BACKENDS = {
    "numpy": {"enumerate": _enumerate_numpy, "bnb": _bnb_loop},
}
if NUMBA_AVAILABLE:
    _BACKENDS["numba"] = {
        "enumerate": njit(cache=True)(_enumerate_loop),
        "bnb": njit(cache=True)(_bnb_loop),
    }

BACKEND = "numba" if NUMBA_AVAILABLE and not _env_disabled() else "numpy"


def set_backend(name: str) -> None:
    global BACKEND
    if name not in _BACKENDS:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(_BACKENDS)}")
    BACKEND = name


def available_backends() -> list:
    return sorted(_BACKENDS)


def enumerate_best(energy, allowed, capacity, backend=None):
    """Lexicographically first minimum-energy admissible assignment by full enumeration.

    Returns ``(assignment, value, count)``; ``assignment`` is all -1 and
    ``value`` is inf when nothing is admissible.
    """
    fn = _BACKENDS[backend or BACKEND]["enumerate"]
    best, val, count = fn(
        np.ascontiguousarray(energy, dtype=np.float64),
        np.ascontiguousarray(allowed, dtype=np.bool_),
        np.ascontiguousarray(capacity, dtype=np.int64),
    )
    return np.asarray(best, dtype=np.int64), float(val), int(count)


def bnb_search(energy, children, nchild, order, suffix, capacity, inc_assign, inc_value, backend=None):
    fn = _BACKENDS[backend or BACKEND]["bnb"]
    best, val, nodes = fn(
        np.ascontiguousarray(energy, dtype=np.float64),
        np.ascontiguousarray(children, dtype=np.int64),
        np.ascontiguousarray(nchild, dtype=np.int64),
        np.ascontiguousarray(order, dtype=np.int64),
        np.ascontiguousarray(suffix, dtype=np.float64),
        np.ascontiguousarray(capacity, dtype=np.int64),
        np.ascontiguousarray(inc_assign, dtype=np.int64),
        float(inc_value),
    )
    return np.asarray(best, dtype=np.int64), float(val), int(nodes)
