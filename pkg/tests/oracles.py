"""Independent oracles used to pin expected values in the test suite.

Nothing here imports the propagation code paths it is meant to check: the
ODE oracle is a fixed-step RK4 integrator, the root oracle bisects on the
RK4 solution, and the graph oracle enumerates every causal path.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def rk4_jacobi(kappa_fn, theta: float, step: float = 1e-5):
    """Integrate u'' + kappa(x) u = 0, u(0)=0, u'(0)=1 up to theta by RK4.

    Steps are snapped so that no step straddles more than O(step) of a
    coefficient jump; accuracy is then O(step^2) at jumps and O(step^4)
    elsewhere, plenty below the 1e-8 agreement the tests assert.
    """
    n = max(1, int(math.ceil(theta / step)))
    h = theta / n
    u, du = 0.0, 1.0
    x = 0.0
    for _ in range(n):
        def f(xi, state):
            return np.array([state[1], -kappa_fn(xi) * state[0]])

        y = np.array([u, du])
        k1 = f(x, y)
        k2 = f(x + h / 2, y + h / 2 * k1)
        k3 = f(x + h / 2, y + h / 2 * k2)
        k4 = f(x + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        u, du = float(y[0]), float(y[1])
        x += h
    return u, du


def rk4_first_root(kappa_fn, horizon: float, step: float = 1e-4, refine: float = 1e-10):
    """First positive zero of the RK4 solution, bisected on dense re-integration."""
    xs = np.arange(step, horizon + step, step)
    prev_u, prev_x = 0.0, 0.0
    for x in xs:
        u, _ = rk4_jacobi(kappa_fn, float(x), step=step / 10)
        if u <= 0.0 and prev_x > 0.0:
            lo, hi = prev_x, float(x)
            while hi - lo > refine:
                mid = 0.5 * (lo + hi)
                um, _ = rk4_jacobi(kappa_fn, mid, step=step / 10)
                if um > 0:
                    lo = mid
                else:
                    hi = mid
            return 0.5 * (lo + hi)
        prev_u, prev_x = u, float(x)
    return None


def brute_force_longest(events, edges, sources):
    """Maximal total edge weight over every path from any source, per event.

    ``edges`` maps i -> list of (j, weight).  Exponential search, only for
    tiny graphs; events unreachable from the sources get None.
    """
    best = {i: (0.0 if i in sources else None) for i in range(len(events))}

    def walk(i, acc):
        if best[i] is None or acc > best[i]:
            best[i] = acc
        for j, w in edges.get(i, []):
            walk(j, acc + w)

    for s in sources:
        walk(s, 0.0)
    return best


def enumerate_paths_max(events, edges, i, j):
    """Longest total weight over all paths i -> j, or None if unreachable."""
    best = [None]

    def walk(k, acc):
        if k == j:
            if best[0] is None or acc > best[0]:
                best[0] = acc
            return
        for nxt, w in edges.get(k, []):
            walk(nxt, acc + w)

    walk(i, 0.0)
    return best[0]


def trapezoid(xs, ys):
    return float(np.trapz(ys, xs))


def all_small_dags(n_events: int):
    """Every DAG on n ordered events (edges only forward), as edge subsets."""
    pairs = [(i, j) for i, j in itertools.combinations(range(n_events), 2)]
    for mask in range(2 ** len(pairs)):
        edges = {}
        for b, (i, j) in enumerate(pairs):
            if mask >> b & 1:
                edges.setdefault(i, []).append((j, 1.0))
        yield edges
