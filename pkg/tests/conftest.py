"""Shared fixtures and independent oracles for the test suite.

The oracles deliberately avoid the production code paths they check:
connectivity by union-find, best-profile by subset enumeration with
Fraction sums, the knapsack by memoized exhaustive state search, and LP
feasibility by scipy.linprog (including the slot-indexed formulation).
"""

from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from linewsn.topology import Topology, build_topology

# ---------------------------------------------------------------------------
# Canonical small instances


def make_chain6():
    """Six nodes spaced 0.2 apart with range 0.25: consecutive edges only."""
    return build_topology([0.0, 0.2, 0.4, 0.6, 0.8, 1.0], [0.25] * 6)


def make_chain3(radius=0.6):
    """Single midpoint sensor; radius 0.6 links it to both sinks."""
    return build_topology([0.0, 0.5, 1.0], [radius] * 3)


def make_crossover():
    """Four sensors in two crossing sink-to-sink pairs sharing one relay.

    Sensors h=1, i=2 attach to the left sink, j=3, k=4 to the right sink;
    interior links are h-j, i-j, i-k only (no h-i, h-k, or j-k).  The three
    feasible two-sensor profiles make greedy tie-breaking matter: picking
    {i, j} first strands h and k.  The pattern is not realizable on a line
    (it violates the interval property), hence the explicit neighbor sets.
    """
    return Topology.from_neighbor_sets(
        4,
        {0: {1, 2}, 1: {0, 3}, 2: {0, 3, 4}, 3: {1, 2, 5}, 4: {2, 5}, 5: {3, 4}},
    )


def prefer_profile(nodes):
    """Tie-break hook preferring one profile, falling back to the first."""

    def hook(profiles):
        for p in profiles:
            if p.nodes == nodes:
                return p
        return profiles[0]

    return hook


@pytest.fixture
def chain6():
    return make_chain6()


@pytest.fixture
def chain3():
    return make_chain3()


@pytest.fixture
def crossover():
    return make_crossover()


# ---------------------------------------------------------------------------
# Random instance helpers


def random_topology(rng, n, r_low=0.2, r_high=0.4):
    positions = [0.0] + sorted(rng.uniform(0.0, 1.0, n).tolist()) + [1.0]
    radius = float(rng.uniform(r_low, r_high))
    return build_topology(positions, [radius] * (n + 2))


def random_connected_topology(rng, n, r_low=0.2, r_high=0.4):
    from linewsn.topology import min_connected_count

    while True:
        t = random_topology(rng, n, r_low, r_high)
        if min_connected_count(t, set(t.sensors())) is not None:
            return t


def random_energies(rng, n, mean=8.0, std=3.0):
    return [int(e) for e in np.maximum(1, np.rint(rng.normal(mean, std, n)))]


# ---------------------------------------------------------------------------
# Oracles


def connected_oracle(t, active):
    """Union-find connectivity of the induced graph (checks BFS result)."""
    nodes = sorted(set(active) | {0, t.n_sensors + 1})
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u in nodes:
        for v in nodes:
            if u < v and (v in t.adjacency[u] or u in t.adjacency[v]):
                parent[find(u)] = find(v)
    return len({find(v) for v in nodes}) == 1


def brute_best_profile_value(t, energy, m):
    """Max sum of normalized residuals over connected m-subsets, or None."""
    from linewsn.topology import is_connected_induced

    candidates = sorted(energy.candidates())
    best = None
    for subset in combinations(candidates, m):
        if is_connected_induced(t, subset):
            value = sum(
                (energy.normalized_residual(i) for i in subset), Fraction(0)
            )
            if best is None or value > best:
                best = value
    return best


def exhaustive_mdk_lifetime(catalog, energies, node_budget=5_000_000):
    """Memoized exhaustive search over activation-count vectors.

    Exponential in general; callers keep catalogs small.  Raises RuntimeError
    instead of hanging if the state space exceeds node_budget.
    """
    profiles = [p.nodes for p in catalog.profiles]
    memo = {}
    nodes_seen = [0]

    def go(l, residual):
        if l == len(profiles):
            return 0
        key = (l, residual)
        if key in memo:
            return memo[key]
        nodes_seen[0] += 1
        if nodes_seen[0] > node_budget:
            raise RuntimeError("exhaustive oracle exceeded its node budget")
        best = go(l + 1, residual)
        nodes = profiles[l]
        zmax = min(residual[i - 1] for i in nodes)
        if zmax > 0:
            work = list(residual)
            for z in range(1, zmax + 1):
                for i in nodes:
                    work[i - 1] -= 1
                best = max(best, z + go(l + 1, tuple(work)))
        memo[key] = best
        return best

    return go(0, tuple(int(e) for e in energies))


def linprog_aggregated_feasible(net, m_cs, T):
    """Averaged-slot LP via scipy, with all bounds kept explicitly."""
    from scipy.optimize import linprog

    n = net.n_sensors
    n_arcs = len(net.arcs)
    a_eq = np.zeros((2 * n + 2, n_arcs))
    b_eq = np.zeros(2 * n + 2)
    for idx, (u, v) in enumerate(net.arcs):
        a_eq[u, idx] += 1.0
        a_eq[v, idx] -= 1.0
    b_eq[0] = 1.0
    b_eq[net.sink] = -1.0
    a_ub = np.zeros((1, n_arcs))
    a_ub[0, n:] = -1.0
    b_ub = [-(m_cs + 1.0)]
    bounds = []
    for idx in range(n_arcs):
        if idx < n:
            bounds.append((0.0, min(1.0, net.capacity[idx] / T)))
        else:
            bounds.append((0.0, 1.0))
    res = linprog(
        np.zeros(n_arcs), A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
        bounds=bounds, method="highs",
    )
    return res.status == 0


def linprog_slot_indexed_feasible(net, m_cs, T):
    """The full slot-indexed relaxation via scipy (small T and N only)."""
    from scipy.optimize import linprog

    n = net.n_sensors
    n_arcs = len(net.arcs)
    n_vars = n_arcs * T

    def var(arc, t):
        return t * n_arcs + arc

    rows_eq = []
    rhs_eq = []
    for t in range(T):
        block = np.zeros((2 * n + 2, n_vars))
        rhs = np.zeros(2 * n + 2)
        for idx, (u, v) in enumerate(net.arcs):
            block[u, var(idx, t)] += 1.0
            block[v, var(idx, t)] -= 1.0
        rhs[0] = 1.0
        rhs[net.sink] = -1.0
        rows_eq.append(block)
        rhs_eq.append(rhs)
    a_eq = np.vstack(rows_eq)
    b_eq = np.concatenate(rhs_eq)

    rows_ub = []
    rhs_ub = []
    for idx in range(n):  # per-sensor budget across slots
        row = np.zeros(n_vars)
        for t in range(T):
            row[var(idx, t)] = 1.0
        rows_ub.append(row)
        rhs_ub.append(float(net.capacity[idx]))
    for t in range(T):  # cardinality per slot
        row = np.zeros(n_vars)
        for idx in range(n, n_arcs):
            row[var(idx, t)] = -1.0
        rows_ub.append(row)
        rhs_ub.append(-(m_cs + 1.0))
    res = linprog(
        np.zeros(n_vars),
        A_ub=np.vstack(rows_ub), b_ub=np.array(rhs_ub),
        A_eq=a_eq, b_eq=b_eq,
        bounds=[(0.0, 1.0)] * n_vars, method="highs",
    )
    return res.status == 0
