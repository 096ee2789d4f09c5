"""Exact maximum lifetime via the multidimensional-knapsack reformulation.

Feasible activation profiles (connected sink-to-sink routes with at least
max(M_cs, M_c) sensors) are enumerated as knapsack columns; choosing how
many timeslots z_l to run each profile under the per-sensor energy budgets
and maximizing the total slot count is solved exactly by depth-first
branch-and-bound.  Practical only for small instances; the scheduler in
`balancer` is the scalable path.
"""

import sys
import time
from collections import deque
from dataclasses import dataclass

from .balancer import ActivationProfile, Schedule
from .errors import InfeasibleSolutionError, TooLargeError
from .topology import Topology, min_connected_count

__all__ = [
    "ProfileCatalog",
    "MdkSolution",
    "enumerate_profiles",
    "solve_mdk",
    "schedule_from_mdk",
]

DEFAULT_MAX_SENSORS = 20
DEFAULT_TIME_BUDGET = 60.0


@dataclass(frozen=True)
class ProfileCatalog:
    """All feasible activation profiles of an instance, as knapsack columns.

    Attributes:
        n_sensors: Number of sensors N of the underlying instance.
        profiles: Every feasible profile, in deterministic enumeration order.
        usage_index: usage_index[k] lists the profile indices containing
            sensor k+1.
    """

    n_sensors: int
    profiles: tuple[ActivationProfile, ...]
    usage_index: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.profiles)


@dataclass(frozen=True)
class MdkSolution:
    """Per-profile activation counts z and the lifetime they achieve."""

    counts: tuple[int, ...]
    lifetime: int


def enumerate_profiles(
    t: Topology, m_cs: int, max_sensors: int = DEFAULT_MAX_SENSORS
) -> ProfileCatalog:
    """Enumerate every feasible activation profile of the instance.

    Walks all monotone (left-to-right) sink-to-sink routes and keeps those
    with at least max(M_cs, M_c) sensors; each route's sensor set is one
    profile.  Monotone routes are exhaustive for line deployments, and
    distinct routes give distinct sets, so no deduplication is needed.

    Raises:
        TooLargeError: when N exceeds max_sensors (profile counts grow
            exponentially with network size).
    """
    n = t.n_sensors
    if n > max_sensors:
        raise TooLargeError(f"N={n} exceeds the enumeration guard {max_sensors}")
    mc = min_connected_count(t, set(t.sensors()))
    profiles: list[ActivationProfile] = []
    if mc is not None:
        m_min = max(m_cs, mc)
        sink = n + 1
        down = [sorted(j for j in t.adjacency[i] if i < j <= n) for i in range(n + 1)]
        sink_ok = [sink in t.adjacency[i] for i in range(n + 1)]
        path: list[int] = []

        def walk(i):
            if sink_ok[i] and len(path) >= m_min:
                profiles.append(ActivationProfile(tuple(path)))
            for j in down[i]:
                path.append(j)
                walk(j)
                path.pop()

        sys.setrecursionlimit(max(sys.getrecursionlimit(), n + 100))
        walk(0)

    usage: list[list[int]] = [[] for _ in range(n)]
    for idx, profile in enumerate(profiles):
        for i in profile.nodes:
            usage[i - 1].append(idx)
    return ProfileCatalog(n, tuple(profiles), tuple(tuple(u) for u in usage))


def _capped_energy_bound(residuals, m_min):
    # Largest t with sum(min(r, t)) >= m_min * t: each extra slot occupies
    # m_min distinct sensors and no sensor more than once per slot.
    t = sum(residuals) // m_min
    while t > 0:
        t2 = sum(min(r, t) for r in residuals) // m_min
        if t2 >= t:
            break
        t = t2
    return t


class _HopFlow:
    """Integral max-flow bound over the hop graph of the catalog's routes.

    Every further slot is a route through hops observed in the catalog, so
    the max vertex-capacitated sink-to-sink flow (cardinality ignored)
    bounds the remaining slot count.  Tight when connectivity bottlenecks,
    complementing the energy bound that is tight when budgets bottleneck.
    """

    def __init__(self, n_sensors, hops):
        self.n = n_sensors
        # Split-vertex ids: source 0, sensor i in/out = (2i-1, 2i), sink 2N+1.
        self.n_vertices = 2 * n_sensors + 2
        self.arcs = [(2 * i - 1, 2 * i) for i in range(1, n_sensors + 1)]
        for a, b in sorted(hops):
            tail = 0 if a == 0 else 2 * a
            head = self.n_vertices - 1 if b == n_sensors + 1 else 2 * b - 1
            self.arcs.append((tail, head))
        self.adj = [[] for _ in range(self.n_vertices)]
        for idx, (u, v) in enumerate(self.arcs):
            self.adj[u].append((2 * idx, v))      # even = forward slot
            self.adj[v].append((2 * idx + 1, u))  # odd = reverse slot

    def bound(self, residual, members):
        big = sum(residual) + 1
        cap = [0] * (2 * len(self.arcs))
        for idx in range(self.n):
            if (idx + 1) in members:
                cap[2 * idx] = residual[idx]
        for idx in range(self.n, len(self.arcs)):
            cap[2 * idx] = big
        return self._max_flow(cap)

    def _max_flow(self, cap):
        source, sink = 0, self.n_vertices - 1
        total = 0
        while True:
            parent = [-1] * self.n_vertices
            parent_arc = [-1] * self.n_vertices
            parent[source] = source
            queue = deque([source])
            while queue:
                u = queue.popleft()
                if u == sink:
                    break
                for slot, v in self.adj[u]:
                    if parent[v] < 0 and cap[slot] > 0:
                        parent[v] = u
                        parent_arc[v] = slot
                        queue.append(v)
            if parent[sink] < 0:
                return total
            push = None
            v = sink
            while v != source:
                slot = parent_arc[v]
                push = cap[slot] if push is None else min(push, cap[slot])
                v = parent[v]
            v = sink
            while v != source:
                slot = parent_arc[v]
                cap[slot] -= push
                cap[slot ^ 1] += push
                v = parent[v]
            total += push


def solve_mdk(
    catalog: ProfileCatalog,
    energies,
    time_budget: float = DEFAULT_TIME_BUDGET,
    incumbent: MdkSolution | None = None,
    upper_bound: int | None = None,
) -> MdkSolution:
    """Exact optimum of the profile-count knapsack by branch-and-bound.

    Branches on one profile's activation count at a time (largest count
    first).  Subtrees are pruned against used + floor(remaining usable
    energy / smallest remaining profile size) - iterated so no sensor is
    counted beyond one activation per slot - and, when that fails, against
    an integral max-flow over the catalog's hop graph.  Profiles that are
    strict supersets of another catalog profile are fixed to zero count
    beforehand: shifting their activations to the subset profile preserves
    feasibility and the objective, so the optimum is unchanged.  An
    optional incumbent (e.g. from the balancer's schedule) seeds the lower
    bound; an optional externally proven upper bound stops the search as
    soon as it is attained.

    Raises:
        TimeoutError: when the wall-clock budget runs out before the search
            space is exhausted.
    """
    n = catalog.n_sensors
    if len(energies) != n:
        raise InfeasibleSolutionError(f"{len(energies)} energies for {n} sensors")
    energies = [int(e) for e in energies]
    total = len(catalog.profiles)
    if total == 0:
        return MdkSolution((), 0)

    hops = set()
    for p in catalog.profiles:
        seq = (0, *p.nodes, n + 1)
        hops.update(zip(seq, seq[1:]))
    size_floor = min(len(p) for p in catalog.profiles)

    def dominated(nodes):
        # Dropping one sensor leaves a cataloged profile iff the splice hop
        # is one the catalog already uses and the length floor still holds.
        if len(nodes) <= size_floor:
            return False
        right = n + 1
        for pos in range(len(nodes)):
            prev = nodes[pos - 1] if pos > 0 else 0
            nxt = nodes[pos + 1] if pos + 1 < len(nodes) else right
            if (prev, nxt) in hops:
                return True
        return False

    active = [l for l in range(total) if not dominated(catalog.profiles[l].nodes)]
    # Branch order: profiles with the loosest bottleneck budget first, then
    # smaller ones; final tiebreak on the node tuple for determinism.
    active.sort(
        key=lambda l: (
            -min(energies[i - 1] for i in catalog.profiles[l].nodes),
            len(catalog.profiles[l]),
            catalog.profiles[l].nodes,
        )
    )
    cols = [catalog.profiles[l].nodes for l in active]
    k = len(cols)

    suffix_min_size = [1] * (k + 1)
    suffix_members: list[frozenset] = [frozenset()] * (k + 1)
    for l in range(k - 1, -1, -1):
        suffix_min_size[l] = min(
            len(cols[l]), suffix_min_size[l + 1] if l < k - 1 else len(cols[l])
        )
        suffix_members[l] = suffix_members[l + 1] | frozenset(cols[l])

    flow = _HopFlow(n, hops)

    best = -1
    best_counts = [0] * total
    if incumbent is not None:
        if len(incumbent.counts) != total:
            raise InfeasibleSolutionError("incumbent/catalog size mismatch")
        _check_budget(catalog, incumbent.counts, energies)
        best = incumbent.lifetime
        best_counts = list(incumbent.counts)
    stop_at = float("inf") if upper_bound is None else upper_bound

    residual = list(energies)
    counts = [0] * k
    deadline = time.monotonic() + time_budget
    ticker = 0
    done = False

    def expand(l, used):
        # Returns True when the search can stop (upper bound attained).
        nonlocal best, best_counts, ticker
        if used > best:
            best = used
            merged = [0] * total
            for pos in range(l):
                merged[active[pos]] = counts[pos]
            best_counts = merged
            if best >= stop_at:
                return True
        if l == k:
            return False
        ticker += 1
        if ticker & 0xFF == 0 and time.monotonic() > deadline:
            raise TimeoutError("branch-and-bound wall-clock budget exhausted")
        members = suffix_members[l]
        gain = _capped_energy_bound(
            [residual[i - 1] for i in members], suffix_min_size[l]
        )
        if used + gain <= best:
            return False
        if used + flow.bound(residual, members) <= best:
            return False
        zmax = min(residual[i - 1] for i in cols[l])
        for z in range(0, zmax + 1):  # stack pops largest z first
            stack.append(("restore", l, z, 0))
            stack.append(("apply", l, z, used))
        return False

    if time.monotonic() >= deadline:
        raise TimeoutError("branch-and-bound wall-clock budget exhausted")
    stack: list[tuple] = []
    done = expand(0, 0)
    while stack and not done:
        kind, l, z, used = stack.pop()
        if kind == "restore":
            for i in cols[l]:
                residual[i - 1] += z
        else:
            counts[l] = z
            for i in cols[l]:
                residual[i - 1] -= z
            done = expand(l + 1, used + z)
    return MdkSolution(tuple(best_counts), max(best, 0))


def _check_budget(catalog, counts, energies):
    used = [0] * catalog.n_sensors
    for z, profile in zip(counts, catalog.profiles):
        if z < 0:
            raise InfeasibleSolutionError("negative activation count")
        for i in profile.nodes:
            used[i - 1] += z
    for i, (u, e) in enumerate(zip(used, energies)):
        if u > e:
            raise InfeasibleSolutionError(
                f"sensor {i + 1} scheduled {u} times with budget {e}"
            )


def schedule_from_mdk(sol: MdkSolution, catalog: ProfileCatalog, energies) -> Schedule:
    """Expand per-profile counts into a concrete schedule, in catalog order.

    Raises:
        InfeasibleSolutionError: if the counts overdraw any sensor budget.
    """
    if len(sol.counts) != len(catalog.profiles):
        raise InfeasibleSolutionError("solution/catalog size mismatch")
    _check_budget(catalog, sol.counts, [int(e) for e in energies])
    slots = []
    for z, profile in zip(sol.counts, catalog.profiles):
        slots.extend([profile] * z)
    return Schedule(tuple(slots))
