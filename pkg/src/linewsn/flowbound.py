"""Flow-side machinery: lifetime upper bound and schedule certification.

The instance graph is vertex-split (sensor i becomes in/out vertices joined
by an arc of capacity E_i) so per-sensor budgets become arc capacities.
The lifetime upper bound tests, for candidate values T, feasibility of the
relaxed per-slot flow problem: a fractional unit sink-to-sink flow whose
per-sensor throughput fits within both one activation per slot and E_i/T
on average, with total inter-node flow at least M_cs + 1 (cardinality).
Bisection over T yields the largest feasible value.

Residual-route search over a schedule's accumulated flows provides the
certification side: a leftover route that crosses some inter-node arc
against its flow witnesses a one-slot improvement, realized by splicing
the offending slot with the residual route.
"""

from collections import deque
from dataclasses import dataclass, replace

import numpy as np

from .balancer import ActivationProfile, Schedule, validate_schedule
from .errors import CapacityViolationError, TooLargeError, WsnError
from .simplex import phase1_feasible
from .topology import Topology

__all__ = [
    "FlowNetwork",
    "ResidualRoute",
    "Certificate",
    "split_vertices",
    "lp_feasible",
    "lifetime_upper_bound",
    "load_schedule_flows",
    "find_backward_augmenting_route",
    "certify_schedule",
]

DEFAULT_VERIFIER_GUARD = 14
_SEARCH_CAP = 2_000_000


@dataclass(frozen=True)
class FlowNetwork:
    """Vertex-split directed flow graph with integer capacities and flows.

    Split-vertex ids: left sink 0, sensor i's in/out pair (2i-1, 2i),
    right sink 2N+1.  The first n_sensors arcs are the internal
    (in -> out) arcs, in sensor order, carrying the energy capacities;
    inter-node arcs follow with a sentinel capacity no flow can reach.
    """

    n_sensors: int
    arcs: tuple[tuple[int, int], ...]
    capacity: tuple[int, ...]
    flow: tuple[int, ...]

    def vertex_in(self, sensor: int) -> int:
        return 2 * sensor - 1

    def vertex_out(self, sensor: int) -> int:
        return 2 * sensor

    @property
    def sink(self) -> int:
        return 2 * self.n_sensors + 1

    def is_internal(self, arc_index: int) -> bool:
        return arc_index < self.n_sensors

    def internal_sensor(self, arc_index: int) -> int:
        return arc_index + 1


def split_vertices(t: Topology, energies) -> FlowNetwork:
    """Build the vertex-split flow network of an instance, with zero flows."""
    n = t.n_sensors
    if len(energies) != n:
        raise WsnError(f"{len(energies)} energies for {n} sensors")
    energies = [int(e) for e in energies]
    sentinel = sum(energies) + 1

    arcs = [(2 * i - 1, 2 * i) for i in range(1, n + 1)]
    caps = list(energies)
    inter = set()
    for i in range(n + 2):
        for j in t.adjacency[i]:
            lo, hi = min(i, j), max(i, j)
            inter.add((lo, hi))
    for lo, hi in sorted(inter):
        tail = 0 if lo == 0 else 2 * lo
        head = 2 * n + 1 if hi == n + 1 else 2 * hi - 1
        arcs.append((tail, head))
        caps.append(sentinel)
    return FlowNetwork(n, tuple(arcs), tuple(caps), (0,) * len(arcs))


def lp_feasible(net: FlowNetwork, m_cs: int, T: int) -> bool:
    """Whether a fractional relaxed activation plan of T slots exists.

    Per-slot symmetry lets the T-indexed relaxation be decided on a single
    averaged slot: conservation with one unit from sink to sink, internal
    flows bounded by min(1, E_i/T), and inter-node flow totalling at least
    M_cs + 1.  Inter-node flows need no explicit <= 1 rows: the split graph
    is acyclic, so a value-1 flow cannot exceed 1 on any arc.
    """
    if T < 1:
        raise WsnError("T must be >= 1")
    n = net.n_sensors
    n_arcs = len(net.arcs)
    n_vertices = 2 * n + 2

    a_eq = np.zeros((n_vertices, n_arcs))
    b_eq = np.zeros(n_vertices)
    for idx, (u, v) in enumerate(net.arcs):
        a_eq[u, idx] += 1.0  # outgoing
        a_eq[v, idx] -= 1.0  # incoming
    b_eq[0] = 1.0
    b_eq[net.sink] = -1.0

    a_ge = np.zeros((1, n_arcs))
    a_ge[0, n:] = 1.0
    b_ge = [m_cs + 1.0]

    upper = np.full(n_arcs, np.inf)
    for idx in range(n):
        upper[idx] = min(1.0, net.capacity[idx] / T)
    return phase1_feasible(a_eq, b_eq, a_ge, b_ge, upper)


def _min_route_sensors(net: FlowNetwork) -> int | None:
    # 0-1 BFS over the split graph: internal arcs cost one sensor each.
    out = [[] for _ in range(net.sink + 1)]
    for idx, (u, v) in enumerate(net.arcs):
        out[u].append((v, 1 if net.is_internal(idx) else 0))
    dist = [None] * (net.sink + 1)
    dist[0] = 0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v, w in out[u]:
            d = dist[u] + w
            if dist[v] is None or d < dist[v]:
                dist[v] = d
                if w:
                    queue.append(v)
                else:
                    queue.appendleft(v)
    return dist[net.sink]


def lifetime_upper_bound(
    t: Topology, energies, m_cs: int, lower_hint: int = 0
) -> int:
    """Largest T for which the relaxed flow problem stays feasible.

    Searches [max(lower_hint, 1), sum(E) // max(M_cs, M_c)] by galloping up
    from the hint and bisecting; feasible T values are downward closed, so
    the boundary is well defined.  M_c is measured on the split graph so
    the cap stays valid even for unequal (asymmetric) ranges.  Returns 0
    when even T = 1 is infeasible.
    """
    if m_cs < 1:
        raise WsnError("m_cs must be >= 1")
    net = split_vertices(t, energies)
    mc = _min_route_sensors(net)
    if mc is None:
        return 0
    m_star = max(m_cs, mc)
    cap = sum(int(e) for e in energies) // m_star
    if cap < 1:
        return 0

    cache: dict[int, bool] = {}

    def check(T: int) -> bool:
        if T not in cache:
            cache[T] = lp_feasible(net, m_cs, T)
        return cache[T]

    def bisect(lo_feas: int, hi_infeas: int) -> int:
        while hi_infeas - lo_feas > 1:
            mid = (lo_feas + hi_infeas) // 2
            if check(mid):
                lo_feas = mid
            else:
                hi_infeas = mid
        return lo_feas

    lo = min(max(lower_hint, 1), cap)
    if not check(lo):
        return 0 if lo == 1 else bisect(0, lo)
    cur, step = lo, 1
    while cur < cap:
        probe = min(cur + step, cap)
        if check(probe):
            cur, step = probe, step * 2
        else:
            return bisect(cur, probe)
    return cap


def _route_vertex_seq(net: FlowNetwork, profile: ActivationProfile):
    seq = [0]
    for i in profile.nodes:
        seq.append(net.vertex_in(i))
        seq.append(net.vertex_out(i))
    seq.append(net.sink)
    return seq


def load_schedule_flows(net: FlowNetwork, s: Schedule) -> FlowNetwork:
    """Accumulate a schedule's routes onto the network, one unit per slot.

    Each slot's profile is traversed left to right (nearest-active-neighbor
    routing); every arc on the route gains one unit of flow.

    Raises:
        CapacityViolationError: the schedule overdraws some sensor.
        WsnError: a slot's profile is not a consecutive-hop route.
    """
    arc_pos = {arc: idx for idx, arc in enumerate(net.arcs)}
    flows = list(net.flow)
    for slot, profile in enumerate(s.slots):
        seq = _route_vertex_seq(net, profile)
        for u, v in zip(seq, seq[1:]):
            idx = arc_pos.get((u, v))
            if idx is None:
                raise WsnError(f"slot {slot} is not a route: missing arc {u}->{v}")
            flows[idx] += 1
    for idx, (f, c) in enumerate(zip(flows, net.capacity)):
        if f > c:
            raise CapacityViolationError(
                f"arc {net.arcs[idx]} carries {f} over capacity {c}"
            )
    return replace(net, flow=tuple(flows))


@dataclass(frozen=True)
class ResidualRoute:
    """A sink-to-sink residual route: vertices plus (arc, backward?) steps."""

    vertices: tuple[int, ...]
    steps: tuple[tuple[int, bool], ...]

    def backward_steps(self):
        return [idx for idx, back in self.steps if back]


def _search_residual_route(net, m_cs, require_backward, max_backward):
    fwd_out: list[list[tuple[int, int]]] = [[] for _ in range(net.sink + 1)]
    bwd_out: list[list[tuple[int, int]]] = [[] for _ in range(net.sink + 1)]
    for idx, (u, v) in enumerate(net.arcs):
        if net.flow[idx] < net.capacity[idx]:
            fwd_out[u].append((idx, v))
        if net.flow[idx] > 0:
            bwd_out[v].append((idx, u))
    for rows in (fwd_out, bwd_out):
        for moves in rows:
            moves.sort(key=lambda m: m[1])

    sink = net.sink
    budget = [_SEARCH_CAP]

    def dfs(u, visited, vertices, steps, n_fwd_internal, n_back):
        budget[0] -= 1
        if budget[0] <= 0:
            raise TooLargeError("residual route search budget exhausted")
        if u == sink:
            if n_fwd_internal >= m_cs and (n_back >= 1 or not require_backward):
                return ResidualRoute(tuple(vertices), tuple(steps))
            return None
        for idx, v in fwd_out[u]:
            if v in visited:
                continue
            visited.add(v)
            vertices.append(v)
            steps.append((idx, False))
            found = dfs(
                u=v,
                visited=visited,
                vertices=vertices,
                steps=steps,
                n_fwd_internal=n_fwd_internal + (1 if net.is_internal(idx) else 0),
                n_back=n_back,
            )
            if found is not None:
                return found
            steps.pop()
            vertices.pop()
            visited.discard(v)
        if max_backward is None or n_back < max_backward:
            for idx, v in bwd_out[u]:
                if v in visited:
                    continue
                visited.add(v)
                vertices.append(v)
                steps.append((idx, True))
                found = dfs(u=v, visited=visited, vertices=vertices, steps=steps,
                            n_fwd_internal=n_fwd_internal, n_back=n_back + 1)
                if found is not None:
                    return found
                steps.pop()
                vertices.pop()
                visited.discard(v)
        return None

    return dfs(0, {0}, [0], [], 0, 0)


def find_backward_augmenting_route(
    net: FlowNetwork, m_cs: int, max_sensors: int = DEFAULT_VERIFIER_GUARD
) -> ResidualRoute | None:
    """Exhaustively search for an unblocked residual route using backward arcs.

    The route must reach the right sink with unit increment available,
    traverse at least M_cs internal arcs forward, and use at least one arc
    backward.  Any returned route is asserted to take no internal (in->out)
    arc backward, the invariant expected of scheduler-produced flows.

    Raises:
        TooLargeError: instance above the small-instance guard, or search
            budget exhausted.
    """
    if net.n_sensors > max_sensors:
        raise TooLargeError(
            f"N={net.n_sensors} exceeds the verifier guard {max_sensors}"
        )
    route = _search_residual_route(net, m_cs, require_backward=True, max_backward=None)
    if route is not None:
        for idx in route.backward_steps():
            if net.is_internal(idx):
                raise AssertionError(
                    "residual route traverses an internal arc backward"
                )
    return route


@dataclass(frozen=True)
class Certificate:
    """Outcome of schedule certification.

    status is 'optimal' (no residual improvement applies), 'improvable'
    (improved carries a schedule exactly one slot longer), or 'unknown'
    (a residual route exists but no cardinality-respecting splice does).
    """

    status: str
    improved: Schedule | None = None


def _sensors_of_steps(net, steps):
    return [net.internal_sensor(idx) for idx, back in steps if not back and net.is_internal(idx)]


def _splice(net, s, m_cs, route):
    back_positions = [pos for pos, (idx, back) in enumerate(route.steps) if back]
    if len(back_positions) != 1:
        return None
    pos = back_positions[0]
    arc_idx, _ = route.steps[pos]
    tail, head = net.arcs[arc_idx]
    if net.is_internal(arc_idx):
        return None
    # Backward traversal of inter arc (out(i) -> in(j)): route runs in(j) -> out(i).
    i = tail // 2
    j = (head + 1) // 2
    slot_idx = None
    for idx, profile in enumerate(s.slots):
        nodes = profile.nodes
        for p in range(len(nodes) - 1):
            if nodes[p] == i and nodes[p + 1] == j:
                slot_idx = idx
                break
        if slot_idx is not None:
            break
    if slot_idx is None:
        return None
    slot_nodes = s.slots[slot_idx].nodes
    prefix = _sensors_of_steps(net, route.steps[:pos])
    suffix = _sensors_of_steps(net, route.steps[pos + 1 :])
    first = tuple(x for x in slot_nodes if x <= i) + tuple(suffix)
    second = tuple(prefix) + tuple(x for x in slot_nodes if x >= j)
    if len(first) < m_cs or len(second) < m_cs:
        return None
    slots = list(s.slots)
    slots[slot_idx] = ActivationProfile(first)
    slots.append(ActivationProfile(second))
    return Schedule(tuple(slots))


def certify_schedule(
    t: Topology,
    energies,
    m_cs: int,
    s: Schedule,
    max_sensors: int = DEFAULT_VERIFIER_GUARD,
) -> Certificate:
    """Certify a schedule against residual-route improvements.

    Loads the schedule's flows and searches the residual network.  A
    leftover forward-only feasible route means the schedule simply stopped
    early (improvable by appending it); a backward-arc route triggers the
    slot-splicing construction; with neither, no residual improvement
    applies and the schedule is certified optimal.
    """
    if t.n_sensors > max_sensors:
        raise TooLargeError(f"N={t.n_sensors} exceeds the verifier guard {max_sensors}")
    net = load_schedule_flows(split_vertices(t, energies), s)

    forward = _search_residual_route(net, m_cs, require_backward=False, max_backward=0)
    if forward is not None:
        extra = ActivationProfile(tuple(_sensors_of_steps(net, forward.steps)))
        improved = Schedule(tuple(s.slots) + (extra,))
        validate_schedule(t, energies, m_cs, improved)
        return Certificate("improvable", improved)

    route = find_backward_augmenting_route(net, m_cs, max_sensors)
    if route is None:
        return Certificate("optimal")
    if len(route.backward_steps()) > 1:
        route = _search_residual_route(net, m_cs, require_backward=True, max_backward=1)
        if route is None:
            return Certificate("unknown")
    improved = _splice(net, s, m_cs, route)
    if improved is None:
        return Certificate("unknown")
    try:
        validate_schedule(t, energies, m_cs, improved)
    except WsnError:
        return Certificate("unknown")
    return Certificate("improvable", improved)
