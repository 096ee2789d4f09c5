"""Linear two-sink WSN graph: adjacency, connectivity and route-size queries.

Node indexing convention used across the package: node 0 is the left sink,
nodes 1..N are the sensors ordered left to right, node N+1 is the right
sink.  Per-sensor quantities (energies, residuals) live in length-N lists
where entry k belongs to sensor k+1.
"""

from collections import deque
from dataclasses import dataclass, field

from .errors import (
    IndexOutOfRangeError,
    LengthMismatchError,
    NonPositiveRangeError,
    UnsortedPositionsError,
)

__all__ = [
    "Topology",
    "build_topology",
    "neighbors",
    "downstream",
    "is_connected_induced",
    "min_connected_count",
]


@dataclass(frozen=True)
class Topology:
    """Immutable communication graph of a line-deployed WSN.

    Attributes:
        positions: Node coordinates in [0, 1] (sinks at 0 and 1), or None
            when the instance was built from an explicit neighbor table.
        ranges: Per-node transmission radii, or None for explicit instances.
        n_sensors: Number of sensor nodes N.
        adjacency: adjacency[i] is the frozenset of nodes j with an edge
            (i, j), i.e. |pos_i - pos_j| <= ranges[i] for geometric
            instances.  Directed in general; symmetric under equal ranges.
    """

    positions: tuple[float, ...] | None
    ranges: tuple[float, ...] | None
    n_sensors: int
    adjacency: tuple[frozenset[int], ...] = field(repr=False)

    @classmethod
    def from_neighbor_sets(cls, n_sensors, neighbor_sets):
        """Build a Topology from an explicit symmetric neighbor table.

        Escape hatch for graphs that are not realizable as a line deployment
        (used by tests for hand-crafted counterexample networks).  The
        geometric fields are None and the range rule does not apply.

        Args:
            n_sensors: Number of sensors N; nodes are 0..N+1.
            neighbor_sets: Mapping or sequence giving each node's neighbors.
        """
        adj = []
        for i in range(n_sensors + 2):
            js = frozenset(neighbor_sets[i])
            if any(j < 0 or j > n_sensors + 1 or j == i for j in js):
                raise IndexOutOfRangeError(f"bad neighbor entry for node {i}")
            adj.append(js)
        for i, js in enumerate(adj):
            for j in js:
                if i not in adj[j]:
                    raise LengthMismatchError(
                        f"explicit adjacency must be symmetric: ({i},{j})"
                    )
        return cls(None, None, n_sensors, tuple(adj))

    def sensors(self):
        """All sensor indices 1..N."""
        return range(1, self.n_sensors + 1)


def build_topology(positions, ranges) -> Topology:
    """Construct the graph induced by node positions and transmission radii.

    An edge (i, j) exists iff |positions[i] - positions[j]| <= ranges[i]
    (closed ball, so a node exactly at the radius is reachable).

    Args:
        positions: Sorted coordinates, sinks first and last, length N+2.
        ranges: Per-node radii, same length, all > 0.

    Raises:
        LengthMismatchError, UnsortedPositionsError, NonPositiveRangeError.
    """
    positions = tuple(float(x) for x in positions)
    ranges = tuple(float(r) for r in ranges)
    if len(positions) != len(ranges):
        raise LengthMismatchError(
            f"{len(positions)} positions vs {len(ranges)} ranges"
        )
    if len(positions) < 3:
        raise LengthMismatchError("need the two sinks plus at least one sensor")
    if any(a > b for a, b in zip(positions, positions[1:])):
        raise UnsortedPositionsError("positions must be non-decreasing")
    if any(r <= 0.0 for r in ranges):
        raise NonPositiveRangeError("all transmission radii must be positive")

    n = len(positions) - 2
    adj = []
    for i in range(n + 2):
        reach = ranges[i]
        js = frozenset(
            j
            for j in range(n + 2)
            if j != i and abs(positions[i] - positions[j]) <= reach
        )
        adj.append(js)
    return Topology(positions, ranges, n, tuple(adj))


def _check_index(t: Topology, i: int) -> None:
    if not 0 <= i <= t.n_sensors + 1:
        raise IndexOutOfRangeError(f"node {i} outside 0..{t.n_sensors + 1}")


def neighbors(t: Topology, i: int) -> frozenset[int]:
    """Nodes within node i's own transmission radius."""
    _check_index(t, i)
    return t.adjacency[i]


def downstream(t: Topology, i: int) -> tuple[int, ...]:
    """Neighbors of i with larger index, sorted ascending."""
    _check_index(t, i)
    return tuple(sorted(j for j in t.adjacency[i] if j > i))


def _links(t: Topology, i: int):
    # Edges usable for connectivity: either endpoint reaches the other.
    return {j for j in range(t.n_sensors + 2) if j in t.adjacency[i] or i in t.adjacency[j]}


def is_connected_induced(t: Topology, active) -> bool:
    """Whether the graph induced by the active sensors plus both sinks is connected.

    Breadth-first search from the left sink over induced edges; True iff
    every active sensor and the right sink are reached.
    """
    active = set(active)
    for i in active:
        if not 1 <= i <= t.n_sensors:
            raise IndexOutOfRangeError(f"sensor {i} outside 1..{t.n_sensors}")
    nodes = active | {0, t.n_sensors + 1}
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in _links(t, u):
            if v in nodes and v not in seen:
                seen.add(v)
                queue.append(v)
    return seen == nodes


def min_connected_count(t: Topology, candidates) -> int | None:
    """Minimum number of candidate sensors on any left-to-right sink route.

    Routes move to downstream neighbors only (each hop within the
    transmitter's radius), which is exhaustive for line deployments.
    Returns None when the candidates cannot form any such route.
    """
    candidates = set(candidates)
    for i in candidates:
        if not 1 <= i <= t.n_sensors:
            raise IndexOutOfRangeError(f"sensor {i} outside 1..{t.n_sensors}")
    sink = t.n_sensors + 1
    dist = {0: 0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        if u == sink:
            return dist[sink] - 1
        for v in downstream(t, u):
            if (v == sink or v in candidates) and v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return None
