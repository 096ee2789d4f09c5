"""Energy-balancing activation scheduler.

Each timeslot activates the connected group of m = max(M_cs, M_c) candidate
sensors that maximizes the sum of normalized residual energies
p_i = E_i(t)/E_i, found by dynamic programming over downstream neighbors;
the lifetime loop repeats this until no feasible group remains.

All p_i arithmetic is exact: sums are compared as integers after scaling by
L = lcm(initial energies).  A compiled kernel handles the common case
(L below 96 bits); a pure-Python path with unbounded integers covers the
rest and any custom tie-break, with identical results.
"""

import os
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .errors import IndexOutOfRangeError, LengthMismatchError, WsnError
from .topology import Topology, is_connected_induced

if os.environ.get("LINEWSN_PURE"):
    _dpcore = None
else:
    try:
        from . import _dpcore
    except ImportError:  # pragma: no cover - exercised via LINEWSN_PURE=1
        _dpcore = None

if _dpcore is not None:
    import numpy as np

__all__ = [
    "EnergyState",
    "ActivationProfile",
    "Schedule",
    "dp_best_profile",
    "select_activation",
    "run_energy_balancing",
    "profile_value",
    "validate_schedule",
    "kernel_available",
]

# Weight-table bit budget under which the compiled kernel's 128-bit sums
# cannot overflow (weights <= L, route sums <= N*L).
_KERNEL_BITS = 96

# Cap on tie enumeration when a custom tie-break hook is supplied.
_MAX_TIED_ROUTES = 4096


def kernel_available() -> bool:
    """Whether the compiled scheduling kernel was built and imported."""
    return _dpcore is not None


@dataclass
class EnergyState:
    """Per-sensor initial and residual energies, in activation-slot units.

    Entry k of each list belongs to sensor k+1.  Residuals are integers;
    normalized residual energy is the exact rational residual/initial.
    """

    initial: list[int]
    residual: list[int]

    def __post_init__(self):
        if len(self.initial) != len(self.residual):
            raise LengthMismatchError("initial and residual lengths differ")
        for e, r in zip(self.initial, self.residual):
            if int(e) != e or int(r) != r:
                raise WsnError("energies must be integers")
            if e < 1:
                raise WsnError("initial energies must be >= 1")
            if not 0 <= r <= e:
                raise WsnError("residuals must satisfy 0 <= residual <= initial")

    @classmethod
    def fresh(cls, initial) -> "EnergyState":
        initial = [int(e) for e in initial]
        return cls(initial, list(initial))

    def normalized_residual(self, sensor: int) -> Fraction:
        """p_i = residual/initial for sensor i (1-based), as an exact rational."""
        if not 1 <= sensor <= len(self.initial):
            raise IndexOutOfRangeError(f"sensor {sensor}")
        return Fraction(self.residual[sensor - 1], self.initial[sensor - 1])

    def candidates(self) -> set[int]:
        """Sensors with at least one activation left."""
        return {i + 1 for i, r in enumerate(self.residual) if r >= 1}


@dataclass(frozen=True)
class ActivationProfile:
    """A connected sink-to-sink group of sensors, stored sorted ascending."""

    nodes: tuple[int, ...]

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.nodes, self.nodes[1:])):
            raise WsnError("profile nodes must be strictly increasing")

    def __len__(self):
        return len(self.nodes)

    def __iter__(self):
        return iter(self.nodes)


@dataclass(frozen=True)
class Schedule:
    """An ordered sequence of activation profiles; length = achieved lifetime."""

    slots: tuple[ActivationProfile, ...]

    @property
    def lifetime(self) -> int:
        return len(self.slots)

    def to_json_dict(self) -> dict:
        return {
            "lifetime": self.lifetime,
            "slots": [list(p.nodes) for p in self.slots],
        }


def profile_value(energy: EnergyState, profile: ActivationProfile) -> Fraction:
    """Sum of normalized residual energies over the profile, exact."""
    return sum(
        (energy.normalized_residual(i) for i in profile.nodes), Fraction(0)
    )


def validate_schedule(t: Topology, initial, m_cs: int, schedule: Schedule) -> None:
    """Raise WsnError unless the schedule satisfies every invariant.

    Checks the per-sensor energy budget, per-slot connectivity, and the
    per-slot cardinality requirement.
    """
    used = [0] * t.n_sensors
    for slot, profile in enumerate(schedule.slots):
        if len(profile) < m_cs:
            raise WsnError(f"slot {slot} activates {len(profile)} < {m_cs} sensors")
        if not is_connected_induced(t, profile.nodes):
            raise WsnError(f"slot {slot} profile is not connected")
        for i in profile.nodes:
            used[i - 1] += 1
    for i, (u, e) in enumerate(zip(used, initial)):
        if u > e:
            raise WsnError(f"sensor {i + 1} used {u} times with budget {e}")


class _Engine:
    """Per-instance precomputation for repeated slot decisions.

    Holds the downstream adjacency in CSR-like form, the lcm weight scale,
    and (when eligible) the numpy buffers for the compiled kernel.
    """

    def __init__(self, t: Topology, initial):
        n = t.n_sensors
        if len(initial) != n:
            raise LengthMismatchError(f"{len(initial)} energies for {n} sensors")
        self.n = n
        sink = n + 1
        # Downstream sensor neighbors per node 0..N (right sink excluded,
        # reachability of it kept as a flag), sorted for the lex tie-break.
        self.down = [
            sorted(j for j in t.adjacency[i] if i < j <= n) for i in range(n + 1)
        ]
        self.sink_ok = [sink in t.adjacency[i] for i in range(n + 1)]
        self.initial = [int(e) for e in initial]
        self.scale = lcm(*self.initial) if self.initial else 1
        self.q = [self.scale // e for e in self.initial]

        self.kernel = None
        kernel_ok = (
            _dpcore is not None
            and self.scale.bit_length() <= _KERNEL_BITS
            and (not self.initial or max(self.initial) < 2**63)
        )
        if kernel_ok:
            indptr = np.zeros(n + 2, dtype=np.int32)
            for i in range(n + 1):
                indptr[i + 1] = indptr[i] + len(self.down[i])
            indices = np.fromiter(
                (j for row in self.down for j in row), dtype=np.int32,
                count=int(indptr[n + 1]),
            )
            q_lo = np.zeros(n + 1, dtype=np.uint64)
            q_hi = np.zeros(n + 1, dtype=np.uint64)
            for i, qv in enumerate(self.q):
                hi, lo = divmod(qv, 1 << 64)
                q_lo[i + 1] = lo
                q_hi[i + 1] = hi
            self.kernel = {
                "indptr": indptr,
                "indices": indices,
                "sink_ok": np.array(self.sink_ok, dtype=np.uint8),
                "q_lo": q_lo,
                "q_hi": q_hi,
                "residual": np.zeros(n + 1, dtype=np.int64),
                "out": np.zeros(max(n, 1), dtype=np.int32),
            }

    # -- slot-level queries ------------------------------------------------

    def min_route_size(self, residual) -> int | None:
        """Minimum candidate-sensor count on any sink-to-sink route (M_c)."""
        if self.kernel is not None:
            buf = self.kernel["residual"]
            buf[1:] = residual
            mc = _dpcore.min_route_size(
                self.n, self.kernel["indptr"], self.kernel["indices"],
                self.kernel["sink_ok"], buf,
            )
            return None if mc < 0 else mc
        dist = [-1] * (self.n + 1)
        dist[0] = 0
        queue = deque([0])
        while queue:
            u = queue.popleft()
            if self.sink_ok[u]:
                return dist[u]
            for j in self.down[u]:
                if residual[j - 1] >= 1 and dist[j] < 0:
                    dist[j] = dist[u] + 1
                    queue.append(j)
        return None

    def best_route(self, residual, m: int) -> tuple[int, ...] | None:
        """Lexicographically smallest optimal m-sensor route, or None."""
        if self.kernel is not None:
            buf = self.kernel["residual"]
            buf[1:] = residual
            out = self.kernel["out"]
            count = _dpcore.dp_route(
                self.n, self.kernel["indptr"], self.kernel["indices"],
                self.kernel["sink_ok"], self.kernel["q_lo"], self.kernel["q_hi"],
                buf, m, out,
            )
            if count < 0:
                return None
            return tuple(int(v) for v in out[:count])
        return self._best_route_py(residual, m)

    def _weights(self, residual):
        # w[j] for node j (1..N); 0 marks a depleted sensor.
        w = [0] * (self.n + 1)
        for i in range(self.n):
            if residual[i] >= 1:
                w[i + 1] = residual[i] * self.q[i]
        return w

    def _dp_tables(self, residual, m):
        w = self._weights(residual)
        g = [[None] * (m + 1) for _ in range(self.n + 1)]
        choice = [[0] * (m + 1) for _ in range(self.n + 1)]
        for i in range(self.n, -1, -1):
            gi = g[i]
            if self.sink_ok[i]:
                gi[0] = 0
            for k in range(1, m + 1):
                best = None
                arg = 0
                for j in self.down[i]:
                    if w[j] > 0 and g[j][k - 1] is not None:
                        v = g[j][k - 1] + w[j]
                        if best is None or v > best:
                            best = v
                            arg = j
                if best is not None:
                    gi[k] = best
                    choice[i][k] = arg
        return w, g, choice

    def _best_route_py(self, residual, m):
        _, g, choice = self._dp_tables(residual, m)
        if g[0][m] is None:
            return None
        route = []
        i, k = 0, m
        while k > 0:
            j = choice[i][k]
            route.append(j)
            i, k = j, k - 1
        return tuple(route)

    def optimal_routes(self, residual, m) -> list[tuple[int, ...]]:
        """All optimal m-sensor routes (for tie-break hooks; capped)."""
        w, g, _ = self._dp_tables(residual, m)
        if g[0][m] is None:
            return []
        routes = []
        stack = [(0, m, ())]
        while stack:
            i, k, prefix = stack.pop()
            if k == 0:
                routes.append(prefix)
                if len(routes) > _MAX_TIED_ROUTES:
                    raise WsnError("too many tied optimal profiles to enumerate")
                continue
            for j in self.down[i]:
                if w[j] > 0 and g[j][k - 1] is not None:
                    if g[j][k - 1] + w[j] == g[i][k]:
                        stack.append((j, k - 1, prefix + (j,)))
        return sorted(routes)


def _route_for(engine: _Engine, residual, m: int, tie_break):
    if m > engine.n:  # a route visits each sensor at most once
        return None
    if callable(tie_break):
        routes = engine.optimal_routes(residual, m)
        if not routes:
            return None
        profiles = [ActivationProfile(r) for r in routes]
        chosen = tie_break(profiles)
        if chosen not in profiles:
            raise WsnError("tie-break hook returned a non-optimal profile")
        return chosen.nodes
    if tie_break != "lex":
        raise WsnError(f"unknown tie_break {tie_break!r}")
    return engine.best_route(residual, m)


def dp_best_profile(
    t: Topology, energy: EnergyState, m: int, tie_break="lex"
) -> ActivationProfile | None:
    """Best connected group of exactly m candidate sensors, or None.

    Maximizes the sum of normalized residual energies over all
    sink-to-sink routes of exactly m candidate sensors (residual >= 1).
    Ties resolve to the lexicographically smallest optimum unless a
    callable tie_break picks among all optima.
    """
    if m < 1:
        raise WsnError("m must be >= 1")
    engine = _Engine(t, energy.initial)
    route = _route_for(engine, energy.residual, m, tie_break)
    return None if route is None else ActivationProfile(route)


def select_activation(
    t: Topology, energy: EnergyState, m_cs: int, tie_break="lex"
) -> ActivationProfile | None:
    """One timeslot's activation choice, or None when the network is expired.

    Computes M_c over the candidate sensors, then runs the DP with
    m = max(M_c, M_cs).  None signals that no feasible group exists.
    """
    if m_cs < 1:
        raise WsnError("m_cs must be >= 1")
    engine = _Engine(t, energy.initial)
    return _select(engine, energy.residual, m_cs, tie_break)


def _select(engine: _Engine, residual, m_cs: int, tie_break):
    mc = engine.min_route_size(residual)
    if mc is None:
        return None
    m = max(m_cs, mc)
    if sum(1 for r in residual if r >= 1) < m:
        return None
    route = _route_for(engine, residual, m, tie_break)
    return None if route is None else ActivationProfile(route)


def run_energy_balancing(
    t: Topology, initial, m_cs: int, tie_break="lex"
) -> tuple[int, Schedule]:
    """Repeated energy-balanced activation until the network expires.

    Each emitted slot decrements the residual energy of its sensors by one.
    Returns the achieved lifetime T_G and the schedule itself; T_G = 0 when
    the instance admits no feasible slot at all.
    """
    if m_cs < 1:
        raise WsnError("m_cs must be >= 1")
    state = EnergyState.fresh(initial)
    engine = _Engine(t, state.initial)
    residual = state.residual
    slots = []
    while True:
        profile = _select(engine, residual, m_cs, tie_break)
        if profile is None:
            break
        for i in profile.nodes:
            residual[i - 1] -= 1
        slots.append(profile)
    return len(slots), Schedule(tuple(slots))
