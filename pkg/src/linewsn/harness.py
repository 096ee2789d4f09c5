"""Instance generation, experiment suites, and machine-readable outputs.

Instances are drawn from counter-based Philox streams keyed by
(seed, trial, attempt), so every trial is reproducible and independent and
rejection resampling advances only the attempt index.  Experiments emit
CSV rows with fixed headers plus a JSON metadata sidecar echoing the
configuration.
"""

import csv
import dataclasses
import json
import time
from dataclasses import dataclass

import numpy as np

from .balancer import run_energy_balancing
from .errors import RejectionExhaustedError, WsnError
from .exact import MdkSolution, enumerate_profiles, solve_mdk
from .flowbound import lifetime_upper_bound
from .topology import Topology, build_topology, is_connected_induced, min_connected_count

__all__ = [
    "Instance",
    "ExperimentConfig",
    "load_instance",
    "save_instance",
    "generate_instance",
    "all_active_baseline",
    "exact_lifetime",
    "run_gap_experiment",
    "run_scaling_experiment",
    "run_range_sweep",
    "write_csv",
]

MAX_GENERATION_ATTEMPTS = 1000

GAP_HEADER = ["trial", "n", "m_cs", "t_g", "t_max", "gap"]
SCALE_HEADER = ["trial", "eta", "t_g", "t_bar_f", "ratio"]
SWEEP_HEADER = ["range", "mean_t_g", "mean_t_bar_f", "mean_baseline"]


@dataclass(frozen=True)
class Instance:
    """One concrete problem: topology, per-sensor energies, cardinality floor."""

    topology: Topology
    energies: tuple[int, ...]
    m_cs: int


def load_instance(path) -> Instance:
    """Read an instance JSON file: positions, ranges, energies, m_cs."""
    with open(path) as fh:
        data = json.load(fh)
    try:
        positions = data["positions"]
        ranges = data["ranges"]
        energies = [int(e) for e in data["energies"]]
        m_cs = int(data["m_cs"])
    except (KeyError, TypeError, ValueError) as exc:
        raise WsnError(f"malformed instance file {path}: {exc}") from exc
    t = build_topology(positions, ranges)
    if len(energies) != t.n_sensors:
        raise WsnError(
            f"{len(energies)} energies for {t.n_sensors} sensors in {path}"
        )
    if m_cs < 1:
        raise WsnError("m_cs must be >= 1")
    return Instance(t, tuple(energies), m_cs)


def save_instance(path, instance: Instance) -> None:
    t = instance.topology
    if t.positions is None:
        raise WsnError("cannot serialize an explicit-adjacency topology")
    with open(path, "w") as fh:
        json.dump(
            {
                "positions": list(t.positions),
                "ranges": list(t.ranges),
                "energies": list(instance.energies),
                "m_cs": instance.m_cs,
            },
            fh,
        )
        fh.write("\n")


@dataclass
class ExperimentConfig:
    """Knobs for one experiment run.

    n_sensors, m_cs and range_over_length may be scalars or inclusive
    (low, high) pairs drawn per trial.
    """

    n_sensors: int | tuple[int, int]
    range_over_length: float | tuple[float, float]
    m_cs: int | tuple[int, int]
    energy_mean: float = 50.0
    energy_stddev: float = 5.0
    eta_list: tuple[int, ...] = (1, 2, 10, 20)
    trials: int = 10
    seed: int = 0
    exact_budget: float = 60.0
    exact_guard: int = 20
    unequal_ranges: bool = False
    sweep_ranges: tuple[float, ...] = (0.1, 0.15, 0.2, 0.25, 0.3, 0.4)

    def __post_init__(self):
        lo_r, hi_r = _bounds(self.range_over_length)
        if not (0.0 < lo_r <= hi_r <= 1.0):
            raise WsnError("range_over_length must lie in (0, 1]")
        if self.trials < 1:
            raise WsnError("trials must be >= 1")
        if self.energy_mean <= 0:
            raise WsnError("energy_mean must be positive")
        lo_m, _ = _bounds(self.m_cs)
        if lo_m < 1:
            raise WsnError("m_cs must be >= 1")
        lo_n, _ = _bounds(self.n_sensors)
        if lo_n < 1:
            raise WsnError("n_sensors must be >= 1")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise WsnError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        for key in ("n_sensors", "m_cs", "range_over_length"):
            if isinstance(data.get(key), list):
                data[key] = tuple(data[key])
        for key in ("eta_list", "sweep_ranges"):
            if isinstance(data.get(key), list):
                data[key] = tuple(data[key])
        try:
            return cls(**data)
        except TypeError as exc:
            raise WsnError(f"bad experiment config: {exc}") from exc

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        for key, value in out.items():
            if isinstance(value, tuple):
                out[key] = list(value)
        return out


def _bounds(value):
    if isinstance(value, (tuple, list)):
        lo, hi = value
        return lo, hi
    return value, value


def _trial_rng(seed: int, trial: int, attempt: int) -> np.random.Generator:
    # Philox is counter-based: distinct (trial, attempt) pairs select
    # disjoint streams under the same key, which makes trials reproducible
    # and independent of each other and of rejection resampling.
    return np.random.Generator(
        np.random.Philox(key=seed, counter=[0, 0, attempt, trial])
    )


def generate_instance(cfg: ExperimentConfig, trial: int) -> Instance:
    """Draw one connected instance for the given trial, deterministically.

    Sensors are placed uniformly in (0, 1) between sinks at 0 and 1;
    energies are Gaussian, rounded, and clamped to >= 1.  Instances whose
    full sensor set cannot connect the sinks are rejected and redrawn from
    the next attempt substream.

    Raises:
        RejectionExhaustedError: after MAX_GENERATION_ATTEMPTS rejections.
    """
    for attempt in range(MAX_GENERATION_ATTEMPTS):
        rng = _trial_rng(cfg.seed, trial, attempt)
        lo_n, hi_n = _bounds(cfg.n_sensors)
        n = int(rng.integers(lo_n, hi_n + 1))
        lo_m, hi_m = _bounds(cfg.m_cs)
        m_cs = int(rng.integers(lo_m, hi_m + 1))
        lo_r, hi_r = _bounds(cfg.range_over_length)
        base_range = float(rng.uniform(lo_r, hi_r)) if lo_r < hi_r else lo_r

        positions = [0.0] + sorted(rng.uniform(0.0, 1.0, n).tolist()) + [1.0]
        energies = np.maximum(
            1, np.rint(rng.normal(cfg.energy_mean, cfg.energy_stddev, n))
        ).astype(int)
        if cfg.unequal_ranges:
            ranges = (rng.uniform(0.8, 1.2, n + 2) * base_range).tolist()
        else:
            ranges = [base_range] * (n + 2)

        t = build_topology(positions, ranges)
        if min_connected_count(t, set(t.sensors())) is not None:
            return Instance(t, tuple(int(e) for e in energies), m_cs)
    raise RejectionExhaustedError(
        f"no connected deployment in {MAX_GENERATION_ATTEMPTS} attempts "
        f"(trial {trial})"
    )


def all_active_baseline(instance: Instance) -> int:
    """Lifetime when every sensor must be active every slot.

    Mirrors gathering schemes with no duty cycling: the network lives until
    its first sensor depletes, so the lifetime is min(E) when the full
    deployment is connected and large enough, else 0.
    """
    t = instance.topology
    if t.n_sensors < instance.m_cs:
        return 0
    if not is_connected_induced(t, set(t.sensors())):
        return 0
    return int(min(instance.energies))


def exact_lifetime(instance: Instance, time_budget: float, exact_guard: int = 20):
    """T_max via enumeration + branch-and-bound, seeded by the balancer run.

    Returns (t_max, t_g, schedule); t_max is None when the solver timed out.
    """
    t_g, schedule = run_energy_balancing(
        instance.topology, list(instance.energies), instance.m_cs
    )
    deadline = time.monotonic() + time_budget
    try:
        catalog = enumerate_profiles(instance.topology, instance.m_cs, exact_guard)
        index = {p.nodes: idx for idx, p in enumerate(catalog.profiles)}
        counts = [0] * len(catalog.profiles)
        for profile in schedule.slots:
            counts[index[profile.nodes]] += 1
        incumbent = MdkSolution(tuple(counts), t_g) if catalog.profiles else None
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            raise TimeoutError("exact budget exhausted during enumeration")
        sol = solve_mdk(catalog, list(instance.energies), remaining, incumbent)
        return sol.lifetime, t_g, schedule
    except TimeoutError:
        return None, t_g, schedule


def run_gap_experiment(cfg: ExperimentConfig, out_dir=None):
    """Per-trial T_G vs T_max comparison; returns (rows, gap histogram).

    Trials whose exact solve exceeds the budget are recorded with blank
    t_max/gap and excluded from the histogram.
    """
    rows = []
    histogram: dict[int, int] = {}
    for trial in range(cfg.trials):
        instance = generate_instance(cfg, trial)
        t_max, t_g, _ = exact_lifetime(instance, cfg.exact_budget, cfg.exact_guard)
        gap = None if t_max is None else t_max - t_g
        if gap is not None:
            histogram[gap] = histogram.get(gap, 0) + 1
        rows.append(
            {
                "trial": trial,
                "n": instance.topology.n_sensors,
                "m_cs": instance.m_cs,
                "t_g": t_g,
                "t_max": "" if t_max is None else t_max,
                "gap": "" if gap is None else gap,
            }
        )
    if out_dir is not None:
        write_csv(out_dir, "gap.csv", GAP_HEADER, rows)
        _write_meta(out_dir, "gap_meta.json", cfg)
    return rows, histogram


def run_scaling_experiment(cfg: ExperimentConfig, out_dir=None, tie_break="lex"):
    """T_G(eta) against the flow upper bound for each energy multiplier eta."""
    rows = []
    for trial in range(cfg.trials):
        instance = generate_instance(cfg, trial)
        for eta in cfg.eta_list:
            energies = [int(eta) * e for e in instance.energies]
            t_g, _ = run_energy_balancing(
                instance.topology, energies, instance.m_cs, tie_break=tie_break
            )
            t_bar = lifetime_upper_bound(
                instance.topology, energies, instance.m_cs, lower_hint=t_g
            )
            rows.append(
                {
                    "trial": trial,
                    "eta": eta,
                    "t_g": t_g,
                    "t_bar_f": t_bar,
                    "ratio": f"{t_g / t_bar:.6f}" if t_bar > 0 else "",
                }
            )
    if out_dir is not None:
        write_csv(out_dir, "scale.csv", SCALE_HEADER, rows)
        _write_meta(out_dir, "scale_meta.json", cfg)
    return rows


def run_range_sweep(cfg: ExperimentConfig, ranges=None, out_dir=None):
    """Mean lifetimes per transmission range, with the all-active baseline.

    With unequal per-node ranges the flow value is reported but flagged in
    the metadata as not certified to upper-bound the lifetime.
    """
    ranges = cfg.sweep_ranges if ranges is None else tuple(ranges)
    rows = []
    for r in ranges:
        point_cfg = dataclasses.replace(cfg, range_over_length=float(r))
        t_gs, t_bars, baselines = [], [], []
        for trial in range(cfg.trials):
            instance = generate_instance(point_cfg, trial)
            t_g, _ = run_energy_balancing(
                instance.topology, list(instance.energies), instance.m_cs
            )
            t_bar = lifetime_upper_bound(
                instance.topology, list(instance.energies), instance.m_cs,
                lower_hint=t_g,
            )
            t_gs.append(t_g)
            t_bars.append(t_bar)
            baselines.append(all_active_baseline(instance))
        rows.append(
            {
                "range": f"{float(r):.6f}",
                "mean_t_g": f"{np.mean(t_gs):.6f}",
                "mean_t_bar_f": f"{np.mean(t_bars):.6f}",
                "mean_baseline": f"{np.mean(baselines):.6f}",
            }
        )
    if out_dir is not None:
        write_csv(out_dir, "sweep.csv", SWEEP_HEADER, rows)
        _write_meta(
            out_dir,
            "sweep_meta.json",
            cfg,
            extra={"upper_bound_certified": not cfg.unequal_ranges},
        )
    return rows


def write_csv(out_dir, name, header, rows) -> str:
    import os

    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=header)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in header})
    return path


def _write_meta(out_dir, name, cfg, extra=None):
    import os

    payload = {"config": cfg.to_dict()}
    if extra:
        payload.update(extra)
    with open(os.path.join(out_dir, name), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
