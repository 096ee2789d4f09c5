#!/usr/bin/env python3
"""Benchmark the compiled scheduling kernel against the pure-Python path.

Runs the full lifetime loop on generated instances with both backends and
reports wall-clock time, slots per second, and the speedup.  Schedules must
be identical; the kernel only changes arithmetic width, not decisions.
"""

import argparse
import time

import linewsn.balancer as balancer
from linewsn.balancer import run_energy_balancing
from linewsn.harness import ExperimentConfig, generate_instance


def time_run(topology, energies, m_cs):
    start = time.perf_counter()
    lifetime, schedule = run_energy_balancing(topology, energies, m_cs)
    return lifetime, schedule, time.perf_counter() - start


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=40, help="sensor count")
    parser.add_argument("--range", type=float, default=0.15, dest="radius")
    parser.add_argument("--m-cs", type=int, default=5)
    parser.add_argument("--eta", type=int, default=20, help="energy multiplier")
    parser.add_argument("--trials", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if balancer._dpcore is None:
        parser.error("compiled kernel not built; run pip install -e . first")

    cfg = ExperimentConfig(
        n_sensors=args.n, range_over_length=args.radius, m_cs=args.m_cs,
        trials=args.trials, seed=args.seed,
    )
    kernel_module = balancer._dpcore
    print(f"{'trial':>5} {'slots':>7} {'compiled':>10} {'pure':>10} {'speedup':>8}")
    total_c = total_p = 0.0
    for trial in range(args.trials):
        instance = generate_instance(cfg, trial)
        energies = [args.eta * e for e in instance.energies]

        lifetime_c, schedule_c, dt_c = time_run(
            instance.topology, energies, instance.m_cs
        )
        balancer._dpcore = None  # force the pure path for the comparison run
        try:
            lifetime_p, schedule_p, dt_p = time_run(
                instance.topology, energies, instance.m_cs
            )
        finally:
            balancer._dpcore = kernel_module

        assert lifetime_c == lifetime_p and schedule_c == schedule_p
        total_c += dt_c
        total_p += dt_p
        print(
            f"{trial:>5} {lifetime_c:>7} {dt_c:>9.3f}s {dt_p:>9.3f}s "
            f"{dt_p / dt_c if dt_c > 0 else float('inf'):>7.1f}x"
        )
    print(
        f"{'total':>5} {'':>7} {total_c:>9.3f}s {total_p:>9.3f}s "
        f"{total_p / total_c if total_c > 0 else float('inf'):>7.1f}x"
    )


if __name__ == "__main__":
    main()
