"""Command-line interface: solve one instance, or run experiment suites."""

import argparse
import dataclasses
import json
import sys

from .balancer import run_energy_balancing
from .errors import RejectionExhaustedError, TooLargeError, WsnError
from .flowbound import certify_schedule, lifetime_upper_bound
from .harness import (
    ExperimentConfig,
    exact_lifetime,
    load_instance,
    run_gap_experiment,
    run_range_sweep,
    run_scaling_experiment,
)

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_GUARD = 2


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="linewsn",
        description="Lifetime scheduling for linear two-sink sensor networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="schedule one instance file")
    solve.add_argument("instance", help="instance JSON (positions/ranges/energies/m_cs)")
    solve.add_argument("--exact", action="store_true", help="also compute T_max")
    solve.add_argument("--bound", action="store_true", help="also compute the flow upper bound")
    solve.add_argument("--certify", action="store_true", help="certify the schedule")
    solve.add_argument("--budget", type=float, default=60.0, help="exact solver seconds")
    solve.add_argument("--out", default=None, help="write JSON here instead of stdout")

    for name, help_text in (
        ("gap", "T_G vs T_max gap histogram"),
        ("scale", "lifetime ratios under energy multipliers"),
        ("sweep", "lifetime vs transmission range"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="experiment config JSON")
        cmd.add_argument("--out", default=None, help="output directory for CSVs")
        cmd.add_argument("--seed", type=int, default=None, help="override config seed")
    return parser


def _load_config(path, seed):
    with open(path) as fh:
        data = json.load(fh)
    cfg = ExperimentConfig.from_dict(data)
    if seed is not None:
        cfg = dataclasses.replace(cfg, seed=seed)
    return cfg


def _cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    t_g, schedule = run_energy_balancing(
        instance.topology, list(instance.energies), instance.m_cs
    )
    result = schedule.to_json_dict()
    if args.exact:
        t_max, _, _ = exact_lifetime(instance, args.budget)
        if t_max is None:
            raise TimeoutError("exact solver budget exhausted")
        result["t_max"] = t_max
    if args.bound:
        result["t_bar_f"] = lifetime_upper_bound(
            instance.topology, list(instance.energies), instance.m_cs,
            lower_hint=t_g,
        )
    if args.certify:
        cert = certify_schedule(
            instance.topology, list(instance.energies), instance.m_cs, schedule
        )
        result["certificate"] = {
            "status": cert.status,
            "improved": None if cert.improved is None else cert.improved.to_json_dict(),
        }
    text = json.dumps(result, indent=2) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_experiment(args) -> int:
    cfg = _load_config(args.config, args.seed)
    if args.command == "gap":
        rows, histogram = run_gap_experiment(cfg, out_dir=args.out)
        summary = {"rows": len(rows), "histogram": {str(k): v for k, v in sorted(histogram.items())}}
    elif args.command == "scale":
        rows = run_scaling_experiment(cfg, out_dir=args.out)
        summary = {"rows": len(rows)}
    else:
        rows = run_range_sweep(cfg, out_dir=args.out)
        summary = {"rows": len(rows)}
    sys.stdout.write(json.dumps(summary) + "\n")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        return _cmd_experiment(args)
    except (TooLargeError, RejectionExhaustedError, TimeoutError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (WsnError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


if __name__ == "__main__":
    sys.exit(main())
