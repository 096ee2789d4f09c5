"""Lifetime-maximizing sensor activation for linear two-sink WSNs.

Submodules:
    topology   - graph construction and connectivity queries
    balancer   - the energy-balancing scheduler (approximate lifetime T_G)
    exact      - profile enumeration and exact lifetime via branch-and-bound
    flowbound  - LP-relaxation lifetime upper bound and schedule certification
    harness    - instance generation, experiment suites, CSV output
"""

from .balancer import kernel_available

__version__ = "0.1.0"


def backend() -> str:
    """Name of the scheduling kernel in use: 'compiled' or 'pure'."""
    return "compiled" if kernel_available() else "pure"
