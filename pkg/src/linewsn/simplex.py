"""Self-contained phase-1 simplex feasibility test on a dense tableau.

Decides whether {x >= 0, A_eq x = b_eq, A_ge x >= b_ge, x <= upper} is
non-empty by minimizing the sum of artificial variables.  Pricing is
Dantzig's rule for speed; after a stall (no objective progress) it switches
permanently to Bland's rule, which guarantees termination.
"""

import numpy as np

from .errors import NumericalFailureError

__all__ = ["phase1_feasible"]

TOLERANCE = 1e-7
_STALL_EPS = 1e-12


def phase1_feasible(a_eq, b_eq, a_ge, b_ge, upper, tol: float = TOLERANCE) -> bool:
    """True iff the linear system admits a feasible point.

    Args:
        a_eq, b_eq: Equality constraints (arrays, possibly empty).
        a_ge, b_ge: Greater-or-equal constraints.
        upper: Per-variable upper bounds; np.inf entries are unbounded.
        tol: Absolute feasibility tolerance on the phase-1 objective.

    Raises:
        NumericalFailureError: iteration cap exceeded (defensive; the Bland
            fallback makes cycling impossible in exact arithmetic).
    """
    a_eq = np.atleast_2d(np.asarray(a_eq, dtype=float))
    a_ge = np.atleast_2d(np.asarray(a_ge, dtype=float))
    b_eq = np.asarray(b_eq, dtype=float).ravel()
    b_ge = np.asarray(b_ge, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    n = len(upper)
    if a_eq.size == 0:
        a_eq = np.zeros((0, n))
    if a_ge.size == 0:
        a_ge = np.zeros((0, n))

    bounded = [j for j in range(n) if np.isfinite(upper[j])]
    if any(upper[j] < 0 for j in bounded):
        return False

    me, mg, mu = a_eq.shape[0], a_ge.shape[0], len(bounded)
    m = me + mg + mu
    n_slack = mg + mu
    # Artificials are allocated rows that lack an initial identity column;
    # worst case one per eq/ge row.
    width = n + n_slack + me + mg + 1
    T = np.zeros((m, width))
    cost = np.zeros(width - 1)
    basis = np.full(m, -1, dtype=int)
    next_col = n + n_slack

    def add_artificial(row):
        nonlocal next_col
        T[row, next_col] = 1.0
        cost[next_col] = 1.0
        basis[row] = next_col
        next_col += 1

    row = 0
    for i in range(me):
        coeff, rhs = a_eq[i], b_eq[i]
        if rhs < 0:
            coeff, rhs = -coeff, -rhs
        T[row, :n] = coeff
        T[row, -1] = rhs
        add_artificial(row)
        row += 1
    for i in range(mg):
        coeff, rhs = a_ge[i], b_ge[i]
        s_col = n + i
        if rhs < 0:
            # -a x + s = -b with positive rhs: the surplus is initial basic.
            T[row, :n] = -coeff
            T[row, s_col] = 1.0
            T[row, -1] = -rhs
            basis[row] = s_col
        else:
            T[row, :n] = coeff
            T[row, s_col] = -1.0
            T[row, -1] = rhs
            add_artificial(row)
        row += 1
    for pos, j in enumerate(bounded):
        s_col = n + mg + pos
        T[row, j] = 1.0
        T[row, s_col] = 1.0
        T[row, -1] = upper[j]
        basis[row] = s_col
        row += 1

    ncols = next_col
    T = T[:, list(range(ncols)) + [width - 1]]
    cost = cost[:ncols]

    max_iters = 2000 + 50 * (m + ncols)
    stall_limit = 2 * m + 20
    bland = False
    stall = 0
    prev_obj = np.inf
    for _ in range(max_iters):
        reduced = cost - cost[basis] @ T[:, :ncols]
        if bland:
            eligible = np.nonzero(reduced < -tol)[0]
            if eligible.size == 0:
                break
            enter = int(eligible[0])
        else:
            enter = int(np.argmin(reduced))
            if reduced[enter] >= -tol:
                break
        col = T[:, enter]
        mask = col > tol
        if not mask.any():
            raise NumericalFailureError("phase-1 LP reports an unbounded direction")
        ratios = np.where(mask, T[:, -1] / np.where(mask, col, 1.0), np.inf)
        best = ratios.min()
        ties = np.nonzero(ratios <= best + _STALL_EPS)[0]
        leave = int(ties[np.argmin(basis[ties])])
        pivot = T[leave, enter]
        T[leave] /= pivot
        rows = np.arange(m) != leave
        T[rows] -= np.outer(T[rows, enter], T[leave])
        basis[leave] = enter

        obj = float(cost[basis] @ T[:, -1])
        if obj < prev_obj - _STALL_EPS:
            stall = 0
        else:
            stall += 1
            if stall > stall_limit:
                bland = True
        prev_obj = obj
    else:
        raise NumericalFailureError("phase-1 simplex exceeded its iteration cap")

    return float(cost[basis] @ T[:, -1]) <= tol
