"""Pure-Python (numpy) pivoting kernel of the bounded revised simplex.

Mirrors ``_simplex_kernel.pyx`` operation for operation; selected at import
time when the compiled module is unavailable.
"""
import numpy as np

BASIC, AT_LOWER, AT_UPPER, FREE = 0, 1, 2, 3
OPTIMAL, UNBOUNDED, ITER_LIMIT, REFACTOR = 0, 1, 2, 3


def run_phase(T, cost, lo, up, x, basis, status, Binv, tol, max_iter, refactor_every):
    """Pivot with Bland's rule until optimal, unbounded, or a budget is hit.

    All arrays are updated in place.  Returns ``(outcome, pivots)``.
    """
    m, ntot = T.shape
    pivots = 0
    ptol = 1e-9
    while True:
        if pivots >= max_iter:
            return ITER_LIMIT, pivots
        if pivots >= refactor_every:
            return REFACTOR, pivots

        y = cost[basis] @ Binv
        d = cost - y @ T
        can_up = ((status == AT_LOWER) | (status == FREE)) & (d < -tol) & (lo < up)
        can_down = ((status == AT_UPPER) | (status == FREE)) & (d > tol) & (lo < up)
        eligible = np.flatnonzero(can_up | can_down)
        if eligible.size == 0:
            return OPTIMAL, pivots
        q = eligible[0]
        direction = 1.0 if can_up[q] else -1.0

        alpha = Binv @ T[:, q]
        step = direction * alpha
        xb = x[basis]
        lb = lo[basis]
        ub = up[basis]
        theta = np.full(m, np.inf)
        dec = step > ptol
        inc = step < -ptol
        lim = dec & np.isfinite(lb)
        theta[lim] = np.maximum(xb[lim] - lb[lim], 0.0) / step[lim]
        lim = inc & np.isfinite(ub)
        theta[lim] = np.maximum(ub[lim] - xb[lim], 0.0) / -step[lim]

        flip = up[q] - lo[q]
        best = np.min(theta) if m else np.inf
        if not np.isfinite(best) and not np.isfinite(flip):
            return UNBOUNDED, pivots

        if flip <= best:
            x[q] += direction * flip
            x[basis] = xb - flip * step
            status[q] = AT_UPPER if direction > 0 else AT_LOWER
            pivots += 1
            continue

        # Bland: among tied ratios, the basic variable with the smallest index
        ties = np.flatnonzero(theta <= best)
        r = ties[np.argmin(basis[ties])]
        x[q] += direction * best
        x[basis] = xb - best * step
        leaving = basis[r]
        if step[r] > 0:
            x[leaving] = lo[leaving]
            status[leaving] = AT_LOWER
        else:
            x[leaving] = up[leaving]
            status[leaving] = AT_UPPER
        basis[r] = q
        status[q] = BASIC

        piv = alpha[r]
        Binv[r, :] /= piv
        col = alpha.copy()
        col[r] = 0.0
        Binv -= np.outer(col, Binv[r, :])
        pivots += 1
