"""Dense bounded-variable revised simplex with Bland's rule.

Solves ``min c@x  s.t.  A@x <= b,  lo <= x <= up`` (infinite bounds allowed)
with a two-phase method: rows whose slack would start negative get an
artificial column, phase one drives the artificials to zero, and phase two
optimizes the true objective from that basis.  No big-M constant.
"""
from __future__ import annotations

import numpy as np

from . import _kernel
from ._simplex_kernel_py import AT_LOWER, AT_UPPER, BASIC, FREE, ITER_LIMIT, OPTIMAL, REFACTOR, UNBOUNDED

REFACTOR_EVERY = 64


class SimplexResult:
    __slots__ = ("status", "x", "objective", "pivots")

    def __init__(self, status, x, objective, pivots):
        self.status = status
        self.x = x
        self.objective = objective
        self.pivots = pivots


def _refactor(T, b, x, basis, Binv):
    B = T[:, basis]
    Binv[:] = np.linalg.inv(B)
    nonbasic = np.ones(T.shape[1], dtype=bool)
    nonbasic[basis] = False
    rhs = b - T[:, nonbasic] @ x[nonbasic]
    x[basis] = Binv @ rhs


def _run(T, b, cost, lo, up, x, basis, status, Binv, tol, budget, run_phase):
    used = 0
    while True:
        outcome, pivots = run_phase(
            T, cost, lo, up, x, basis, status, Binv, tol, budget - used, REFACTOR_EVERY
        )
        used += pivots
        _refactor(T, b, x, basis, Binv)
        if outcome != REFACTOR:
            return outcome, used


def revised_simplex(c, A, b, lo=None, up=None, tol=1e-7, max_iter=None, run_phase=None) -> SimplexResult:
    """Solve a small dense LP; status is one of ``optimal``, ``unbounded``,
    ``infeasible``, ``iter_limit``."""
    run_phase = run_phase or _kernel.run_phase
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    c = np.asarray(c, dtype=float).reshape(-1)
    m, n = A.shape if A.size else (b.shape[0], c.shape[0])
    A = A.reshape(m, n)
    lo = np.full(n, -np.inf) if lo is None else np.asarray(lo, dtype=float)
    up = np.full(n, np.inf) if up is None else np.asarray(up, dtype=float)
    if np.any(lo > up):
        return SimplexResult("infeasible", None, None, 0)
    if max_iter is None:
        max_iter = 10_000 + 50 * (n + m)

    # starting point for structural columns: a finite bound, else 0
    x0 = np.where(np.isfinite(lo), lo, np.where(np.isfinite(up), up, 0.0))
    st0 = np.where(np.isfinite(lo), AT_LOWER, np.where(np.isfinite(up), AT_UPPER, FREE))
    resid = b - A @ x0
    art_rows = np.flatnonzero(resid < 0)
    na = art_rows.size

    ntot = n + m + na
    T = np.zeros((m, ntot))
    T[:, :n] = A
    T[:, n : n + m] = np.eye(m)
    T[art_rows, n + m + np.arange(na)] = -1.0
    lo_f = np.concatenate([lo, np.zeros(m + na)])
    up_f = np.concatenate([up, np.full(m + na, np.inf)])
    x = np.concatenate([x0, np.zeros(m + na)])
    status = np.concatenate([st0, np.full(m + na, AT_LOWER)]).astype(np.intp)
    basis = np.arange(n, n + m, dtype=np.intp)
    basis[art_rows] = n + m + np.arange(na)
    status[basis] = BASIC
    Binv = np.zeros((m, m))
    _refactor(T, b, x, basis, Binv)

    total = 0
    if na:
        cost1 = np.zeros(ntot)
        cost1[n + m :] = 1.0
        outcome, used = _run(T, b, cost1, lo_f, up_f, x, basis, status, Binv, tol, max_iter, run_phase)
        total += used
        if outcome == ITER_LIMIT:
            return SimplexResult("iter_limit", None, None, total)
        infeas = float(np.sum(x[n + m :]))
        if infeas > tol * max(1.0, float(np.max(np.abs(b)))):
            return SimplexResult("infeasible", None, None, total)
        # artificials are pinned to zero for phase two
        up_f[n + m :] = 0.0
        x[n + m :] = np.where(status[n + m :] == BASIC, x[n + m :], 0.0)

    cost2 = np.zeros(ntot)
    cost2[:n] = c
    outcome, used = _run(T, b, cost2, lo_f, up_f, x, basis, status, Binv, tol, max_iter - total, run_phase)
    total += used
    if outcome == ITER_LIMIT:
        return SimplexResult("iter_limit", None, None, total)
    if outcome == UNBOUNDED:
        return SimplexResult("unbounded", None, None, total)
    assert outcome == OPTIMAL
    xs = x[:n].copy()
    return SimplexResult("optimal", xs, float(c @ xs), total)
