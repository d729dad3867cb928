"""LP solving front end.

Backends:

``simplex``
    The in-repo bounded revised simplex (Bland's rule, dense).  Exact
    vertex solutions; meant for small problems.
``ipm``
    HiGHS interior point without crossover.  Returns a point near the
    centre of the optimal face, which for the degenerate training LPs
    places box faces away from the training points.
``highs``
    HiGHS dual simplex (vertex solutions) for large problems.
``auto``
    ``simplex`` when the dense working set is small, otherwise ``ipm``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from .program import LinearProgram
from .simplex import revised_simplex

#: dense simplex is used by ``auto`` while rows * (rows + vars) stays below this
AUTO_DENSE_LIMIT = 150_000


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"
    ITER_LIMIT = "iter_limit"


@dataclass
class LpSolution:
    status: LpStatus
    values: np.ndarray | None
    objective_value: float | None
    iterations: int = 0
    method: str = ""

    def __post_init__(self):
        if (self.values is not None) != (self.status is LpStatus.OPTIMAL):
            raise ValueError("values are present exactly when the status is optimal")


def pick_method(lp: LinearProgram) -> str:
    m, n = lp.num_rows, lp.num_vars
    return "simplex" if m * (m + n) <= AUTO_DENSE_LIMIT else "ipm"


def solve_lp(lp: LinearProgram, tol: float = 1e-7, method: str = "auto", max_iter: int | None = None) -> LpSolution:
    if method == "auto":
        method = pick_method(lp)
    if method == "simplex":
        res = revised_simplex(lp.objective, lp.A.toarray(), lp.b, lp.lower, lp.upper, tol=tol, max_iter=max_iter)
        status = LpStatus(res.status)
        return LpSolution(status, res.x, res.objective, res.pivots, "simplex")
    if method in ("ipm", "highs"):
        return _solve_highs(lp, tol, method, max_iter)
    raise InputError(f"unknown LP method {method!r}")


def _solve_highs(lp: LinearProgram, tol, method, max_iter) -> LpSolution:
    import highspy

    inf = highspy.kHighsInf
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", 1)
    h.setOptionValue("random_seed", 0)
    h.setOptionValue("primal_feasibility_tolerance", min(tol, 1e-7))
    h.setOptionValue("dual_feasibility_tolerance", min(tol, 1e-7))
    if method == "ipm":
        h.setOptionValue("solver", "ipm")
        h.setOptionValue("run_crossover", "off")
        h.setOptionValue("ipm_optimality_tolerance", min(tol, 1e-8) * 1e-2)
        if max_iter is not None:
            h.setOptionValue("ipm_iteration_limit", int(max_iter))
    else:
        h.setOptionValue("solver", "simplex")
        if max_iter is not None:
            h.setOptionValue("simplex_iteration_limit", int(max_iter))

    A = lp.A.tocsr()
    model = highspy.HighsLp()
    model.num_col_ = lp.num_vars
    model.num_row_ = lp.num_rows
    model.col_cost_ = lp.objective
    model.col_lower_ = np.where(np.isfinite(lp.lower), lp.lower, -inf)
    model.col_upper_ = np.where(np.isfinite(lp.upper), lp.upper, inf)
    model.row_lower_ = np.full(lp.num_rows, -inf)
    model.row_upper_ = lp.b
    model.a_matrix_.format_ = highspy.MatrixFormat.kRowwise
    model.a_matrix_.num_col_ = lp.num_vars
    model.a_matrix_.num_row_ = lp.num_rows
    model.a_matrix_.start_ = A.indptr.astype(np.int32)
    model.a_matrix_.index_ = A.indices.astype(np.int32)
    model.a_matrix_.value_ = A.data
    h.passModel(model)
    h.run()

    st = h.getModelStatus()
    info = h.getInfo()
    iters = int(info.ipm_iteration_count + info.simplex_iteration_count + info.crossover_iteration_count)
    S = highspy.HighsModelStatus
    if st == S.kOptimal:
        x = np.array(h.getSolution().col_value, dtype=float)
        return LpSolution(LpStatus.OPTIMAL, x, float(lp.objective @ x), iters, method)
    if st == S.kInfeasible:
        return LpSolution(LpStatus.INFEASIBLE, None, None, iters, method)
    if st == S.kUnbounded:
        return LpSolution(LpStatus.UNBOUNDED, None, None, iters, method)
    if st == S.kUnboundedOrInfeasible and method == "ipm":
        return _solve_highs(lp, tol, "highs", max_iter)
    if st == S.kUnboundedOrInfeasible:
        # presolve could not tell; a zero objective settles feasibility
        probe = LinearProgram(np.zeros(lp.num_vars), lp.A, lp.b, lp.lower, lp.upper)
        sub = _solve_highs(probe, tol, "highs", max_iter)
        status = LpStatus.UNBOUNDED if sub.status is LpStatus.OPTIMAL else LpStatus.INFEASIBLE
        return LpSolution(status, None, None, iters + sub.iterations, method)
    if st in (S.kIterationLimit, S.kTimeLimit):
        return LpSolution(LpStatus.ITER_LIMIT, None, None, iters, method)
    raise RuntimeError(f"HiGHS returned {h.modelStatusToString(st)}")
