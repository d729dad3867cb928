"""Linear-programming layer: problem containers, subproblem builder, solvers."""
from ._kernel import KERNEL
from .program import (
    DcProgram,
    LinearProgram,
    VarLayout,
    active_u_rows,
    all_u_rows,
    build_subproblem,
    complete_solution,
    convexified_residuals,
)
from .simplex import revised_simplex
from .solve import LpSolution, LpStatus, solve_lp

__all__ = [
    "KERNEL",
    "DcProgram",
    "LinearProgram",
    "LpSolution",
    "LpStatus",
    "VarLayout",
    "active_u_rows",
    "all_u_rows",
    "build_subproblem",
    "complete_solution",
    "convexified_residuals",
    "revised_simplex",
    "solve_lp",
]
