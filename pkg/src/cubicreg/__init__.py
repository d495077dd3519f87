"""Cubic-regularization solvers built on a convex subproblem reformulation."""

from .arc_solver import (ArcPracticalConfig, ArcTheoreticalConfig,
                         arc_solve_practical, arc_solve_theoretical)
from .cr_solver import CrConfig, cr_solve
from .cubic_model import RegularizedModel
from .lanczos import min_eig_estimate
from .operators import EvalCounters, SymmetricOperator
from .problems import SUPPORTED_PROBLEMS, Problem, fd_check, make_problem
from .reports import IterationRow, SolveReport

__version__ = "0.1.0"

__all__ = [
    "ArcPracticalConfig", "ArcTheoreticalConfig", "CrConfig",
    "EvalCounters", "IterationRow", "Problem", "RegularizedModel",
    "SolveReport", "SUPPORTED_PROBLEMS", "SymmetricOperator",
    "arc_solve_practical", "arc_solve_theoretical", "cr_solve",
    "fd_check", "make_problem", "min_eig_estimate",
]
