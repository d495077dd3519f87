"""Trajectory reports shared by the CR and ARC drivers."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .operators import EvalCounters


@dataclass
class IterationRow:
    k: int
    f: float
    grad_norm: float
    alpha: float
    branch: str  # terminate | easy | reform_step | neg_curv | cauchy | direct
    step_norm: float
    model_decrease: float
    sigma: float
    successful: bool = True
    trigger: bool = False


@dataclass
class SolveReport:
    status: str  # stationary | max_outer | subsolver_failure | numerical_failure
    x_final: np.ndarray
    f_final: float
    grad_norm_final: float
    alpha_final: float
    counters: EvalCounters
    iteration_log: List[IterationRow] = field(default_factory=list)

    @property
    def n_outer(self) -> int:
        return len(self.iteration_log)
