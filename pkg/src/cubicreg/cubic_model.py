"""Cubic model functions and their regularized / reformulated variants.

Three model modes share one data holder:

* ``plain``       m(s)  = g's + 1/2 s'Hs + (sigma/3)||s||^3
* ``convex_reg``  adds 3/2*eps_E*||s||^2 to the quadratic part
* ``reform_reg``  the unconstrained convex reformulation
                  g's + 1/2 s'(H - alpha I + 2 eps_E I)s + J_{alpha,sigma}(s)

with the coupling term J evaluated at y = max{||s||, -alpha/sigma}.
Value and gradient at the same point share a single Hessian action.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .operators import EvalCounters, SymmetricOperator, apply_hessian

MODES = ("plain", "convex_reg", "reform_reg")


class ModelModeError(ValueError):
    """Operation called with an incompatible model mode."""


@dataclass(frozen=True)
class RegularizedModel:
    """One subproblem instance (g, H, sigma, alpha, eps_E, mode)."""

    g: np.ndarray
    H: SymmetricOperator
    sigma: float
    alpha: float = 0.0
    eps_E: float = 0.0
    mode: str = "plain"

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.eps_E < 0:
            raise ValueError("eps_E must be nonnegative")
        if self.mode not in MODES:
            raise ModelModeError(f"unknown mode {self.mode!r}")
        if self.g.shape != (self.H.dim,):
            raise ValueError("gradient/operator dimension mismatch")
        # The reformulated branch is only entered when the approximate
        # eigenvalue is decisively negative; with eps_E = 0 the model is
        # also used as the bare reformulation in tests and practical ARC,
        # where alpha of any sign is legal.
        if self.mode == "reform_reg" and self.eps_E > 0 and not self.alpha < -self.eps_E:
            raise ValueError("reform_reg requires alpha < -eps_E")


def y_star(s_norm: float, alpha: float, sigma: float) -> float:
    """Closed-form partial minimizer of the auxiliary variable."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return max(s_norm, -alpha / sigma)


def eval_J(s: np.ndarray, alpha: float, sigma: float) -> float:
    """Coupling term (sigma/3) y^3 + (alpha/2) y^2 at y = y_star(||s||)."""
    y = y_star(float(np.linalg.norm(s)), alpha, sigma)
    return (sigma / 3.0) * y**3 + (alpha / 2.0) * y**2


def grad_J(s: np.ndarray, alpha: float, sigma: float) -> np.ndarray:
    """Gradient [sigma*||s|| + alpha]_+ * s; zero inside the clamped ball."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    coef = max(sigma * float(np.linalg.norm(s)) + alpha, 0.0)
    return coef * s


def _quadratic_coeff(model: RegularizedModel) -> float:
    """Coefficient of the extra ||s||^2/2 term added to s'Hs for each mode."""
    if model.mode == "plain":
        return 0.0
    if model.mode == "convex_reg":
        return 3.0 * model.eps_E
    return 2.0 * model.eps_E - model.alpha


def model_value_and_grad(
    model: RegularizedModel, s: np.ndarray, counters: EvalCounters
) -> Tuple[float, np.ndarray]:
    """Value and gradient of the selected model, one Hessian action total."""
    hs = apply_hessian(model.H, s, counters)
    return _value_grad_from_hs(model, s, hs)


def _value_grad_from_hs(
    model: RegularizedModel, s: np.ndarray, hs: np.ndarray
) -> Tuple[float, np.ndarray]:
    s_norm = float(np.linalg.norm(s))
    quad = _quadratic_coeff(model)
    base_val = float(model.g @ s) + 0.5 * float(s @ hs) + 0.5 * quad * s_norm**2
    base_grad = model.g + hs + quad * s
    if model.mode == "reform_reg":
        val = base_val + eval_J(s, model.alpha, model.sigma)
        grad = base_grad + grad_J(s, model.alpha, model.sigma)
    else:
        val = base_val + (model.sigma / 3.0) * s_norm**3
        grad = base_grad + model.sigma * s_norm * s
    return val, grad


def eval_m(model: RegularizedModel, s: np.ndarray, counters: EvalCounters) -> float:
    """Plain cubic model value 1/2 s'Hs + g's + (sigma/3)||s||^3."""
    hs = apply_hessian(model.H, s, counters)
    s_norm = float(np.linalg.norm(s))
    return float(model.g @ s) + 0.5 * float(s @ hs) + (model.sigma / 3.0) * s_norm**3


def grad_m(model: RegularizedModel, s: np.ndarray, counters: EvalCounters) -> np.ndarray:
    """Plain cubic model gradient g + Hs + sigma*||s||*s."""
    hs = apply_hessian(model.H, s, counters)
    return model.g + hs + model.sigma * float(np.linalg.norm(s)) * s


def eval_model_value(model: RegularizedModel, s: np.ndarray, counters: EvalCounters) -> float:
    if model.mode == "plain":
        raise ModelModeError("eval_model_value requires a regularized mode")
    return model_value_and_grad(model, s, counters)[0]


def eval_model_grad(model: RegularizedModel, s: np.ndarray, counters: EvalCounters) -> np.ndarray:
    if model.mode == "plain":
        raise ModelModeError("eval_model_grad requires a regularized mode")
    return model_value_and_grad(model, s, counters)[1]


def eval_mhat(
    s: np.ndarray,
    y: float,
    g: np.ndarray,
    H: SymmetricOperator,
    alpha: float,
    sigma: float,
    counters: EvalCounters,
) -> float:
    """Two-variable reformulation value; test-only surface.

    Requires the feasibility y >= ||s|| and y >= -alpha/sigma.
    """
    s_norm = float(np.linalg.norm(s))
    feas_tol = 1e-12 * (1.0 + abs(y))
    if y < s_norm - feas_tol or y < -alpha / sigma - feas_tol:
        raise ValueError("infeasible (s, y) pair")
    hs = apply_hessian(H, s, counters)
    quad = 0.5 * (float(s @ hs) - alpha * s_norm**2)
    return float(g @ s) + quad + (sigma / 3.0) * y**3 + (alpha / 2.0) * y**2


def cauchy_point(
    model: RegularizedModel, counters: EvalCounters
) -> Tuple[float, np.ndarray]:
    """Global minimizer of the plain cubic model along -g.

    phi(a) = m(-a g) has derivative sigma*||g||^3*a^2 + (g'Hg)*a - ||g||^2,
    whose unique positive root is returned (0 for g = 0).
    """
    if model.mode != "plain":
        raise ModelModeError("cauchy_point is defined on the plain model")
    g = model.g
    g_norm = float(np.linalg.norm(g))
    if g_norm == 0.0:
        return 0.0, np.zeros_like(g)
    hg = apply_hessian(model.H, g, counters)
    return _cauchy_from_hg(g, hg, model.sigma)


def _cauchy_from_hg(g: np.ndarray, hg: np.ndarray, sigma: float) -> Tuple[float, np.ndarray]:
    g_norm = float(np.linalg.norm(g))
    if g_norm == 0.0:
        return 0.0, np.zeros_like(g)
    c = float(g @ hg)
    a = sigma * g_norm**3
    alpha_c = (-c + np.sqrt(c * c + 4.0 * a * g_norm**2)) / (2.0 * a)
    return alpha_c, -alpha_c * g
