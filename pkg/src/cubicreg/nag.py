"""Nesterov's accelerated gradient with backtracking and function restart.

The evaluator contract is ``value_and_grad(z) -> (float, ndarray)`` where
each call costs exactly one Hessian action when the objective is a cubic
model; the iteration-cost accounting of the solvers relies on that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class NagConfig:
    t0: float = 1.0
    theta0: float = 1.0
    beta: float = 0.5
    strong_convexity: float = 0.0  # m; set to eps_E by the outer solvers
    grad_tol: float = 1e-8
    max_iters: int = 10000
    restart_enabled: bool = True

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must lie in (0,1)")
        if not 0.0 < self.theta0 <= 1.0:
            raise ValueError("theta0 must lie in (0,1]")
        if self.t0 <= 0 or self.grad_tol <= 0 or self.max_iters < 1:
            raise ValueError("t0, grad_tol, max_iters must be positive")
        if self.strong_convexity < 0:
            raise ValueError("strong_convexity must be nonnegative")


@dataclass
class NagResult:
    z: np.ndarray
    iters: int
    grad_norm: float
    status: str  # converged | max_iters | numerical_failure | stagnation
    value: float = np.nan
    n_evals: int = 0


def restart_check(h_prev: float, h_curr: float) -> bool:
    """Function-value restart rule: true iff the objective increased."""
    return h_curr > h_prev


def _theta_next(t: float, gamma: float, m: float) -> float:
    # positive root of theta^2/t + theta*(gamma - m) - gamma = 0, clamped
    b = (gamma - m) * t
    theta = 0.5 * (-b + np.sqrt(b * b + 4.0 * gamma * t))
    return min(max(theta, 1e-16), 1.0)


def nag_minimize(value_and_grad, config: NagConfig, z0: np.ndarray,
                 stop_rule=None) -> NagResult:
    """Accelerated gradient descent with backtracking line search.

    Backtracking accepts t once h(y - t*grad) <= h(y) - (t/2)||grad||^2 and
    the accepted t seeds the next iteration.  The momentum schedule follows
    the strongly convex recursion gamma_l = theta_{l-1}^2 / t_{l-1},
    theta_l solving theta^2/t = (1-theta)gamma + m*theta.
    """
    m = config.strong_convexity
    if stop_rule is None:
        stop_rule = lambda z, gnorm: gnorm <= config.grad_tol
    z = np.asarray(z0, dtype=float).copy()
    n_evals = 0

    def ev(point):
        nonlocal n_evals
        n_evals += 1
        return value_and_grad(point)

    h_z, g_z = ev(z)
    if not np.isfinite(h_z) or not np.all(np.isfinite(g_z)):
        return NagResult(z, 0, np.inf, "numerical_failure", h_z, n_evals)
    v = z.copy()
    theta = config.theta0
    t = config.t0
    gamma = theta * theta / t
    best_h = h_z
    best_z, best_g = z, g_z
    last_improve = 0

    for it in range(config.max_iters):
        gnorm = float(np.linalg.norm(g_z))
        if stop_rule(z, gnorm):
            return NagResult(z, it, gnorm, "converged", h_z, n_evals)

        if it == 0:
            y, h_y, g_y = z, h_z, g_z
        else:
            gamma = theta * theta / t
            theta = _theta_next(t, gamma, m)
            coef = theta * gamma / (gamma + m * theta)
            y = z + coef * (v - z)
            h_y, g_y = ev(y)
            if not np.isfinite(h_y) or not np.all(np.isfinite(g_y)):
                return NagResult(z, it, gnorm, "numerical_failure", h_z, n_evals)

        gy_sq = float(g_y @ g_y)
        z_new = y - t * g_y
        h_new, g_new = ev(z_new)
        while h_new > h_y - 0.5 * t * gy_sq:
            t *= config.beta
            if t < 1e-300:
                return NagResult(z, it, gnorm, "numerical_failure", h_z, n_evals)
            z_new = y - t * g_y
            h_new, g_new = ev(z_new)
        if not np.isfinite(h_new) or not np.all(np.isfinite(g_new)):
            return NagResult(z, it, gnorm, "numerical_failure", h_z, n_evals)

        v = z + (z_new - z) / theta
        if config.restart_enabled and restart_check(h_z, h_new):
            theta = config.theta0
            v = z_new.copy()
        z, h_z, g_z = z_new, h_new, g_new

        if h_z < best_h:
            best_h, best_z, best_g = h_z, z, g_z
            last_improve = it
        elif it - last_improve > 300:
            # the objective has hit its floating-point floor; report the best
            # point seen rather than spinning until max_iters
            gnorm = float(np.linalg.norm(best_g))
            return NagResult(best_z, it, gnorm, "stagnation", best_h, n_evals)

    gnorm = float(np.linalg.norm(g_z))
    status = "converged" if stop_rule(z, gnorm) else "max_iters"
    return NagResult(z, config.max_iters, gnorm, status, h_z, n_evals)
