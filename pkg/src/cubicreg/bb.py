"""Barzilai-Borwein gradient subsolver with a decrease-enforcing line search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nag import NagResult

ARMIJO_C = 1e-4
STEP_MIN, STEP_MAX = 1e-12, 1e12


@dataclass
class BbConfig:
    step_init: float = 1.0
    grad_tol: float = 1e-8
    max_iters: int = 10000
    ls_shrink: float = 0.5
    ls_max: int = 60

    def __post_init__(self):
        if min(self.step_init, self.grad_tol, self.max_iters, self.ls_max) <= 0:
            raise ValueError("all BbConfig fields must be positive")
        if not 0.0 < self.ls_shrink < 1.0:
            raise ValueError("ls_shrink must lie in (0,1)")


def _bb_step(s: np.ndarray, y: np.ndarray) -> float:
    """BB1 step s'y/(y'y), falling back to BB2 s's/(s'y) when nonpositive."""
    sy = float(s @ y)
    yy = float(y @ y)
    t = sy / yy if yy > 0 else 0.0
    if t <= 0:
        t = float(s @ s) / sy if sy > 0 else 0.0
    if t <= 0:
        t = 1.0
    return min(max(t, STEP_MIN), STEP_MAX)


def bb_minimize(value_and_grad, config: BbConfig, z0: np.ndarray,
                stop_rule=None) -> NagResult:
    """Gradient descent with BB step sizes and Armijo backtracking."""
    if stop_rule is None:
        stop_rule = lambda z, gnorm: gnorm <= config.grad_tol
    z = np.asarray(z0, dtype=float).copy()
    n_evals = 0

    def ev(point):
        nonlocal n_evals
        n_evals += 1
        return value_and_grad(point)

    h, g = ev(z)
    if not np.isfinite(h) or not np.all(np.isfinite(g)):
        return NagResult(z, 0, np.inf, "numerical_failure", h, n_evals)
    t = config.step_init
    z_prev = None
    g_prev = None

    for it in range(config.max_iters):
        gnorm = float(np.linalg.norm(g))
        if stop_rule(z, gnorm):
            return NagResult(z, it, gnorm, "converged", h, n_evals)
        if z_prev is not None:
            t = _bb_step(z - z_prev, g - g_prev)
        accepted = False
        for _ in range(config.ls_max):
            z_new = z - t * g
            h_new, g_new = ev(z_new)
            if np.isfinite(h_new) and h_new <= h - ARMIJO_C * t * gnorm * gnorm:
                accepted = True
                break
            t *= config.ls_shrink
            if t < STEP_MIN:
                break
        if not accepted:
            return NagResult(z, it, gnorm, "stagnation", h, n_evals)
        z_prev, g_prev = z, g
        z, h, g = z_new, h_new, g_new

    gnorm = float(np.linalg.norm(g))
    status = "converged" if stop_rule(z, gnorm) else "max_iters"
    return NagResult(z, config.max_iters, gnorm, status, h, n_evals)
