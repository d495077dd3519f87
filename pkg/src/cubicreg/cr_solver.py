"""Non-adaptive cubic regularization with a known Hessian Lipschitz constant.

Outer loop: approximate the minimum eigenvalue, certify or pick a branch,
solve the strongly convex regularized model (or its convex reformulation)
with a first-order subsolver, and fall back to a scaled negative-curvature
step when the reformulated solution is clamped.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import ceil, sqrt
from typing import Optional

import numpy as np

from .bb import BbConfig, bb_minimize
from .cubic_model import RegularizedModel, eval_m, model_value_and_grad
from .lanczos import min_eig_estimate
from .nag import NagConfig, nag_minimize
from .operators import EvalCounters
from .problems import Problem
from .reports import IterationRow, SolveReport


@dataclass
class CrConfig:
    eps_g: float
    lipschitz: float
    max_outer: Optional[int] = None
    subsolver: str = "nag"
    eigen_delta: Optional[float] = None
    rng_seed: int = 0
    f_lower_guess: float = -1e12
    zeta: Optional[float] = None  # optional looser subsolver stopping, off by default

    def __post_init__(self):
        if self.eps_g <= 0 or self.lipschitz <= 0:
            raise ValueError("eps_g and lipschitz must be positive")
        if self.subsolver not in ("nag", "bb"):
            raise ValueError("subsolver must be 'nag' or 'bb'")

    @property
    def eps_E(self) -> float:
        return sqrt(self.lipschitz * self.eps_g) / 3.0

    @property
    def eps_S(self) -> float:
        return self.eps_g / 9.0


def default_max_outer(config: CrConfig, f0: float) -> int:
    gap = max(f0 - config.f_lower_guess, 1.0)
    bound = 10 * ceil(3.0 * config.lipschitz**2 * gap / config.eps_E**3)
    return int(min(bound, 1e6))


def subsolver_max_iters(eps_E: float) -> int:
    return 50 * ceil(1.0 / sqrt(max(eps_E, 1e-300))) + 1000


def run_subsolver(model: RegularizedModel, subsolver: str, grad_tol: float,
                  strong_convexity: float, z0: np.ndarray, counters: EvalCounters,
                  max_iters: Optional[int] = None, zeta: Optional[float] = None):
    """Minimize a regularized model from z0 down to ||grad|| <= tol."""
    if max_iters is None:
        max_iters = subsolver_max_iters(max(strong_convexity, grad_tol))

    stop_rule = None
    if zeta is not None:
        stop_rule = lambda z, gnorm: gnorm <= max(
            zeta * float(np.linalg.norm(z)) ** 2, grad_tol)

    def value_and_grad(s):
        return model_value_and_grad(model, s, counters)

    if subsolver == "nag":
        cfg = NagConfig(strong_convexity=strong_convexity, grad_tol=grad_tol,
                        max_iters=max_iters)
        return nag_minimize(value_and_grad, cfg, z0, stop_rule=stop_rule)
    cfg = BbConfig(grad_tol=grad_tol, max_iters=max_iters)
    return bb_minimize(value_and_grad, cfg, z0, stop_rule=stop_rule)


def negative_curvature_step(eig, g: np.ndarray, scale: float) -> np.ndarray:
    """w/scale with w = +-|alpha| v oriented so that w'g <= 0."""
    w = abs(eig.alpha) * eig.v
    if float(w @ g) > 0.0:
        w = -w
    return w / scale


def cr_solve(problem: Problem, x0: np.ndarray, config: CrConfig) -> SolveReport:
    t_start = time.perf_counter()
    counters = EvalCounters()
    L = config.lipschitz
    sigma = L / 2.0
    eps_E, eps_S = config.eps_E, config.eps_S
    x = np.asarray(x0, dtype=float).copy()

    f = problem.f(x)
    counters.n_f += 1
    max_outer = config.max_outer or default_max_outer(config, f)
    delta = config.eigen_delta if config.eigen_delta is not None else 1e-6 / max_outer

    log = []
    status = "max_outer"
    alpha_final = np.nan
    grad_norm = np.nan
    best_x, best_f = x.copy(), f

    for k in range(max_outer):
        if not np.isfinite(f):
            status = "numerical_failure"
            break
        g = problem.grad(x)
        counters.n_g += 1
        grad_norm = float(np.linalg.norm(g))
        H = problem.hess_op(x)

        t_eig = time.perf_counter()
        eig = min_eig_estimate(H, eps_E, delta, config.rng_seed + k, counters)
        counters.time_eig += time.perf_counter() - t_eig
        alpha_final = eig.alpha

        if grad_norm <= config.eps_g and eig.alpha >= -2.0 * eps_E:
            log.append(IterationRow(k, f, grad_norm, eig.alpha, "terminate",
                                    0.0, 0.0, sigma))
            status = "stationary"
            break

        if eig.alpha >= -eps_E:
            branch = "easy"
            model = RegularizedModel(g=g, H=H, sigma=sigma, alpha=eig.alpha,
                                     eps_E=eps_E, mode="convex_reg")
            res = run_subsolver(model, config.subsolver, eps_S, eps_E,
                                np.zeros(problem.dim), counters,
                                zeta=config.zeta)
            if res.status == "numerical_failure":
                status = "subsolver_failure"
                break
            d = res.z
        else:
            model = RegularizedModel(g=g, H=H, sigma=sigma, alpha=eig.alpha,
                                     eps_E=eps_E, mode="reform_reg")
            res = run_subsolver(model, config.subsolver, eps_S, eps_E,
                                np.zeros(problem.dim), counters,
                                zeta=config.zeta)
            if res.status == "numerical_failure":
                status = "subsolver_failure"
                break
            s = res.z
            if L * float(np.linalg.norm(s)) + 2.0 * eig.alpha >= 0.0:
                branch = "reform_step"
                d = s
            else:
                branch = "neg_curv"
                d = negative_curvature_step(eig, g, L)

        plain = RegularizedModel(g=g, H=H, sigma=sigma, mode="plain")
        m_d = eval_m(plain, d, counters)
        x = x + d
        f_next = problem.f(x)
        counters.n_f += 1
        log.append(IterationRow(k, f, grad_norm, eig.alpha, branch,
                                float(np.linalg.norm(d)), -m_d, sigma))
        f = f_next
        if f < best_f:
            best_f, best_x = f, x.copy()

    if status == "max_outer":
        # no certificate at budget exhaustion: report the best-f iterate
        x, f = best_x, best_f
    report = SolveReport(status=status, x_final=x, f_final=f,
                         grad_norm_final=grad_norm, alpha_final=alpha_final,
                         counters=counters, iteration_log=log)
    counters.time_total = time.perf_counter() - t_start
    return report
