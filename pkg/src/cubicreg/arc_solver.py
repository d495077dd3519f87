"""Adaptive cubic regularization: theoretical and practical variants.

The theoretical variant mirrors the non-adaptive solver but replaces the
fixed regularizer L/2 with an adaptive sigma_k driven by the ratio test
rho_k = (f(x_k) - f(x_k + d_k)) / (-m_k(d_k)), shrinking sigma on success
and growing it otherwise.  The practical variant drops the eps_E
regularizer, starts every subsolve from the Cauchy point, and only touches
the eigenvalue machinery when a trigger condition on the gradient and the
curvature fires.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import sqrt
from typing import Optional

import numpy as np

from .bb import BbConfig, bb_minimize
from .cr_solver import negative_curvature_step, run_subsolver, subsolver_max_iters
from .cubic_model import (RegularizedModel, _cauchy_from_hg, eval_m,
                          model_value_and_grad)
from .lanczos import min_eig_estimate
from .operators import EvalCounters, apply_hessian
from .problems import Problem
from .reports import IterationRow, SolveReport


class DegenerateModelError(RuntimeError):
    """The model predicted no decrease for the trial step."""


def rho(f_k: float, f_next: float, model_decrease: float) -> float:
    """Actual-to-predicted decrease ratio."""
    if model_decrease <= 0.0:
        raise DegenerateModelError("model decrease must be positive")
    return (f_k - f_next) / model_decrease


@dataclass
class ArcTheoreticalConfig:
    eps_g: float
    lipschitz: float
    gamma: float = 1.5
    eta: float = 0.1
    sigma0: float = 1.0
    max_outer: int = 100000
    subsolver: str = "nag"
    eigen_delta: Optional[float] = None
    rng_seed: int = 0

    def __post_init__(self):
        if not 1.0 < self.gamma < 2.0:
            raise ValueError("gamma must lie in (1,2)")
        if not 0.0 < self.eta < 1.0:
            raise ValueError("eta must lie in (0,1)")
        if min(self.sigma0, self.eps_g, self.lipschitz) <= 0:
            raise ValueError("sigma0, eps_g, lipschitz must be positive")
        if self.subsolver not in ("nag", "bb"):
            raise ValueError("subsolver must be 'nag' or 'bb'")

    @property
    def eps_E(self) -> float:
        return sqrt(self.lipschitz * self.eps_g) / 3.0

    @property
    def eps_S(self) -> float:
        return self.eps_g / 9.0


def arc_solve_theoretical(problem: Problem, x0: np.ndarray,
                          config: ArcTheoreticalConfig) -> SolveReport:
    t_start = time.perf_counter()
    counters = EvalCounters()
    eps_E, eps_S = config.eps_E, config.eps_S
    x = np.asarray(x0, dtype=float).copy()
    sigma = config.sigma0

    f = problem.f(x)
    counters.n_f += 1
    delta = (config.eigen_delta if config.eigen_delta is not None
             else 1e-6 / config.max_outer)

    log = []
    status = "max_outer"
    alpha_final = np.nan
    grad_norm = np.nan
    g = None
    H = None
    eig = None
    x_stale = True  # g/H/eig need recomputing

    for k in range(config.max_outer):
        if not np.isfinite(f):
            status = "numerical_failure"
            break
        if x_stale:
            g = problem.grad(x)
            counters.n_g += 1
            grad_norm = float(np.linalg.norm(g))
            H = problem.hess_op(x)
            t_eig = time.perf_counter()
            eig = min_eig_estimate(H, eps_E, delta, config.rng_seed + k, counters)
            counters.time_eig += time.perf_counter() - t_eig
            alpha_final = eig.alpha
            x_stale = False

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
                                np.zeros(problem.dim), counters)
            if res.status == "numerical_failure":
                status = "subsolver_failure"
                break
            d = res.z
        else:
            model = RegularizedModel(g=g, H=H, sigma=sigma, alpha=eig.alpha,
                                     eps_E=eps_E, mode="reform_reg")
            res = run_subsolver(model, config.subsolver, eps_S, eps_E,
                                np.zeros(problem.dim), counters)
            if res.status == "numerical_failure":
                status = "subsolver_failure"
                break
            s = res.z
            if sigma * float(np.linalg.norm(s)) + eig.alpha >= 0.0:
                branch = "reform_step"
                d = s
            else:
                branch = "neg_curv"
                d = negative_curvature_step(eig, g, 2.0 * sigma)

        plain = RegularizedModel(g=g, H=H, sigma=sigma, mode="plain")
        m_d = eval_m(plain, d, counters)
        f_trial = problem.f(x + d)
        counters.n_f += 1

        degenerate = -m_d <= 0.0
        successful = (not degenerate) and (
            rho(f, f_trial, -m_d) >= config.eta or eig.alpha < -eps_E)
        log.append(IterationRow(k, f, grad_norm, eig.alpha, branch,
                                float(np.linalg.norm(d)), -m_d, sigma,
                                successful=successful))
        if successful:
            x = x + d
            f = f_trial
            sigma = sigma / config.gamma
            x_stale = True
        else:
            sigma = config.gamma * sigma

    report = SolveReport(status=status, x_final=x, f_final=f,
                         grad_norm_final=grad_norm, alpha_final=alpha_final,
                         counters=counters, iteration_log=log)
    counters.time_total = time.perf_counter() - t_start
    return report


@dataclass
class ArcPracticalConfig:
    grad_tol: float = 1e-5
    gamma1: float = 2.0
    gamma2: float = 5.0
    eta1: float = 0.1
    eta2: float = 0.9
    sigma0: float = 1.0
    eps1: float = 1e-2
    eps2: float = 1e-4
    sigma_min: float = 1e-16
    max_outer: int = 100000
    subsolver_reform: str = "bb"  # solver for the convex reformulation
    eigen_delta: float = 1e-8
    rng_seed: int = 0

    def __post_init__(self):
        if not (self.gamma2 >= self.gamma1 > 1.0):
            raise ValueError("need gamma2 >= gamma1 > 1")
        if not (1.0 > self.eta2 >= self.eta1 > 0.0):
            raise ValueError("need 1 > eta2 >= eta1 > 0")
        if min(self.sigma0, self.grad_tol, self.eps1, self.eps2,
               self.sigma_min) <= 0:
            raise ValueError("tolerances and sigma floors must be positive")
        if self.subsolver_reform not in ("bb", "nag"):
            raise ValueError("subsolver_reform must be 'bb' or 'nag'")


def _inner_tol(grad_norm: float, grad_tol: float) -> float:
    # tighten the subsolve as the outer gradient shrinks
    return max(0.5 * grad_tol,
               min(0.1, sqrt(grad_norm)) * grad_norm)


def arc_solve_practical(problem: Problem, x0: np.ndarray,
                        config: ArcPracticalConfig) -> SolveReport:
    t_start = time.perf_counter()
    counters = EvalCounters()
    x = np.asarray(x0, dtype=float).copy()
    sigma = config.sigma0
    n = problem.dim

    f = problem.f(x)
    counters.n_f += 1

    log = []
    status = "max_outer"
    alpha_final = np.nan
    grad_norm = np.nan
    x_stale = True
    g = hg = None
    H = None
    eig = None  # cached per iterate; Lanczos accuracy eps2

    for k in range(config.max_outer):
        if not np.isfinite(f):
            status = "numerical_failure"
            break
        if x_stale:
            g = problem.grad(x)
            counters.n_g += 1
            grad_norm = float(np.linalg.norm(g))
            H = problem.hess_op(x)
            hg = apply_hessian(H, g, counters)
            eig = None
            x_stale = False

        grad_small = grad_norm <= max(f, 1.0) * config.eps1
        if grad_norm <= config.grad_tol or grad_small:
            if eig is None:
                t_eig = time.perf_counter()
                eig = min_eig_estimate(H, config.eps2, config.eigen_delta,
                                       config.rng_seed + k, counters)
                counters.time_eig += time.perf_counter() - t_eig
            alpha_final = eig.alpha
        if grad_norm <= config.grad_tol and eig.alpha >= -config.eps2:
            log.append(IterationRow(k, f, grad_norm, eig.alpha, "terminate",
                                    0.0, 0.0, sigma))
            status = "stationary"
            break

        alpha_c, s_c = _cauchy_from_hg(g, hg, sigma)
        g_norm = float(np.linalg.norm(g))
        m_sc = (-alpha_c * g_norm**2 + 0.5 * alpha_c**2 * float(g @ hg)
                + (sigma / 3.0) * alpha_c**3 * g_norm**3)

        plain = RegularizedModel(g=g, H=H, sigma=sigma, mode="plain")
        tol = _inner_tol(grad_norm, config.grad_tol)
        max_iters = min(subsolver_max_iters(tol), 20000)
        triggered = grad_small and eig.alpha < -config.eps2

        if triggered:
            reform = RegularizedModel(g=g, H=H, sigma=sigma, alpha=eig.alpha,
                                      eps_E=0.0, mode="reform_reg")
            res = run_subsolver(reform, config.subsolver_reform, tol, 0.0,
                                s_c, counters, max_iters=max_iters)
            branch = "reform_step"
        else:
            def value_and_grad(s):
                return model_value_and_grad(plain, s, counters)
            res = bb_minimize(value_and_grad,
                              BbConfig(grad_tol=tol, max_iters=max_iters), s_c)
            branch = "direct"

        s_bar = res.z
        m_sbar = eval_m(plain, s_bar, counters)
        if res.status == "numerical_failure" or not np.isfinite(m_sbar):
            s_k, m_sk, branch = s_c, m_sc, "cauchy"
        elif m_sbar <= m_sc:
            s_k, m_sk = s_bar, m_sbar
        else:
            s_k, m_sk, branch = s_c, m_sc, "cauchy"

        f_trial = problem.f(x + s_k)
        counters.n_f += 1
        degenerate = -m_sk <= 0.0
        rho_k = -np.inf if degenerate else rho(f, f_trial, -m_sk)
        successful = rho_k >= config.eta1

        log.append(IterationRow(k, f, grad_norm,
                                eig.alpha if eig is not None else np.nan,
                                branch, float(np.linalg.norm(s_k)), -m_sk,
                                sigma, successful=successful,
                                trigger=triggered))
        if successful:
            x = x + s_k
            f = f_trial
            x_stale = True
        if degenerate or rho_k < config.eta1:
            sigma = config.gamma1 * sigma
        elif rho_k > config.eta2:
            sigma = max(sigma / 2.0, config.sigma_min)
        # eta1 <= rho <= eta2 keeps sigma unchanged

    report = SolveReport(status=status, x_final=x, f_final=f,
                         grad_norm_final=grad_norm, alpha_final=alpha_final,
                         counters=counters, iteration_log=log)
    counters.time_total = time.perf_counter() - t_start
    return report
