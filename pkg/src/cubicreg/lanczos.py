"""Lanczos estimator for the minimum eigenpair of a symmetric operator.

Runs the Lanczos recursion with full reorthogonalization from a uniformly
random unit start, capped at min{n, ceil(log(n/delta^2)/(2*sqrt(2)) *
sqrt(U_H/eps))} iterations.  With probability >= 1-delta the Rayleigh
quotient of the returned Ritz vector lands within eps of lambda_min.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, log, sqrt
from typing import List

import numpy as np

from .operators import EvalCounters, SymmetricOperator, apply_hessian, estimate_norm_bound

_BREAKDOWN_REL = 1e-13


@dataclass
class EigenEstimate:
    alpha: float
    v: np.ndarray
    target_eps: float
    iters_used: int
    ritz_trace: List[float] = field(default_factory=list)


def tridiag_count_below(d: np.ndarray, e: np.ndarray, x: float) -> int:
    """Number of eigenvalues of the tridiagonal (d, e) strictly below x."""
    count = 0
    q = 1.0
    for i in range(len(d)):
        off = e[i - 1] ** 2 / q if i > 0 else 0.0
        q = d[i] - x - off
        if q == 0.0:
            q = -1e-300
        if q < 0.0:
            count += 1
    return count


def tridiag_smallest_eig(d: np.ndarray, e: np.ndarray, tol: float = 1e-14) -> float:
    """Smallest eigenvalue of a symmetric tridiagonal via Sturm bisection."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    radius = np.zeros(len(d))
    if len(d) > 1:
        radius[:-1] += np.abs(e)
        radius[1:] += np.abs(e)
    lo = float(np.min(d - radius))
    hi = float(np.max(d + radius))
    scale = max(1.0, abs(lo), abs(hi))
    while hi - lo > tol * scale:
        mid = 0.5 * (lo + hi)
        if tridiag_count_below(d, e, mid) >= 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _tridiag_eigvec(d: np.ndarray, e: np.ndarray, lam: float) -> np.ndarray:
    """Eigenvector for eigenvalue lam by shifted inverse iteration."""
    k = len(d)
    if k == 1:
        return np.ones(1)
    t = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    scale = max(1.0, float(np.max(np.abs(d))) + float(np.max(np.abs(e))))
    shift = lam + 1e-12 * scale
    a = t - shift * np.eye(k)
    rng = np.random.default_rng(0)
    x = rng.standard_normal(k)
    x /= np.linalg.norm(x)
    for _ in range(4):
        try:
            x = np.linalg.solve(a, x)
        except np.linalg.LinAlgError:
            a = t - (shift + 1e-10 * scale) * np.eye(k)
            x = np.linalg.solve(a, x)
        x /= np.linalg.norm(x)
    return x


def lanczos_iteration_cap(n: int, u_h: float, eps: float, delta: float) -> int:
    if u_h <= 0:
        return 1
    cap = ceil(log(n / delta**2) / (2.0 * sqrt(2.0)) * sqrt(u_h / eps))
    return min(n, max(cap, 1))


def min_eig_estimate(
    H: SymmetricOperator,
    eps: float,
    delta: float,
    rng_seed: int,
    counters: EvalCounters,
) -> EigenEstimate:
    """Approximate minimum eigenpair (alpha, v) with alpha = v'Hv.

    Breakdown (a vanishing Lanczos vector) finalizes with the current
    Krylov space, which is then exactly invariant.
    """
    n = H.dim
    if n <= 0:
        raise ValueError("operator dimension must be positive")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0,1)")
    if eps <= 0:
        raise ValueError("eps must be positive")

    if H.norm_bound is None:
        estimate_norm_bound(H, rng_seed=rng_seed, counters=counters)
    u_h = H.norm_bound
    counters.n_eig += 1

    rng = np.random.default_rng(rng_seed)
    q = rng.standard_normal(n)
    q /= np.linalg.norm(q)

    if u_h == 0.0:
        return EigenEstimate(alpha=0.0, v=q, target_eps=eps, iters_used=0, ritz_trace=[0.0])

    cap = lanczos_iteration_cap(n, u_h, eps, delta)
    Q = np.zeros((n, cap))
    diag = np.zeros(cap)
    off = np.zeros(max(cap - 1, 0))
    ritz_trace: List[float] = []

    k = 0
    beta = 0.0
    q_prev = np.zeros(n)
    for j in range(cap):
        Q[:, j] = q
        w = apply_hessian(H, q, counters)
        a = float(q @ w)
        diag[j] = a
        k = j + 1
        ritz_trace.append(tridiag_smallest_eig(diag[:k], off[: k - 1]))
        if j == cap - 1:
            break
        w = w - a * q - beta * q_prev
        # full reorthogonalization against all previous Lanczos vectors
        w -= Q[:, :k] @ (Q[:, :k].T @ w)
        beta = float(np.linalg.norm(w))
        if beta <= _BREAKDOWN_REL * u_h:
            break
        off[j] = beta
        q_prev = q
        q = w / beta

    lam = ritz_trace[-1]
    u = _tridiag_eigvec(diag[:k], off[: k - 1], lam)
    v = Q[:, :k] @ u
    v /= np.linalg.norm(v)
    hv = apply_hessian(H, v, counters)
    alpha = float(v @ hv)
    return EigenEstimate(alpha=alpha, v=v, target_eps=eps, iters_used=k, ritz_trace=ritz_trace)
