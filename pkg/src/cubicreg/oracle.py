"""Independent ground-truth solvers used by the test suite.

A cyclic Jacobi eigensolver and an exact global cubic-subproblem solver
based on the secular equation, including the hard case.  Deliberately kept
independent of the production Lanczos / first-order machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


@njit(cache=True)
def _jacobi_sweeps(a: np.ndarray, v: np.ndarray, tol: float, max_sweeps: int) -> None:
    n = a.shape[0]
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if np.sqrt(2.0 * off) <= tol:
            return
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol / (n * n):
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for i in range(n):
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - s * aiq
                    a[i, q] = s * aip + c * aiq
                for i in range(n):
                    api = a[p, i]
                    aqi = a[q, i]
                    a[p, i] = c * api - s * aqi
                    a[q, i] = s * api + c * aqi
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip - s * viq
                    v[i, q] = s * vip + c * viq


def dense_eigs(h: np.ndarray):
    """Eigen-decomposition by cyclic Jacobi rotations.

    Returns (eigenvalues ascending, orthonormal eigenvector columns).
    """
    h = np.asarray(h, dtype=float)
    n = h.shape[0]
    if n > 512:
        raise ValueError("dense_eigs is limited to n <= 512")
    a = h.copy()
    v = np.eye(n)
    scale = float(np.linalg.norm(h))
    tol = 1e-13 * max(scale, 1.0)
    _jacobi_sweeps(a, v, tol, 60)
    lam = np.diag(a).copy()
    order = np.argsort(lam)
    return lam[order], v[:, order]


@dataclass
class CrsExactSolution:
    s_star: np.ndarray
    value: float
    r_star: float
    hard_case: bool


def _model_value(g, h, sigma, s):
    return float(g @ s) + 0.5 * float(s @ (h @ s)) + (sigma / 3.0) * np.linalg.norm(s) ** 3


def crs_global_solve(g: np.ndarray, h: np.ndarray, sigma: float) -> CrsExactSolution:
    """Exact global minimizer of 1/2 s'Hs + g's + (sigma/3)||s||^3.

    Solves the secular equation ||(H + sigma*r I)^{-1} g|| = r by bisection
    on r > max(0, -lambda_min/sigma); when g is orthogonal to the bottom
    eigenspace and no such root exists (hard case), an eigenvector
    correction brings ||s|| up to -lambda_min/sigma.
    """
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    lam, q = dense_eigs(h)
    b = q.T @ g
    lam_min = lam[0]
    lo = max(0.0, -lam_min / sigma)
    g_norm = float(np.linalg.norm(g))

    def coords(r):
        denom = lam + sigma * r
        safe = np.where(np.abs(denom) > 1e-300, denom, 1e-300)
        return -b / safe

    def phi(r):
        return float(np.linalg.norm(coords(r))) - r

    if g_norm == 0.0 and lam_min >= 0.0:
        s = np.zeros_like(g)
        return CrsExactSolution(s, 0.0, 0.0, False)

    # hard-case screen: negligible gradient component on the bottom eigenspace
    spread = max(1.0, float(lam[-1] - lam[0]))
    bottom = np.abs(lam - lam_min) <= 1e-10 * spread
    orth = bool(np.all(np.abs(b[bottom]) <= 1e-12 * max(g_norm, 1.0)))

    hard = False
    if lam_min < 0.0 and orth:
        denom = lam + sigma * lo
        y = np.where(bottom, 0.0, -b / np.where(np.abs(denom) > 1e-300, denom, 1e-300))
        interior_norm = float(np.linalg.norm(y))
        if interior_norm <= lo:
            tau = np.sqrt(max(lo * lo - interior_norm * interior_norm, 0.0))
            s = q @ y + tau * q[:, 0]
            return CrsExactSolution(s, _model_value(g, h, sigma, s), lo, True)

    # easy case: bracket [lo + delta, hi] with phi changing sign
    delta = 1e-14 * max(1.0, lo)
    r_lo = lo + delta
    r_hi = max(np.sqrt(g_norm / sigma), r_lo * 2.0, 1e-8)
    it = 0
    while phi(r_hi) > 0.0:
        r_hi *= 2.0
        it += 1
        if it > 200:  # pragma: no cover
            raise RuntimeError("secular bracketing failed")
    if phi(r_lo) <= 0.0:
        r_lo = lo  # root is at (or below) the left endpoint
    for _ in range(200):
        mid = 0.5 * (r_lo + r_hi)
        if phi(mid) > 0.0:
            r_lo = mid
        else:
            r_hi = mid
        if r_hi - r_lo <= 1e-13 * max(1.0, r_hi):
            break
    r_star = 0.5 * (r_lo + r_hi)
    s = q @ coords(r_star)
    return CrsExactSolution(s, _model_value(g, h, sigma, s), float(np.linalg.norm(s)), hard)
