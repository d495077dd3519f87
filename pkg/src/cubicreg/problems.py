"""Native unconstrained test problems with analytic derivatives.

The formulas follow the standard published CUTEst / Luksan definitions
(chained Rosenbrock, Broyden banded, chained Woods, ...) plus two small
synthetic instances (SPHERE, SADDLE) used throughout the tests.  Dense
Hessians are assembled explicitly; at the default desk-scale dimensions
that is cheap and keeps the derivative code auditable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from .operators import SymmetricOperator


class UnknownProblemError(ValueError):
    pass


@dataclass
class Problem:
    name: str
    dim: int
    f: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    hess_dense: Callable[[np.ndarray], np.ndarray]
    x0_standard: np.ndarray
    f_known: Optional[float] = None

    def hess_op(self, x: np.ndarray) -> SymmetricOperator:
        return SymmetricOperator.from_dense(self.hess_dense(x))


# ---------------------------------------------------------------------------
# individual problem definitions
# ---------------------------------------------------------------------------

def _sphere(n):
    def f(x):
        return 0.5 * float(x @ x)

    def grad(x):
        return x.copy()

    def hess(x):
        return np.eye(n)

    return Problem("SPHERE", n, f, grad, hess, np.ones(n), f_known=0.0)


def _saddle(n):
    # f = x1^2/2 - x2^2/2 + x2^4/4: strict saddle at the origin,
    # minima at (0, +-1) with f = -1/4
    if n != 2:
        raise UnknownProblemError("SADDLE is a fixed 2-D problem")

    def f(x):
        return 0.5 * x[0] ** 2 - 0.5 * x[1] ** 2 + 0.25 * x[1] ** 4

    def grad(x):
        return np.array([x[0], -x[1] + x[1] ** 3])

    def hess(x):
        return np.array([[1.0, 0.0], [0.0, -1.0 + 3.0 * x[1] ** 2]])

    return Problem("SADDLE", 2, f, grad, hess, np.array([1.0, 1e-3]), f_known=-0.25)


def _genrose(n):
    if n < 2:
        raise UnknownProblemError("GENROSE requires dim >= 2")

    def f(x):
        a = x[1:] - x[:-1] ** 2
        return 1.0 + float(100.0 * a @ a + (x[1:] - 1.0) @ (x[1:] - 1.0))

    def grad(x):
        a = x[1:] - x[:-1] ** 2
        g = np.zeros(n)
        g[:-1] += -400.0 * x[:-1] * a
        g[1:] += 200.0 * a + 2.0 * (x[1:] - 1.0)
        return g

    def hess(x):
        a = x[1:] - x[:-1] ** 2
        h = np.zeros((n, n))
        i = np.arange(n - 1)
        np.add.at(h, (i, i), -400.0 * a + 800.0 * x[:-1] ** 2)
        np.add.at(h, (i + 1, i + 1), 202.0)
        np.add.at(h, (i, i + 1), -400.0 * x[:-1])
        np.add.at(h, (i + 1, i), -400.0 * x[:-1])
        return h

    x0 = np.arange(1, n + 1) / (n + 1.0)
    return Problem("GENROSE", n, f, grad, hess, x0, f_known=1.0)


def _extrosnb(n):
    if n < 2:
        raise UnknownProblemError("EXTROSNB requires dim >= 2")

    def f(x):
        a = x[1:] - x[:-1] ** 2
        return float((x[0] - 1.0) ** 2 + 100.0 * a @ a)

    def grad(x):
        a = x[1:] - x[:-1] ** 2
        g = np.zeros(n)
        g[0] += 2.0 * (x[0] - 1.0)
        g[:-1] += -400.0 * x[:-1] * a
        g[1:] += 200.0 * a
        return g

    def hess(x):
        a = x[1:] - x[:-1] ** 2
        h = np.zeros((n, n))
        h[0, 0] += 2.0
        i = np.arange(n - 1)
        np.add.at(h, (i, i), -400.0 * a + 800.0 * x[:-1] ** 2)
        np.add.at(h, (i + 1, i + 1), 200.0)
        np.add.at(h, (i, i + 1), -400.0 * x[:-1])
        np.add.at(h, (i + 1, i), -400.0 * x[:-1])
        return h

    return Problem("EXTROSNB", n, f, grad, hess, -np.ones(n), f_known=0.0)


def _fletchcr(n):
    if n < 2:
        raise UnknownProblemError("FLETCHCR requires dim >= 2")

    def res(x):
        return x[1:] - x[:-1] + 1.0 - x[:-1] ** 2

    def f(x):
        r = res(x)
        return float(100.0 * r @ r)

    def grad(x):
        r = res(x)
        g = np.zeros(n)
        g[:-1] += 200.0 * r * (-1.0 - 2.0 * x[:-1])
        g[1:] += 200.0 * r
        return g

    def hess(x):
        r = res(x)
        h = np.zeros((n, n))
        i = np.arange(n - 1)
        di = -1.0 - 2.0 * x[:-1]
        np.add.at(h, (i, i), 200.0 * di * di + 200.0 * r * (-2.0))
        np.add.at(h, (i + 1, i + 1), 200.0)
        np.add.at(h, (i, i + 1), 200.0 * di)
        np.add.at(h, (i + 1, i), 200.0 * di)
        return h

    return Problem("FLETCHCR", n, f, grad, hess, np.zeros(n), f_known=0.0)


def _woods_terms(x, off):
    # one Woods group on indices (off, off+1, off+2, off+3)
    x1, x2, x3, x4 = x[off], x[off + 1], x[off + 2], x[off + 3]
    return (
        100.0 * (x2 - x1**2) ** 2
        + (1.0 - x1) ** 2
        + 90.0 * (x4 - x3**2) ** 2
        + (1.0 - x3) ** 2
        + 10.0 * (x2 + x4 - 2.0) ** 2
        + 0.1 * (x2 - x4) ** 2
    )


def _woods_grad_hess(x, offsets, n):
    g = np.zeros(n)
    h = np.zeros((n, n))
    for off in offsets:
        i1, i2, i3, i4 = off, off + 1, off + 2, off + 3
        x1, x2, x3, x4 = x[i1], x[i2], x[i3], x[i4]
        a = x2 - x1**2
        b = x4 - x3**2
        g[i1] += -400.0 * x1 * a - 2.0 * (1.0 - x1)
        g[i2] += 200.0 * a + 20.0 * (x2 + x4 - 2.0) + 0.2 * (x2 - x4)
        g[i3] += -360.0 * x3 * b - 2.0 * (1.0 - x3)
        g[i4] += 180.0 * b + 20.0 * (x2 + x4 - 2.0) - 0.2 * (x2 - x4)
        h[i1, i1] += -400.0 * a + 800.0 * x1**2 + 2.0
        h[i1, i2] += -400.0 * x1
        h[i2, i1] += -400.0 * x1
        h[i2, i2] += 200.0 + 20.0 + 0.2
        h[i3, i3] += -360.0 * b + 720.0 * x3**2 + 2.0
        h[i3, i4] += -360.0 * x3
        h[i4, i3] += -360.0 * x3
        h[i4, i4] += 180.0 + 20.0 + 0.2
        h[i2, i4] += 20.0 - 0.2
        h[i4, i2] += 20.0 - 0.2
    return g, h


def _woods(n):
    if n < 4 or n % 4 != 0:
        raise UnknownProblemError("WOODS requires dim a positive multiple of 4")
    offsets = list(range(0, n, 4))

    def f(x):
        return float(sum(_woods_terms(x, off) for off in offsets))

    def grad(x):
        return _woods_grad_hess(x, offsets, n)[0]

    def hess(x):
        return _woods_grad_hess(x, offsets, n)[1]

    x0 = np.tile([-3.0, -1.0, -3.0, -1.0], n // 4)
    return Problem("WOODS", n, f, grad, hess, x0, f_known=0.0)


def _chainwoo(n):
    if n < 4 or n % 2 != 0:
        raise UnknownProblemError("CHAINWOO requires even dim >= 4")
    offsets = list(range(0, n - 2, 2))  # groups overlap by two variables

    def f(x):
        return 1.0 + float(sum(_woods_terms(x, off) for off in offsets))

    def grad(x):
        return _woods_grad_hess(x, offsets, n)[0]

    def hess(x):
        return _woods_grad_hess(x, offsets, n)[1]

    x0 = np.empty(n)
    x0[0::2] = -2.0
    x0[1::2] = 0.0
    x0[:4] = [-3.0, -1.0, -3.0, -1.0]
    return Problem("CHAINWOO", n, f, grad, hess, x0, f_known=1.0)


def _brybnd(n, lower=5, upper=1):
    def bands(i):
        return [j for j in range(max(0, i - lower), min(n, i + upper + 1)) if j != i]

    neighbors = [bands(i) for i in range(n)]

    def residuals(x):
        r = x * (2.0 + 5.0 * x**2) + 1.0
        for i in range(n):
            js = neighbors[i]
            r[i] -= float(np.sum(x[js] * (1.0 + x[js])))
        return r

    def jac(x):
        j = np.zeros((n, n))
        for i in range(n):
            j[i, i] = 2.0 + 15.0 * x[i] ** 2
            for k in neighbors[i]:
                j[i, k] = -(1.0 + 2.0 * x[k])
        return j

    def f(x):
        r = residuals(x)
        return float(r @ r)

    def grad(x):
        return 2.0 * jac(x).T @ residuals(x)

    def hess(x):
        r = residuals(x)
        j = jac(x)
        h = 2.0 * j.T @ j
        diag = np.zeros(n)
        for i in range(n):
            diag[i] += 30.0 * x[i] * r[i]
            for k in neighbors[i]:
                diag[k] += -2.0 * r[i]
        h[np.diag_indices(n)] += 2.0 * diag
        return h

    return Problem("BRYBND", n, f, grad, hess, -np.ones(n))


def _tquartic(n):
    if n < 2:
        raise UnknownProblemError("TQUARTIC requires dim >= 2")

    def f(x):
        r = x[0] ** 2 - x[1:] ** 2
        return float((x[0] - 1.0) ** 2 + r @ r)

    def grad(x):
        r = x[0] ** 2 - x[1:] ** 2
        g = np.zeros(n)
        g[0] = 2.0 * (x[0] - 1.0) + 4.0 * x[0] * float(np.sum(r))
        g[1:] = -4.0 * x[1:] * r
        return g

    def hess(x):
        r = x[0] ** 2 - x[1:] ** 2
        h = np.zeros((n, n))
        h[0, 0] = 2.0 + 8.0 * (n - 1) * x[0] ** 2 + 4.0 * float(np.sum(r))
        h[0, 1:] = -8.0 * x[0] * x[1:]
        h[1:, 0] = h[0, 1:]
        i = np.arange(1, n)
        h[i, i] = 8.0 * x[1:] ** 2 - 4.0 * r
        return h

    return Problem("TQUARTIC", n, f, grad, hess, np.full(n, 0.1), f_known=0.0)


def _noncvxu2(n):
    if n < 2:
        raise UnknownProblemError("NONCVXU2 requires dim >= 2")
    idx = np.arange(1, n + 1)
    a = (3 * idx - 2) % n  # 0-based partner indices
    b = (7 * idx - 3) % n

    def v(x):
        return x + x[a] + x[b]

    def f(x):
        w = v(x)
        return float(np.sum(w * w + 4.0 * np.cos(w)))

    def grad(x):
        w = v(x)
        dv = 2.0 * w - 4.0 * np.sin(w)
        g = dv.copy()
        np.add.at(g, a, dv)
        np.add.at(g, b, dv)
        return g

    def hess(x):
        w = v(x)
        d2 = 2.0 - 4.0 * np.cos(w)
        h = np.zeros((n, n))
        for i in range(n):
            u = np.zeros(n)
            u[i] += 1.0
            u[a[i]] += 1.0
            u[b[i]] += 1.0
            h += d2[i] * np.outer(u, u)
        return h

    return Problem("NONCVXU2", n, f, grad, hess, idx.astype(float))


_FACTORY = {
    "SPHERE": _sphere,
    "SADDLE": _saddle,
    "GENROSE": _genrose,
    "EXTROSNB": _extrosnb,
    "FLETCHCR": _fletchcr,
    "WOODS": _woods,
    "CHAINWOO": _chainwoo,
    "BRYBND": _brybnd,
    "TQUARTIC": _tquartic,
    "NONCVXU2": _noncvxu2,
}

SUPPORTED_PROBLEMS = tuple(sorted(_FACTORY))


def make_problem(name: str, dim: int) -> Problem:
    key = name.upper()
    if key not in _FACTORY:
        raise UnknownProblemError(
            f"unknown problem {name!r}; supported: {', '.join(SUPPORTED_PROBLEMS)}"
        )
    if dim < 1:
        raise UnknownProblemError("dim must be positive")
    return _FACTORY[key](dim)


def fd_check(problem: Problem, x: np.ndarray, h: float = 1e-5) -> Tuple[float, float]:
    """Max relative errors of analytic grad / Hessian-action vs central FD."""
    if h <= 0:
        raise ValueError("h must be positive")
    x = np.asarray(x, dtype=float)
    n = problem.dim
    g = problem.grad(x)
    g_scale = 1.0 + float(np.max(np.abs(g)))
    grad_err = 0.0
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        fd = (problem.f(x + e) - problem.f(x - e)) / (2.0 * h)
        grad_err = max(grad_err, abs(fd - g[i]) / g_scale)

    hx = problem.hess_dense(x)
    rng = np.random.default_rng(12345)
    hess_err = 0.0
    for _ in range(5):
        d = rng.standard_normal(n)
        d /= np.linalg.norm(d)
        fd = (problem.grad(x + h * d) - problem.grad(x - h * d)) / (2.0 * h)
        hd = hx @ d
        scale = 1.0 + float(np.max(np.abs(hd)))
        hess_err = max(hess_err, float(np.max(np.abs(fd - hd))) / scale)
    return grad_err, hess_err
