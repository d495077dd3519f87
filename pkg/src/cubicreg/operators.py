"""Symmetric-operator access to Hessians with evaluation counting.

Every Hessian touch in the library flows through :func:`apply_hessian` so
that the work counters stay exact across solvers and subsolvers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np


class DimensionMismatchError(ValueError):
    """Vector length does not match the operator dimension."""


@dataclass
class EvalCounters:
    """Exact counts of unit operations accumulated over one solver run."""

    n_f: int = 0
    n_g: int = 0
    n_prod: int = 0
    n_eig: int = 0
    time_total: float = 0.0
    time_eig: float = 0.0

    def snapshot(self) -> dict:
        return {
            "n_f": self.n_f,
            "n_g": self.n_g,
            "n_prod": self.n_prod,
            "n_eig": self.n_eig,
            "time_total": self.time_total,
            "time_eig": self.time_eig,
        }


@dataclass
class SymmetricOperator:
    """Matrix-free action v -> Hv of a symmetric operator.

    ``norm_bound`` is an upper bound on the operator 2-norm; it is lazily
    filled in by :func:`estimate_norm_bound` the first time it is needed.
    """

    dim: int
    matvec: Callable[[np.ndarray], np.ndarray]
    norm_bound: Optional[float] = None
    _dense: Optional[np.ndarray] = field(default=None, repr=False)

    @classmethod
    def from_dense(cls, h: np.ndarray) -> "SymmetricOperator":
        h = np.asarray(h, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DimensionMismatchError(f"expected square matrix, got {h.shape}")
        return cls(dim=h.shape[0], matvec=lambda v: h @ v, _dense=h)


def apply_hessian(op: SymmetricOperator, v: np.ndarray, counters: EvalCounters) -> np.ndarray:
    """Return Hv and charge exactly one Hessian-vector product."""
    v = np.asarray(v, dtype=float)
    if v.shape != (op.dim,):
        raise DimensionMismatchError(
            f"vector of shape {v.shape} incompatible with operator dim {op.dim}"
        )
    counters.n_prod += 1
    return np.asarray(op.matvec(v), dtype=float)


def estimate_norm_bound(
    op: SymmetricOperator,
    iters: int = 50,
    rng_seed: int = 0,
    counters: Optional[EvalCounters] = None,
) -> float:
    """Upper bound on ||H|| via power iteration with a 1.1 safety factor.

    Deterministic for a fixed seed.  The zero operator yields 0.  The result
    is cached on ``op.norm_bound``.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if counters is None:
        counters = EvalCounters()
    rng = np.random.default_rng(rng_seed)
    v = rng.standard_normal(op.dim)
    nv = np.linalg.norm(v)
    if nv == 0.0:  # pragma: no cover - measure zero
        v = np.ones(op.dim)
        nv = np.sqrt(op.dim)
    v /= nv
    est = 0.0
    for _ in range(iters):
        w = apply_hessian(op, v, counters)
        nw = np.linalg.norm(w)
        if nw <= 1e-300:
            op.norm_bound = 0.0
            return 0.0
        est = nw
        v = w / nw
    bound = 1.1 * est
    op.norm_bound = bound
    return bound
