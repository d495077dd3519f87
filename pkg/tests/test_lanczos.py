import numpy as np
import pytest

from cubicreg.lanczos import (lanczos_iteration_cap, min_eig_estimate,
                              tridiag_count_below, tridiag_smallest_eig)
from cubicreg.operators import EvalCounters, SymmetricOperator


def _tridiag_dense(d, e):
    t = np.diag(d)
    n = len(d)
    for i in range(n - 1):
        t[i, i + 1] = t[i + 1, i] = e[i]
    return t


def test_sturm_count_matches_numpy():
    rng = np.random.default_rng(0)
    d = rng.standard_normal(12)
    e = rng.standard_normal(11)
    lam = np.linalg.eigvalsh(_tridiag_dense(d, e))
    for x in (-3.0, -0.5, 0.0, 0.7, 2.5):
        assert tridiag_count_below(d, e, x) == int(np.sum(lam < x))


def test_tridiag_smallest_eig():
    rng = np.random.default_rng(1)
    d = rng.standard_normal(20)
    e = rng.standard_normal(19)
    lam_min = np.linalg.eigvalsh(_tridiag_dense(d, e))[0]
    assert tridiag_smallest_eig(d, e) == pytest.approx(lam_min, abs=1e-10)


def test_iteration_cap_shrinks_with_looser_eps():
    tight = lanczos_iteration_cap(1000, 10.0, 1e-6, 1e-2)
    loose = lanczos_iteration_cap(1000, 10.0, 1e-2, 1e-2)
    assert loose <= tight
    assert lanczos_iteration_cap(5, 10.0, 1e-8, 1e-2) == 5  # capped at n


def test_min_eig_estimate_random_symmetric():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((60, 60))
    h = 0.5 * (a + a.T)
    lam_min = np.linalg.eigvalsh(h)[0]
    c = EvalCounters()
    est = min_eig_estimate(SymmetricOperator.from_dense(h), 1e-6, 1e-3, 0, c)
    assert est.alpha >= lam_min - 1e-10  # Rayleigh quotient upper-bounds from below
    assert est.alpha <= lam_min + 1e-5
    assert c.n_eig == 1
    assert c.n_prod > 0


def test_min_eig_estimate_diagonal_exact():
    h = np.diag([4.0, -2.0, 1.0, 3.0])
    est = min_eig_estimate(SymmetricOperator.from_dense(h), 1e-10, 1e-3, 1,
                           EvalCounters())
    assert est.alpha == pytest.approx(-2.0, abs=1e-8)
    # the returned direction is a unit vector achieving the estimate
    assert np.linalg.norm(est.v) == pytest.approx(1.0, abs=1e-12)
    assert est.v @ h @ est.v == pytest.approx(est.alpha, abs=1e-10)


def test_ritz_trace_monotone_nonincreasing():
    rng = np.random.default_rng(4)
    a = rng.standard_normal((40, 40))
    h = 0.5 * (a + a.T)
    est = min_eig_estimate(SymmetricOperator.from_dense(h), 1e-8, 1e-3, 0,
                           EvalCounters())
    trace = est.ritz_trace
    assert all(trace[i + 1] <= trace[i] + 1e-12 for i in range(len(trace) - 1))


def test_identity_breakdown_handled():
    est = min_eig_estimate(SymmetricOperator.from_dense(np.eye(10)), 1e-8,
                           1e-3, 0, EvalCounters())
    assert est.alpha == pytest.approx(1.0, abs=1e-10)
