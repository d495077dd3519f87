import numpy as np
import pytest

from cubicreg.nag import NagConfig, nag_minimize, restart_check


def _quadratic(a, b):
    def value_and_grad(z):
        g = a @ z - b
        return 0.5 * z @ a @ z - b @ z, g
    return value_and_grad


def test_converges_on_well_conditioned_quadratic():
    rng = np.random.default_rng(0)
    q = rng.standard_normal((20, 20))
    a = q.T @ q + np.eye(20)
    b = rng.standard_normal(20)
    res = nag_minimize(_quadratic(a, b), NagConfig(grad_tol=1e-6), np.zeros(20))
    assert res.status == "converged"
    assert np.allclose(res.z, np.linalg.solve(a, b), atol=1e-6)


def test_strong_convexity_accelerates():
    # with restarts off, knowing the strong-convexity modulus buys a
    # geometric rate instead of the plain 1/k^2 schedule
    n = 60
    diag = np.linspace(1e-3, 1.0, n)
    a = np.diag(diag)
    b = np.ones(n)
    slow = nag_minimize(_quadratic(a, b),
                        NagConfig(grad_tol=1e-5, restart_enabled=False),
                        np.zeros(n))
    fast = nag_minimize(_quadratic(a, b),
                        NagConfig(grad_tol=1e-5, strong_convexity=1e-3,
                                  restart_enabled=False),
                        np.zeros(n))
    assert fast.status == slow.status == "converged"
    assert fast.iters < slow.iters


def test_max_iters_status():
    a = np.diag([1e-6, 1.0])
    res = nag_minimize(_quadratic(a, np.ones(2)),
                       NagConfig(grad_tol=1e-14, max_iters=3), np.zeros(2))
    assert res.status == "max_iters"
    assert res.iters == 3


def test_restart_rule():
    assert restart_check(1.0, 2.0)
    assert not restart_check(1.0, 1.0)
    assert not restart_check(1.0, 0.5)


def test_per_iteration_evaluation_budget():
    # each accepted iteration costs one evaluation at the extrapolated point,
    # one at the candidate, plus one per rejected backtracking step
    calls = {"n": 0}
    a = np.diag([1.0, 4.0])

    def counting(z):
        calls["n"] += 1
        g = a @ z - np.ones(2)
        return 0.5 * z @ a @ z - z @ np.ones(2), g

    res = nag_minimize(counting, NagConfig(grad_tol=1e-9, max_iters=200),
                       np.zeros(2))
    assert res.status == "converged"
    assert calls["n"] == res.n_evals
    # t0 = 1 with L = 4 forces some backtracks, but never more than a few
    assert calls["n"] <= 2 * res.iters + 3 * res.iters + 2


def test_custom_stop_rule():
    a = np.eye(3)
    res = nag_minimize(_quadratic(a, np.ones(3)),
                       NagConfig(grad_tol=1e-12),
                       np.zeros(3), stop_rule=lambda z, gn: gn <= 0.5)
    assert res.status == "converged"
    assert res.grad_norm <= 0.5


def test_numerical_failure_on_nan():
    def bad(z):
        return np.nan, np.full_like(z, np.nan)
    res = nag_minimize(bad, NagConfig(grad_tol=1e-8), np.zeros(2))
    assert res.status == "numerical_failure"


def test_config_validation():
    with pytest.raises(ValueError):
        NagConfig(beta=1.5)
    with pytest.raises(ValueError):
        NagConfig(theta0=0.0)
    with pytest.raises(ValueError):
        NagConfig(strong_convexity=-1.0)
