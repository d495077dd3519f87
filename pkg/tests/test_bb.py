import numpy as np
import pytest

from cubicreg.bb import STEP_MAX, STEP_MIN, BbConfig, _bb_step, bb_minimize


def _quadratic(a, b):
    def value_and_grad(z):
        g = a @ z - b
        return 0.5 * z @ a @ z - b @ z, g
    return value_and_grad


def test_converges_on_quadratic():
    rng = np.random.default_rng(3)
    q = rng.standard_normal((15, 15))
    a = q.T @ q + 0.5 * np.eye(15)
    b = rng.standard_normal(15)
    res = bb_minimize(_quadratic(a, b), BbConfig(grad_tol=1e-7), np.zeros(15))
    assert res.status == "converged"
    assert np.allclose(res.z, np.linalg.solve(a, b), atol=1e-6)


def test_bb_step_on_quadratic_recovers_curvature():
    # for h(z) = c/2 * ||z||^2 the step equals 1/c under both formulas
    s = np.array([1.0, -2.0])
    y = 4.0 * s
    assert _bb_step(s, y) == pytest.approx(0.25)


def test_bb_step_clamped_and_fallback():
    s = np.array([1.0, 0.0])
    assert STEP_MIN <= _bb_step(s, 1e20 * s) <= STEP_MAX
    # sign-indefinite curvature falls back to a unit step
    assert _bb_step(s, np.zeros(2)) == 1.0


def test_nonconvex_descent():
    # two-well scalar function: the method must find a stationary point
    def vg(z):
        x = z[0]
        return (x ** 2 - 1.0) ** 2, np.array([4.0 * x * (x ** 2 - 1.0)])
    res = bb_minimize(vg, BbConfig(grad_tol=1e-10), np.array([0.7]))
    assert res.status == "converged"
    assert abs(abs(res.z[0]) - 1.0) < 1e-5


def test_max_iters_status():
    res = bb_minimize(_quadratic(np.eye(2), np.ones(2)),
                      BbConfig(grad_tol=1e-16, max_iters=2), np.zeros(2))
    assert res.status in ("max_iters", "converged")


def test_custom_stop_rule():
    res = bb_minimize(_quadratic(np.eye(3), np.ones(3)),
                      BbConfig(grad_tol=1e-12), np.zeros(3),
                      stop_rule=lambda z, gn: gn <= 0.25)
    assert res.status == "converged"
    assert res.grad_norm <= 0.25


def test_config_validation():
    with pytest.raises(ValueError):
        BbConfig(ls_shrink=0.0)
    with pytest.raises(ValueError):
        BbConfig(grad_tol=-1.0)
