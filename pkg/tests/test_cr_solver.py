import numpy as np
import pytest

from cubicreg.cr_solver import (CrConfig, cr_solve, default_max_outer,
                                negative_curvature_step, subsolver_max_iters)
from cubicreg.lanczos import EigenEstimate
from cubicreg.problems import make_problem


def test_config_derived_tolerances():
    cfg = CrConfig(eps_g=9e-4, lipschitz=1.0)
    assert cfg.eps_E == pytest.approx(np.sqrt(9e-4) / 3)
    assert cfg.eps_S == pytest.approx(1e-4)
    assert cfg.eps_S == pytest.approx(cfg.eps_E ** 2 / cfg.lipschitz)


def test_config_validation():
    with pytest.raises(ValueError):
        CrConfig(eps_g=-1.0, lipschitz=1.0)
    with pytest.raises(ValueError):
        CrConfig(eps_g=1e-4, lipschitz=1.0, subsolver="newton")


def test_budgets_positive_and_capped():
    cfg = CrConfig(eps_g=1e-8, lipschitz=100.0)
    assert default_max_outer(cfg, 1e9) == 10 ** 6
    assert subsolver_max_iters(0.01) == 50 * 10 + 1000


def test_negative_curvature_step_descends():
    rng = np.random.default_rng(0)
    g = rng.standard_normal(5)
    v = rng.standard_normal(5)
    v /= np.linalg.norm(v)
    eig = EigenEstimate(alpha=-0.7, v=v, target_eps=1e-6, iters_used=3)
    d = negative_curvature_step(eig, g, 2.0)
    assert d @ g <= 0.0
    assert np.linalg.norm(d) == pytest.approx(0.7 / 2.0)


def test_sphere_converges_to_origin():
    p = make_problem("SPHERE", 8)
    rep = cr_solve(p, p.x0_standard, CrConfig(eps_g=1e-8, lipschitz=2.0))
    assert rep.status == "stationary"
    assert np.linalg.norm(rep.x_final) < 1e-6
    assert rep.grad_norm_final <= 1e-8


def test_saddle_escapes_to_second_order_point():
    p = make_problem("SADDLE", 2)
    # start exactly on the unstable manifold apart from a tiny nudge
    rep = cr_solve(p, np.array([0.5, 1e-8]), CrConfig(eps_g=1e-6,
                                                      lipschitz=20.0))
    assert rep.status == "stationary"
    assert rep.f_final == pytest.approx(-0.25, abs=1e-6)
    assert abs(abs(rep.x_final[1]) - 1.0) < 1e-3


def test_monotone_descent_and_log_shape():
    p = make_problem("GENROSE", 20)
    rep = cr_solve(p, p.x0_standard, CrConfig(eps_g=1e-4, lipschitz=500.0))
    assert rep.status == "stationary"
    fs = [row.f for row in rep.iteration_log]
    assert all(b <= a + 1e-12 for a, b in zip(fs, fs[1:]))
    assert rep.iteration_log[-1].branch == "terminate"
    assert all(row.k == i for i, row in enumerate(rep.iteration_log))


def test_bb_subsolver_agrees():
    p = make_problem("SPHERE", 6)
    rep = cr_solve(p, p.x0_standard,
                   CrConfig(eps_g=1e-7, lipschitz=2.0, subsolver="bb"))
    assert rep.status == "stationary"
    assert rep.grad_norm_final <= 1e-7


def test_seeded_runs_are_reproducible():
    p = make_problem("GENROSE", 15)
    cfg = CrConfig(eps_g=1e-4, lipschitz=500.0, rng_seed=3)
    r1 = cr_solve(p, p.x0_standard, cfg)
    r2 = cr_solve(p, p.x0_standard, cfg)
    assert r1.counters.n_prod == r2.counters.n_prod
    assert r1.f_final == r2.f_final
    assert np.array_equal(r1.x_final, r2.x_final)


def test_max_outer_returns_best_iterate():
    p = make_problem("GENROSE", 20)
    rep = cr_solve(p, p.x0_standard,
                   CrConfig(eps_g=1e-8, lipschitz=500.0, max_outer=3))
    assert rep.status == "max_outer"
    assert rep.n_outer == 3
    assert rep.f_final <= p.f(p.x0_standard)
