import numpy as np
import pytest

from cubicreg.problems import (SUPPORTED_PROBLEMS, UnknownProblemError,
                               fd_check, make_problem)

_DIMS = {"SADDLE": 2, "WOODS": 8, "CHAINWOO": 8}


@pytest.mark.parametrize("name", SUPPORTED_PROBLEMS)
def test_derivatives_match_finite_differences(name):
    p = make_problem(name, _DIMS.get(name, 10))
    rng = np.random.default_rng(42)
    for _ in range(3):
        x = p.x0_standard + 0.5 * rng.standard_normal(p.dim)
        grad_err, hess_err = fd_check(p, x)
        assert grad_err < 1e-5, name
        assert hess_err < 1e-4, name


@pytest.mark.parametrize("name", SUPPORTED_PROBLEMS)
def test_hessian_symmetric(name):
    p = make_problem(name, _DIMS.get(name, 10))
    rng = np.random.default_rng(1)
    x = p.x0_standard + 0.1 * rng.standard_normal(p.dim)
    h = p.hess_dense(x)
    assert np.allclose(h, h.T, atol=1e-12), name


def test_known_minima():
    genrose = make_problem("GENROSE", 10)
    assert genrose.f(np.ones(10)) == pytest.approx(1.0)
    assert np.linalg.norm(genrose.grad(np.ones(10))) < 1e-12

    woods = make_problem("WOODS", 8)
    assert woods.f(np.ones(8)) == pytest.approx(0.0)

    chainwoo = make_problem("CHAINWOO", 8)
    assert chainwoo.f(np.ones(8)) == pytest.approx(1.0)

    tq = make_problem("TQUARTIC", 10)
    assert tq.f(np.ones(10)) == pytest.approx(0.0)

    saddle = make_problem("SADDLE", 2)
    for sign in (1.0, -1.0):
        x = np.array([0.0, sign])
        assert saddle.f(x) == pytest.approx(-0.25)
        assert np.linalg.norm(saddle.grad(x)) < 1e-12
    # the origin is a strict saddle: gradient zero, negative curvature
    assert np.linalg.norm(saddle.grad(np.zeros(2))) == 0.0
    assert np.linalg.eigvalsh(saddle.hess_dense(np.zeros(2)))[0] < 0


def test_sphere_is_quadratic():
    p = make_problem("SPHERE", 5)
    x = np.arange(5.0)
    assert p.f(x) == pytest.approx(0.5 * x @ x)
    assert np.allclose(p.hess_dense(x), np.eye(5))


def test_extrosnb_and_fletchcr_start_points():
    assert np.all(make_problem("EXTROSNB", 10).x0_standard == -1.0)
    assert np.all(make_problem("FLETCHCR", 10).x0_standard == 0.0)


def test_hess_op_matches_dense():
    p = make_problem("BRYBND", 12)
    rng = np.random.default_rng(2)
    x = p.x0_standard + 0.1 * rng.standard_normal(12)
    op = p.hess_op(x)
    v = rng.standard_normal(12)
    assert np.allclose(op.matvec(v), p.hess_dense(x) @ v)


def test_unknown_problem_error_lists_names():
    with pytest.raises(UnknownProblemError) as exc:
        make_problem("NOPE", 10)
    assert "GENROSE" in str(exc.value)


def test_woods_dimension_validation():
    with pytest.raises(ValueError):
        make_problem("WOODS", 10)  # must be a multiple of 4


def test_fd_check_rejects_bad_step():
    p = make_problem("SPHERE", 3)
    with pytest.raises(ValueError):
        fd_check(p, np.zeros(3), h=0.0)
