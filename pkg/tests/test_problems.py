import numpy as np
import pytest

from ldg_bakhvalov.problems import PROBLEM_NAMES, ProblemError, make_problem, residual_check


@pytest.mark.parametrize("name", PROBLEM_NAMES)
@pytest.mark.parametrize("eps", [1e-2, 1e-3])
def test_manufactured_residual(name, eps):
    p = make_problem(name, eps)
    s = np.linspace(0, 1, 51)
    scale = np.max(np.abs(p.f(*np.meshgrid(s, s))))
    tol = 1e-10 if name == "poly_patch" else 1e-6 * scale
    assert residual_check(p) <= tol


@pytest.mark.parametrize("name", PROBLEM_NAMES)
def test_dirichlet_data_and_reaction(name):
    p = make_problem(name, 1e-6)
    s = np.linspace(0, 1, 101)
    for x, y in ((s, 0 * s), (s, 0 * s + 1), (0 * s, s), (0 * s + 1, s)):
        assert np.max(np.abs(p.exact.u(x, y))) <= 1e-14
    assert p.reaction_min > 0
    X, Y = np.meshgrid(s, s)
    assert np.min(p.energy_weight(X, Y)) > 0


def test_layer_shape():
    eps = 1e-4
    p = make_problem("layer_const", eps)
    # away from x=1 the solution is smooth; inside the layer it drops to zero
    assert p.exact.u(0.5, 0.5) == pytest.approx(0.25, rel=1e-12)
    assert p.exact.u(1 - eps, 0.5) == pytest.approx(0.5 * (1 - eps) * (1 - np.exp(-1)), rel=1e-10)


def test_exact_flux_scaling():
    eps = 1e-3
    p = make_problem("layer_var", eps)
    u, px, qy = p.exact_flux()
    x, y = 0.3, 0.8
    assert px(x, y) == pytest.approx(eps * p.exact.ux(x, y))
    assert qy(x, y) == pytest.approx(eps * p.exact.uy(x, y))


def test_gradient_matches_finite_differences():
    p = make_problem("layer_var", 1e-2)
    x, y, h = 0.41, 0.93, 1e-6
    fd = (p.exact.u(x + h, y) - p.exact.u(x - h, y)) / (2 * h)
    assert p.exact.ux(x, y) == pytest.approx(fd, rel=1e-6)


@pytest.mark.parametrize("name,eps", [("nope", 1e-3), ("layer_const", 0.0), ("layer_const", 1.0)])
def test_bad_problem(name, eps):
    with pytest.raises(ProblemError):
        make_problem(name, eps)


def test_constant_coefficient_flags():
    assert make_problem("layer_const", 1e-3).constant_coefficients
    assert not make_problem("layer_var", 1e-3).constant_coefficients
