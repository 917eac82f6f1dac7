import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldg_bakhvalov.assembly import FluxParams, apply_B, assemble
from ldg_bakhvalov.dg_space import DGSolution
from ldg_bakhvalov.mesh import MeshConfig, build_mesh_2d
from ldg_bakhvalov.norms import energy_norm, interpolation_error, supercloseness_error, true_error
from ldg_bakhvalov.problems import ProblemError, make_problem
from ldg_bakhvalov.projections import interpolate

_EPS = 1e-4
_PROBLEM = make_problem("layer_const", _EPS)
_MESH = build_mesh_2d(MeshConfig(8, 4.0, _EPS))
_MATRIX = {k: assemble(_PROBLEM, _MESH, k).matrix for k in (1, 2)}


@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("flux", [FluxParams(), FluxParams(0.0, 3.0)])
def test_energy_identity(k, flux, rng):
    A = assemble(_PROBLEM, _MESH, k, flux).matrix
    for _ in range(30):
        w = DGSolution.random(8, k, rng)
        v = w.to_vector()
        e2 = energy_norm(w, _PROBLEM, _MESH, flux).total_E ** 2
        assert abs(v @ (A @ v) - e2) <= 1e-12 * e2
        assert abs(apply_B(w, w, _PROBLEM, _MESH, flux) - e2) <= 1e-12 * e2


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), c=st.floats(-1e3, 1e3).filter(lambda v: v == 0 or abs(v) > 1e-100))
def test_homogeneity_and_triangle(seed, c):
    rng = np.random.default_rng(seed)
    x, y = DGSolution.random(8, 1, rng), DGSolution.random(8, 1, rng)
    nx = energy_norm(x, _PROBLEM, _MESH).total_E
    ny = energy_norm(y, _PROBLEM, _MESH).total_E
    assert energy_norm(x * c, _PROBLEM, _MESH).total_E == pytest.approx(abs(c) * nx, rel=1e-12, abs=1e-300)
    assert energy_norm(x + y, _PROBLEM, _MESH).total_E <= (nx + ny) * (1 + 1e-14)


def test_zero_norm():
    e = energy_norm(DGSolution.zeros(8, 2), _PROBLEM, _MESH)
    assert e.total_E == 0.0 and e.total_2 == 0.0


def test_components_sum():
    w = DGSolution.random(8, 1, np.random.default_rng(1))
    e = energy_norm(w, _PROBLEM, _MESH)
    assert e.total_E**2 == pytest.approx(
        e.u_weighted_l2_sq + e.p_scaled_l2_sq + e.q_scaled_l2_sq + e.jump_x_sq + e.jump_y_sq
    )
    assert e.jumps_sq == e.jump_x_sq + e.jump_y_sq


def test_interpolant_has_zero_supercloseness_error_against_itself():
    pi = interpolate(_PROBLEM, _MESH, 1)
    assert supercloseness_error(pi, _PROBLEM, _MESH).total_E == 0.0


def test_true_error_of_interpolant_is_interpolation_error():
    k = 1
    pi = interpolate(_PROBLEM, _MESH, k)
    te = true_error(pi, _PROBLEM, _MESH, interp=pi)
    ie = interpolation_error(_PROBLEM, _MESH, k, interp=pi)
    assert te.total_2 == pytest.approx(ie.eta.total_2, rel=1e-14)
    assert te.linf_eta_u == ie.linf_eta_u


def test_requires_exact_solution():
    import dataclasses

    blind = dataclasses.replace(_PROBLEM, exact=None)
    with pytest.raises(ProblemError):
        supercloseness_error(DGSolution.zeros(8, 1), blind, _MESH)
    with pytest.raises(ProblemError):
        true_error(DGSolution.zeros(8, 1), blind, _MESH)
