import dataclasses

import numpy as np
import pytest

from ldg_bakhvalov.assembly import AssemblyError, FluxParams, apply_B, assemble
from ldg_bakhvalov.dg_space import DGSolution
from ldg_bakhvalov.mesh import MeshConfig, build_mesh_2d
from ldg_bakhvalov.norms import energy_norm
from ldg_bakhvalov.problems import make_problem
from ldg_bakhvalov.quadrature import gauss_legendre_rule


@pytest.mark.parametrize("name", ["layer_const", "layer_var"])
@pytest.mark.parametrize("flux", [FluxParams(), FluxParams(0.0, 2.5)])
def test_matrix_matches_termwise_form(name, flux, rng):
    eps, k, N = 1e-4, 1, 8
    problem = make_problem(name, eps)
    mesh = build_mesh_2d(MeshConfig(N, 3.0, eps))
    A = assemble(problem, mesh, k, flux).matrix
    for _ in range(25):
        W, Z = DGSolution.random(N, k, rng), DGSolution.random(N, k, rng)
        ref = apply_B(W, Z, problem, mesh, flux)
        got = Z.to_vector() @ (A @ W.to_vector())
        assert got == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_bilinearity(layer_setup, rng):
    problem, mesh = layer_setup
    W1, W2, Z = (DGSolution.random(8, 1, rng) for _ in range(3))
    a, b = 0.7, -2.3
    lhs = apply_B(W1 * a + W2 * b, Z, problem, mesh)
    rhs = a * apply_B(W1, Z, problem, mesh) + b * apply_B(W2, Z, problem, mesh)
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_coercive(layer_setup, rng):
    problem, mesh = layer_setup
    A = assemble(problem, mesh, 1).matrix
    for _ in range(10):
        w = DGSolution.random(8, 1, rng).to_vector()
        assert w @ (A @ w) > 0


def test_zero_source_gives_zero_rhs(layer_setup):
    problem, mesh = layer_setup
    quiet = dataclasses.replace(problem, f=lambda x, y: 0.0 * x * y)
    assert np.all(assemble(quiet, mesh, 2).rhs == 0.0)


def test_shape_and_sparsity(layer_setup):
    problem, mesh = layer_setup
    sys = assemble(problem, mesh, 2)
    assert sys.matrix.shape == (sys.ndofs, sys.ndofs) == (3 * 64 * 9,) * 2
    # each element couples to at most itself and four neighbours
    assert sys.matrix.nnz <= 5 * 3 * 64 * 9 * 3 * 9


@pytest.mark.parametrize("eps", [1e-3, 1e-8])
def test_patch_polynomial_reproduced(eps):
    from ldg_bakhvalov.projections import interpolate
    from ldg_bakhvalov.solver import solve

    k = 2
    problem = make_problem("poly_patch", eps)
    mesh = build_mesh_2d(MeshConfig(8, 4.0, eps))
    W, _ = solve(assemble(problem, mesh, k))
    pi = interpolate(problem, mesh, k)
    # the exact triple lies in V_N^3, so every projection reproduces it
    assert np.max(np.abs(pi.to_vector() - W.to_vector())) <= 1e-8


def test_dump_coo(tmp_path, layer_setup):
    problem, mesh = layer_setup
    sys = assemble(problem, mesh, 1)
    path = tmp_path / "A.coo"
    sys.dump_coo(path)
    lines = path.read_text().splitlines()
    n, m, nnz = map(int, lines[0].lstrip("% ").split())
    assert (n, m, nnz) == (*sys.matrix.shape, sys.matrix.tocoo().nnz)
    data = np.loadtxt(path, comments="%")
    import scipy.sparse as sp

    B = sp.coo_matrix((data[:, 2], (data[:, 0].astype(int), data[:, 1].astype(int))), shape=(n, m))
    assert abs(B - sys.matrix).max() == 0.0


def test_validation_messages():
    problem = make_problem("layer_const", 1e-6)
    mesh = build_mesh_2d(MeshConfig(8, 3.0, 1e-6))
    with pytest.raises(AssemblyError, match="k\\+2"):
        assemble(problem, mesh, 2)
    with pytest.raises(AssemblyError, match="quadrature"):
        assemble(problem, mesh, 1, quad=gauss_legendre_rule(2))
    with pytest.raises(AssemblyError, match="epsilon"):
        assemble(make_problem("layer_const", 1e-5), mesh, 1)
    with pytest.raises(AssemblyError):
        FluxParams(-1.0, 1.0)


def test_energy_identity_variable(rng):
    eps = 1e-4
    problem = make_problem("layer_var", eps)
    mesh = build_mesh_2d(MeshConfig(8, 3.0, eps))
    q = gauss_legendre_rule(6)
    for _ in range(10):
        w = DGSolution.random(8, 1, rng)
        b = apply_B(w, w, problem, mesh, quad=q)
        assert b == pytest.approx(energy_norm(w, problem, mesh, quad=q).total_E ** 2, rel=1e-10)
