import numpy as np
import pytest

from ldg_bakhvalov import MeshConfig, build_mesh_2d, make_problem


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def layer_setup():
    """Small layer_const setup shared by the assembly and norm tests."""
    eps = 1e-4
    problem = make_problem("layer_const", eps)
    mesh = build_mesh_2d(MeshConfig(8, 4.0, eps))
    return problem, mesh


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
