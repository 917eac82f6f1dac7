import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldg_bakhvalov.dg_space import DGField, DGIndexError, DGSolution
from ldg_bakhvalov.quadrature import legendre_values


def test_vector_roundtrip(rng):
    f = DGField(rng.standard_normal((4, 4, 3, 3)))
    g = DGField.from_vector(f.to_vector(), 4, 2)
    assert np.array_equal(f.coeffs, g.coeffs)
    assert f.ndofs == 16 * 9


def test_vector_ordering_is_x_fastest():
    f = DGField.zeros(4, 1)
    f.coeffs[1, 0, 0, 1] = 1.0  # element i=2, j=1, local (m=0, n=1)
    vec = f.to_vector()
    assert np.flatnonzero(vec).tolist() == [1 * 4 + 1 * 2 + 0]


def test_eval_is_one_based(rng):
    f = DGField(rng.standard_normal((3, 3, 2, 2)))
    c = f.coeffs[2, 0]
    val = f.eval(3, 1, 0.5, -0.25)
    assert val == pytest.approx(c[0, 0] + 0.5 * c[1, 0] - 0.25 * c[0, 1] - 0.125 * c[1, 1])
    with pytest.raises(DGIndexError):
        f.eval(0, 1, 0.0, 0.0)
    with pytest.raises(DGIndexError):
        f.eval(1, 4, 0.0, 0.0)


def test_traces_and_jumps(rng):
    k = 2
    f = DGField(rng.standard_normal((4, 4, k + 1, k + 1)))
    r = np.linspace(-1, 1, 5)
    V, _ = legendre_values(k, r)
    jx = f.jumps(0)
    for i in range(5):
        for j in range(1, 5):
            plus = f.eval(i + 1, j, -1.0, r) if i < 4 else 0.0
            minus = f.eval(i, j, 1.0, r) if i > 0 else 0.0
            assert np.allclose(jx[i, j - 1] @ V.T, plus - minus)
    jy = f.jumps(1)
    assert np.allclose(jy[0, 2] @ V.T, f.eval(3, 1, r, -1.0))
    assert np.allclose(jy[4, 2] @ V.T, -f.eval(3, 4, r, 1.0))


def test_one_sided_trace_errors():
    f = DGField.zeros(4, 1)
    with pytest.raises(DGIndexError):
        f.trace(0, 0, "-")
    with pytest.raises(DGIndexError):
        f.trace(1, 4, "+")
    with pytest.raises(DGIndexError):
        f.trace(0, 5, "+")
    assert f.trace(0, 4, "-").shape == (4, 2)


def test_shape_validation():
    with pytest.raises(ValueError):
        DGField(np.zeros((2, 3, 2, 2)))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), a=st.floats(-3, 3), b=st.floats(-3, 3))
def test_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    x, y = DGSolution.random(2, 1, rng), DGSolution.random(2, 1, rng)
    z = x * a + y * b
    assert np.allclose(z.to_vector(), a * x.to_vector() + b * y.to_vector())
    assert np.allclose((x - x).to_vector(), 0.0)


def test_solution_roundtrip(rng):
    w = DGSolution.random(4, 2, rng)
    v = DGSolution.from_vector(w.to_vector(), 4, 2)
    assert np.array_equal(w.u.coeffs, v.u.coeffs) and np.array_equal(w.q.coeffs, v.q.coeffs)
    assert w.to_vector().size == 3 * 16 * 9
