import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldg_bakhvalov.quadrature import (
    affine_map,
    gauss_legendre_rule,
    legendre_table,
    legendre_values,
    physical_nodes,
)


@pytest.mark.parametrize("n", range(1, 11))
def test_gauss_exactness(n):
    rule = gauss_legendre_rule(n)
    for deg in range(2 * n):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert abs(rule.weights @ rule.nodes**deg - exact) <= 1e-14
    # one degree higher is no longer exact
    deg = 2 * n
    assert abs(rule.weights @ rule.nodes**deg - 2.0 / (deg + 1)) > 1e-6


@pytest.mark.parametrize("k", range(0, 7))
def test_legendre_orthogonality(k):
    rule = gauss_legendre_rule(k + 2)
    tab = legendre_table(k, rule.nodes)
    gram = tab.values.T @ (rule.weights[:, None] * tab.values)
    assert np.max(np.abs(gram - np.diag(tab.norms_sq))) <= 1e-13


def test_legendre_against_numpy():
    x = np.linspace(-1, 1, 37)
    val, der = legendre_values(6, x)
    for m in range(7):
        c = np.zeros(m + 1)
        c[m] = 1.0
        assert np.allclose(val[:, m], np.polynomial.legendre.legval(x, c), atol=1e-14)
        assert np.allclose(der[:, m], np.polynomial.legendre.legval(x, np.polynomial.legendre.legder(c)), atol=1e-13)


def test_endpoint_values():
    tab = legendre_table(5, [-1.0, 1.0])
    assert np.allclose(tab.values[1], tab.right)
    assert np.allclose(tab.values[0], tab.left)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(-5, 5), width=st.floats(1e-6, 10))
def test_affine_map_roundtrip(a, width):
    b = a + width
    if not a < b:
        return
    x, jac = affine_map(a, b, np.array([-1.0, 0.0, 1.0]))
    assert x[0] == pytest.approx(a) and x[-1] == pytest.approx(b)
    assert jac == pytest.approx((b - a) / 2)


def test_affine_map_rejects_degenerate():
    with pytest.raises(ValueError):
        affine_map(1.0, 1.0, 0.0)


def test_physical_nodes_integrate_polynomials():
    rule = gauss_legendre_rule(3)
    pts = np.array([0.0, 0.1, 0.7, 1.0])
    xq = physical_nodes(pts, rule)
    h = np.diff(pts)
    integral = np.sum(h[:, None] / 2 * rule.weights * xq**5)
    assert integral == pytest.approx(1 / 6, abs=1e-14)


def test_rule_rejects_zero_nodes():
    with pytest.raises(ValueError):
        gauss_legendre_rule(0)
