"""Gauss-Legendre rules, Legendre basis tables and affine element maps."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return len(self.nodes)


@lru_cache(maxsize=None)
def gauss_legendre_rule(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [-1, 1] (exact to degree 2n-1)."""
    if n < 1:
        raise ValueError(f"need at least one node, got {n}")
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadratureRule(x, w)


def legendre_values(k: int, x):
    """Values and derivatives of P_0..P_k at ``x``.

    Returns two arrays of shape ``x.shape + (k + 1,)``.
    """
    x = np.asarray(x, dtype=float)
    val = np.zeros(x.shape + (k + 1,))
    der = np.zeros_like(val)
    val[..., 0] = 1.0
    if k >= 1:
        val[..., 1] = x
        der[..., 1] = 1.0
    for n in range(1, k):
        # (n+1) P_{n+1} = (2n+1) x P_n - n P_{n-1}
        val[..., n + 1] = ((2 * n + 1) * x * val[..., n] - n * val[..., n - 1]) / (n + 1)
        # P'_{n+1} = P'_{n-1} + (2n+1) P_n
        der[..., n + 1] = der[..., n - 1] + (2 * n + 1) * val[..., n]
    return val, der


@dataclass(frozen=True)
class BasisTable:
    k: int
    nodes: np.ndarray
    values: np.ndarray  # (n_nodes, k+1)
    derivs: np.ndarray  # (n_nodes, k+1)
    right: np.ndarray  # P_m(+1)
    left: np.ndarray  # P_m(-1)

    @property
    def norms_sq(self) -> np.ndarray:
        """Exact ``int_{-1}^{1} P_m^2 = 2 / (2m + 1)``."""
        return 2.0 / (2.0 * np.arange(self.k + 1) + 1.0)


def legendre_table(k: int, nodes) -> BasisTable:
    nodes = np.asarray(nodes, dtype=float)
    val, der = legendre_values(k, nodes)
    m = np.arange(k + 1)
    return BasisTable(k, nodes, val, der, np.ones(k + 1), (-1.0) ** m)


def affine_map(a: float, b: float, r):
    """Map reference points ``r`` in [-1, 1] to [a, b]; returns ``(x, jacobian)``."""
    if not a < b:
        raise ValueError(f"degenerate interval [{a}, {b}]")
    r = np.asarray(r, dtype=float)
    return a + (b - a) * (r + 1.0) / 2.0, (b - a) / 2.0


def physical_nodes(points: np.ndarray, rule: QuadratureRule) -> np.ndarray:
    """Quadrature nodes on every cell of a 1D partition, shape ``(N, n)``."""
    a, b = points[:-1, None], points[1:, None]
    return a + (b - a) * (rule.nodes[None, :] + 1.0) / 2.0
