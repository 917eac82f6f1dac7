"""Model convection-diffusion problems with manufactured exponential layers.

Every problem solves ``-eps*Lap(u) + a1*u_x + a2*u_y + b*u = f`` on the unit
square with ``u = 0`` on the boundary.  Coefficients and exact solutions are
plain vectorised callables of ``(x, y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

Fn = Callable[[np.ndarray, np.ndarray], np.ndarray]

PROBLEM_NAMES = ("poly_patch", "layer_const", "layer_var")


class ProblemError(ValueError):
    pass


class Exact(NamedTuple):
    u: Fn
    ux: Fn
    uy: Fn


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    epsilon: float
    a1: Fn
    a2: Fn
    b: Fn
    div_alpha: Fn
    f: Fn
    exact: Exact | None = None
    alpha1: float = 1.0
    alpha2: float = 1.0
    constant_coefficients: bool = False
    has_layer: bool = True
    reaction_min: float = float("nan")

    def reaction(self, x, y):
        """``b - div(alpha)``, the zeroth-order coefficient of the discrete form."""
        return self.b(x, y) - self.div_alpha(x, y)

    def energy_weight(self, x, y):
        """``b - div(alpha)/2``, the weight of ``u`` in the energy norm."""
        return self.b(x, y) - 0.5 * self.div_alpha(x, y)

    def exact_flux(self):
        """Closed forms of ``(u, p, q) = (u, eps*u_x, eps*u_y)``."""
        if self.exact is None:
            raise ProblemError(f"problem {self.name!r} has no exact solution")
        eps = self.epsilon
        ex = self.exact
        return ex.u, (lambda x, y: eps * ex.ux(x, y)), (lambda x, y: eps * ex.uy(x, y))


def _const(c):
    return lambda x, y: np.full(np.broadcast(x, y).shape, float(c))


def _layer_factor(eps):
    """g(s) = s(1 - exp(-(1-s)/eps)) and its first two derivatives."""

    def g(s):
        return s * -np.expm1(-(1.0 - s) / eps)

    def dg(s):
        e = np.exp(-(1.0 - s) / eps)
        return -np.expm1(-(1.0 - s) / eps) - s * e / eps

    def d2g(s):
        e = np.exp(-(1.0 - s) / eps)
        return -(2.0 / eps) * e - (s / eps**2) * e

    return g, dg, d2g


def _poly_factor():
    return (lambda s: s * (1.0 - s)), (lambda s: 1.0 - 2.0 * s), (lambda s: np.full(np.shape(s), -2.0))


def _product_solution(g, dg, d2g):
    u = lambda x, y: g(x) * g(y)
    ux = lambda x, y: dg(x) * g(y)
    uy = lambda x, y: g(x) * dg(y)
    lap = lambda x, y: d2g(x) * g(y) + g(x) * d2g(y)
    return Exact(u, ux, uy), lap


def make_problem(name: str, epsilon: float) -> ProblemSpec:
    if not 0 < epsilon < 1:
        raise ProblemError(f"epsilon must lie in (0, 1), got {epsilon!r}")
    eps = float(epsilon)

    if name == "poly_patch":
        exact, lap = _product_solution(*_poly_factor())
        a1 = a2 = _const(1.0)
        b, div = _const(2.0), _const(0.0)
        const, layer = True, False
        alpha = (1.0, 1.0)
    elif name == "layer_const":
        exact, lap = _product_solution(*_layer_factor(eps))
        a1 = a2 = _const(1.0)
        b, div = _const(2.0), _const(0.0)
        const, layer = True, True
        alpha = (1.0, 1.0)
    elif name == "layer_var":
        exact, lap = _product_solution(*_layer_factor(eps))
        a1 = lambda x, y: 2.0 + x + 0.0 * y
        a2 = lambda x, y: 2.0 + y + 0.0 * x
        b, div = _const(4.0), _const(2.0)
        const, layer = False, True
        # decay rate of the manufactured layer; below min(a1) = min(a2) = 2
        alpha = (1.0, 1.0)
    else:
        raise ProblemError(f"unknown problem {name!r}; choose from {', '.join(PROBLEM_NAMES)}")

    def f(x, y, _u=exact, _lap=lap):
        return -eps * _lap(x, y) + a1(x, y) * _u.ux(x, y) + a2(x, y) * _u.uy(x, y) + b(x, y) * _u.u(x, y)

    spec = ProblemSpec(name, eps, a1, a2, b, div, f, exact, alpha[0], alpha[1], const, layer)
    return _validated(spec)


def _validated(p: ProblemSpec) -> ProblemSpec:
    s = np.linspace(0.0, 1.0, 101)
    X, Y = np.meshgrid(s, s, indexing="ij")
    if np.min(p.a1(X, Y)) <= 0 or np.min(p.a2(X, Y)) <= 0:
        raise ProblemError("convection field must be positive componentwise")
    w = p.energy_weight(X, Y)
    if np.min(w) <= 0:
        raise ProblemError("b - div(alpha)/2 must be positive")
    if p.exact is not None:
        scale = max(1.0, float(np.max(np.abs(p.exact.u(X, Y)))))
        zero, one = np.zeros_like(s), np.ones_like(s)
        edges = [(zero, s), (one, s), (s, zero), (s, one)]
        worst = max(float(np.max(np.abs(p.exact.u(x, y)))) for x, y in edges)
        if worst > 1e-12 * scale:
            raise ProblemError(f"exact solution does not vanish on the boundary ({worst:.3g})")
    object.__setattr__(p, "reaction_min", float(np.min(w)))
    return p


def _graded_samples(eps: float, n: int) -> np.ndarray:
    """Uniform samples plus samples clustered in the layer next to s = 1."""
    layer = 1.0 - eps * np.linspace(0.0, 30.0, n)
    return np.unique(np.concatenate([np.linspace(0.0, 1.0, n), layer[layer >= 0]]))


def residual_check(p: ProblemSpec, grid: int = 41) -> float:
    """Max of ``|f - (-eps*Lap(u) + alpha.grad(u) + b*u)|`` using 5-point FD of ``u``.

    The FD step is ``min(1e-2, eps/100)`` for layer problems so the layer is
    resolved, and ``1e-2`` otherwise (the stencils are exact on quartics).
    """
    if p.exact is None:
        raise ProblemError(f"problem {p.name!r} has no exact solution")
    s = _graded_samples(p.epsilon, grid)
    X, Y = np.meshgrid(s, s, indexing="ij")
    h = min(1e-2, p.epsilon / 100.0) if p.has_layer else 1e-2
    u = p.exact.u

    def d1(g):
        return (g(-2) - 8 * g(-1) + 8 * g(1) - g(2)) / (12 * h)

    def d2(g):
        return (-g(-2) + 16 * g(-1) - 30 * g(0) + 16 * g(1) - g(2)) / (12 * h * h)

    gx = lambda m: u(X + m * h, Y)
    gy = lambda m: u(X, Y + m * h)
    lhs = -p.epsilon * (d2(gx) + d2(gy)) + p.a1(X, Y) * d1(gx) + p.a2(X, Y) * d1(gy) + p.b(X, Y) * u(X, Y)
    return float(np.max(np.abs(p.f(X, Y) - lhs)))
