"""Local Gauss-Radau projections onto Q^k and the composite interpolant.

Each projection fixes (k+1)^2 linear functionals per element: interior
moments against a Legendre subspace plus moments of one or two one-sided
traces (and for ``pi_minus`` a corner value).  In reference coordinates the
functional matrix is the same on every element, so it is factorised once per
``(kind, k)`` and applied to all elements at once.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .dg_space import DGField, DGSolution
from .mesh import Mesh2D
from .quadrature import QuadratureRule, gauss_legendre_rule, legendre_values

KINDS = ("pi_minus", "pi_x_minus", "pi_y_minus", "pi_x_plus", "pi_y_plus")

# (interior x-degree cap, interior y-degree cap) relative to k, and trace faces
_LAYOUT = {
    "pi_minus": (-1, -1, ("right", "top", "corner")),
    "pi_x_minus": (-1, 0, ("right",)),
    "pi_x_plus": (-1, 0, ("left",)),
    "pi_y_minus": (0, -1, ("top",)),
    "pi_y_plus": (0, -1, ("bottom",)),
}


def _conditions(kind: str, k: int):
    """Enumerate the defining functionals as ``(where, a, b)`` tuples.

    ``where`` is 'interior', a face name, or 'corner'; ``a``/``b`` are the
    Legendre degrees of the test function in x/y (``None`` where unused).
    """
    if kind not in _LAYOUT:
        raise ValueError(f"unknown projection kind {kind!r}")
    dx, dy, faces = _LAYOUT[kind]
    conds = [("interior", a, b) for a in range(k + 1 + dx) for b in range(k + 1 + dy)]
    for face in faces:
        if face == "corner":
            conds.append(("corner", None, None))
            continue
        # pi_minus tests its faces against P^{k-1}; single-face kinds against P^k
        top_deg = k if kind != "pi_minus" else k - 1
        if face in ("right", "left"):
            conds += [(face, None, b) for b in range(top_deg + 1)]
        else:
            conds += [(face, a, None) for a in range(top_deg + 1)]
    assert len(conds) == (k + 1) ** 2
    return conds


class _Sampler:
    """Samples of a function on every element, in reference layout."""

    def __init__(self, vol, right, left, top, bottom, corner):
        self.vol = vol  # (..., q, q)
        self.right = right  # (..., q) along yhat
        self.left = left
        self.top = top  # (..., q) along xhat
        self.bottom = bottom
        self.corner = corner  # (...)


def _functionals(s: _Sampler, conds, k: int, rule: QuadratureRule) -> np.ndarray:
    P, _ = legendre_values(k, rule.nodes)
    w = rule.weights
    wP = w[:, None] * P  # (q, k+1)
    vol_m = np.einsum("...ab,am,bn->...mn", s.vol, wP, wP, optimize=True)
    edge = {name: np.einsum("...a,am->...m", getattr(s, name), wP) for name in ("right", "left", "top", "bottom")}
    cols = []
    for where, a, b in conds:
        if where == "interior":
            cols.append(vol_m[..., a, b])
        elif where == "corner":
            cols.append(s.corner)
        elif where in ("right", "left"):
            cols.append(edge[where][..., b])
        else:
            cols.append(edge[where][..., a])
    return np.stack(cols, axis=-1)


def _basis_sampler(k: int, rule: QuadratureRule) -> _Sampler:
    """Samples of every reference basis function, leading axis = basis index m*(k+1)+n."""
    P, _ = legendre_values(k, rule.nodes)
    ones = np.ones(k + 1)
    alt = (-1.0) ** np.arange(k + 1)
    vol = np.einsum("am,bn->mnab", P, P).reshape((k + 1) ** 2, rule.n, rule.n)
    right = np.einsum("m,bn->mnb", ones, P).reshape(-1, rule.n)
    left = np.einsum("m,bn->mnb", alt, P).reshape(-1, rule.n)
    top = np.einsum("am,n->mna", P, ones).reshape(-1, rule.n)
    bottom = np.einsum("am,n->mna", P, alt).reshape(-1, rule.n)
    corner = np.einsum("m,n->mn", ones, ones).ravel()
    return _Sampler(vol, right, left, top, bottom, corner)


@lru_cache(maxsize=None)
def functional_matrix(kind: str, k: int) -> np.ndarray:
    """Square matrix ``M[c, b]`` = functional ``c`` applied to basis ``b``."""
    rule = gauss_legendre_rule(k + 1)
    conds = _conditions(kind, k)
    M = _functionals(_basis_sampler(k, rule), conds, k, rule)  # (nbasis, ncond)
    return M.T.copy()


@lru_cache(maxsize=None)
def _inverse(kind: str, k: int) -> np.ndarray:
    return np.linalg.inv(functional_matrix(kind, k))


def _sample(z, xa, xb, ya, yb, rule: QuadratureRule) -> _Sampler:
    """Evaluate ``z`` on arrays of elements with bounds ``xa..yb`` (broadcastable)."""
    r = rule.nodes
    xq = xa[..., None] + (xb - xa)[..., None] * (r + 1.0) / 2.0
    yq = ya[..., None] + (yb - ya)[..., None] * (r + 1.0) / 2.0
    vol = z(xq[..., :, None], yq[..., None, :])
    right = z(xb[..., None], yq)
    left = z(xa[..., None], yq)
    top = z(xq, yb[..., None])
    bottom = z(xq, ya[..., None])
    corner = z(xb, yb)
    shape = np.broadcast(xa, ya).shape
    b = lambda a, extra: np.broadcast_to(a, shape + extra)
    q = rule.n
    return _Sampler(b(vol, (q, q)), b(right, (q,)), b(left, (q,)), b(top, (q,)), b(bottom, (q,)), b(corner, ()))


def _element_bounds(mesh: Mesh2D):
    x, y = mesh.mesh_x.points, mesh.mesh_y.points
    xa, ya = np.meshgrid(x[:-1], y[:-1], indexing="ij")
    xb, yb = np.meshgrid(x[1:], y[1:], indexing="ij")
    return xa, xb, ya, yb


def default_rule(k: int) -> QuadratureRule:
    return gauss_legendre_rule(k + 5)


def project_element(z, element, kind: str, k: int, quad: QuadratureRule | None = None) -> np.ndarray:
    """Project ``z`` on one element ``((xa, xb), (ya, yb))``; returns ``(k+1, k+1)`` coefficients."""
    quad = quad or default_rule(k)
    (xa, xb), (ya, yb) = element
    s = _sample(z, np.float64(xa), np.float64(xb), np.float64(ya), np.float64(yb), quad)
    rhs = _functionals(s, _conditions(kind, k), k, quad)
    return (_inverse(kind, k) @ rhs).reshape(k + 1, k + 1)


def project(z, mesh: Mesh2D, kind: str, k: int, quad: QuadratureRule | None = None) -> DGField:
    """Apply one projection kind on every element of ``mesh``."""
    quad = quad or default_rule(k)
    s = _sample(z, *_element_bounds(mesh), quad)
    rhs = _functionals(s, _conditions(kind, k), k, quad)
    c = np.einsum("cd,ijd->ijc", _inverse(kind, k), rhs)
    return DGField(c.reshape(mesh.N, mesh.N, k + 1, k + 1))


def moment_residuals(z, field: DGField, mesh: Mesh2D, kind: str, quad: QuadratureRule | None = None) -> np.ndarray:
    """Defining functionals of ``kind`` applied to ``field - z``, per element ``(N, N, (k+1)^2)``."""
    k = field.k
    quad = quad or default_rule(k)
    conds = _conditions(kind, k)
    exact = _functionals(_sample(z, *_element_bounds(mesh), quad), conds, k, quad)
    disc = np.einsum("cd,ijd->ijc", functional_matrix(kind, k), field.coeffs.reshape(mesh.N, mesh.N, -1))
    return disc - exact


def interpolant_kinds(N: int, scheme: str = "new") -> np.ndarray:
    """Projection kind used on each element ``[i-1, j-1]`` by the composite interpolant.

    ``scheme='new'`` uses ``pi_x_minus`` on column N/2 and ``pi_y_minus`` on
    row N/2 (except the element (N/2, N/2)), ``pi_minus`` elsewhere;
    ``scheme='previous'`` uses ``pi_minus`` everywhere.
    """
    kinds = np.full((N, N), "pi_minus", dtype=object)
    if scheme == "previous":
        return kinds
    if scheme != "new":
        raise ValueError(f"unknown interpolation scheme {scheme!r}")
    h = N // 2 - 1
    kinds[h, :] = "pi_x_minus"
    kinds[:, h] = "pi_y_minus"
    kinds[h, h] = "pi_minus"
    return kinds


def interpolate_P_minus(u, mesh: Mesh2D, k: int, quad: QuadratureRule | None = None, scheme: str = "new") -> DGField:
    kinds = interpolant_kinds(mesh.N, scheme)
    out = np.empty((mesh.N, mesh.N, k + 1, k + 1))
    for kind in set(kinds.ravel()):
        # elementwise kinds are cheap to compute everywhere and select
        out[kinds == kind] = project(u, mesh, kind, k, quad).coeffs[kinds == kind]
    return DGField(out)


def interpolate_flux(p, q, mesh: Mesh2D, k: int, quad: QuadratureRule | None = None):
    return project(p, mesh, "pi_x_plus", k, quad), project(q, mesh, "pi_y_plus", k, quad)


def interpolate(problem, mesh: Mesh2D, k: int, quad: QuadratureRule | None = None, scheme: str = "new"):
    """The interpolant ``(P^- u, pi_x^+ p, pi_y^+ q)`` of the exact solution."""
    u, p, q = problem.exact_flux()
    P, Q = interpolate_flux(p, q, mesh, k, quad)
    return DGSolution(interpolate_P_minus(u, mesh, k, quad, scheme), P, Q)
