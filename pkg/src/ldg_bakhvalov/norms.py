"""Energy norm, L2-type norm and interpolation/supercloseness errors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .assembly import FluxParams
from .dg_space import DGField, DGSolution
from .mesh import Mesh2D
from .problems import ProblemError, ProblemSpec
from .projections import interpolate
from .quadrature import QuadratureRule, gauss_legendre_rule, legendre_values


@dataclass(frozen=True)
class ErrorBreakdown:
    u_weighted_l2_sq: float
    p_scaled_l2_sq: float
    q_scaled_l2_sq: float
    jump_x_sq: float = 0.0
    jump_y_sq: float = 0.0

    @property
    def total_2(self) -> float:
        return math.sqrt(self.u_weighted_l2_sq + self.p_scaled_l2_sq + self.q_scaled_l2_sq)

    @property
    def total_E(self) -> float:
        return math.sqrt(self.total_2**2 + self.jump_x_sq + self.jump_y_sq)

    @property
    def jumps_sq(self) -> float:
        return self.jump_x_sq + self.jump_y_sq


def error_rule(k: int) -> QuadratureRule:
    return gauss_legendre_rule(k + 5)


def _nodes(mesh: Mesh2D, rule: QuadratureRule):
    r = rule.nodes
    x, y = mesh.mesh_x.points, mesh.mesh_y.points
    hx, hy = mesh.mesh_x.steps, mesh.mesh_y.steps
    xq = x[:-1, None] + hx[:, None] * (r + 1) / 2
    yq = y[:-1, None] + hy[:, None] * (r + 1) / 2
    wvol = (hx[:, None] * hy[None, :] / 4)[:, :, None, None] * rule.weights[:, None] * rule.weights[None, :]
    return xq, yq, wvol


def energy_norm(w: DGSolution, problem: ProblemSpec, mesh: Mesh2D, flux: FluxParams | None = None,
                quad: QuadratureRule | None = None) -> ErrorBreakdown:
    """Energy-norm breakdown of a discrete triple.

    Vertical-edge jumps are weighted by ``a1/2`` on lines ``0..N-1`` and by
    ``a1/2 + lambda1`` on ``x = 1``; horizontal edges analogously.
    """
    flux = flux or FluxParams()
    quad = quad or gauss_legendre_rule(w.k + 3)
    Vt, _ = legendre_values(w.k, quad.nodes)
    xq, yq, wvol = _nodes(mesh, quad)
    XQ, YQ = xq[:, None, :, None], yq[None, :, None, :]
    eps = problem.epsilon

    u = w.u.tensor_values(Vt, Vt)
    p = w.p.tensor_values(Vt, Vt)
    q = w.q.tensor_values(Vt, Vt)
    u_sq = float(np.sum(wvol * problem.energy_weight(XQ, YQ) * u * u))
    p_sq = float(np.sum(wvol * p * p)) / eps
    q_sq = float(np.sum(wvol * q * q)) / eps

    N = mesh.N
    jumps = []
    for axis, lines, h_t, tq, coef, lam in (
        (0, mesh.mesh_x.points, mesh.mesh_y.steps, yq, problem.a1, flux.lambda1),
        (1, mesh.mesh_y.points, mesh.mesh_x.steps, xq, problem.a2, flux.lambda2),
    ):
        jv = w.u.jumps(axis) @ Vt.T  # (N+1, N, q)
        a = np.stack([coef(lines[i], tq) if axis == 0 else coef(tq, lines[i]) for i in range(N + 1)])
        weight = 0.5 * a
        weight[N] += lam
        wedge = (h_t / 2)[None, :, None] * quad.weights[None, None, :]
        jumps.append(float(np.sum(wedge * weight * jv * jv)))
    return ErrorBreakdown(u_sq, p_sq, q_sq, jumps[0], jumps[1])


def supercloseness_error(W: DGSolution, problem: ProblemSpec, mesh: Mesh2D, k: int | None = None,
                         flux: FluxParams | None = None, quad: QuadratureRule | None = None,
                         interp: DGSolution | None = None) -> ErrorBreakdown:
    """Energy-norm breakdown of ``pi w - W`` with the composite interpolant."""
    if problem.exact is None:
        raise ProblemError(f"problem {problem.name!r} has no exact solution")
    k = W.k if k is None else k
    if interp is None:
        interp = interpolate(problem, mesh, k)
    return energy_norm(interp - W, problem, mesh, flux, quad)


@dataclass(frozen=True)
class TrueError:
    l2: ErrorBreakdown  # jump fields unused
    linf_eta_u: float  # sampled at error-quadrature nodes and element corners

    @property
    def total_2(self) -> float:
        return self.l2.total_2


def _sampled_sup(field: DGField, z, mesh: Mesh2D, rule: QuadratureRule) -> float:
    """Max of ``|z - field|`` over quadrature nodes and the four corners of every element."""
    k = field.k
    r = np.concatenate([rule.nodes, [-1.0, 1.0]])
    Vt, _ = legendre_values(k, r)
    x, y = mesh.mesh_x.points, mesh.mesh_y.points
    xs = x[:-1, None] + mesh.mesh_x.steps[:, None] * (r + 1) / 2
    ys = y[:-1, None] + mesh.mesh_y.steps[:, None] * (r + 1) / 2
    xs[:, -2:], ys[:, -2:] = np.stack([x[:-1], x[1:]], 1), np.stack([y[:-1], y[1:]], 1)
    vals = field.tensor_values(Vt, Vt)
    exact = z(xs[:, None, :, None], ys[None, :, None, :])
    return float(np.max(np.abs(exact - vals)))


def true_error(W: DGSolution, problem: ProblemSpec, mesh: Mesh2D, quad_err: QuadratureRule | None = None,
               interp: DGSolution | None = None) -> TrueError:
    """``|||w - W|||_2`` breakdown and the sampled sup-norm of ``u - P^- u``."""
    if problem.exact is None:
        raise ProblemError(f"problem {problem.name!r} has no exact solution")
    k = W.k
    quad_err = quad_err or error_rule(k)
    Vt, _ = legendre_values(k, quad_err.nodes)
    xq, yq, wvol = _nodes(mesh, quad_err)
    XQ, YQ = xq[:, None, :, None], yq[None, :, None, :]
    u, p, q = problem.exact_flux()
    eps = problem.epsilon
    eu = u(XQ, YQ) - W.u.tensor_values(Vt, Vt)
    ep = p(XQ, YQ) - W.p.tensor_values(Vt, Vt)
    eq = q(XQ, YQ) - W.q.tensor_values(Vt, Vt)
    l2 = ErrorBreakdown(
        float(np.sum(wvol * problem.energy_weight(XQ, YQ) * eu * eu)),
        float(np.sum(wvol * ep * ep)) / eps,
        float(np.sum(wvol * eq * eq)) / eps,
    )
    if interp is None:
        interp = interpolate(problem, mesh, k)
    return TrueError(l2, _sampled_sup(interp.u, u, mesh, quad_err))


@dataclass(frozen=True)
class InterpolationError:
    linf_eta_u: float
    scaled_l2_eta_p: float  # eps^{-1/2} ||p - pi_x^+ p||
    scaled_l2_eta_q: float
    trace_sq_sum: float  # max over grid lines of the summed squared L2 norms of (eta_u)^- traces
    eta: ErrorBreakdown  # |||eta|||_2 components


def interpolation_error(problem: ProblemSpec, mesh: Mesh2D, k: int, interp: DGSolution | None = None,
                        quad_err: QuadratureRule | None = None) -> InterpolationError:
    """Measure ``eta = w - pi w`` without solving anything."""
    if problem.exact is None:
        raise ProblemError(f"problem {problem.name!r} has no exact solution")
    quad_err = quad_err or error_rule(k)
    if interp is None:
        interp = interpolate(problem, mesh, k)
    Vt, _ = legendre_values(k, quad_err.nodes)
    xq, yq, wvol = _nodes(mesh, quad_err)
    XQ, YQ = xq[:, None, :, None], yq[None, :, None, :]
    u, p, q = problem.exact_flux()
    eps = problem.epsilon
    eu = u(XQ, YQ) - interp.u.tensor_values(Vt, Vt)
    ep = p(XQ, YQ) - interp.p.tensor_values(Vt, Vt)
    eq = q(XQ, YQ) - interp.q.tensor_values(Vt, Vt)
    eta = ErrorBreakdown(
        float(np.sum(wvol * problem.energy_weight(XQ, YQ) * eu * eu)),
        float(np.sum(wvol * ep * ep)) / eps,
        float(np.sum(wvol * eq * eq)) / eps,
    )

    # traces from inside each element at its right (top) face against z(x_i, y)
    x, y = mesh.mesh_x.points, mesh.mesh_y.points
    w = quad_err.weights
    right = interp.u.face_traces(0, "right") @ Vt.T  # (N, N, q)
    top = interp.u.face_traces(1, "top") @ Vt.T
    ex_r = u(x[1:, None, None], yq[None, :, :])
    ex_t = u(xq[:, None, :], y[None, 1:, None])
    sq_r = np.sum(((ex_r - right) ** 2) * w * (mesh.mesh_y.steps / 2)[None, :, None], axis=(1, 2))
    sq_t = np.sum(((ex_t - top) ** 2) * w * (mesh.mesh_x.steps / 2)[:, None, None], axis=(0, 2))
    trace = float(np.max(sq_r + sq_t))
    return InterpolationError(
        _sampled_sup(interp.u, u, mesh, quad_err),
        math.sqrt(eta.p_scaled_l2_sq),
        math.sqrt(eta.q_scaled_l2_sq),
        trace,
        eta,
    )
