"""Assembly of the LDG system ``B(W; Z) = (f, v)`` on a tensor mesh.

The unknown vector stacks the global coefficient vectors of ``U``, ``P`` and
``Q``; rows are ordered the same way for the test functions ``v``, ``s`` and
``r``.  Fluxes: ``U^-`` (upwind) on interior faces and zero on the boundary,
``P^+``/``Q^+`` on every face except the outflow boundary, where ``P^-``/``Q^-``
is used and the penalty ``lambda`` acts on ``U^-``.

:func:`apply_B` evaluates the same bilinear form directly from field values
(no basis-block algebra) and serves as an independent check of the matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .dg_space import DGSolution
from .mesh import Mesh2D
from .problems import ProblemSpec
from .quadrature import QuadratureRule, gauss_legendre_rule, legendre_values


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class FluxParams:
    lambda1: float = 1.0
    lambda2: float = 1.0

    def __post_init__(self):
        for name in ("lambda1", "lambda2"):
            v = getattr(self, name)
            if not (np.isfinite(v) and 0.0 <= v <= 1e3):
                raise AssemblyError(f"{name} must lie in [0, 1e3], got {v!r}")


@dataclass
class LinearSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    N: int
    k: int

    @property
    def n_field(self) -> int:
        return self.N * self.N * (self.k + 1) ** 2

    @property
    def ndofs(self) -> int:
        return 3 * self.n_field

    def dump_coo(self, path) -> None:
        """Write the matrix as ``row col value`` lines (0-based indices)."""
        A = self.matrix.tocoo()
        with open(path, "w") as fh:
            fh.write(f"% {A.shape[0]} {A.shape[1]} {A.nnz}\n")
            for r, c, v in zip(A.row, A.col, A.data):
                fh.write(f"{r} {c} {float(v)!r}\n")


def default_rule(k: int) -> QuadratureRule:
    return gauss_legendre_rule(k + 3)


def validate(problem: ProblemSpec, mesh: Mesh2D, k: int, quad: QuadratureRule) -> None:
    bad = []
    for cfg in (mesh.mesh_x.config, mesh.mesh_y.config):
        bad += cfg.violations(k)
        if cfg.epsilon != problem.epsilon:
            bad.append(f"mesh epsilon {cfg.epsilon:g} differs from problem epsilon {problem.epsilon:g}")
    if k < 1:
        bad.append(f"degree k must be >= 1, got {k}")
    if quad.n < k + 3:
        bad.append(f"quadrature needs >= k+3 = {k + 3} points, got {quad.n}")
    if bad:
        raise AssemblyError("; ".join(sorted(set(bad))))


class _Indexer:
    """Global row/column numbers of element-local basis functions."""

    def __init__(self, N: int, k: int):
        self.N, self.k = N, k
        self.nb = (k + 1) ** 2
        self.n_field = N * N * self.nb
        m, n = np.meshgrid(np.arange(k + 1), np.arange(k + 1), indexing="ij")
        self.local = (n * (k + 1) + m).ravel()  # local (m, n) -> in-element offset

    def dofs(self, field: int, i, j) -> np.ndarray:
        """``(len(i), nb)`` global indices; local axis ordered as ``(m, n)`` flattened."""
        e = np.asarray(j) * self.N + np.asarray(i)
        return field * self.n_field + e[:, None] * self.nb + self.local[None, :]


class _Triplets:
    def __init__(self, idx: _Indexer):
        self.idx = idx
        self.rows, self.cols, self.vals = [], [], []

    def add(self, test_field, test_ij, trial_field, trial_ij, blocks):
        """``blocks`` has shape ``(n_pairs, nb, nb)``: [pair, test(m', n'), trial(m, n)]."""
        r = self.idx.dofs(test_field, *test_ij)
        c = self.idx.dofs(trial_field, *trial_ij)
        nb = self.idx.nb
        self.rows.append(np.broadcast_to(r[:, :, None], (len(r), nb, nb)).ravel())
        self.cols.append(np.broadcast_to(c[:, None, :], (len(c), nb, nb)).ravel())
        self.vals.append(np.asarray(blocks).reshape(len(r), nb, nb).ravel())

    def matrix(self):
        n = 3 * self.idx.n_field
        A = sp.coo_matrix(
            (np.concatenate(self.vals), (np.concatenate(self.rows), np.concatenate(self.cols))), shape=(n, n)
        )
        return A.tocsr()


V, U_, P_, Q_ = 0, 0, 1, 2  # field slots: v/U -> 0, s/P -> 1, r/Q -> 2


def _kron(X, Y):
    """Block ``[..., (m', n'), (m, n)] = X[..., m', m] * Y[..., n', n]``."""
    K = np.einsum("...ac,...bd->...abcd", X, Y)
    s = K.shape
    return K.reshape(s[:-4] + (s[-4] * s[-3], s[-2] * s[-1]))


def assemble(problem: ProblemSpec, mesh: Mesh2D, k: int, flux: FluxParams | None = None,
             quad: QuadratureRule | None = None) -> LinearSystem:
    flux = flux or FluxParams()
    quad = quad or default_rule(k)
    validate(problem, mesh, k, quad)

    N = mesh.N
    eps = problem.epsilon
    x, y = mesh.mesh_x.points, mesh.mesh_y.points
    hx, hy = mesh.mesh_x.steps, mesh.mesh_y.steps
    r, w = quad.nodes, quad.weights
    Vt, Dt = legendre_values(k, r)  # (q, k+1)
    xq = x[:-1, None] + hx[:, None] * (r + 1) / 2  # (N, q)
    yq = y[:-1, None] + hy[:, None] * (r + 1) / 2
    XQ, YQ = xq[:, None, :, None], yq[None, :, None, :]  # broadcast to (N, N, q, q)

    M1 = np.einsum("a,am,an->mn", w, Vt, Vt)  # 1D Legendre mass
    D1 = np.einsum("a,am,an->mn", w, Dt, Vt)  # [m', m] = int P'_{m'} P_m
    ends = {"+": np.ones(k + 1), "-": (-1.0) ** np.arange(k + 1)}

    idx = _Indexer(N, k)
    T = _Triplets(idx)
    I, J = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    all_ij = (I.ravel(), J.ravel())
    HX, HY = np.meshgrid(hx, hy, indexing="ij")
    hxf, hyf = HX.ravel(), HY.ravel()

    def weighted(coef, X1, Y1, X2, Y2):
        """Element blocks of ``sum_ab w_a w_b coef X1[a,m'] Y1[b,n'] X2[a,m] Y2[b,n]``."""
        cw = np.broadcast_to(coef, (N, N, quad.n, quad.n)) * w[:, None] * w[None, :]
        t = np.einsum("ijab,ap,ac->ijpcb", cw, X1, X2, optimize=True)
        K = np.einsum("ijpcb,bq,bd->ijpqcd", t, Y1, Y2, optimize=True)
        return K.reshape(N * N, idx.nb, idx.nb)

    # B1: ((b - div alpha) U, v) + eps^-1 (P, s) + eps^-1 (Q, r)
    jac = (hxf * hyf / 4)[:, None, None]
    T.add(V, all_ij, U_, all_ij, jac * weighted(problem.reaction(XQ, YQ), Vt, Vt, Vt, Vt))
    mass = jac * _kron(M1, M1)[None]
    T.add(P_, all_ij, P_, all_ij, mass / eps)
    T.add(Q_, all_ij, Q_, all_ij, mass / eps)

    # B2 volume: (U, s_x) + (U, r_y)
    T.add(P_, all_ij, U_, all_ij, (hyf / 2)[:, None, None] * _kron(D1, M1)[None])
    T.add(Q_, all_ij, U_, all_ij, (hxf / 2)[:, None, None] * _kron(M1, D1)[None])
    # B3 volume: (P, v_x) + (Q, v_y)
    T.add(V, all_ij, P_, all_ij, (hyf / 2)[:, None, None] * _kron(D1, M1)[None])
    T.add(V, all_ij, Q_, all_ij, (hxf / 2)[:, None, None] * _kron(M1, D1)[None])
    # B4 volume: -(a1 U, v_x) - (a2 U, v_y)
    T.add(V, all_ij, U_, all_ij, -(hyf / 2)[:, None, None] * weighted(problem.a1(XQ, YQ), Dt, Vt, Vt, Vt))
    T.add(V, all_ij, U_, all_ij, -(hxf / 2)[:, None, None] * weighted(problem.a2(XQ, YQ), Vt, Dt, Vt, Vt))

    # Face terms.  For axis 0 the grid line is x = x_i and the tangential
    # variable runs over J_j; for axis 1 roles swap.
    for axis in (0, 1):
        h_t = hy if axis == 0 else hx  # tangential cell sizes
        tq = yq if axis == 0 else xq  # tangential quadrature nodes (N, q)
        lines = x if axis == 0 else y
        coef_fn = problem.a1 if axis == 0 else problem.a2
        lam = flux.lambda1 if axis == 0 else flux.lambda2
        grad_field = P_ if axis == 0 else Q_
        c = np.arange(N)  # tangential cell index

        def ij(normal, tang):
            return (normal, tang) if axis == 0 else (tang, normal)

        def face_block(e_test, e_trial, tmass):
            """Block from normal-direction end values and a tangential (n', n) matrix."""
            normal = np.outer(ends[e_test], ends[e_trial])  # [m', m]
            if axis == 0:
                return _kron(np.broadcast_to(normal, tmass.shape[:-2] + normal.shape), tmass)
            return _kron(tmass, np.broadcast_to(normal, tmass.shape[:-2] + normal.shape))

        tmass = (h_t / 2)[:, None, None] * M1[None]  # (N, k+1, k+1) per tangential cell

        # B2 interior: sum_{i=1}^{N-1} <U^-_i, [[s]]_i>
        for i in range(1, N):
            L, R = np.full(N, i - 1), np.full(N, i)
            T.add(grad_field, ij(R, c), U_, ij(L, c), face_block("-", "+", tmass))
            T.add(grad_field, ij(L, c), U_, ij(L, c), -face_block("+", "+", tmass))

        # B3: sum_{i=0}^{N-1} <P^+_i, [[v]]_i> - <P^-_N, v^-_N>
        for i in range(0, N):
            R = np.full(N, i)
            T.add(V, ij(R, c), grad_field, ij(R, c), face_block("-", "-", tmass))
            if i >= 1:
                L = np.full(N, i - 1)
                T.add(V, ij(L, c), grad_field, ij(R, c), -face_block("+", "-", tmass))
        L = np.full(N, N - 1)
        T.add(V, ij(L, c), grad_field, ij(L, c), -face_block("+", "+", tmass))

        # B4: -sum_{i=1}^{N} <a U^-_i, [[v]]_i> + lambda <U^-_N, v^-_N>
        for i in range(1, N + 1):
            a_vals = coef_fn(lines[i], tq) if axis == 0 else coef_fn(tq, lines[i])
            amass = (h_t / 2)[:, None, None] * np.einsum("b,cb,bp,bq->cpq", w, a_vals, Vt, Vt)
            L = np.full(N, i - 1)
            T.add(V, ij(L, c), U_, ij(L, c), face_block("+", "+", amass))
            if i < N:
                R = np.full(N, i)
                T.add(V, ij(R, c), U_, ij(L, c), -face_block("-", "+", amass))
        T.add(V, ij(L, c), U_, ij(L, c), lam * face_block("+", "+", tmass))

    A = T.matrix()

    rhs = np.zeros(3 * idx.n_field)
    fv = problem.f(XQ, YQ) * w[:, None] * w[None, :]
    loads = np.einsum("ijab,am,bn->ijmn", fv, Vt, Vt, optimize=True) * (HX * HY / 4)[:, :, None, None]
    rhs[idx.dofs(V, *all_ij).ravel()] = loads.reshape(N * N, -1).ravel()
    return LinearSystem(A, rhs, N, k)


# ---------------------------------------------------------------------------
# Direct evaluation of B(W; Z)


@dataclass
class _Evaluated:
    vol: np.ndarray  # (N, N, q, q)
    dx: np.ndarray
    dy: np.ndarray
    jumps: tuple  # per axis (N+1, N, q)
    minus: tuple  # per axis (N+1, N, q); row 0 unused
    plus: tuple  # per axis (N+1, N, q); row N unused


def _evaluate(field, mesh: Mesh2D, Vt, Dt):
    hx, hy = mesh.mesh_x.steps, mesh.mesh_y.steps
    vol = field.tensor_values(Vt, Vt)
    dx = field.tensor_values(Dt, Vt) * (2 / hx)[:, None, None, None]
    dy = field.tensor_values(Vt, Dt) * (2 / hy)[None, :, None, None]
    N, q = field.N, Vt.shape[0]
    jumps, minus, plus = [], [], []
    for axis in (0, 1):
        jumps.append(field.jumps(axis) @ Vt.T)
        mi = np.zeros((N + 1, N, q))
        pl = np.zeros((N + 1, N, q))
        for line in range(N + 1):
            if line > 0:
                mi[line] = field.trace(axis, line, "-") @ Vt.T
            if line < N:
                pl[line] = field.trace(axis, line, "+") @ Vt.T
        minus.append(mi)
        plus.append(pl)
    return _Evaluated(vol, dx, dy, tuple(jumps), tuple(minus), tuple(plus))


def apply_B(W: DGSolution, Z: DGSolution, problem: ProblemSpec, mesh: Mesh2D,
            flux: FluxParams | None = None, quad: QuadratureRule | None = None) -> float:
    """Evaluate ``B(W; Z)`` term by term from field values at quadrature nodes."""
    flux = flux or FluxParams()
    if (W.N, W.k) != (Z.N, Z.k) or W.N != mesh.N:
        raise AssemblyError(f"mismatched discretisations: W=({W.N},{W.k}) Z=({Z.N},{Z.k}) mesh N={mesh.N}")
    k, N = W.k, W.N
    quad = quad or default_rule(k)
    r, w = quad.nodes, quad.weights
    Vt, Dt = legendre_values(k, r)
    x, y = mesh.mesh_x.points, mesh.mesh_y.points
    hx, hy = mesh.mesh_x.steps, mesh.mesh_y.steps
    xq = x[:-1, None] + hx[:, None] * (r + 1) / 2
    yq = y[:-1, None] + hy[:, None] * (r + 1) / 2
    XQ, YQ = xq[:, None, :, None], yq[None, :, None, :]
    wvol = (hx[:, None] * hy[None, :] / 4)[:, :, None, None] * w[:, None] * w[None, :]

    U, P, Q = (_evaluate(f, mesh, Vt, Dt) for f in (W.u, W.p, W.q))
    v, s, rr = (_evaluate(f, mesh, Vt, Dt) for f in (Z.u, Z.p, Z.q))
    eps = problem.epsilon

    def vol(a):
        return float(np.sum(wvol * a))

    b1 = vol(problem.reaction(XQ, YQ) * U.vol * v.vol) + vol(P.vol * s.vol) / eps + vol(Q.vol * rr.vol) / eps
    b2 = vol(U.vol * s.dx) + vol(U.vol * rr.dy)
    b3 = vol(P.vol * v.dx) + vol(Q.vol * v.dy)
    b4 = -vol(problem.a1(XQ, YQ) * U.vol * v.dx) - vol(problem.a2(XQ, YQ) * U.vol * v.dy)

    for axis, grad, test_grad, h_t, tq, lines, coef, lam in (
        (0, P, s, hy, yq, x, problem.a1, flux.lambda1),
        (1, Q, rr, hx, xq, y, problem.a2, flux.lambda2),
    ):
        wedge = (h_t / 2)[:, None] * w[None, :]  # (N, q)

        def edge(a, lo, hi):
            return float(np.sum(wedge[None] * a[lo:hi]))

        b2 += edge(U.minus[axis] * test_grad.jumps[axis], 1, N)
        b3 += edge(grad.plus[axis] * v.jumps[axis], 0, N) - edge(grad.minus[axis] * v.minus[axis], N, N + 1)
        a_line = np.stack([coef(lines[i], tq) if axis == 0 else coef(tq, lines[i]) for i in range(N + 1)])
        b4 += -edge(a_line * U.minus[axis] * v.jumps[axis], 1, N + 1)
        b4 += lam * edge(U.minus[axis] * v.minus[axis], N, N + 1)
    return b1 + b2 + b3 + b4
