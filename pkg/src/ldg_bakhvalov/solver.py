"""Linear solvers for the assembled LDG system."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .assembly import LinearSystem
from .dg_space import DGSolution


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    method: str = "direct"
    rel_tol: float = 1e-10
    max_iter: int = 2000
    restart: int = 100
    refine_steps: int = 3

    def __post_init__(self):
        if self.method not in ("direct", "gmres"):
            raise ValueError(f"unknown solver method {self.method!r}")
        if not 0 < self.rel_tol <= 1e-6:
            raise ValueError(f"rel_tol must lie in (0, 1e-6], got {self.rel_tol!r}")


@dataclass
class SolveStats:
    method: str
    iterations: int
    residual: float  # ||A w - rhs|| / ||rhs||, recomputed from the raw matrix
    seconds: float


def residual_norm(A, w, rhs) -> float:
    """Relative residual ``||A w - rhs|| / ||rhs||`` (absolute when ``rhs = 0``)."""
    res = np.linalg.norm(A @ w - rhs)
    scale = np.linalg.norm(rhs)
    return float(res / scale) if scale > 0 else float(res)


def _equilibrate(A: sp.csr_matrix):
    """Row then column scaling to unit max-norm; returns ``(D_r A D_c, d_r, d_c)``."""
    A = A.tocsr()
    dr = 1.0 / np.maximum(abs(A).max(axis=1).toarray().ravel(), np.finfo(float).tiny)
    B = sp.diags(dr) @ A
    dc = 1.0 / np.maximum(abs(B).max(axis=0).toarray().ravel(), np.finfo(float).tiny)
    return (B @ sp.diags(dc)).tocsc(), dr, dc


def _element_blocks(sys: LinearSystem) -> np.ndarray:
    """Permutation grouping the U, P, Q dofs of each element together."""
    n, nb = sys.n_field, (sys.k + 1) ** 2
    ne = sys.N * sys.N
    per = np.arange(n).reshape(ne, nb)
    return np.concatenate([per, per + n, per + 2 * n], axis=1).ravel()


def block_gauss_seidel(A: sp.csr_matrix, sys: LinearSystem) -> spla.LinearOperator:
    """One forward block Gauss-Seidel sweep in element order, as a preconditioner.

    Elements are visited lexicographically (x fastest), which follows the
    upwind direction of the convective flux.
    """
    perm = _element_blocks(sys)
    Ap = A[perm][:, perm].tocsr()
    bs = 3 * (sys.k + 1) ** 2
    rows, cols = Ap.nonzero()
    keep = cols // bs <= rows // bs
    lower = sp.csr_matrix((np.asarray(Ap[rows[keep], cols[keep]]).ravel(), (rows[keep], cols[keep])), shape=Ap.shape)
    lu = spla.splu(lower.tocsc(), permc_spec="NATURAL")
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))

    def apply(x):
        return lu.solve(np.asarray(x).ravel()[perm])[inv]

    return spla.LinearOperator(A.shape, matvec=apply, dtype=float)


def solve(sys: LinearSystem, cfg: SolverConfig | None = None):
    """Solve ``sys``; returns ``(DGSolution, SolveStats)``.

    Raises :class:`SolverError` when the residual certificate fails.
    """
    cfg = cfg or SolverConfig()
    t0 = time.perf_counter()
    A, rhs = sys.matrix, sys.rhs
    B, dr, dc = _equilibrate(A)
    iters = 0

    if cfg.method == "direct":
        lu = spla.splu(B)

        def correction(b):
            return lu.solve(b), 1
    else:
        M = block_gauss_seidel(B.tocsr(), sys)

        def correction(b):
            count = [0]

            def cb(_):
                count[0] += 1

            dz, info = spla.gmres(B, b, rtol=0.1 * cfg.rel_tol, restart=cfg.restart,
                                  maxiter=cfg.max_iter, M=M, callback=cb, callback_type="pr_norm")
            if info != 0:
                raise SolverError(f"GMRES did not converge within {cfg.max_iter} restarts (info={info})")
            return dz, count[0]

    # the scaled system is solved; convergence is judged on the raw residual
    z = np.zeros_like(rhs)
    for _ in range(1 + cfg.refine_steps):
        if residual_norm(A, dc * z, rhs) <= 0.01 * cfg.rel_tol:
            break
        dz, n = correction(dr * (rhs - A @ (dc * z)))
        z = z + dz
        iters += n

    w = dc * z
    res = residual_norm(A, w, rhs)
    stats = SolveStats(cfg.method, iters, res, time.perf_counter() - t0)
    if not np.isfinite(res) or res > cfg.rel_tol:
        raise SolverError(f"residual certificate failed: {res:.3e} > {cfg.rel_tol:.1e}")
    return DGSolution.from_vector(w, sys.N, sys.k), stats
