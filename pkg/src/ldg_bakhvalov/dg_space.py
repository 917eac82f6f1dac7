"""Piecewise tensor-product Legendre fields on the N x N mesh.

Element indices in the public API are 1-based, ``(i, j)`` for
``K_ij = (x_{i-1}, x_i) x (y_{j-1}, y_j)``.  Coefficient arrays are 0-based:
``coeffs[i-1, j-1, m, n]`` multiplies ``P_m(xhat) P_n(yhat)``.

Global vectors order elements lexicographically with x fastest, then the
local ``(n, m)`` pairs with ``m`` fastest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadrature import legendre_values


class DGIndexError(IndexError):
    pass


@dataclass
class DGField:
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 4 or c.shape[0] != c.shape[1] or c.shape[2] != c.shape[3]:
            raise ValueError(f"expected (N, N, k+1, k+1) coefficients, got shape {c.shape}")
        self.coeffs = c

    @classmethod
    def zeros(cls, N: int, k: int) -> DGField:
        return cls(np.zeros((N, N, k + 1, k + 1)))

    @classmethod
    def from_vector(cls, vec, N: int, k: int) -> DGField:
        c = np.asarray(vec, dtype=float).reshape(N, N, k + 1, k + 1)
        return cls(c.transpose(1, 0, 3, 2).copy())

    @property
    def N(self) -> int:
        return self.coeffs.shape[0]

    @property
    def k(self) -> int:
        return self.coeffs.shape[2] - 1

    @property
    def ndofs(self) -> int:
        return self.coeffs.size

    def to_vector(self) -> np.ndarray:
        return self.coeffs.transpose(1, 0, 3, 2).ravel().copy()

    def _check_element(self, i, j):
        if not (1 <= i <= self.N and 1 <= j <= self.N):
            raise DGIndexError(f"element ({i}, {j}) outside 1..{self.N}")

    def eval(self, i: int, j: int, xr, yr):
        """Value at reference point(s) ``(xr, yr)`` of element K_ij."""
        self._check_element(i, j)
        px, _ = legendre_values(self.k, xr)
        py, _ = legendre_values(self.k, yr)
        return np.einsum("...m,mn,...n->...", px, self.coeffs[i - 1, j - 1], py)

    def tensor_values(self, vx: np.ndarray, vy: np.ndarray) -> np.ndarray:
        """Values on tensor nodes of every element: ``(N, N, qx, qy)``.

        ``vx``/``vy`` are basis tables of shape ``(q, k+1)``.
        """
        return np.einsum("ijmn,am,bn->ijab", self.coeffs, vx, vy, optimize=True)

    def face_traces(self, axis: int, side: str) -> np.ndarray:
        """Trace polynomials on one face of every element, shape ``(N, N, k+1)``.

        ``axis=0`` with ``side`` in {'left', 'right'} gives vertical-face
        traces as Legendre coefficients in ``yhat``; ``axis=1`` with
        {'bottom', 'top'} gives horizontal-face traces in ``xhat``.  Traces
        are taken from inside each element.
        """
        sign = {"right": 1.0, "top": 1.0, "left": -1.0, "bottom": -1.0}[side]
        end = sign ** np.arange(self.k + 1)
        if axis == 0:
            return np.einsum("ijmn,m->ijn", self.coeffs, end)
        return np.einsum("ijmn,n->ijm", self.coeffs, end)

    def trace(self, axis: int, index: int, side: str) -> np.ndarray:
        """One-sided trace along the grid line ``x = x_index`` (axis 0) or ``y = y_index``.

        ``side='-'`` is the limit from below/left, ``'+'`` from above/right.
        Returns ``(N, k+1)`` coefficients, one 1D polynomial per cell of the line.
        """
        N = self.N
        if not 0 <= index <= N:
            raise DGIndexError(f"grid line {index} outside 0..{N}")
        if side == "-":
            if index == 0:
                raise DGIndexError("no '-' trace on the inflow boundary line 0")
            tr = self.face_traces(axis, "right" if axis == 0 else "top")
            sl = index - 1
        elif side == "+":
            if index == N:
                raise DGIndexError(f"no '+' trace on the outflow boundary line {N}")
            tr = self.face_traces(axis, "left" if axis == 0 else "bottom")
            sl = index
        else:
            raise ValueError(f"side must be '+' or '-', got {side!r}")
        return tr[sl] if axis == 0 else tr[:, sl]

    def jumps(self, axis: int) -> np.ndarray:
        """Jumps on all grid lines, shape ``(N+1, N, k+1)``.

        Row ``i`` holds ``[[v]]_{i,y}`` (axis 0) or ``[[v]]_{x,i}`` (axis 1) with
        the boundary conventions ``[[v]]_0 = v^+`` and ``[[v]]_N = -v^-``.
        """
        if axis == 0:
            minus = self.face_traces(0, "right")
            plus = self.face_traces(0, "left")
        else:
            minus = self.face_traces(1, "top").transpose(1, 0, 2)
            plus = self.face_traces(1, "bottom").transpose(1, 0, 2)
        N, k = self.N, self.k
        out = np.zeros((N + 1, N, k + 1))
        out[:N] += plus
        out[1:] -= minus
        return out

    def __add__(self, other):
        return DGField(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return DGField(self.coeffs - other.coeffs)

    def __neg__(self):
        return DGField(-self.coeffs)

    def __mul__(self, c):
        return DGField(c * self.coeffs)

    __rmul__ = __mul__


@dataclass
class DGSolution:
    u: DGField
    p: DGField
    q: DGField

    def __post_init__(self):
        shapes = {self.u.coeffs.shape, self.p.coeffs.shape, self.q.coeffs.shape}
        if len(shapes) != 1:
            raise ValueError(f"mismatched field discretisations: {shapes}")

    @classmethod
    def zeros(cls, N: int, k: int) -> DGSolution:
        return cls(DGField.zeros(N, k), DGField.zeros(N, k), DGField.zeros(N, k))

    @classmethod
    def from_vector(cls, vec, N: int, k: int) -> DGSolution:
        vec = np.asarray(vec, dtype=float)
        n = N * N * (k + 1) ** 2
        if vec.size != 3 * n:
            raise ValueError(f"expected {3 * n} entries, got {vec.size}")
        return cls(*(DGField.from_vector(vec[s * n:(s + 1) * n], N, k) for s in range(3)))

    @classmethod
    def random(cls, N: int, k: int, rng=None) -> DGSolution:
        rng = np.random.default_rng(rng)
        shape = (N, N, k + 1, k + 1)
        return cls(*(DGField(rng.standard_normal(shape)) for _ in range(3)))

    @property
    def N(self) -> int:
        return self.u.N

    @property
    def k(self) -> int:
        return self.u.k

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.u.to_vector(), self.p.to_vector(), self.q.to_vector()])

    def __add__(self, o):
        return DGSolution(self.u + o.u, self.p + o.p, self.q + o.q)

    def __sub__(self, o):
        return DGSolution(self.u - o.u, self.p - o.p, self.q - o.q)

    def __mul__(self, c):
        return DGSolution(c * self.u, c * self.p, c * self.q)

    __rmul__ = __mul__
