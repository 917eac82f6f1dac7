"""Bakhvalov-type layer-adapted tensor meshes on the unit square.

The generating function grades toward ``d = 0``; the mesh is mirrored,
``x_i = 1 - phi((N - i) / N)``, so the fine region sits next to ``x = 1``
where the exponential layers of the model problem live.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np


class MeshConfigError(ValueError):
    """Raised when a mesh configuration violates one of its bounds."""


@dataclass(frozen=True)
class MeshConfig:
    N: int
    rho: float
    epsilon: float

    @property
    def tau(self) -> float:
        return self.rho * self.epsilon * math.log(1.0 / self.epsilon)

    def violations(self, k: int | None = None) -> list[str]:
        """List every violated bound; empty when the configuration is valid."""
        out = []
        N, rho, eps = self.N, self.rho, self.epsilon
        if not isinstance(N, (int, np.integer)) or N < 8 or N % 2:
            out.append(f"N must be an even integer >= 8 (got N={N!r})")
        if not rho > 0:
            out.append(f"rho must be positive (got rho={rho!r})")
        if not 0 < eps < 1:
            out.append(f"epsilon must lie in (0, 1) (got epsilon={eps!r})")
            return out
        if isinstance(N, (int, np.integer)) and N > 0 and eps > 1.0 / N:
            out.append(f"epsilon <= 1/N violated (epsilon={eps:g}, 1/N={1.0 / N:g})")
        if rho > 0 and not self.tau < 0.5:
            out.append(
                f"rho*epsilon*ln(1/epsilon) < 1/2 violated (tau={self.tau:g}); "
                "the tau = 1/2 branch is not supported"
            )
        if k is not None and rho < k + 2:
            out.append(f"rho >= k+2 violated (rho={rho:g}, k={k})")
        return out

    def validate(self, k: int | None = None) -> None:
        bad = self.violations(k)
        if bad:
            raise MeshConfigError("; ".join(bad))


def generating_function(d, cfg: MeshConfig):
    """Evaluate the Bakhvalov generating function ``phi`` at ``d`` in [0, 1]."""
    d = np.asarray(d, dtype=float)
    rho, eps = cfg.rho, cfg.epsilon
    t = 2.0 * (1.0 - cfg.tau)
    graded = d <= 0.5
    out = np.empty_like(d)
    # 1 - 2(1-eps)d regrouped as (1-2d) + 2*eps*d: no cancellation at d -> 1/2
    out[graded] = -rho * eps * np.log((1.0 - 2.0 * d[graded]) + 2.0 * eps * d[graded])
    out[~graded] = 1.0 - t * (1.0 - d[~graded])
    return out


def layer_distances(cfg: MeshConfig) -> np.ndarray:
    """Distances ``1 - x_i = phi((N - i) / N)`` for i = 0..N, evaluated exactly in i."""
    N, rho, eps = cfg.N, cfg.rho, cfg.epsilon
    i = np.arange(N + 1)
    out = np.empty(N + 1)
    graded = 2 * i >= N
    ig = i[graded]
    # 1 - 2(1-eps)(N-i)/N = ((2i - N) + 2 eps (N - i)) / N
    out[graded] = -rho * eps * np.log(((2 * ig - N) + 2.0 * eps * (N - ig)) / N)
    out[~graded] = 2.0 * (1.0 - cfg.tau) * i[~graded] / N
    out[~graded] = 1.0 - out[~graded]
    out[0], out[N] = 1.0, 0.0
    return out


@dataclass(frozen=True)
class Mesh1D:
    points: np.ndarray
    steps: np.ndarray = field(repr=False)
    config: MeshConfig

    def __post_init__(self):
        self.points.setflags(write=False)
        self.steps.setflags(write=False)

    @property
    def N(self) -> int:
        return len(self.points) - 1

    @property
    def transition_index(self) -> int:
        return self.N // 2

    @property
    def tau(self) -> float:
        return self.config.tau

    def step(self, i: int) -> float:
        """Step ``h_i = x_i - x_{i-1}`` with the 1-based index used in the analysis."""
        if not 1 <= i <= self.N:
            raise IndexError(f"step index {i} outside 1..{self.N}")
        return float(self.steps[i - 1])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["i", "x_i", "h_i"])
            for i, x in enumerate(self.points):
                w.writerow([i, repr(float(x)), "" if i == 0 else repr(float(self.steps[i - 1]))])


def build_mesh_1d(cfg: MeshConfig) -> Mesh1D:
    cfg.validate()
    dist = layer_distances(cfg)
    # steps from the distances directly; differencing points loses digits near x = 1
    return Mesh1D(1.0 - dist, dist[:-1] - dist[1:], cfg)


@dataclass(frozen=True)
class Mesh2D:
    mesh_x: Mesh1D
    mesh_y: Mesh1D

    @property
    def N(self) -> int:
        return self.mesh_x.N

    @property
    def n_elements(self) -> int:
        return self.N * self.N

    def element(self, i: int, j: int):
        """Bounds ``((x_{i-1}, x_i), (y_{j-1}, y_j))`` of K_ij, 1-based."""
        if not (1 <= i <= self.N and 1 <= j <= self.N):
            raise IndexError(f"element ({i}, {j}) outside 1..{self.N}")
        x, y = self.mesh_x.points, self.mesh_y.points
        return (x[i - 1], x[i]), (y[j - 1], y[j])


def build_mesh_2d(cfg_x: MeshConfig, cfg_y: MeshConfig | None = None) -> Mesh2D:
    cfg_y = cfg_x if cfg_y is None else cfg_y
    if cfg_x.N != cfg_y.N:
        raise MeshConfigError(f"mismatched N: {cfg_x.N} vs {cfg_y.N}")
    return Mesh2D(build_mesh_1d(cfg_x), build_mesh_1d(cfg_y))


# Explicit constants for the step-size bounds on the mirrored mesh.  With
# s = 2(1-eps)/N <= 1/4, -ln(1-s) lies in [s, s/(1-s)], which gives
# rho*eps/N <= h_N <= (8/3)*rho*eps/N for every N >= 8.
LAST_STEP_LOWER = 1.0
LAST_STEP_UPPER = 8.0 / 3.0
# 1 - x_{N/2+1} = -rho*eps*ln(eps + s) with eps + s in [1/N, 3/N].
TRANSITION_LOWER = 1.0 - math.log(3.0) / math.log(8.0)
TRANSITION_UPPER = 1.0


@dataclass
class BoundCheck:
    name: str
    passed: bool
    value: float
    lower: float | None = None
    upper: float | None = None


@dataclass
class PropertyReport:
    checks: list[BoundCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[BoundCheck]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> BoundCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _between(name, value, lower, upper, rtol=1e-12, atol=0.0):
    lo_ok = lower is None or value >= lower * (1 - rtol) - atol
    hi_ok = upper is None or value <= upper * (1 + rtol) + atol
    return BoundCheck(name, bool(lo_ok and hi_ok), float(value), lower, upper)


def check_mesh_properties(m: Mesh1D, cfg: MeshConfig) -> PropertyReport:
    """Evaluate the step-size bounds of a Bakhvalov mesh.

    Distances are measured from ``x = 1`` since the mesh is mirrored.
    """
    N, rho, eps = cfg.N, cfg.rho, cfg.epsilon
    x, h = m.points, m.steps
    half = N // 2
    checks = []

    checks.append(BoundCheck("endpoints", bool(x[0] == 0.0 and x[-1] == 1.0), float(x[-1] - x[0]), 1.0, 1.0))
    checks.append(BoundCheck("strictly_increasing", bool(np.all(np.diff(x) > 0) and np.all(h > 0)), float(h.min())))

    tau_err = abs((1.0 - x[half]) - cfg.tau)
    checks.append(_between("transition_point", tau_err, None, 4 * np.finfo(float).eps))

    coarse = h[:half]
    spread = float(coarse.max() - coarse.min())
    checks.append(_between("coarse_uniform", spread, None, 8 * np.finfo(float).eps))
    checks.append(_between("coarse_min", float(coarse.min()), 1.0 / N, None))
    checks.append(_between("coarse_max", float(coarse.max()), None, 2.0 / N))

    # h_{N/2+2} >= ... >= h_N
    fine = h[half + 1:]
    checks.append(BoundCheck("fine_non_increasing", bool(np.all(np.diff(fine) <= 0)), float(np.diff(fine).max())))

    checks.append(_between("last_step", m.step(N), LAST_STEP_LOWER * rho * eps / N, LAST_STEP_UPPER * rho * eps / N))
    checks.append(_between("step_half_plus_2", m.step(half + 2), 0.25 * rho * eps, rho * eps))
    checks.append(_between("step_half_plus_1", m.step(half + 1), 0.5 * rho * eps, 2.0 * rho / N))

    dist = 1.0 - x[half + 1]
    checks.append(_between(
        "dist_half_plus_1", dist,
        TRANSITION_LOWER * rho * eps * math.log(N), TRANSITION_UPPER * rho * eps * math.log(N),
    ))
    # 1 - x carries an absolute rounding error of a few ulp(1)
    checks.append(_between("dist_half", 1.0 - x[half], eps * abs(math.log(eps)), None,
                           atol=4 * np.finfo(float).eps))
    return PropertyReport(checks)
