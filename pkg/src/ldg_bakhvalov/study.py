"""Convergence studies: sweep (epsilon, N), solve, tabulate errors and rates."""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .assembly import AssemblyError, FluxParams, assemble
from .mesh import MeshConfig, MeshConfigError, build_mesh_2d
from .norms import supercloseness_error, true_error
from .problems import PROBLEM_NAMES, ProblemError, make_problem
from .projections import interpolate
from .quadrature import gauss_legendre_rule
from .solver import SolverConfig, SolverError, solve

log = logging.getLogger(__name__)

COLUMNS = (
    "problem", "k", "epsilon", "rho", "N", "dofs",
    "superclose_E", "superclose_u", "superclose_p", "superclose_q", "superclose_jumps",
    "l2_err", "linf_eta_u", "rate_superclose", "rate_l2", "log_adjusted_ratio", "solve_seconds",
)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    problem: str
    k: int
    Ns: list[int]
    epsilons: list[float]
    rho: float | None = None
    lambda1: float = 1.0
    lambda2: float = 1.0
    quad_order: int | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    scheme: str = "new"

    @property
    def rho_value(self) -> float:
        return float(self.k + 2) if self.rho is None else float(self.rho)

    def violations(self) -> list[str]:
        """Every configuration problem across the whole sweep, without doing any work."""
        out = []
        if self.problem not in PROBLEM_NAMES:
            out.append(f"unknown problem {self.problem!r}; choose from {', '.join(PROBLEM_NAMES)}")
        if not isinstance(self.k, int) or self.k < 1:
            out.append(f"degree must be an integer >= 1, got {self.k!r}")
            return out
        if not self.Ns or not self.epsilons:
            out.append("empty N or epsilon sweep")
        try:
            FluxParams(self.lambda1, self.lambda2)
        except AssemblyError as exc:
            out.append(str(exc))
        n_quad = self.quad_order or self.k + 3
        if n_quad < self.k + 3:
            out.append(f"quad order {n_quad} below k+3 = {self.k + 3}")
        for eps in self.epsilons:
            for N in self.Ns:
                for msg in MeshConfig(N, self.rho_value, eps).violations(self.k):
                    out.append(f"(N={N}, epsilon={eps:g}): {msg}")
        return out


@dataclass
class Row:
    problem: str
    k: int
    epsilon: float
    rho: float
    N: int
    dofs: int
    superclose_E: float = math.nan
    superclose_u: float = math.nan
    superclose_p: float = math.nan
    superclose_q: float = math.nan
    superclose_jumps: float = math.nan
    l2_err: float = math.nan
    linf_eta_u: float = math.nan
    rate_superclose: float | None = None
    rate_l2: float | None = None
    log_adjusted_ratio: float = math.nan
    solve_seconds: float = math.nan
    error: str | None = field(default=None, compare=False)

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class ConvergenceTable:
    rows: list[Row]

    def __len__(self):
        return len(self.rows)

    def select(self, **kw) -> list[Row]:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in kw.items())]

    @property
    def all_failed(self) -> bool:
        return bool(self.rows) and all(r.failed for r in self.rows)


def observed_rate(e_coarse: float, e_fine: float, N_coarse: int, N_fine: int) -> float:
    """Order ``log(e_coarse / e_fine) / log(N_fine / N_coarse)``; log2 ratio for doublings."""
    return math.log(e_coarse / e_fine) / math.log(N_fine / N_coarse)


def fitted_rate(Ns, errors) -> float:
    """Least-squares slope of ``-log e`` against ``log N``."""
    slope = np.polyfit(np.log(np.asarray(Ns, float)), -np.log(np.asarray(errors, float)), 1)[0]
    return float(slope)


def log_adjusted_ratio(e: float, N: int, k: int) -> float:
    return e / (N ** -(k + 1) * math.sqrt(math.log(N)))


def run_cell(cfg: RunConfig, eps: float, N: int) -> Row:
    k, rho = cfg.k, cfg.rho_value
    row = Row(cfg.problem, k, eps, rho, N, 3 * N * N * (k + 1) ** 2)
    problem = make_problem(cfg.problem, eps)
    mesh = build_mesh_2d(MeshConfig(N, rho, eps))
    flux = FluxParams(cfg.lambda1, cfg.lambda2)
    quad = gauss_legendre_rule(cfg.quad_order or k + 3)
    system = assemble(problem, mesh, k, flux, quad)
    t0 = time.perf_counter()
    W, _ = solve(system, cfg.solver)
    row.solve_seconds = time.perf_counter() - t0

    interp = interpolate(problem, mesh, k, scheme=cfg.scheme)
    sc = supercloseness_error(W, problem, mesh, k, flux, quad, interp=interp)
    te = true_error(W, problem, mesh, interp=interp)
    row.superclose_E = sc.total_E
    row.superclose_u = math.sqrt(sc.u_weighted_l2_sq)
    row.superclose_p = math.sqrt(sc.p_scaled_l2_sq)
    row.superclose_q = math.sqrt(sc.q_scaled_l2_sq)
    row.superclose_jumps = math.sqrt(sc.jumps_sq)
    row.l2_err = te.total_2
    row.linf_eta_u = te.linf_eta_u
    row.log_adjusted_ratio = log_adjusted_ratio(sc.total_E, N, k)
    return row


def _fill_rates(rows: list[Row]) -> None:
    """Rate on each row from it to the next sweep entry with the same epsilon."""
    for a, b in zip(rows, rows[1:]):
        if a.epsilon != b.epsilon or a.failed or b.failed or b.N <= a.N:
            continue
        if a.superclose_E > 0 and b.superclose_E > 0:
            a.rate_superclose = observed_rate(a.superclose_E, b.superclose_E, a.N, b.N)
        if a.l2_err > 0 and b.l2_err > 0:
            a.rate_l2 = observed_rate(a.l2_err, b.l2_err, a.N, b.N)


def run_convergence(cfg: RunConfig) -> ConvergenceTable:
    bad = cfg.violations()
    if bad:
        raise ConfigError("; ".join(bad))
    rows = []
    for eps in cfg.epsilons:
        for N in cfg.Ns:
            try:
                row = run_cell(cfg, eps, N)
            except (SolverError, AssemblyError, MeshConfigError, ProblemError, np.linalg.LinAlgError,
                    RuntimeError) as exc:
                log.warning("cell (epsilon=%g, N=%d) failed: %s", eps, N, exc)
                row = Row(cfg.problem, cfg.k, eps, cfg.rho_value, N, 3 * N * N * (cfg.k + 1) ** 2,
                          error=str(exc))
            else:
                log.info("epsilon=%g N=%d superclose_E=%.4e", eps, N, row.superclose_E)
            rows.append(row)
    _fill_rates(rows)
    return ConvergenceTable(rows)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def _fmt_md(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.4e}" if v == v else "nan"
    return str(v)


def to_csv(table: ConvergenceTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in table.rows:
        w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
    return buf.getvalue()


def to_markdown(table: ConvergenceTable) -> str:
    lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "---|" * len(COLUMNS)]
    for r in table.rows:
        lines.append("| " + " | ".join(_fmt_md(getattr(r, c)) for c in COLUMNS) + " |")
    return "\n".join(lines) + "\n"


def emit(table: ConvergenceTable, fmt: str = "csv", path=None) -> str:
    """Render ``table`` as csv or markdown; write it to ``path`` when given."""
    if not table.rows:
        raise ValueError("refusing to emit an empty table")
    if fmt == "csv":
        text = to_csv(table)
    elif fmt == "md":
        text = to_markdown(table)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def parse_csv(text: str) -> ConvergenceTable:
    """Inverse of :func:`to_csv`."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != COLUMNS:
        raise ValueError(f"unexpected header {header}")
    rows = []
    for rec in reader:
        vals = {}
        for name, cell in zip(header, rec):
            if name == "problem":
                vals[name] = cell
            elif name in ("k", "N", "dofs"):
                vals[name] = int(cell)
            elif name in ("rate_superclose", "rate_l2"):
                vals[name] = float(cell) if cell else None
            else:
                vals[name] = float(cell)
        rows.append(Row(**vals))
    return ConvergenceTable(rows)


def row_dict(r: Row) -> dict:
    d = asdict(r)
    d.pop("error")
    return d
