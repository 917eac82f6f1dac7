"""Command-line driver for convergence studies.

Example::

    ldg-convergence --problem layer_const --degree 1 --n 8,16,32,64 --epsilon 1e-6
"""

from __future__ import annotations

import argparse
import logging
import sys

from .solver import SolverConfig
from .study import ConfigError, RunConfig, emit, run_convergence

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ldg-convergence",
        description="LDG supercloseness study on a Bakhvalov-type mesh.",
    )
    ap.add_argument("--problem", required=True, help="poly_patch, layer_const or layer_var")
    ap.add_argument("--degree", type=int, required=True, help="polynomial degree k")
    ap.add_argument("--n", type=_int_list, required=True, help="comma list of N (elements per direction)")
    ap.add_argument("--epsilon", type=_float_list, required=True, help="comma list of epsilon values")
    ap.add_argument("--rho", type=float, default=None, help="mesh grading parameter (default k+2)")
    ap.add_argument("--lambda1", type=float, default=1.0)
    ap.add_argument("--lambda2", type=float, default=1.0)
    ap.add_argument("--quad-order", type=int, default=None, help="Gauss points per direction (default k+3)")
    ap.add_argument("--solver", choices=("direct", "gmres"), default="direct")
    ap.add_argument("--tol", type=float, default=1e-10, help="relative residual tolerance")
    ap.add_argument("--format", choices=("csv", "md"), default="csv")
    ap.add_argument("--out", default=None, help="output file (default: stdout)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        solver = SolverConfig(method=args.solver, rel_tol=args.tol)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg = RunConfig(
        problem=args.problem, k=args.degree, Ns=args.n, epsilons=args.epsilon, rho=args.rho,
        lambda1=args.lambda1, lambda2=args.lambda2, quad_order=args.quad_order, solver=solver,
    )
    bad = cfg.violations()
    if bad:
        print("config error:", file=sys.stderr)
        for msg in bad:
            print(f"  - {msg}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        table = run_convergence(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if table.all_failed:
        for r in table.rows:
            print(f"failed (epsilon={r.epsilon:g}, N={r.N}): {r.error}", file=sys.stderr)
        return EXIT_SOLVER
    try:
        text = emit(table, args.format, args.out)
    except OSError as exc:
        print(f"cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out is None:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
