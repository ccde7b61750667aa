#!/usr/bin/env python3
"""
Fractional Differential Equation Solver (Fibonacci Network)

================================================================================
PURPOSE
================================================================================
Solves initial value problems with Caputo fractional derivatives by training a
functional-link network of Fibonacci polynomials with the Marquardt method, and
tabulates the result against the exact solution when one is known.

Outputs go to --out (default: output_base from config/config.json, else ./out):
  <label>_errors.csv, <label>_solution.csv, <label>_report.json
  example<N>_sweep_errors.csv (sweep), <label>.problem (export)
  logs/solve_fde_<timestamp>.log

================================================================================
USAGE
================================================================================
  # Built-in problem 1 with alpha = 0.5
  python src/solve_fde.py benchmark --example 1 --alpha 0.5

  # User problem file
  python src/solve_fde.py solve config/problems/example1.problem

  # Error sweep over several alpha values, 3 workers
  python src/solve_fde.py sweep --example 4 --alphas 0.25,0.5,0.75 --workers 3

  # Write a built-in as a problem file
  python src/solve_fde.py export --example 3

Exit codes: 0 converged, 1 usage/I-O/parse failure, 2 not converged.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import ValidationError

# Import shared utilities
if str(Path(__file__).parent) not in sys.path:
    sys.path.insert(0, str(Path(__file__).parent))

from processors.runner import (
    EXIT_FAILURE,
    build_train_config,
    cmd_benchmark,
    cmd_export,
    cmd_solve,
    cmd_sweep,
)
from utils import get_log_level, get_output_base, get_train_defaults, setup_logging


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 1 like every other input failure."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_FAILURE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> List[float]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from None


def _add_common(ap: argparse.ArgumentParser) -> None:
    train = ap.add_argument_group("training")
    train.add_argument("--seed", type=int, help="Weight initialisation seed (default 42)")
    train.add_argument("--max-iter", type=int, help="Maximum accepted iterations (default 200)")
    train.add_argument("--tol", type=float, help="Stop when the cost drops below this (default 1e-16)")
    train.add_argument("--lambda0", type=float, help="Initial damping (default 1e4)")
    train.add_argument("--decrease-factor", type=float, help="Damping divisor on accepted steps (default 4)")
    train.add_argument("--increase-factor", type=float, help="Damping multiplier on rejected steps (default 2)")
    train.add_argument("--max-inner-retries", type=int, help="Consecutive rejections before giving up (default 60)")

    problem = ap.add_argument_group("problem overrides")
    problem.add_argument("--points", type=int, help="Number of uniform training points")
    problem.add_argument("--basis", type=int, help="Number of Fibonacci basis members")
    problem.add_argument("--grid", type=_float_list, help="Report grid of the errors table, comma-separated")
    problem.add_argument("--train-grid", type=_float_list, help="Explicit training points, comma-separated")

    ap.add_argument("--out", type=Path, help="Output directory (from config/config.json or ./out)")
    ap.add_argument("--log-level", help="DEBUG shows every iteration (default from config or INFO)")


def build_parser() -> argparse.ArgumentParser:
    ap = _ArgumentParser(description="Solve fractional differential equations with a Fibonacci network")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("benchmark", help="Train one of the five built-in problems")
    p.add_argument("--example", type=int, required=True, choices=[1, 2, 3, 4, 5])
    p.add_argument("--alpha", type=float, help="Fractional order (examples 1, 4 and 5)")
    _add_common(p)

    p = sub.add_parser("solve", help="Train a problem file")
    p.add_argument("file", type=Path)
    _add_common(p)

    p = sub.add_parser("sweep", help="Train example 1 or 4 for several alpha values")
    p.add_argument("--example", type=int, required=True, choices=[1, 4])
    p.add_argument("--alphas", type=_float_list, required=True, help="Comma-separated alpha values")
    p.add_argument("--workers", type=int, default=1, help="Parallel workers; 0 = auto from RAM (default 1)")
    _add_common(p)

    p = sub.add_parser("export", help="Write a built-in problem as a problem file")
    p.add_argument("--example", type=int, required=True, choices=[1, 2, 3, 4, 5])
    p.add_argument("--alpha", type=float, help="Fractional order (examples 1, 4 and 5)")
    p.add_argument("--out", type=Path, help="Output directory (from config/config.json or ./out)")
    p.add_argument("--log-level", help="Log level (default from config or INFO)")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)

    out_dir = (args.out or get_output_base()).resolve()
    level = (args.log_level or get_log_level()).upper()
    logger = setup_logging(out_dir / "logs", "solve_fde", level)

    logger.info("=" * 60)
    logger.info(f"Fibonacci FDE solver: {args.command}")
    logger.info("=" * 60)
    logger.info(f"Output: {out_dir}")

    if args.command == "export":
        return cmd_export(args.example, args.alpha, out_dir, logger)

    try:
        config = build_train_config(
            get_train_defaults(),
            {
                "seed": args.seed,
                "max_iter": args.max_iter,
                "tol": args.tol,
                "lambda0": args.lambda0,
                "decrease_factor": args.decrease_factor,
                "increase_factor": args.increase_factor,
                "max_inner_retries": args.max_inner_retries,
            },
        )
    except ValidationError as e:
        logger.error(f"Invalid training settings: {e}")
        return EXIT_FAILURE
    overrides = {"points": args.points, "basis": args.basis, "grid": args.grid, "train_grid": args.train_grid}
    logger.info(f"Training config: {config.model_dump()}")

    try:
        if args.command == "benchmark":
            code = cmd_benchmark(args.example, args.alpha, config, out_dir, overrides, logger)
        elif args.command == "solve":
            code = cmd_solve(args.file, config, out_dir, overrides, logger)
        else:
            if args.workers < 0:
                logger.error("--workers must be >= 0")
                return EXIT_FAILURE
            code = cmd_sweep(args.example, args.alphas, config, out_dir, overrides, args.workers, logger)
    except (ArithmeticError, ValueError, np.linalg.LinAlgError, OSError) as e:
        logger.error(f"Run failed: {e}")
        return EXIT_FAILURE

    logger.info(f"Done (exit code {code}).")
    return code


if __name__ == "__main__":
    sys.exit(main())
