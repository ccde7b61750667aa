"""
Runner Module

================================================================================
PURPOSE
================================================================================
The work behind each solve_fde.py command: apply overrides to a problem, train,
tabulate errors, write outputs, and map the outcome to an exit code.

  cmd_benchmark   one built-in problem
  cmd_solve       a problem file
  cmd_sweep       one built-in problem over several alpha values
  cmd_export      write a built-in problem as a problem file

================================================================================
EXIT CODES
================================================================================
  0  converged (tolerance met)
  1  usage, I/O, parse or validation failure
  2  stopped without converging (max_iterations or damping_overflow)
"""

from __future__ import annotations

import dataclasses
import logging
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from parsers.problem_file import dump_problem, load_problem
from processors.benchmarks import Benchmark, builtin, error_table, solution_curve
from processors.reporting import RunRecord, sweep_frame, write_csv, write_report_json
from processors.training import TrainConfig, TrainReport, train

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_NOT_CONVERGED = 2

# Higher is worse
_SEVERITY = {EXIT_OK: 0, EXIT_NOT_CONVERGED: 1, EXIT_FAILURE: 2}

# RAM per sweep worker (GB) for auto workers; use 80% of available RAM, cap at 8 workers.
GB_PER_WORKER = 0.5
AUTO_WORKERS_CAP = 8

# Format, validation and pydantic errors are all ValueErrors
INPUT_ERRORS = (ValueError, OSError)


# =============================================================================
# CONFIGURATION AND OVERRIDES
# =============================================================================

def build_train_config(defaults: Dict[str, Any], overrides: Dict[str, Any]) -> TrainConfig:
    """TrainConfig from config-file defaults with non-None command-line overrides on top."""
    merged = dict(defaults)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return TrainConfig(**merged)


def apply_overrides(
    bench: Benchmark,
    points: Optional[int] = None,
    basis: Optional[int] = None,
    grid: Optional[Sequence[float]] = None,
    train_grid: Optional[Sequence[float]] = None,
) -> Benchmark:
    """
    Replace the report grid, training grid or basis size of a problem.

    grid sets the points of the error table. points switches training to the
    uniform grid with that many points; train_grid sets explicit training
    points (and num_points to its length).
    """
    changes: Dict[str, Any] = {}
    if points is not None:
        changes.update(num_points=points, grid=None)
    if train_grid is not None:
        changes.update(num_points=len(train_grid), grid=tuple(train_grid))
    if basis is not None:
        changes["basis_size"] = basis
    if changes:
        bench = dataclasses.replace(bench, spec=dataclasses.replace(bench.spec, **changes))
    if grid is not None:
        if not grid:
            raise ValueError("report grid needs at least one point")
        if any(t < 0.0 for t in grid):
            raise ValueError(f"report grid points must be >= 0, got {list(grid)}")
        bench = dataclasses.replace(bench, report_grid=tuple(grid))
    return bench


def exit_code_for(report: TrainReport) -> int:
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def worst_exit_code(codes: Sequence[int]) -> int:
    return max(codes, key=lambda c: _SEVERITY[c], default=EXIT_OK)


def suggested_workers(logger: Optional[logging.Logger] = None) -> int:
    """Suggest parallel workers from available RAM (80% of avail, cap 8)."""
    try:
        import psutil
        avail_gb = psutil.virtual_memory().available / (1024 ** 3)
        n = max(1, min(int(avail_gb * 0.8 / GB_PER_WORKER), AUTO_WORKERS_CAP))
        if logger:
            logger.info("Auto workers from RAM: %.1f GB available → %d workers", avail_gb, n)
        return n
    except ImportError:
        if logger:
            logger.warning("psutil not installed; --workers 0 falls back to 1")
        return 1


# =============================================================================
# SINGLE RUN
# =============================================================================

def config_echo(bench: Benchmark, config: TrainConfig) -> Dict[str, Any]:
    spec = bench.spec
    return {
        **config.model_dump(),
        "orders": [a.alpha for a in spec.orders],
        "points": spec.num_points,
        "basis": spec.basis_size,
        "domain": list(spec.domain),
        "training_grid": [float(x) for x in spec.training_points()],
        "report_grid": list(bench.report_grid),
    }


def run_benchmark(
    bench: Benchmark,
    config: TrainConfig,
    out_dir: Path,
    logger: Optional[logging.Logger] = None,
) -> RunRecord:
    """Train one problem and write its errors CSV, solution CSV and JSON report."""
    started = time.perf_counter()
    net, report = train(bench.spec, config, logger=logger)
    wall_ms = (time.perf_counter() - started) * 1000.0

    errors = error_table(net, bench.exact, bench.report_grid)
    curve = solution_curve(net, bench.exact, bench.spec.domain)

    record = RunRecord(
        label=bench.label,
        config=config_echo(bench, config),
        report=report,
        errors=errors,
        weights=[float(w) for w in net.weights],
        wall_ms=wall_ms,
        reported_iterations=bench.reported_iterations,
    )
    errors_path = write_csv(errors, out_dir / f"{bench.label}_errors.csv")
    curve_path = write_csv(curve, out_dir / f"{bench.label}_solution.csv")
    report_path = out_dir / f"{bench.label}_report.json"
    record.outputs = {"errors": str(errors_path), "solution": str(curve_path), "report": str(report_path)}
    write_report_json(record, report_path)

    if logger:
        logger.info(record.summary_line())
        if bench.reported_iterations is not None:
            logger.info(f"  published iteration count: {bench.reported_iterations}")
        logger.info(f"  wrote {errors_path.name}, {curve_path.name}, {report_path.name}")
    return record


def _run_and_report(
    bench: Benchmark,
    config: TrainConfig,
    out_dir: Path,
    logger: Optional[logging.Logger],
) -> int:
    record = run_benchmark(bench, config, out_dir, logger)
    print(record.summary_line())
    return exit_code_for(record.report)


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_benchmark(
    example_id: int,
    alpha: Optional[float],
    config: TrainConfig,
    out_dir: Path,
    overrides: Optional[Dict[str, Any]] = None,
    logger: Optional[logging.Logger] = None,
) -> int:
    try:
        bench = apply_overrides(builtin(example_id, alpha), **(overrides or {}))
    except INPUT_ERRORS as exc:
        if logger:
            logger.error(str(exc))
        return EXIT_FAILURE
    return _run_and_report(bench, config, out_dir, logger)


def cmd_solve(
    path: Path,
    config: TrainConfig,
    out_dir: Path,
    overrides: Optional[Dict[str, Any]] = None,
    logger: Optional[logging.Logger] = None,
) -> int:
    try:
        text = path.read_text(encoding="utf-8")
        bench = apply_overrides(load_problem(text), **(overrides or {}))
    except INPUT_ERRORS as exc:
        if logger:
            logger.error(f"{path}: {exc}")
        return EXIT_FAILURE
    if bench.exact is None and logger:
        logger.info("No exact solution given; error columns omitted")
    return _run_and_report(bench, config, out_dir, logger)


def _sweep_worker(task: Tuple[int, float, Dict[str, Any], str, Dict[str, Any]]) -> Tuple[float, int, str, Optional[pd.DataFrame]]:
    """
    Worker for ProcessPoolExecutor. Must be top-level for pickling.
    task: (example_id, alpha, config fields, out_dir, overrides)
    Returns: (alpha, exit code, message, errors table or None)
    """
    example_id, alpha, config_fields, out_dir, overrides = task
    try:
        bench = apply_overrides(builtin(example_id, alpha), **overrides)
        record = run_benchmark(bench, TrainConfig(**config_fields), Path(out_dir))
    except Exception as e:
        return alpha, EXIT_FAILURE, f"ERROR: {str(e)[:200]}", None
    return alpha, exit_code_for(record.report), record.summary_line(), record.errors


def cmd_sweep(
    example_id: int,
    alphas: Sequence[float],
    config: TrainConfig,
    out_dir: Path,
    overrides: Optional[Dict[str, Any]] = None,
    workers: int = 1,
    logger: Optional[logging.Logger] = None,
) -> int:
    """
    Run one built-in problem for each alpha; failures are recorded and the
    remaining alphas still run. Writes example<N>_sweep_errors.csv at the end.
    """
    if example_id not in (1, 4):
        if logger:
            logger.error(f"sweep supports examples 1 and 4, got {example_id}")
        return EXIT_FAILURE
    if not alphas:
        if logger:
            logger.error("sweep needs at least one alpha")
        return EXIT_FAILURE

    if workers == 0:
        workers = suggested_workers(logger)
    tasks = [(example_id, float(a), config.model_dump(), str(out_dir), dict(overrides or {})) for a in alphas]

    results: List[Tuple[float, int, str, Optional[pd.DataFrame]]] = []
    if workers <= 1:
        for i, task in enumerate(tasks, start=1):
            result = _sweep_worker(task)
            results.append(result)
            _log_sweep_result(logger, i, len(tasks), result)
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            future_to_alpha = {executor.submit(_sweep_worker, t): t[1] for t in tasks}
            for completed, future in enumerate(as_completed(future_to_alpha), start=1):
                alpha = future_to_alpha[future]
                try:
                    result = future.result()
                except Exception as e:
                    result = (alpha, EXIT_FAILURE, f"ERROR: {e}", None)
                results.append(result)
                _log_sweep_result(logger, completed, len(tasks), result)

    order = {float(a): i for i, a in enumerate(alphas)}
    results.sort(key=lambda r: order.get(r[0], len(order)))
    for _, _, message, _ in results:
        print(message)

    combined = sweep_frame([(alpha, table) for alpha, _, _, table in results if table is not None])
    sweep_path = write_csv(combined, out_dir / f"example{example_id}_sweep_errors.csv")
    if logger:
        logger.info(f"Wrote {sweep_path}")
    return worst_exit_code([code for _, code, _, _ in results])


def _log_sweep_result(
    logger: Optional[logging.Logger],
    completed: int,
    total: int,
    result: Tuple[float, int, str, Optional[pd.DataFrame]],
) -> None:
    if not logger:
        return
    alpha, code, message, _ = result
    log = logger.info if code == EXIT_OK else logger.warning
    log(f"[{completed}/{total}] alpha={alpha:g}: {message}")


def cmd_export(
    example_id: int,
    alpha: Optional[float],
    out_dir: Path,
    logger: Optional[logging.Logger] = None,
) -> int:
    try:
        bench = builtin(example_id, alpha)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / f"{bench.label}.problem"
        path.write_text(dump_problem(bench), encoding="utf-8")
    except INPUT_ERRORS as exc:
        if logger:
            logger.error(str(exc))
        return EXIT_FAILURE
    print(path)
    if logger:
        logger.info(f"Wrote {path}")
    return EXIT_OK
