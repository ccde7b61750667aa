#!/usr/bin/env python3
"""
Test Command-Line Interface

================================================================================
PURPOSE
================================================================================
End-to-end tests for src/solve_fde.py main():
  - benchmark: output files, CSV layout, JSON report, exit codes
  - Byte-identical output across repeated runs
  - solve: problem files with and without an exact solution
  - sweep: combined table, failures and parallel workers
  - export: written file solves like the built-in
  - Usage errors exit with 1, error messages on stderr
  - Table runs at --tol 1e-24 stay below 1e-10 max error
  - --grid (report points) and --train-grid (training points)

================================================================================
USAGE
================================================================================
  python tests/test_cli.py
  python tests/test_cli.py --verbose
"""

from __future__ import annotations

import io
import json
import sys
from contextlib import redirect_stderr
from pathlib import Path
from typing import List

import pandas as pd

# Import module under test
for _path in (Path(__file__).parent.parent / "src", Path(__file__).parent):
    if str(_path) not in sys.path:
        sys.path.insert(0, str(_path))

from helpers import assert_equal, assert_true, run_tests
from solve_fde import main

EXAMPLE1_NO_EXACT = """\
name = no_exact
orders = 0.5
rhs = x^2 + 2*x^(2-0.5)/gamma(3-0.5) - y
ic 0 = 0
basis = 3
"""


def run(argv: List[str]) -> int:
    """main() return value, or the SystemExit code for argparse errors."""
    try:
        return main(argv)
    except SystemExit as e:
        return int(e.code)


def csv_lines(path: Path) -> List[str]:
    return path.read_text(encoding="utf-8").splitlines()


# =============================================================================
# TESTS
# =============================================================================

def test_benchmark_outputs(tmp_dir: Path, verbose: bool) -> bool:
    """benchmark writes the errors table, solution curve and report."""
    if verbose:
        print("Test 1: benchmark outputs")

    code = run(["benchmark", "--example", "1", "--alpha", "0.5", "--out", str(tmp_dir)])
    assert_equal(code, 0, "exit code")

    errors = csv_lines(tmp_dir / "example1_alpha0.5_errors.csv")
    assert_equal(errors[0], "t,numerical,exact,abs_error", "errors header")
    assert_equal(len(errors), 10, "header + 9 rows")
    assert_true(errors[1].startswith("0.1,"), "first row at t = 0.1")

    curve = csv_lines(tmp_dir / "example1_alpha0.5_solution.csv")
    assert_equal(curve[0], "t,numerical,exact", "solution header")
    assert_equal(len(curve), 102, "header + 101 rows")

    report = json.loads((tmp_dir / "example1_alpha0.5_report.json").read_text(encoding="utf-8"))
    assert_equal(report["reported_iterations"], 18, "published iteration count")
    assert_true(report["training"]["converged"], "converged")
    assert_equal(report["training"]["termination_reason"], "tolerance_met", "reason")
    assert_equal(report["config"]["seed"], 42, "seed echoed")
    assert_equal(report["config"]["orders"], [0.5], "orders echoed")
    assert_equal(len(report["weights"]), 3, "weights")
    assert_true(report["max_abs_error"] <= 1e-6, "max abs error")
    assert_true(any((tmp_dir / "logs").glob("solve_fde_*.log")), "log file written")
    return True


def test_repeatable_output(tmp_dir: Path, verbose: bool) -> bool:
    """Same inputs give byte-identical CSVs."""
    if verbose:
        print("Test 2: repeatable output")

    for run_dir in ("a", "b"):
        code = run(["benchmark", "--example", "4", "--alpha", "0.5", "--seed", "3", "--out", str(tmp_dir / run_dir)])
        assert_equal(code, 0, f"run {run_dir}")
    for suffix in ("errors.csv", "solution.csv"):
        name = f"example4_alpha0.5_{suffix}"
        assert_equal(
            (tmp_dir / "a" / name).read_bytes(), (tmp_dir / "b" / name).read_bytes(), f"{name} identical"
        )
    return True


def test_solve_command(tmp_dir: Path, verbose: bool) -> bool:
    """Problem files, missing files and malformed files."""
    if verbose:
        print("Test 3: solve")

    problem = tmp_dir / "no_exact.problem"
    problem.write_text(EXAMPLE1_NO_EXACT, encoding="utf-8")
    out = tmp_dir / "out"
    assert_equal(run(["solve", str(problem), "--out", str(out)]), 0, "solves")
    errors = csv_lines(out / "no_exact_errors.csv")
    assert_equal(errors[0], "t,numerical", "no exact columns")
    assert_equal(len(errors), 12, "header + 11 report points")
    report = json.loads((out / "no_exact_report.json").read_text(encoding="utf-8"))
    assert_true(report["max_abs_error"] is None, "no max error without exact")

    assert_equal(run(["solve", str(tmp_dir / "missing.problem"), "--out", str(out)]), 1, "missing file")

    bad = tmp_dir / "bad.problem"
    bad.write_text("orders = 0.5\nrhs = x +\n", encoding="utf-8")
    assert_equal(run(["solve", str(bad), "--out", str(out)]), 1, "malformed file")

    repo_file = Path(__file__).parent.parent / "config" / "problems" / "example1.problem"
    assert_equal(run(["solve", str(repo_file), "--out", str(out)]), 0, "sample file")
    assert_equal(csv_lines(out / "example1_errors.csv")[0], "t,numerical,exact,abs_error", "sample has exact")
    return True


def test_sweep_command(tmp_dir: Path, verbose: bool) -> bool:
    """Combined table, a failing alpha and parallel workers."""
    if verbose:
        print("Test 4: sweep")

    out = tmp_dir / "serial"
    assert_equal(run(["sweep", "--example", "1", "--alphas", "", "--out", str(out)]), 1, "no alphas")

    assert_equal(run(["sweep", "--example", "1", "--alphas", "0.5,0.75", "--out", str(out)]), 0, "two alphas")
    table = csv_lines(out / "example1_sweep_errors.csv")
    assert_equal(table[0], "alpha,t,abs_error", "sweep header")
    assert_equal(len(table), 19, "header + 2 x 9 rows")
    assert_true(table[1].startswith("0.5,0.1,"), "ordered by alpha then t")
    assert_true((out / "example1_alpha0.75_errors.csv").exists(), "per-alpha files")

    failing = tmp_dir / "failing"
    assert_equal(run(["sweep", "--example", "1", "--alphas", "0.5,1.5", "--out", str(failing)]), 1, "alpha out of range")
    assert_equal(len(csv_lines(failing / "example1_sweep_errors.csv")), 10, "good alpha still tabulated")

    parallel = tmp_dir / "parallel"
    code = run(["sweep", "--example", "1", "--alphas", "0.5,0.75", "--workers", "2", "--out", str(parallel)])
    assert_equal(code, 0, "parallel sweep")
    assert_equal(
        (parallel / "example1_sweep_errors.csv").read_bytes(),
        (out / "example1_sweep_errors.csv").read_bytes(),
        "parallel matches serial",
    )
    assert_equal(run(["sweep", "--example", "1", "--alphas", "0.5", "--workers", "-1", "--out", str(out)]), 1, "bad workers")
    return True


def test_export_then_solve(tmp_dir: Path, verbose: bool) -> bool:
    """An exported built-in solves to the same errors."""
    if verbose:
        print("Test 5: export then solve")

    assert_equal(run(["export", "--example", "1", "--alpha", "0.75", "--out", str(tmp_dir)]), 0, "export")
    exported = tmp_dir / "example1_alpha0.75.problem"
    assert_true(exported.exists(), "problem file written")

    assert_equal(run(["solve", str(exported), "--out", str(tmp_dir / "solved")]), 0, "solve exported")
    assert_equal(run(["benchmark", "--example", "1", "--alpha", "0.75", "--out", str(tmp_dir / "builtin")]), 0, "built-in")
    solved = json.loads((tmp_dir / "solved" / "example1_alpha0.75_report.json").read_text(encoding="utf-8"))
    builtin = json.loads((tmp_dir / "builtin" / "example1_alpha0.75_report.json").read_text(encoding="utf-8"))
    assert_equal(solved["weights"], builtin["weights"], "same trained weights")

    assert_equal(run(["export", "--example", "5", "--alpha", "2.5", "--out", str(tmp_dir)]), 1, "bad alpha")
    return True


def test_usage_errors_and_exit_codes(tmp_dir: Path, verbose: bool) -> bool:
    """Usage errors give 1, non-convergence gives 2."""
    if verbose:
        print("Test 6: exit codes")

    out = str(tmp_dir)
    assert_equal(run(["benchmark", "--example", "9", "--out", out]), 1, "unknown example")
    assert_equal(run(["benchmark", "--out", out]), 1, "missing --example")
    assert_equal(run(["frobnicate"]), 1, "unknown command")
    assert_equal(run(["benchmark", "--example", "1", "--tol", "-1", "--out", out]), 1, "negative tol")
    assert_equal(run(["benchmark", "--example", "1", "--alpha", "1.5", "--out", out]), 1, "alpha out of range")
    assert_equal(run(["benchmark", "--example", "1", "--basis", "1", "--out", out]), 1, "basis too small")
    assert_equal(run(["benchmark", "--example", "1", "--max-iter", "1", "--out", out]), 2, "not converged")

    report = json.loads((tmp_dir / "example1_alpha0.5_report.json").read_text(encoding="utf-8"))
    assert_equal(report["training"]["termination_reason"], "max_iterations", "reason recorded")
    assert_equal(report["training"]["iterations"], 1, "one iteration")

    code = run(["benchmark", "--example", "1", "--points", "5", "--basis", "4", "--out", str(tmp_dir / "override")])
    assert_true(code in (0, 2), "overrides accepted")
    report = json.loads((tmp_dir / "override" / "example1_alpha0.5_report.json").read_text(encoding="utf-8"))
    assert_equal(report["config"]["points"], 5, "points override")
    assert_equal(report["config"]["basis"], 4, "basis override")
    assert_equal(len(report["weights"]), 4, "four weights")
    return True


def test_table_runs_meet_error_bound(tmp_dir: Path, verbose: bool) -> bool:
    """The runs of run_benchmark_tables.sh stay below 1e-10 max error."""
    if verbose:
        print("Test 7: table runs at --tol 1e-24")

    tol = ["--tol", "1e-24", "--out", str(tmp_dir)]
    for example, alpha in ((1, "0.5"), (2, None), (3, None), (4, "0.25"), (5, "1.5")):
        argv = ["benchmark", "--example", str(example)] + (["--alpha", alpha] if alpha else []) + tol
        assert_equal(run(argv), 0, f"example {example} converged")
        label = f"example{example}_alpha{alpha}" if alpha else f"example{example}"
        report = json.loads((tmp_dir / f"{label}_report.json").read_text(encoding="utf-8"))
        err = report["max_abs_error"]
        assert_true(err <= 1e-10, f"{label}: max error {err:.3e}")
        if verbose:
            print(f"  ✓ {label}: {report['training']['iterations']} iterations, max error {err:.2e}")

    for example in (1, 4):
        assert_equal(run(["sweep", "--example", str(example), "--alphas", "0.25,0.5,0.75"] + tol), 0, f"sweep {example}")
        table = pd.read_csv(tmp_dir / f"example{example}_sweep_errors.csv")
        assert_equal(len(table), 27, "3 alphas x 9 rows")
        assert_true(table["abs_error"].max() <= 1e-10, f"sweep {example}: max error {table['abs_error'].max():.3e}")
    return True


def test_report_and_training_grids(tmp_dir: Path, verbose: bool) -> bool:
    """--grid sets the error table points; --train-grid sets the training points."""
    if verbose:
        print("Test 8: report and training grids")

    out = tmp_dir / "report"
    assert_equal(run(["benchmark", "--example", "1", "--grid", "0.2,0.6", "--out", str(out)]), 0, "report grid")
    errors = csv_lines(out / "example1_alpha0.5_errors.csv")
    assert_equal(len(errors), 3, "header + 2 rows")
    assert_true(errors[1].startswith("0.2,") and errors[2].startswith("0.6,"), "rows at the grid points")
    report = json.loads((out / "example1_alpha0.5_report.json").read_text(encoding="utf-8"))
    assert_equal(report["config"]["report_grid"], [0.2, 0.6], "report grid echoed")
    assert_equal(report["config"]["points"], 10, "training points untouched")
    assert_equal(len(report["config"]["training_grid"]), 10, "uniform training grid")

    out = tmp_dir / "train"
    code = run(["benchmark", "--example", "1", "--train-grid", "0.25,0.5,0.75,1.0", "--out", str(out)])
    assert_equal(code, 0, "training grid")
    report = json.loads((out / "example1_alpha0.5_report.json").read_text(encoding="utf-8"))
    assert_equal(report["config"]["training_grid"], [0.25, 0.5, 0.75, 1.0], "training grid echoed")
    assert_equal(report["config"]["points"], 4, "points from the training grid")
    assert_equal(len(csv_lines(out / "example1_alpha0.5_errors.csv")), 10, "report grid untouched")

    out = tmp_dir / "sweep"
    assert_equal(run(["sweep", "--example", "4", "--alphas", "0.5", "--grid", "0.5", "--out", str(out)]), 0, "sweep")
    assert_equal(len(csv_lines(out / "example4_sweep_errors.csv")), 2, "sweep uses the report grid")

    assert_equal(run(["benchmark", "--example", "1", "--grid", "-0.1", "--out", str(out)]), 1, "negative point")
    assert_equal(run(["benchmark", "--example", "1", "--grid", "", "--out", str(out)]), 1, "empty grid")
    return True


def test_errors_reach_stderr(tmp_dir: Path, verbose: bool) -> bool:
    """Loader messages are written to stderr with their line number."""
    if verbose:
        print("Test 9: errors on stderr")

    bad = tmp_dir / "bad.problem"
    bad.write_text("orders = 0.5\nic 0 = 0\nrhs = x +\nbasis = 2\n", encoding="utf-8")
    captured = io.StringIO()
    with redirect_stderr(captured):
        code = run(["solve", str(bad), "--out", str(tmp_dir)])
    assert_equal(code, 1, "exit code")
    assert_true("line 3" in captured.getvalue(), f"stderr names the line: {captured.getvalue()!r}")

    captured = io.StringIO()
    with redirect_stderr(captured):
        code = run(["solve", str(tmp_dir / "missing.problem"), "--out", str(tmp_dir)])
    assert_equal(code, 1, "missing file")
    assert_true("missing.problem" in captured.getvalue(), "stderr names the file")

    captured = io.StringIO()
    with redirect_stderr(captured):
        assert_equal(run(["benchmark", "--example", "1", "--out", str(tmp_dir)]), 0, "clean run")
    assert_true("ERROR" not in captured.getvalue(), "no error lines for a clean run")
    return True


# =============================================================================
# MAIN
# =============================================================================

def main_tests() -> None:
    run_tests(
        "Command-Line Tests",
        "test_cli",
        [
            ("Benchmark Outputs", test_benchmark_outputs),
            ("Repeatable Output", test_repeatable_output),
            ("Solve Command", test_solve_command),
            ("Sweep Command", test_sweep_command),
            ("Export then Solve", test_export_then_solve),
            ("Usage Errors and Exit Codes", test_usage_errors_and_exit_codes),
            ("Table Runs Meet the Error Bound", test_table_runs_meet_error_bound),
            ("Report and Training Grids", test_report_and_training_grids),
            ("Errors on Stderr", test_errors_reach_stderr),
        ],
    )


if __name__ == "__main__":
    main_tests()
