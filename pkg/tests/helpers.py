"""
Shared assertions and the script runner used by every test module.
"""

from __future__ import annotations

import argparse
import shutil
import sys
import traceback
from pathlib import Path
from typing import Callable, List, Tuple, Type

import numpy as np

TestFunc = Callable[[Path, bool], bool]


def assert_equal(actual, expected, msg: str = ""):
    """Assert two values are equal."""
    if actual != expected:
        raise AssertionError(f"{msg}\n  Expected: {expected}\n  Actual: {actual}")


def assert_true(condition, msg: str = ""):
    """Assert condition is True."""
    if not condition:
        raise AssertionError(f"{msg}\n  Condition was False")


def assert_close(actual, expected, tol: float = 1e-12, msg: str = "", rel: bool = False):
    """Assert |actual - expected| <= tol elementwise (scaled by |expected| when rel)."""
    a = np.asarray(actual, dtype=float)
    e = np.asarray(expected, dtype=float)
    if a.shape != e.shape:
        raise AssertionError(f"{msg}\n  Shape {a.shape} != {e.shape}")
    scale = np.maximum(np.abs(e), 1.0) if rel else 1.0
    err = np.abs(a - e) / scale
    if not np.all(err <= tol):
        raise AssertionError(f"{msg}\n  Expected: {e}\n  Actual: {a}\n  Max error: {float(np.max(err)):.3e} > {tol:g}")


def assert_raises(exc_type: Type[BaseException], func: Callable, *args, match: str = "", msg: str = "", **kwargs):
    """Assert func(*args) raises exc_type whose message contains match."""
    try:
        func(*args, **kwargs)
    except exc_type as e:
        if match and match not in str(e):
            raise AssertionError(f"{msg}\n  Expected message containing: {match!r}\n  Actual: {e}")
        return e
    raise AssertionError(f"{msg}\n  Expected {exc_type.__name__} was not raised")


def run_tests(title: str, temp_name: str, tests: List[Tuple[str, TestFunc]]) -> None:
    """Script entry point: run tests in order, print PASS/FAIL, exit 1 on any failure."""
    ap = argparse.ArgumentParser(description=title)
    ap.add_argument("--verbose", "-v", action="store_true", help="Verbose output")
    args = ap.parse_args()

    # Temporary directory in the workspace (avoids Windows permission issues)
    workspace_tmp = Path(__file__).parent.parent / "temp" / temp_name
    if workspace_tmp.exists():
        shutil.rmtree(workspace_tmp, ignore_errors=True)
    workspace_tmp.mkdir(parents=True, exist_ok=True)

    try:
        print("=" * 70)
        print(title)
        print("=" * 70)
        print(f"Temp directory: {workspace_tmp}")
        print()

        passed = 0
        failed = 0
        for test_name, test_func in tests:
            tmp_dir = workspace_tmp / test_func.__name__
            tmp_dir.mkdir(parents=True, exist_ok=True)
            try:
                if args.verbose:
                    print()
                test_func(tmp_dir, args.verbose)
                passed += 1
                if not args.verbose:
                    print(f"PASS: {test_name}")
            except Exception as e:
                failed += 1
                print(f"FAIL: {test_name}: {e}")
                if args.verbose:
                    traceback.print_exc()

        print()
        print("=" * 70)
        print(f"Results: {passed} passed, {failed} failed")
        print("=" * 70)

        if failed > 0:
            sys.exit(1)
    finally:
        shutil.rmtree(workspace_tmp, ignore_errors=True)
