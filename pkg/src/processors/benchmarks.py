"""
Benchmarks Module

================================================================================
PURPOSE
================================================================================
The five built-in fractional test problems with their exact solutions, plus
the error tables and solution curves that compare a trained network against an
exact solution.

Every right-hand side is written in the general form f = forcing - (lower-order
terms), so that D^{a_m} y = f reproduces the stated equation:

  1  D^a y + y = t^2 + 2 t^(2-a)/G(3-a)                           exact t^2
  2  y'' + D^0.5 y + y = t^3 + 6t + 3.2/G(0.5) t^2.5              exact t^3
  3  D^2.2 y + D^0.75 y + D^1.25 y + y^3 = ...                    exact t^3/3
  4  D^a y + y = 1 - 4t + 5t^2 - 4/G(2-a) t^(1-a) + 10/G(3-a) t^(2-a)
                                                                  exact 1 - 4t + 5t^2
  5  y'' + D^a y + y = 2 + 4 sqrt(t/pi) + t^2                     exact t^2 (a = 1.5)

================================================================================
USAGE
================================================================================
  from processors.benchmarks import builtin, error_table

  bench = builtin(1, alpha=0.5)
  net, report = train(bench.spec, config)
  table = error_table(net, bench.exact, bench.report_grid)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from parsers.expressions import Binary, Expr, UnsupportedDifferentiationError, diff, evaluate, parse
from processors.basis import Polynomial, fibonacci_expansion
from processors.loss import ProblemSpec
from processors.network import Network, evaluate_network

EXAMPLE_IDS = (1, 2, 3, 4, 5)
DEFAULT_ALPHAS = {1: 0.5, 4: 0.25, 5: 1.5}
BAGLEY_TORVIK_EXACT_ALPHA = 1.5
TABLE_GRID = tuple(round(0.1 * i, 10) for i in range(1, 10))
FULL_GRID = tuple(round(0.1 * i, 10) for i in range(0, 11))
CURVE_POINTS = 101

ERROR_COLUMNS = ["t", "numerical", "exact", "abs_error"]


@dataclass(frozen=True)
class Benchmark:
    """
    A problem together with what is known about its solution.

    Attributes:
        spec: Problem definition used for training
        exact: Exact solution in x, or None when unknown
        label: File-name stem for outputs (e.g. example1_alpha0.5)
        reported_iterations: Iteration count published for the method, if any
        recommended_n: Basis size that spans the exact solution
        exact_polynomial: Exact solution as a polynomial, when it is one
        report_grid: Points of the error table
    """

    spec: ProblemSpec
    exact: Optional[Expr]
    label: str
    reported_iterations: Optional[int] = None
    recommended_n: Optional[int] = None
    exact_polynomial: Optional[Polynomial] = None
    report_grid: Tuple[float, ...] = FULL_GRID

    def __post_init__(self) -> None:
        object.__setattr__(self, "report_grid", tuple(float(t) for t in self.report_grid))
        if self.exact is not None:
            self.check_initial_conditions()

    def check_initial_conditions(self, tol: float = 1e-12) -> None:
        """
        Exact solution must satisfy y^(k)(0) = y0_k for every IC.

        Uses the polynomial when known, otherwise the symbolic derivative. An IC is
        left unchecked only when the exact expression cannot be differentiated
        (x inside gamma/sqrt or an exponent) or its derivative cannot be evaluated
        at 0.
        """
        for k, y0 in self.spec.ics:
            if self.exact_polynomial is not None:
                coeffs = self.exact_polynomial.coeffs
                value = (coeffs[k] if k < len(coeffs) else 0.0) * math.factorial(k)
            else:
                try:
                    value = exact_derivative_at_zero(self.exact, k)
                except (UnsupportedDifferentiationError, ArithmeticError):
                    continue
            if abs(value - y0) > tol:
                raise ValueError(
                    f"{self.label}: exact solution gives y^({k})(0) = {value}, expected {y0}"
                )

    def exact_weights(self) -> np.ndarray:
        """Weights that reproduce the exact polynomial solution in the problem's basis."""
        if self.exact_polynomial is None:
            raise ValueError(f"{self.label}: exact solution is not a known polynomial")
        return fibonacci_expansion(self.exact_polynomial, self.spec.basis_size)


def exact_derivative_at_zero(exact: Expr, k: int) -> float:
    """k-th derivative of an expression in x (or its alias t) at 0."""
    expr = exact
    for _ in range(k):
        expr = Binary("+", diff(expr, "x"), diff(expr, "t"))
    return evaluate(expr, {"x": 0.0, "t": 0.0})


# =============================================================================
# BUILT-IN PROBLEMS
# =============================================================================

def _alpha_for(example_id: int, alpha: Optional[float]) -> float:
    a = DEFAULT_ALPHAS[example_id] if alpha is None else float(alpha)
    if example_id in (1, 4) and not 0.0 < a <= 1.0:
        raise ValueError(f"Example {example_id} needs 0 < alpha <= 1, got {a}")
    if example_id == 5 and not 0.0 < a < 2.0:
        raise ValueError(f"Example 5 needs 0 < alpha < 2, got {a}")
    return a


def builtin(example_id: int, alpha: Optional[float] = None) -> Benchmark:
    """
    One of the five built-in problems.

    Args:
        example_id: 1..5
        alpha: Fractional order for Examples 1, 4 (0 < alpha <= 1) and 5
            (0 < alpha < 2); ignored by Examples 2 and 3

    Raises:
        ValueError: unknown id or alpha out of range
    """
    if example_id not in EXAMPLE_IDS:
        raise ValueError(f"unknown example {example_id}; choose one of {EXAMPLE_IDS}")

    if example_id == 1:
        a = _alpha_for(1, alpha)
        return Benchmark(
            spec=ProblemSpec(
                orders=(a,),
                rhs=parse(f"x^2 + 2*x^(2-{a!r})/gamma(3-{a!r}) - y"),
                ics=((0, 0.0),),
                basis_size=3,
                name=f"example1_alpha{a:g}",
            ),
            exact=parse("x^2"),
            label=f"example1_alpha{a:g}",
            reported_iterations=18,
            recommended_n=3,
            exact_polynomial=Polynomial((0.0, 0.0, 1.0)),
            report_grid=TABLE_GRID,
        )

    if example_id == 2:
        return Benchmark(
            spec=ProblemSpec(
                orders=(0.5, 2.0),
                rhs=parse("x^3 + 6*x + 3.2/gamma(0.5)*x^2.5 - d1 - y"),
                ics=((0, 0.0), (1, 0.0)),
                basis_size=4,
                name="example2",
            ),
            exact=parse("x^3"),
            label="example2",
            reported_iterations=17,
            recommended_n=4,
            exact_polynomial=Polynomial((0.0, 0.0, 0.0, 1.0)),
            report_grid=FULL_GRID,
        )

    if example_id == 3:
        rhs = (
            "2*x^0.8/gamma(1.8) + 2*x^2.25/gamma(3.25) + 2*x^1.75/gamma(2.75)"
            " + x^9/27 - d1 - d2 - y^3"
        )
        return Benchmark(
            spec=ProblemSpec(
                orders=(0.75, 1.25, 2.2),
                rhs=parse(rhs),
                ics=((0, 0.0), (1, 0.0), (2, 0.0)),
                basis_size=4,
                name="example3",
            ),
            exact=parse("x^3/3"),
            label="example3",
            reported_iterations=16,
            recommended_n=4,
            exact_polynomial=Polynomial((0.0, 0.0, 0.0, 1.0 / 3.0)),
            report_grid=TABLE_GRID,
        )

    if example_id == 4:
        a = _alpha_for(4, alpha)
        rhs = (
            f"1 - 4*x + 5*x^2 - 4/gamma(2-{a!r})*x^(1-{a!r})"
            f" + 10/gamma(3-{a!r})*x^(2-{a!r}) - y"
        )
        return Benchmark(
            spec=ProblemSpec(
                orders=(a,),
                rhs=parse(rhs),
                ics=((0, 1.0),),
                basis_size=3,
                name=f"example4_alpha{a:g}",
            ),
            exact=parse("1 - 4*x + 5*x^2"),
            label=f"example4_alpha{a:g}",
            reported_iterations=28,
            recommended_n=3,
            exact_polynomial=Polynomial((1.0, -4.0, 5.0)),
            report_grid=TABLE_GRID,
        )

    a = _alpha_for(5, alpha)
    has_exact = a == BAGLEY_TORVIK_EXACT_ALPHA
    return Benchmark(
        spec=ProblemSpec(
            orders=(a, 2.0),
            rhs=parse("2 + 4*sqrt(x/pi) + x^2 - d1 - y"),
            ics=((0, 0.0), (1, 0.0)),
            basis_size=4,
            name=f"example5_alpha{a:g}",
        ),
        exact=parse("x^2") if has_exact else None,
        label=f"example5_alpha{a:g}",
        reported_iterations=16 if has_exact else None,
        recommended_n=4,
        exact_polynomial=Polynomial((0.0, 0.0, 1.0)) if has_exact else None,
        report_grid=FULL_GRID,
    )


def default_report_grid(domain: Tuple[float, float]) -> Tuple[float, ...]:
    """11 evenly spaced points spanning the domain."""
    a, b = float(domain[0]), float(domain[1])
    return tuple(round(a + i * (b - a) / 10.0, 10) for i in range(11))


# =============================================================================
# ERROR TABLES AND CURVES
# =============================================================================

def error_table(net: Network, exact: Optional[Expr], grid: Sequence[float]) -> pd.DataFrame:
    """
    Network vs exact solution on a grid.

    The network is evaluated from fresh polynomials, not the training cache.

    Returns:
        DataFrame with columns t, numerical, exact, abs_error
        (only t, numerical when exact is None)
    """
    ts = [float(t) for t in grid]
    if any(t < 0.0 for t in ts):
        raise ValueError("report grid points must be >= 0")
    numerical = [evaluate_network(net, t) for t in ts]
    if exact is None:
        return pd.DataFrame({"t": ts, "numerical": numerical}, columns=ERROR_COLUMNS[:2])

    exact_values = [evaluate(exact, {"x": t, "t": t}) for t in ts]
    return pd.DataFrame(
        {
            "t": ts,
            "numerical": numerical,
            "exact": exact_values,
            "abs_error": [abs(n - e) for n, e in zip(numerical, exact_values)],
        },
        columns=ERROR_COLUMNS,
    )


def solution_curve(
    net: Network,
    exact: Optional[Expr],
    domain: Tuple[float, float],
    num: int = CURVE_POINTS,
) -> pd.DataFrame:
    """Numerical (and exact) solution on num evenly spaced points of the domain."""
    ts = np.linspace(float(domain[0]), float(domain[1]), num)
    table = error_table(net, exact, ts)
    return table.drop(columns=["abs_error"], errors="ignore")


def max_abs_error(table: pd.DataFrame) -> Optional[float]:
    """Largest abs_error of an error table, or None without an exact solution."""
    if "abs_error" not in table.columns or table.empty:
        return None
    return float(table["abs_error"].max())
