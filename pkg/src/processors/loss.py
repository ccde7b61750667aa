"""
Loss Module

================================================================================
PURPOSE
================================================================================
Problem definition and the penalised least-squares cost minimised in training.

For the problem

    D^{a_m} y = f(x, y, D^{a_1} y, ..., D^{a_{m-1}} y),   y^(k)(0) = y0_k

and the trial solution N(x) = sum w_i F_i(x), the residual at point x_p is

    r_p = D^{a_m} N(x_p) - f(x_p, N(x_p), D^{a_1} N(x_p), ...)

and the cost is

    E = 1/(2P) sum_p r_p^2 + 1/2 sum_k (N^(k)(0) - y0_k)^2

with P the number of training points. With J the Jacobian of the residuals in w,

    grad = (1/P) J^T r + sum_k (N^(k)(0) - y0_k) dN^(k)(0)/dw
    H    = (1/P) J^T J + sum_k dN^(k)(0)/dw dN^(k)(0)/dw^T     (Gauss-Newton)

J_{p,l} = D^{a_m} F_l(x_p) - df/dy F_l(x_p) - sum_i df/dd_i D^{a_i} F_l(x_p),
with the partials of f taken symbolically once per problem.

================================================================================
USAGE
================================================================================
  from processors.loss import ProblemSpec, build_problem_cache, compute_loss_parts

  cache = build_problem_cache(problem)
  parts = compute_loss_parts(problem, net, cache)   # parts.E, parts.grad, parts.hess
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from parsers.expressions import Expr, diff, evaluate, variables
from processors.basis import FractionalOrder, as_order
from processors.network import BasisCache, Network, build_cache


class ProblemValidationError(ValueError):
    """A ProblemSpec invariant does not hold."""


# =============================================================================
# PROBLEM DEFINITION
# =============================================================================

@dataclass(frozen=True)
class ProblemSpec:
    """
    A fractional initial value problem.

    Args:
        orders: Strictly increasing orders a_1 < ... < a_m; a_m is the leading order
        rhs: f over the reserved names x (or t), y, d1..d{m-1}
        ics: (k, y0_k) for k = 0..ceil(a_m)-1
        domain: (a, b) with 0 <= a < b
        num_points: Number of training points P
        basis_size: Number of basis members n
        grid: Explicit training points (overrides the uniform grid)
        name: Label used for output files
    """

    orders: Tuple[FractionalOrder, ...]
    rhs: Expr
    ics: Tuple[Tuple[int, float], ...]
    domain: Tuple[float, float] = (0.0, 1.0)
    num_points: int = 10
    basis_size: int = 3
    grid: Optional[Tuple[float, ...]] = None
    name: str = "problem"

    def __post_init__(self) -> None:
        object.__setattr__(self, "orders", tuple(as_order(a) for a in self.orders))
        object.__setattr__(self, "ics", tuple(sorted((int(k), float(v)) for k, v in self.ics)))
        object.__setattr__(self, "domain", (float(self.domain[0]), float(self.domain[1])))
        if self.grid is not None:
            object.__setattr__(self, "grid", tuple(float(x) for x in self.grid))
        self.validate()

    # -------------------------------------------------------------------------
    # Validation
    # -------------------------------------------------------------------------

    def validate(self) -> None:
        """Raise ProblemValidationError naming the first violated invariant."""
        if not self.orders:
            raise ProblemValidationError("at least one order is required")
        alphas = [a.alpha for a in self.orders]
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ProblemValidationError(f"orders must be strictly increasing, got {alphas}")
        if len(self.orders) - 1 > 9:
            raise ProblemValidationError("at most 9 lower-order terms (d1..d9) are supported")

        needed = self.leading_order.ceil
        seen: Dict[int, float] = {}
        for k, _ in self.ics:
            if k in seen:
                raise ProblemValidationError(f"duplicate initial condition k={k}")
            if k < 0 or k >= needed:
                raise ProblemValidationError(
                    f"unexpected initial condition k={k} (leading order {self.leading_order.alpha:g} "
                    f"needs k = 0..{needed - 1})"
                )
            seen[k] = 0.0
        for k in range(needed):
            if k not in seen:
                raise ProblemValidationError(f"missing initial condition k={k}")

        allowed = self.allowed_variables
        for name in sorted(variables(self.rhs)):
            if name not in allowed and name != "pi":
                raise ProblemValidationError(
                    f"rhs references unknown variable '{name}' (allowed: {', '.join(sorted(allowed))})"
                )

        a, b = self.domain
        if not (math.isfinite(a) and math.isfinite(b)) or a < 0.0 or a >= b:
            raise ProblemValidationError(f"domain must satisfy 0 <= a < b, got [{a}, {b}]")
        if self.num_points < 1:
            raise ProblemValidationError(f"num_points must be positive, got {self.num_points}")
        if self.grid is not None:
            if len(self.grid) != self.num_points:
                raise ProblemValidationError(
                    f"grid has {len(self.grid)} points but num_points is {self.num_points}"
                )
            if any(x < 0.0 for x in self.grid):
                raise ProblemValidationError("grid points must be >= 0")
        if self.basis_size < needed + 1:
            raise ProblemValidationError(
                f"basis size n must be at least {needed + 1} for leading order "
                f"{self.leading_order.alpha:g}, got {self.basis_size}"
            )

    # -------------------------------------------------------------------------
    # Derived quantities
    # -------------------------------------------------------------------------

    @property
    def leading_order(self) -> FractionalOrder:
        return self.orders[-1]

    @property
    def lower_orders(self) -> Tuple[FractionalOrder, ...]:
        return self.orders[:-1]

    @property
    def derivative_names(self) -> Tuple[str, ...]:
        """d1..d{m-1}, matching lower_orders."""
        return tuple(f"d{i}" for i in range(1, len(self.orders)))

    @property
    def allowed_variables(self) -> frozenset[str]:
        return frozenset(("x", "t", "y") + self.derivative_names)

    @property
    def max_ic_order(self) -> int:
        return self.leading_order.ceil - 1

    def training_points(self) -> np.ndarray:
        """Explicit grid, or x_p = a + p (b - a) / P for p = 1..P."""
        if self.grid is not None:
            return np.array(self.grid, dtype=float)
        a, b = self.domain
        p = np.arange(1, self.num_points + 1, dtype=float)
        return a + p * (b - a) / self.num_points

    @cached_property
    def rhs_partials(self) -> Dict[str, Expr]:
        """df/dy and df/dd_i as expression trees."""
        return {name: diff(self.rhs, name) for name in ("y",) + self.derivative_names}


@dataclass(frozen=True, eq=False)
class LossParts:
    """Cost, gradient and Gauss-Newton Hessian at one weight vector."""

    E: float
    grad: np.ndarray
    hess: np.ndarray


def build_problem_cache(problem: ProblemSpec, points: Optional[Sequence[float]] = None) -> BasisCache:
    """BasisCache with every order and IC order the problem needs."""
    pts = problem.training_points() if points is None else points
    return build_cache(problem.basis_size, pts, problem.orders, problem.max_ic_order)


# =============================================================================
# RESIDUALS
# =============================================================================

def _point_env(problem: ProblemSpec, cache: BasisCache, weights: np.ndarray, p: int) -> Dict[str, float]:
    x = float(cache.points[p])
    env = {"x": x, "t": x, "y": float(cache.table(0.0)[p, :] @ weights)}
    for name, order in zip(problem.derivative_names, problem.lower_orders):
        env[name] = float(cache.table(order)[p, :] @ weights)
    return env


def _check_inputs(problem: ProblemSpec, net: Network, cache: BasisCache) -> np.ndarray:
    cache._check_network(net)
    for order in problem.orders:
        cache.table(order)
    return net.weights


def residual(problem: ProblemSpec, net: Network, cache: BasisCache, p: int) -> float:
    """r_p = D^{a_m} N(x_p) - f(x_p, N(x_p), D^{a_i} N(x_p))."""
    w = _check_inputs(problem, net, cache)
    cache._check_point(p)
    lead = float(cache.table(problem.leading_order)[p, :] @ w)
    return lead - evaluate(problem.rhs, _point_env(problem, cache, w, p))


def residuals(problem: ProblemSpec, net: Network, cache: BasisCache) -> np.ndarray:
    """All residuals r_0..r_{P-1}."""
    return np.array([residual(problem, net, cache, p) for p in range(cache.num_points)], dtype=float)


def ic_errors(problem: ProblemSpec, net: Network, cache: BasisCache) -> np.ndarray:
    """N^(k)(0) - y0_k for each initial condition."""
    w = _check_inputs(problem, net, cache)
    return np.array([float(cache.ic_values[k, :] @ w) - y0 for k, y0 in problem.ics], dtype=float)


def _ic_rows(problem: ProblemSpec, cache: BasisCache) -> np.ndarray:
    """dN^(k)(0)/dw for each initial condition, shape (K, n)."""
    return np.array([cache.ic_values[k, :] for k, _ in problem.ics], dtype=float).reshape(-1, cache.n)


def residual_jacobian(problem: ProblemSpec, net: Network, cache: BasisCache) -> np.ndarray:
    """(P, n) matrix J_{p,l} = dr_p/dw_l."""
    w = _check_inputs(problem, net, cache)
    partials = problem.rhs_partials
    jac = np.array(cache.table(problem.leading_order), dtype=float)
    base = cache.table(0.0)
    for p in range(cache.num_points):
        env = _point_env(problem, cache, w, p)
        row = jac[p, :]
        row -= evaluate(partials["y"], env) * base[p, :]
        for name, order in zip(problem.derivative_names, problem.lower_orders):
            row -= evaluate(partials[name], env) * cache.table(order)[p, :]
    return jac


# =============================================================================
# COST, GRADIENT, HESSIAN
# =============================================================================

def cost(problem: ProblemSpec, net: Network, cache: BasisCache) -> float:
    """E = 1/(2P) sum r_p^2 + 1/2 sum (N^(k)(0) - y0_k)^2."""
    r = residuals(problem, net, cache)
    e_ic = ic_errors(problem, net, cache)
    return float(r @ r / (2.0 * cache.num_points) + 0.5 * (e_ic @ e_ic))


def gradient(problem: ProblemSpec, net: Network, cache: BasisCache) -> np.ndarray:
    """dE/dw."""
    r = residuals(problem, net, cache)
    jac = residual_jacobian(problem, net, cache)
    return jac.T @ r / cache.num_points + _ic_rows(problem, cache).T @ ic_errors(problem, net, cache)


def gauss_newton_hessian(problem: ProblemSpec, net: Network, cache: BasisCache) -> np.ndarray:
    """H = (1/P) J^T J + sum of IC outer products; symmetric PSD."""
    jac = residual_jacobian(problem, net, cache)
    ic_rows = _ic_rows(problem, cache)
    hess = jac.T @ jac / cache.num_points + ic_rows.T @ ic_rows
    return 0.5 * (hess + hess.T)


def compute_loss_parts(problem: ProblemSpec, net: Network, cache: BasisCache) -> LossParts:
    """E, grad and H sharing one pass over the points."""
    r = residuals(problem, net, cache)
    jac = residual_jacobian(problem, net, cache)
    e_ic = ic_errors(problem, net, cache)
    ic_rows = _ic_rows(problem, cache)
    P = cache.num_points

    E = float(r @ r / (2.0 * P) + 0.5 * (e_ic @ e_ic))
    grad = jac.T @ r / P + ic_rows.T @ e_ic
    hess = jac.T @ jac / P + ic_rows.T @ ic_rows
    return LossParts(E=E, grad=grad, hess=0.5 * (hess + hess.T))
