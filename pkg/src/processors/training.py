"""
Training Module

================================================================================
PURPOSE
================================================================================
Trains the output weights of a Fibonacci network with the Marquardt method
(damped Gauss-Newton): each iteration solves

    (H + lambda I) s = grad E,    w_trial = w - s

and accepts the trial if it lowers the cost. On acceptance lambda shrinks by
decrease_factor (towards Newton); on rejection it grows by increase_factor
(towards short gradient steps) and the step is re-solved with the same grad
and H. Rejections do not count as iterations.

================================================================================
USAGE
================================================================================
  from processors.training import TrainConfig, train

  net, report = train(problem, TrainConfig(seed=7), logger=logger)
  report.converged, report.iterations, report.final_cost

================================================================================
TERMINATION
================================================================================
- tolerance_met:     E < tol
- max_iterations:    k >= max_iter accepted steps
- damping_overflow:  max_inner_retries consecutive rejections
The network at the last accepted weights is returned in every case.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from processors.loss import ProblemSpec, build_problem_cache, compute_loss_parts, cost
from processors.network import Network

PIVOT_TOL = 1e-300
SEED_MAX = 2**64 - 1


# =============================================================================
# CONFIGURATION
# =============================================================================

class TrainConfig(BaseModel):
    """Marquardt parameters; validated on construction."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    lambda0: float = Field(1e4, gt=0)
    max_iter: int = Field(200, ge=1)
    tol: float = Field(1e-16, gt=0)
    decrease_factor: float = Field(4.0, gt=1)
    increase_factor: float = Field(2.0, gt=1)
    max_inner_retries: int = Field(60, ge=1)
    seed: int = Field(42, ge=0, le=SEED_MAX)


class TerminationReason(str, Enum):
    TOLERANCE_MET = "tolerance_met"
    MAX_ITERATIONS = "max_iterations"
    DAMPING_OVERFLOW = "damping_overflow"


@dataclass
class TrainState:
    """Values at the k-th accepted iterate."""

    k: int
    weights: np.ndarray
    lam: float
    E: float
    grad: np.ndarray
    hess: np.ndarray


@dataclass
class TrainReport:
    iterations: int
    final_cost: float
    converged: bool
    termination_reason: TerminationReason
    cost_history: List[float] = field(default_factory=list)
    final_lambda: float = 0.0
    rejected_steps: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "iterations": self.iterations,
            "final_cost": self.final_cost,
            "converged": self.converged,
            "termination_reason": self.termination_reason.value,
            "cost_history": list(self.cost_history),
            "final_lambda": self.final_lambda,
            "rejected_steps": self.rejected_steps,
        }


# =============================================================================
# BUILDING BLOCKS
# =============================================================================

def init_weights(n: int, seed: int) -> np.ndarray:
    """
    n pairwise-distinct weights drawn uniformly from [-1, 1].

    Deterministic in (n, seed); colliding entries are redrawn from the same
    generator.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    w = rng.uniform(-1.0, 1.0, size=n)
    while np.unique(w).size < n:
        _, first = np.unique(w, return_index=True)
        dup = np.setdiff1d(np.arange(n), first)
        w[dup] = rng.uniform(-1.0, 1.0, size=dup.size)
    return w


def solve_damped(hess: np.ndarray, lam: float, grad: np.ndarray) -> np.ndarray:
    """
    Solve (hess + lam I) s = grad by Gaussian elimination with partial pivoting.

    Raises:
        ValueError: lam <= 0 or shapes disagree
        numpy.linalg.LinAlgError: pivot magnitude below 1e-300
    """
    if not lam > 0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    a = np.array(hess, dtype=float)
    b = np.array(grad, dtype=float).reshape(-1)
    n = b.size
    if a.shape != (n, n):
        raise ValueError(f"hessian shape {a.shape} does not match gradient length {n}")

    a[np.diag_indices(n)] += lam
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(a[col:, col])))
        if abs(a[pivot, col]) < PIVOT_TOL:
            raise np.linalg.LinAlgError(f"singular damped system at column {col}")
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            b[[col, pivot]] = b[[pivot, col]]
        factors = a[col + 1:, col] / a[col, col]
        a[col + 1:, col:] -= np.outer(factors, a[col, col:])
        b[col + 1:] -= factors * b[col]

    s = np.zeros(n)
    for row in range(n - 1, -1, -1):
        s[row] = (b[row] - a[row, row + 1:] @ s[row + 1:]) / a[row, row]
    return s


# =============================================================================
# MARQUARDT LOOP
# =============================================================================

def train(
    problem: ProblemSpec,
    config: Optional[TrainConfig] = None,
    logger: Optional[logging.Logger] = None,
) -> Tuple[Network, TrainReport]:
    """
    Fit the network output weights to the problem.

    Args:
        problem: Validated problem definition
        config: Marquardt parameters (defaults when None)
        logger: Optional logger

    Returns:
        (network at the last accepted weights, TrainReport)
    """
    config = config or TrainConfig()
    cache = build_problem_cache(problem)

    def evaluate_state(k: int, w: np.ndarray, lam: float) -> TrainState:
        parts = compute_loss_parts(problem, Network(w), cache)
        return TrainState(k=k, weights=w, lam=lam, E=parts.E, grad=parts.grad, hess=parts.hess)

    state = evaluate_state(0, init_weights(problem.basis_size, config.seed), config.lambda0)
    history = [state.E]
    rejected = 0

    if logger:
        logger.info(
            f"Training {problem.name}: n={problem.basis_size}, P={problem.num_points}, "
            f"seed={config.seed}, E0={state.E:.6e}"
        )

    reason: Optional[TerminationReason] = None
    while reason is None:
        if state.E < config.tol:
            reason = TerminationReason.TOLERANCE_MET
            break
        if state.k >= config.max_iter:
            reason = TerminationReason.MAX_ITERATIONS
            break

        lam = state.lam
        for _ in range(config.max_inner_retries):
            step = solve_damped(state.hess, lam, state.grad)
            trial = state.weights - step
            trial_cost = cost(problem, Network(trial), cache) if np.all(np.isfinite(trial)) else np.inf
            if trial_cost < state.E:
                state = evaluate_state(state.k + 1, trial, lam / config.decrease_factor)
                history.append(state.E)
                if logger:
                    logger.debug(f"  k={state.k:3d}  E={state.E:.6e}  lambda={state.lam:.3e}")
                break
            rejected += 1
            lam *= config.increase_factor
        else:
            state.lam = lam
            reason = TerminationReason.DAMPING_OVERFLOW

    report = TrainReport(
        iterations=state.k,
        final_cost=state.E,
        converged=reason is TerminationReason.TOLERANCE_MET,
        termination_reason=reason,
        cost_history=history,
        final_lambda=state.lam,
        rejected_steps=rejected,
    )

    if logger:
        log = logger.info if report.converged else logger.warning
        log(
            f"Training {problem.name} stopped ({reason.value}): "
            f"{report.iterations} iterations, E={report.final_cost:.6e}, "
            f"{rejected} rejected steps"
        )

    return Network(state.weights), report
