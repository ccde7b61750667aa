"""
Network Module

================================================================================
PURPOSE
================================================================================
Single-hidden-layer functional-link network with Fibonacci polynomial units:

    N(x) = sum_{i=1..n} w_i F_i(x)

The hidden units have fixed unit input weights; only the output weights w are
trained. Because N is linear in w, every derivative of N (classical, Caputo, or
with respect to w) is a weighted sum of the same derivative of the basis, so all
basis values at the training points are computed once and cached.

================================================================================
USAGE
================================================================================
  from processors.network import Network, build_cache, forward, frac_forward

  cache = build_cache(n=3, points=[0.1, 0.2], orders=[0.5], max_ic_order=0)
  net = Network([-1.0, 0.0, 1.0])        # F_3 - F_1 = x^2
  forward(net, cache, 0)                 # 0.01
  frac_forward(net, cache, 0.5, 1)       # D^0.5 x^2 at x = 0.2

================================================================================
CACHE LAYOUT
================================================================================
  values[order]   array (P, n); row p, column i-1 holds D^order F_i(x_p)
  ic_values       array (K+1, n); row k, column i-1 holds F_i^(k)(0)
Order 0 is always present and holds F_i(x_p) itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from processors.basis import (
    OrderLike,
    as_order,
    caputo_deriv_fib,
    eval_fracseries,
    eval_poly,
    fibonacci,
    int_deriv_poly,
)


def _order_key(a: OrderLike) -> float:
    """Cache key of an order; 0 means N itself."""
    value = float(a.alpha) if hasattr(a, "alpha") else float(a)
    return value


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True)
class Network:
    """Output weights w_1..w_n of the network."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.size < 1:
            raise ValueError("network needs at least one basis member")
        if not np.all(np.isfinite(w)):
            raise ValueError(f"network weights must be finite, got {w}")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return int(self.weights.size)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Network) and np.array_equal(self.weights, other.weights)

    def __hash__(self) -> int:
        return hash(self.weights.tobytes())


@dataclass(frozen=True, eq=False)
class BasisCache:
    """Basis values at fixed training points, per order, plus IC values at 0."""

    n: int
    points: np.ndarray
    orders: Tuple[float, ...]
    values: Dict[float, np.ndarray]
    ic_values: np.ndarray

    @property
    def num_points(self) -> int:
        return int(self.points.size)

    @property
    def max_ic_order(self) -> int:
        return int(self.ic_values.shape[0]) - 1

    def table(self, a: OrderLike) -> np.ndarray:
        """(P, n) table of D^a F_i(x_p)."""
        key = _order_key(a)
        if key not in self.values:
            raise KeyError(f"order {key:g} not in basis cache (have {list(self.orders)})")
        return self.values[key]

    def value(self, a: OrderLike, i: int, p: int) -> float:
        """D^a F_i(x_p) with basis index i in 1..n."""
        self._check_basis_index(i)
        self._check_point(p)
        return float(self.table(a)[p, i - 1])

    def ic_value(self, k: int, i: int) -> float:
        """F_i^(k)(0) with basis index i in 1..n."""
        self._check_basis_index(i)
        self._check_ic(k)
        return float(self.ic_values[k, i - 1])

    def _check_basis_index(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise IndexError(f"basis index {i} outside 1..{self.n}")

    def _check_point(self, p: int) -> None:
        if not 0 <= p < self.num_points:
            raise IndexError(f"point index {p} outside 0..{self.num_points - 1}")

    def _check_ic(self, k: int) -> None:
        if not 0 <= k <= self.max_ic_order:
            raise IndexError(f"IC derivative order {k} outside 0..{self.max_ic_order}")

    def _check_network(self, net: Network) -> None:
        if net.n != self.n:
            raise IndexError(f"network has {net.n} weights but cache was built for n={self.n}")


# =============================================================================
# CACHE CONSTRUCTION
# =============================================================================

def build_cache(
    n: int,
    points: Sequence[float],
    orders: Iterable[OrderLike],
    max_ic_order: int,
) -> BasisCache:
    """
    Precompute basis values at the training points.

    Args:
        n: Number of basis members F_1..F_n
        points: Training points x_p (all >= 0)
        orders: Derivative orders needed (order 0 is always added)
        max_ic_order: Highest classical derivative needed at x = 0

    Returns:
        BasisCache covering every requested order and IC order
    """
    if n < 1:
        raise ValueError(f"basis size must be >= 1, got {n}")
    if max_ic_order < 0:
        raise ValueError(f"max_ic_order must be >= 0, got {max_ic_order}")
    pts = np.array(points, dtype=float).reshape(-1)
    if np.any(pts < 0):
        raise ValueError(f"training points must be >= 0, got min {pts.min()}")

    polys = [fibonacci(i) for i in range(1, n + 1)]
    keys = sorted({0.0} | {_order_key(a) for a in orders})

    values: Dict[float, np.ndarray] = {}
    for key in keys:
        table = np.zeros((pts.size, n))
        for col, i in enumerate(range(1, n + 1)):
            if key == 0.0:
                table[:, col] = [eval_poly(polys[col], x) for x in pts]
            else:
                series = caputo_deriv_fib(i, as_order(key))
                table[:, col] = [eval_fracseries(series, x) for x in pts]
        table.setflags(write=False)
        values[key] = table

    ic_values = np.zeros((max_ic_order + 1, n))
    for k in range(max_ic_order + 1):
        for col, poly in enumerate(polys):
            ic_values[k, col] = eval_poly(int_deriv_poly(poly, k), 0.0)
    ic_values.setflags(write=False)
    pts.setflags(write=False)

    return BasisCache(n=n, points=pts, orders=tuple(keys), values=values, ic_values=ic_values)


# =============================================================================
# FORWARD EVALUATION
# =============================================================================

def forward(net: Network, cache: BasisCache, p: int) -> float:
    """N(x_p)."""
    return frac_forward(net, cache, 0.0, p)


def frac_forward(net: Network, cache: BasisCache, a: OrderLike, p: int) -> float:
    """D^a N(x_p) = sum w_i D^a F_i(x_p)."""
    return float(weight_jacobian_row(cache, a, p) @ _weights_for(net, cache))


def weight_jacobian_row(cache: BasisCache, a: OrderLike, p: int) -> np.ndarray:
    """d(D^a N(x_p))/dw_l for l = 1..n; independent of the weights."""
    cache._check_point(p)
    return np.array(cache.table(a)[p, :])


def ic_forward(net: Network, cache: BasisCache, k: int) -> float:
    """N^(k)(0)."""
    cache._check_ic(k)
    return float(cache.ic_values[k, :] @ _weights_for(net, cache))


def _weights_for(net: Network, cache: BasisCache) -> np.ndarray:
    cache._check_network(net)
    return net.weights


def evaluate_network(net: Network, x: float) -> float:
    """N(x) from freshly built polynomials (no cache)."""
    return float(sum(w * eval_poly(fibonacci(i), x) for i, w in enumerate(net.weights, start=1)))
