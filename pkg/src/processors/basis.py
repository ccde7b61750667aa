"""
Basis Module

================================================================================
PURPOSE
================================================================================
Fibonacci polynomial basis and its closed-form Caputo derivatives.

  - Polynomial: dense real polynomial, ascending degree order
  - FracSeries: finite sum c * x^e with real exponents e >= 0
  - FractionalOrder: differentiation order alpha > 0

The Caputo derivative of a monomial is the gamma power rule

    D^alpha x^k = 0                                         k < ceil(alpha)
    D^alpha x^k = Gamma(k+1) / Gamma(k+1-alpha) x^(k-alpha)  k >= ceil(alpha)

and for integer alpha it coincides with the classical derivative, which is what
we compute in that case.

================================================================================
USAGE
================================================================================
  from processors.basis import FractionalOrder, caputo_deriv_fib, eval_fracseries

  series = caputo_deriv_fib(3, FractionalOrder(0.5))   # D^0.5 (x^2 + 1)
  value = eval_fracseries(series, 1.0)                  # 2 / Gamma(2.5)

================================================================================
GAMMA
================================================================================
Lanczos approximation (g = 7, 9 coefficients) with the reflection formula below
1/2. Arguments above 20 are first reduced with Gamma(x) = (x-1) Gamma(x-1), which
keeps the relative error under 1e-13 up to 171. Positive integers up to 171 are
returned as exact factorials so that the integer-order coefficients stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Tuple, Union

import numpy as np


# =============================================================================
# CONFIGURATION
# =============================================================================

LANCZOS_G = 7
LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# Largest argument whose gamma value fits in a double
GAMMA_MAX_ARG = 171.62

# Arguments above this are reduced by the recurrence before the series
LANCZOS_SHIFT_ABOVE = 20.0

# Exponents closer than this are the same power of x
EXPONENT_TOL = 1e-12

MAX_DEGREE = 64


# =============================================================================
# GAMMA FUNCTION
# =============================================================================

def _lanczos(x: float) -> float:
    """Gamma(x) for x >= 0.5."""
    # Power term loses accuracy as x grows; shift down with Gamma(x) = (x-1) Gamma(x-1)
    scale = 1.0
    while x > LANCZOS_SHIFT_ABOVE:
        x -= 1.0
        scale *= x
    return scale * _lanczos_core(x)


def _lanczos_core(x: float) -> float:
    x -= 1.0
    a = LANCZOS_COEFFS[0]
    t = x + LANCZOS_G + 0.5
    for i in range(1, LANCZOS_G + 2):
        a += LANCZOS_COEFFS[i] / (x + i)
    return math.sqrt(2.0 * np.pi) * t ** (x + 0.5) * np.exp(-t) * a


def gamma(x: float) -> float:
    """
    Gamma function.

    Args:
        x: Real argument, not zero or a negative integer

    Returns:
        Gamma(x)

    Raises:
        ValueError: x is a pole (0, -1, -2, ...) or not finite
        OverflowError: x > 171.62
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"gamma argument must be finite, got {x}")
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"gamma pole at x={x:g}")
    if x > GAMMA_MAX_ARG:
        raise OverflowError(f"gamma({x:g}) exceeds double range")

    if x == math.floor(x) and x <= 171:
        return float(math.factorial(int(x) - 1))

    if x < 0.5:
        reflected = 1.0 - x
        if reflected > GAMMA_MAX_ARG:
            # 1/Gamma(1-x) underflows
            return 0.0
        return float(np.pi / (np.sin(np.pi * x) * _lanczos(reflected)))

    return float(_lanczos(x))


# =============================================================================
# DOMAIN TYPES
# =============================================================================

@dataclass(frozen=True)
class FractionalOrder:
    """Order of differentiation alpha > 0."""

    alpha: float

    def __post_init__(self) -> None:
        alpha = float(self.alpha)
        if not math.isfinite(alpha) or alpha <= 0.0:
            raise ValueError(f"fractional order must be positive and finite, got {self.alpha}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def ceil(self) -> int:
        return math.ceil(self.alpha)

    @property
    def is_integer(self) -> bool:
        return self.alpha == math.floor(self.alpha)

    def __float__(self) -> float:
        return self.alpha


OrderLike = Union[FractionalOrder, float, int]


def as_order(a: OrderLike) -> FractionalOrder:
    """Coerce a float or FractionalOrder to FractionalOrder."""
    return a if isinstance(a, FractionalOrder) else FractionalOrder(float(a))


@dataclass(frozen=True)
class Polynomial:
    """
    Dense polynomial; coeffs[j] multiplies x^j.

    Always canonical: empty tuple for zero, otherwise non-zero last entry.
    """

    coeffs: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        coeffs = [float(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0.0:
            coeffs.pop()
        if len(coeffs) - 1 > MAX_DEGREE:
            raise ValueError(f"polynomial degree {len(coeffs) - 1} exceeds cap {MAX_DEGREE}")
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: Polynomial) -> Polynomial:
        size = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0.0] * (size - len(self.coeffs))
        b = list(other.coeffs) + [0.0] * (size - len(other.coeffs))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))


@dataclass(frozen=True)
class FracSeries:
    """
    Finite sum of terms coef * x^exponent.

    Terms are sorted by exponent, exponents are distinct and >= 0, and zero
    coefficients are dropped.
    """

    terms: Tuple[Tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", _normalize_terms(self.terms))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def coefficients(self) -> Tuple[float, ...]:
        return tuple(c for c, _ in self.terms)

    @property
    def exponents(self) -> Tuple[float, ...]:
        return tuple(e for _, e in self.terms)

    def __add__(self, other: FracSeries) -> FracSeries:
        return FracSeries(self.terms + other.terms)

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> FracSeries:
        return cls(tuple((c, float(j)) for j, c in enumerate(p.coeffs)))


def _normalize_terms(terms: Iterable[Tuple[float, float]]) -> Tuple[Tuple[float, float], ...]:
    """Sort by exponent, merge equal exponents, drop zero terms."""
    pairs = sorted(((float(c), float(e)) for c, e in terms), key=lambda t: t[1])
    merged: list[list[float]] = []
    for coef, exp in pairs:
        if not math.isfinite(exp) or exp < 0.0:
            raise ValueError(f"FracSeries exponent must be finite and >= 0, got {exp}")
        if merged and abs(exp - merged[-1][1]) < EXPONENT_TOL:
            merged[-1][0] += coef
        else:
            merged.append([coef, exp])
    return tuple((c, e) for c, e in merged if c != 0.0)


# =============================================================================
# FIBONACCI POLYNOMIALS
# =============================================================================

def _fibonacci_int_coeffs(m: int) -> list[int]:
    """Integer coefficients of F_m from the recurrence."""
    if m < 0:
        raise ValueError(f"Fibonacci index must be >= 0, got {m}")
    if m - 1 > MAX_DEGREE:
        raise ValueError(f"F_{m} has degree {m - 1}, above cap {MAX_DEGREE}")
    prev: list[int] = []     # F_0
    cur: list[int] = [1]     # F_1
    if m == 0:
        return prev
    for _ in range(m - 1):
        # x * F_{k+1} + F_k
        nxt = [0] + cur
        for j, c in enumerate(prev):
            nxt[j] += c
        prev, cur = cur, nxt
    return cur


def fibonacci(m: int) -> Polynomial:
    """
    Fibonacci polynomial F_m.

    F_0 = 0, F_1 = 1, F_{m+2} = x F_{m+1} + F_m. Degree of F_m is m-1.
    """
    return Polynomial(tuple(float(c) for c in _fibonacci_int_coeffs(int(m))))


def fibonacci_closed_form(m: int) -> list[int]:
    """
    Integer coefficients of F_m from the binomial sum

        F_m(x) = sum_{r=0}^{floor((m-1)/2)} C(m-r-1, r) x^(m-2r-1)
    """
    if m < 0:
        raise ValueError(f"Fibonacci index must be >= 0, got {m}")
    if m == 0:
        return []
    coeffs = [0] * m
    for r in range((m - 1) // 2 + 1):
        coeffs[m - 2 * r - 1] = math.comb(m - r - 1, r)
    return coeffs


def fibonacci_expansion(p: Polynomial, n: int) -> np.ndarray:
    """
    Weights w_1..w_n with p = sum w_i F_i.

    F_i is monic of degree i-1, so the system is triangular and solved from the
    top degree down.

    Raises:
        ValueError: deg p >= n (p is not in the span of F_1..F_n)
    """
    if n < 1:
        raise ValueError(f"basis size must be >= 1, got {n}")
    if p.degree >= n:
        raise ValueError(f"degree {p.degree} polynomial is outside span of F_1..F_{n}")
    remaining = list(p.coeffs) + [0.0] * (n - len(p.coeffs))
    weights = np.zeros(n)
    for i in range(n, 0, -1):
        w = remaining[i - 1]
        weights[i - 1] = w
        if w != 0.0:
            for j, c in enumerate(_fibonacci_int_coeffs(i)):
                remaining[j] -= w * c
    return weights


# =============================================================================
# EVALUATION AND DIFFERENTIATION
# =============================================================================

def eval_poly(p: Polynomial, x: float) -> float:
    """Horner evaluation of p at x."""
    acc = 0.0
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def int_deriv_poly(p: Polynomial, k: int) -> Polynomial:
    """k-fold classical derivative of p."""
    if k < 0:
        raise ValueError(f"derivative order must be >= 0, got {k}")
    coeffs = list(p.coeffs)
    for _ in range(k):
        coeffs = [j * c for j, c in enumerate(coeffs)][1:]
        if not coeffs:
            break
    return Polynomial(tuple(coeffs))


def caputo_deriv_poly(p: Polynomial, a: OrderLike) -> FracSeries:
    """
    Caputo derivative of order alpha of a polynomial.

    Monomials of degree below ceil(alpha) vanish; integer orders reduce to
    the classical derivative.
    """
    order = as_order(a)
    if order.is_integer:
        return FracSeries.from_polynomial(int_deriv_poly(p, int(order.alpha)))

    terms = []
    for k, c in enumerate(p.coeffs):
        if k < order.ceil or c == 0.0:
            continue
        coef = c * gamma(k + 1) / gamma(k + 1 - order.alpha)
        terms.append((coef, k - order.alpha))
    return FracSeries(tuple(terms))


def caputo_deriv_fib(i: int, a: OrderLike) -> FracSeries:
    """
    Closed-form Caputo derivative of F_i.

    Sums over j = ceil(alpha) .. i-1 with i+j odd:

        ((i+j-1)/2)! / (((i-j-1)/2)! Gamma(j+1-alpha)) x^(j-alpha)

    Zero whenever deg F_i = i-1 < ceil(alpha).
    """
    if i < 0:
        raise ValueError(f"Fibonacci index must be >= 0, got {i}")
    order = as_order(a)
    terms = []
    for j in range(order.ceil, i):
        if (i + j) % 2 == 0:
            continue
        numer = math.factorial((i + j - 1) // 2) // math.factorial((i - j - 1) // 2)
        terms.append((float(numer) / gamma(j + 1 - order.alpha), j - order.alpha))
    return FracSeries(tuple(terms))


def eval_fracseries(s: FracSeries, x: float) -> float:
    """
    Evaluate sum c * x^e.

    x^0 is 1 at x = 0; every positive power contributes 0 there.

    Raises:
        ValueError: x < 0
    """
    if x < 0.0:
        raise ValueError(f"fractional series undefined for x={x} < 0")
    total = 0.0
    for coef, exp in s.terms:
        if exp == 0.0:
            total += coef
        elif x != 0.0:
            total += coef * x ** exp
    return total
