"""
Problem file parser and writer.

Line-oriented UTF-8 text; "#" starts a comment, blank lines are ignored:

    name = example1
    orders = 0.5                 # ascending; last entry is the leading order
    rhs = x^2 + 2*x^(2-0.5)/gamma(3-0.5) - y
    ic 0 = 0                     # one line per k = 0..ceil(leading order)-1
    domain = 0, 1
    points = 10
    basis = 3
    exact = x^2                  # optional
    grid = 0.1, 0.2, ...         # optional explicit training points

Required keys: orders, rhs, basis. Defaults: name = problem, domain = 0, 1,
points = 10 (or the length of grid). IC values may be constant expressions
such as 1/3 or sqrt(pi).
"""

import math
import re
from typing import Dict, List, Optional, Tuple

from parsers.expressions import ExpressionError, evaluate, parse, to_text
from processors.benchmarks import Benchmark, default_report_grid
from processors.loss import ProblemSpec

KEYS = ("name", "orders", "rhs", "domain", "points", "basis", "exact", "grid")
REQUIRED_KEYS = ("orders", "rhs", "basis")
_IC_KEY_RE = re.compile(r"ic\s+(\S+)")
_NAME_RE = re.compile(r"[A-Za-z0-9_.\-]+")


class ProblemFormatError(ValueError):
    """Malformed problem file; message starts with the 1-based line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


def _strip_comment(raw: str) -> str:
    return raw.split("#", 1)[0].strip()


def _float_list(value: str, line: int, key: str) -> List[float]:
    parts = [p.strip() for p in value.split(",")]
    if not value.strip() or any(not p for p in parts):
        raise ProblemFormatError(line, f"'{key}' needs a comma-separated list of numbers")
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ProblemFormatError(line, f"'{key}' has a non-numeric entry in '{value}'") from None
    if not all(math.isfinite(v) for v in values):
        raise ProblemFormatError(line, f"'{key}' entries must be finite")
    return values


def _int_value(value: str, line: int, key: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ProblemFormatError(line, f"'{key}' must be an integer, got '{value}'") from None


def _expression(value: str, line: int, key: str):
    try:
        return parse(value)
    except ExpressionError as exc:
        raise ProblemFormatError(line, f"'{key}': {exc}") from None


def load_problem(text: str) -> Benchmark:
    """
    Parse a problem file.

    Returns:
        Benchmark whose exact solution is None when the file has no 'exact' line

    Raises:
        ProblemFormatError: syntax problems, with the line number
        ProblemValidationError: the parsed problem violates an invariant
    """
    fields: Dict[str, Tuple[str, int]] = {}
    ics: List[Tuple[int, float]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        if "=" not in line:
            raise ProblemFormatError(lineno, f"expected 'key = value', got '{line}'")
        key, value = (s.strip() for s in line.split("=", 1))
        if not value:
            raise ProblemFormatError(lineno, f"'{key}' has no value")

        ic_match = _IC_KEY_RE.fullmatch(key)
        if ic_match:
            k = _int_value(ic_match.group(1), lineno, "ic")
            expr = _expression(value, lineno, f"ic {k}")
            try:
                ics.append((k, evaluate(expr, {})))
            except (ArithmeticError, ValueError) as exc:
                raise ProblemFormatError(lineno, f"'ic {k}' must be a constant expression: {exc}") from None
            continue

        if key not in KEYS:
            raise ProblemFormatError(lineno, f"unknown key '{key}'")
        if key in fields:
            raise ProblemFormatError(lineno, f"duplicate key '{key}' (first on line {fields[key][1]})")
        fields[key] = (value, lineno)

    last_line = max(len(text.splitlines()), 1)
    for key in REQUIRED_KEYS:
        if key not in fields:
            raise ProblemFormatError(last_line, f"missing required key '{key}'")

    name = fields.get("name", ("problem", 0))[0]
    if not _NAME_RE.fullmatch(name):
        raise ProblemFormatError(fields["name"][1], f"name '{name}' may only use letters, digits, '_', '-', '.'")

    orders = _float_list(*fields["orders"], "orders")
    if any(a <= 0 for a in orders):
        raise ProblemFormatError(fields["orders"][1], "orders must be positive")
    rhs = _expression(*fields["rhs"], "rhs")
    basis = _int_value(*fields["basis"], "basis")

    domain: Tuple[float, float] = (0.0, 1.0)
    if "domain" in fields:
        values = _float_list(*fields["domain"], "domain")
        if len(values) != 2:
            raise ProblemFormatError(fields["domain"][1], "'domain' needs exactly two numbers a, b")
        domain = (values[0], values[1])

    grid: Optional[Tuple[float, ...]] = None
    if "grid" in fields:
        grid = tuple(_float_list(*fields["grid"], "grid"))

    if "points" in fields:
        points = _int_value(*fields["points"], "points")
    else:
        points = len(grid) if grid is not None else 10

    exact = _expression(*fields["exact"], "exact") if "exact" in fields else None

    spec = ProblemSpec(
        orders=tuple(orders),
        rhs=rhs,
        ics=tuple(ics),
        domain=domain,
        num_points=points,
        basis_size=basis,
        grid=grid,
        name=name,
    )
    return Benchmark(spec=spec, exact=exact, label=name, report_grid=default_report_grid(domain))


def dump_problem(benchmark: Benchmark) -> str:
    """Problem-file text that load_problem turns back into an equivalent Benchmark."""
    spec = benchmark.spec
    lines = [
        f"name = {benchmark.label}",
        "orders = " + ", ".join(repr(a.alpha) for a in spec.orders),
        f"rhs = {to_text(spec.rhs)}",
    ]
    lines += [f"ic {k} = {v!r}" for k, v in spec.ics]
    lines += [
        f"domain = {spec.domain[0]!r}, {spec.domain[1]!r}",
        f"points = {spec.num_points}",
        f"basis = {spec.basis_size}",
    ]
    if spec.grid is not None:
        lines.append("grid = " + ", ".join(repr(x) for x in spec.grid))
    if benchmark.exact is not None:
        lines.append(f"exact = {to_text(benchmark.exact)}")
    return "\n".join(lines) + "\n"
