"""
Math expression parser, evaluator and symbolic differentiator.

Right-hand sides, forcing terms and exact solutions of a problem are written as
plain text, e.g.

    x^2 + 2*x^(2-0.5)/gamma(3-0.5) - y

Grammar (recursive descent, one function per rule):

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := "-" unary | power
    power := atom ("^" unary)?
    atom  := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"

So ^ binds tighter than unary minus (-2^2 = -4) and is right-associative
(2^3^2 = 512). There is no implicit multiplication ("2t" is an error).

Reserved variable names: x (alias t) for the independent variable, y for the
trial solution, d1..d9 for its fractional derivatives in ascending order.
The identifier pi evaluates to 3.14159... unless bound in the environment.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import singledispatch
from typing import Iterator, Mapping, NamedTuple, Optional

from processors.basis import gamma

Env = Mapping[str, float]

FUNCTIONS = ("gamma", "sqrt")
IDENT_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")


# =============================================================================
# ERRORS
# =============================================================================

class ExpressionError(ValueError):
    """Base class for expression failures."""


class ExprSyntaxError(ExpressionError):
    """Parse failure at a character offset."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class UnboundVariableError(ExpressionError):
    """Variable missing from the evaluation environment."""

    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound variable '{name}'")


class UnsupportedDifferentiationError(ExpressionError):
    """Variable appears where diff has no rule (function argument or exponent)."""


# =============================================================================
# AST
# =============================================================================

class Expr:
    """Base class of all expression nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Number(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def __post_init__(self) -> None:
        if not IDENT_RE.fullmatch(self.name):
            raise ValueError(f"invalid identifier '{self.name}'")


@dataclass(frozen=True)
class Neg(Expr):
    child: Expr


@dataclass(frozen=True)
class Binary(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self) -> None:
        if self.op not in ("+", "-", "*", "/", "^"):
            raise ValueError(f"unknown operator '{self.op}'")


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr

    def __post_init__(self) -> None:
        if self.fn not in FUNCTIONS:
            raise ValueError(f"unknown function '{self.fn}'")


ZERO = Number(0.0)
ONE = Number(1.0)


# =============================================================================
# TOKENIZER
# =============================================================================

class Token(NamedTuple):
    kind: str    # NUMBER, IDENT, OP, END
    text: str
    offset: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[a-zA-Z][a-zA-Z0-9_]*)
  | (?P<op>[-+*/^()−])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> Iterator[Token]:
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character '{text[pos]}'", pos, text)
        kind = m.lastgroup
        if kind == "number":
            yield Token("NUMBER", m.group(), pos)
        elif kind == "ident":
            yield Token("IDENT", m.group(), pos)
        elif kind == "op":
            op = m.group()
            yield Token("OP", "-" if op == "−" else op, pos)
        pos = m.end()
    yield Token("END", "", len(text))


# =============================================================================
# PARSER
# =============================================================================

class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = list(tokenize(text))
        self.pos = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def check(self, *ops: str) -> bool:
        return self.current.kind == "OP" and self.current.text in ops

    def error(self, message: str, tok: Optional[Token] = None) -> ExprSyntaxError:
        tok = tok or self.current
        return ExprSyntaxError(message, tok.offset, self.text)

    def unexpected(self) -> ExprSyntaxError:
        tok = self.current
        if tok.kind == "END":
            return self.error("unexpected end of expression")
        if tok.text == ")":
            return self.error("unbalanced parenthesis ')'")
        return self.error(f"unexpected token '{tok.text}'")

    def parse(self) -> Expr:
        if self.current.kind == "END":
            raise self.error("empty expression")
        node = self.expr()
        if self.current.kind != "END":
            raise self.unexpected()
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.check("+", "-"):
            op = self.advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.check("*", "/"):
            op = self.advance().text
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.check("-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.check("^"):
            self.advance()
            return Binary("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.current
        if tok.kind == "NUMBER":
            self.advance()
            return Number(float(tok.text))
        if tok.kind == "IDENT":
            self.advance()
            if self.check("("):
                if tok.text not in FUNCTIONS:
                    raise self.error(f"unknown function name '{tok.text}'", tok)
                open_tok = self.advance()
                arg = self.expr()
                self.expect_close(open_tok)
                return Call(tok.text, arg)
            return Var(tok.text)
        if self.check("("):
            open_tok = self.advance()
            node = self.expr()
            self.expect_close(open_tok)
            return node
        raise self.unexpected()

    def expect_close(self, open_tok: Token) -> None:
        if self.check(")"):
            self.advance()
            return
        if self.current.kind == "END":
            raise self.error("unbalanced parenthesis '('", open_tok)
        raise self.unexpected()


def parse(text: str) -> Expr:
    """
    Parse an expression.

    Raises:
        ExprSyntaxError: with .offset pointing at the offending character
    """
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0, text or "")
    return _Parser(text).parse()


# =============================================================================
# EVALUATION
# =============================================================================

@singledispatch
def evaluate(ast: Expr, env: Env) -> float:
    """Evaluate ast with variable values from env."""
    raise TypeError(f"cannot evaluate {type(ast).__name__}")


@evaluate.register
def _(ast: Number, env: Env) -> float:
    return ast.value


@evaluate.register
def _(ast: Var, env: Env) -> float:
    if ast.name in env:
        return float(env[ast.name])
    if ast.name == "pi":
        return math.pi
    raise UnboundVariableError(ast.name)


@evaluate.register
def _(ast: Neg, env: Env) -> float:
    return -evaluate(ast.child, env)


@evaluate.register
def _(ast: Binary, env: Env) -> float:
    a = evaluate(ast.left, env)
    b = evaluate(ast.right, env)
    if ast.op == "+":
        return a + b
    if ast.op == "-":
        return a - b
    if ast.op == "*":
        return a * b
    if ast.op == "/":
        if b == 0.0:
            raise ZeroDivisionError(f"division by zero in '{to_text(ast)}'")
        return a / b
    if a < 0.0 and b != math.floor(b):
        raise ValueError(f"negative base {a} raised to non-integer power {b}")
    if a == 0.0 and b < 0.0:
        raise ZeroDivisionError(f"zero raised to negative power {b}")
    return a ** b


@evaluate.register
def _(ast: Call, env: Env) -> float:
    v = evaluate(ast.arg, env)
    if ast.fn == "gamma":
        return gamma(v)
    if v < 0.0:
        raise ValueError(f"sqrt of negative value {v}")
    return math.sqrt(v)


eval_expr = evaluate


# =============================================================================
# INSPECTION AND PRINTING
# =============================================================================

@singledispatch
def variables(ast: Expr) -> frozenset[str]:
    """Free variable names (pi included when present)."""
    raise TypeError(f"unknown node {type(ast).__name__}")


@variables.register
def _(ast: Number) -> frozenset[str]:
    return frozenset()


@variables.register
def _(ast: Var) -> frozenset[str]:
    return frozenset((ast.name,))


@variables.register
def _(ast: Neg) -> frozenset[str]:
    return variables(ast.child)


@variables.register
def _(ast: Binary) -> frozenset[str]:
    return variables(ast.left) | variables(ast.right)


@variables.register
def _(ast: Call) -> frozenset[str]:
    return variables(ast.arg)


def contains_var(ast: Expr, var: str) -> bool:
    return var in variables(ast)


def to_text(ast: Expr) -> str:
    """Fully parenthesised text that parses back to an equal-valued tree."""
    if isinstance(ast, Number):
        return f"({ast.value!r})" if ast.value < 0 else repr(ast.value)
    if isinstance(ast, Var):
        return ast.name
    if isinstance(ast, Neg):
        return f"(-{to_text(ast.child)})"
    if isinstance(ast, Binary):
        return f"({to_text(ast.left)} {ast.op} {to_text(ast.right)})"
    if isinstance(ast, Call):
        return f"{ast.fn}({to_text(ast.arg)})"
    raise TypeError(f"unknown node {type(ast).__name__}")


# =============================================================================
# SYMBOLIC DIFFERENTIATION
# =============================================================================

@singledispatch
def diff(ast: Expr, var: str) -> Expr:
    """
    Partial derivative of ast with respect to var.

    Results are not simplified beyond dropping var-free subtrees.

    Raises:
        UnsupportedDifferentiationError: var inside gamma/sqrt or an exponent
    """
    raise TypeError(f"cannot differentiate {type(ast).__name__}")


@diff.register
def _(ast: Number, var: str) -> Expr:
    return ZERO


@diff.register
def _(ast: Var, var: str) -> Expr:
    return ONE if ast.name == var else ZERO


@diff.register
def _(ast: Neg, var: str) -> Expr:
    if not contains_var(ast, var):
        return ZERO
    return Neg(diff(ast.child, var))


@diff.register
def _(ast: Binary, var: str) -> Expr:
    if not contains_var(ast, var):
        return ZERO
    u, v = ast.left, ast.right
    if ast.op in ("+", "-"):
        return Binary(ast.op, diff(u, var), diff(v, var))
    if ast.op == "*":
        return Binary("+", Binary("*", diff(u, var), v), Binary("*", u, diff(v, var)))
    if ast.op == "/":
        numer = Binary("-", Binary("*", diff(u, var), v), Binary("*", u, diff(v, var)))
        return Binary("/", numer, Binary("*", v, v))
    if contains_var(v, var):
        raise UnsupportedDifferentiationError(
            f"'{var}' appears in the exponent of '{to_text(ast)}'"
        )
    # c * u^(c-1) * u'
    return Binary("*", Binary("*", v, Binary("^", u, Binary("-", v, ONE))), diff(u, var))


@diff.register
def _(ast: Call, var: str) -> Expr:
    if not contains_var(ast, var):
        return ZERO
    raise UnsupportedDifferentiationError(f"'{var}' appears inside {ast.fn}()")
