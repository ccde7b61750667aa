"""
Parsers for expression text and problem files
"""

from .expressions import (
    ExprSyntaxError,
    UnboundVariableError,
    UnsupportedDifferentiationError,
    diff,
    evaluate,
    parse,
)

__all__ = [
    'ExprSyntaxError',
    'UnboundVariableError',
    'UnsupportedDifferentiationError',
    'diff',
    'evaluate',
    'parse',
]
