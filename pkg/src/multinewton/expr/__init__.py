"""Expression trees: parsing, printing, differentiation and evaluation."""

from .derivative import differentiate, nth_derivative
from .evaluate import DomainError, evaluate
from .nodes import (
    FUNCTIONS,
    Add,
    Constant,
    Div,
    Expr,
    Func,
    Mul,
    Neg,
    Pow,
    Sub,
    Variable,
    X,
    const,
    is_literal,
    size,
    to_string,
)
from .parser import ParseError, UnknownIdentifierError, parse

__all__ = [
    "FUNCTIONS",
    "Add",
    "Constant",
    "Div",
    "DomainError",
    "Expr",
    "Func",
    "Mul",
    "Neg",
    "ParseError",
    "Pow",
    "Sub",
    "UnknownIdentifierError",
    "Variable",
    "X",
    "const",
    "differentiate",
    "evaluate",
    "is_literal",
    "nth_derivative",
    "parse",
    "size",
    "to_string",
]
