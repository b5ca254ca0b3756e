"""Recursive-descent parser for infix expressions in ``x``.

Grammar (``^`` binds tightest and is right-associative; unary minus binds
looser than ``^`` so ``-x^2`` is ``-(x^2)``)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := ("-" | "+") unary | power
    power    := primary ("^" unary)?
    primary  := NUMBER | "x" | NAME "(" expr ")" | "(" expr ")"

Exponents must reduce to an integer constant; write real powers as
``exp(a*ln(u))``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .nodes import FUNCTIONS, Add, Constant, Div, Expr, Func, Mul, Neg, Pow, Sub, X, _Binary

ALIASES = {"log": "ln", "asin": "arcsin"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^()])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    """Malformed input.  ``position`` is a 0-based character offset."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        where = "end of input" if position >= len(text) else f"position {position}"
        super().__init__(f"{message} at {where}")


class UnknownIdentifierError(ParseError):
    pass


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            value = m.group()
            if value == "**":
                value = "^"
            tokens.append((kind, value, pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _exact(e: Expr, text, pos) -> Fraction:
    """Exact value of a variable-free subtree (used for exponents)."""
    if isinstance(e, Constant):
        return e.value
    if isinstance(e, Neg):
        return -_exact(e.operand, text, pos)
    if isinstance(e, Pow):
        base = _exact(e.base, text, pos)
        if base == 0 and e.exponent < 0:
            raise ParseError("zero to a negative power in exponent", text, pos)
        return base**e.exponent
    if isinstance(e, _Binary):
        a, b = _exact(e.left, text, pos), _exact(e.right, text, pos)
        if isinstance(e, Add):
            return a + b
        if isinstance(e, Sub):
            return a - b
        if isinstance(e, Mul):
            return a * b
        if b == 0:
            raise ParseError("division by zero in exponent", text, pos)
        return a / b
    raise ParseError("exponent must be an integer constant", text, pos)


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def take(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, v, pos = self.tok
        if v != value or kind == "end":
            found = "" if kind == "end" else f", found {v!r}"
            raise ParseError(f"expected {value!r}{found}", self.text, pos)
        return self.take()

    def parse(self):
        e = self.expr()
        kind, v, pos = self.tok
        if kind != "end":
            raise ParseError(f"unexpected {v!r}", self.text, pos)
        return e

    def expr(self):
        e = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            op = self.take()[1]
            rhs = self.unary()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def unary(self):
        if self.tok[0] == "op" and self.tok[1] in ("-", "+"):
            op = self.take()[1]
            operand = self.unary()
            return Neg(operand) if op == "-" else operand
        return self.power()

    def power(self):
        base = self.primary()
        if self.tok[0] == "op" and self.tok[1] == "^":
            pos = self.take()[2]
            value = _exact(self.unary(), self.text, pos)
            if value.denominator != 1:
                raise ParseError("exponent must be an integer constant", self.text, pos)
            return Pow(base, int(value))
        return base

    def primary(self):
        kind, value, pos = self.tok
        if kind == "number":
            self.take()
            return Constant(Fraction(value))
        if kind == "name":
            self.take()
            if value == "x":
                return X
            name = ALIASES.get(value, value)
            if name not in FUNCTIONS:
                raise UnknownIdentifierError(f"unknown identifier {value!r}", self.text, pos)
            self.expect("(")
            arg = self.expr()
            self.expect(")")
            return Func(name, arg)
        if kind == "op" and value == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            raise ParseError("expected an operand", self.text, pos)
        raise ParseError(f"unexpected {value!r}", self.text, pos)


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    >>> str(parse("cos(x) - x"))
    '(cos(x) - x)'
    """
    return _Parser(text).parse()
