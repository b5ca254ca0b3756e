"""Immutable expression tree for scalar functions of one variable ``x``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

FUNCTIONS = ("sin", "cos", "exp", "ln", "arcsin", "sqrt")


class Expr:
    """Base class for expression nodes.

    Nodes are frozen dataclasses, so structural equality and hashing come
    for free and trees can be shared between threads.
    """

    __slots__ = ()

    def __str__(self):
        return to_string(self)

    def children(self) -> tuple[Expr, ...]:
        return ()


@dataclass(frozen=True, slots=True)
class Constant(Expr):
    """A non-negative exact decimal literal.

    Negative numbers are represented as ``Neg(Constant(...))`` so that the
    printed form re-parses to the same tree.
    """

    value: Fraction

    def __post_init__(self):
        value = Fraction(self.value)
        if value < 0:
            raise ValueError("Constant values are non-negative; wrap in Neg")
        if not _terminates(value):
            raise ValueError(f"{value} has no finite decimal expansion")
        object.__setattr__(self, "value", value)


@dataclass(frozen=True, slots=True)
class Variable(Expr):
    pass


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    operand: Expr

    def children(self):
        return (self.operand,)


@dataclass(frozen=True, slots=True)
class _Binary(Expr):
    left: Expr
    right: Expr

    def children(self):
        return (self.left, self.right)


class Add(_Binary):
    __slots__ = ()


class Sub(_Binary):
    __slots__ = ()


class Mul(_Binary):
    __slots__ = ()


class Div(_Binary):
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def __post_init__(self):
        if isinstance(self.exponent, bool) or int(self.exponent) != self.exponent:
            raise ValueError(f"Pow exponent must be an integer, got {self.exponent!r}")
        object.__setattr__(self, "exponent", int(self.exponent))

    def children(self):
        return (self.base,)


@dataclass(frozen=True, slots=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unsupported function {self.name!r}")

    def children(self):
        return (self.arg,)


def _terminates(q: Fraction) -> bool:
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


X = Variable()
ZERO = Constant(Fraction(0))
ONE = Constant(Fraction(1))


def const(value) -> Expr:
    """Literal for any rational ``value``.

    Negative values become ``Neg`` and values without a finite decimal
    expansion become a quotient of two literals.
    """
    q = Fraction(value)
    if q < 0:
        return Neg(const(-q))
    if _terminates(q):
        return Constant(q)
    return Div(Constant(Fraction(q.numerator)), Constant(Fraction(q.denominator)))


def format_decimal(q: Fraction) -> str:
    """Exact decimal spelling of a terminating fraction, e.g. ``15`` or ``0.125``."""
    if q.denominator == 1:
        return str(q.numerator)
    places = 0
    while (q * 10**places).denominator != 1:
        places += 1
    digits = str(abs(int(q * 10**places))).rjust(places + 1, "0")
    sign = "-" if q < 0 else ""
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


_SYMBOLS = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


def to_string(e: Expr) -> str:
    """Fully parenthesized infix form; ``parse(to_string(e)) == e``."""
    if isinstance(e, Constant):
        return format_decimal(e.value)
    if isinstance(e, Variable):
        return "x"
    if isinstance(e, Neg):
        return f"(-{to_string(e.operand)})"
    if isinstance(e, Pow):
        exp = str(e.exponent) if e.exponent >= 0 else f"(-{-e.exponent})"
        return f"({to_string(e.base)}^{exp})"
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    if isinstance(e, _Binary):
        return f"({to_string(e.left)} {_SYMBOLS[type(e)]} {to_string(e.right)})"
    raise TypeError(f"not an expression node: {e!r}")


def size(e: Expr) -> int:
    return 1 + sum(size(c) for c in e.children())


def is_literal(e: Expr) -> bool:
    """True when the subtree contains no variable."""
    if isinstance(e, Variable):
        return False
    return all(is_literal(c) for c in e.children())
