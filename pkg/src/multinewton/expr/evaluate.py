"""Arbitrary-precision evaluation of expression trees."""

from __future__ import annotations

from ..precision import PrecisionContext
from .nodes import Add, Constant, Div, Expr, Func, Mul, Neg, Pow, Sub, Variable, to_string


class DomainError(ArithmeticError):
    """Evaluation left the real domain of a node.

    ``node`` is the offending subtree, ``argument`` the value it received.
    """

    def __init__(self, message: str, node: Expr, argument=None):
        self.node = node
        self.argument = argument
        super().__init__(f"{message} in {to_string(node)}")


def evaluate(e: Expr, x, ctx: PrecisionContext):
    """Value of ``e`` at ``x`` in the working precision of ``ctx``.

    Raises :class:`DomainError` for ln of a non-positive number, arcsin
    outside [-1, 1], sqrt of a negative number or division by zero.
    Integer powers use binary exponentiation, never exp/ln.
    """
    return _Evaluator(ctx, ctx.real(x)).visit(e)


class _Evaluator:
    __slots__ = ("mp", "ctx", "x")

    def __init__(self, ctx, x):
        self.ctx = ctx
        self.mp = ctx.mp
        self.x = x

    def visit(self, e):
        if isinstance(e, Variable):
            return self.x
        if isinstance(e, Constant):
            return self.ctx.real(e.value)
        if isinstance(e, Add):
            return self.visit(e.left) + self.visit(e.right)
        if isinstance(e, Sub):
            return self.visit(e.left) - self.visit(e.right)
        if isinstance(e, Mul):
            return self.visit(e.left) * self.visit(e.right)
        if isinstance(e, Div):
            num, den = self.visit(e.left), self.visit(e.right)
            if not den:
                raise DomainError("division by zero", e, den)
            return num / den
        if isinstance(e, Neg):
            return -self.visit(e.operand)
        if isinstance(e, Pow):
            base = self.visit(e.base)
            if not base and e.exponent < 0:
                raise DomainError("zero to a negative power", e, base)
            return base**e.exponent
        if isinstance(e, Func):
            return self.function(e, self.visit(e.arg))
        raise TypeError(f"not an expression node: {e!r}")

    def function(self, e, u):
        mp = self.mp
        name = e.name
        if name == "sin":
            return mp.sin(u)
        if name == "cos":
            return mp.cos(u)
        if name == "exp":
            return mp.exp(u)
        if name == "ln":
            if u <= 0:
                raise DomainError("ln of non-positive argument", e, u)
            return mp.ln(u)
        if name == "sqrt":
            if u < 0:
                raise DomainError("sqrt of negative argument", e, u)
            return mp.sqrt(u)
        if name == "arcsin":
            if abs(u) > 1:
                raise DomainError("arcsin argument outside [-1, 1]", e, u)
            return mp.asin(u)
        raise ValueError(name)  # pragma: no cover
