"""Symbolic differentiation with literal folding."""

from __future__ import annotations

from .nodes import (
    ONE,
    ZERO,
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
    const,
)


def _value(e):
    """Exact value of a variable- and function-free subtree, else None."""
    if isinstance(e, Constant):
        return e.value
    if isinstance(e, Neg):
        v = _value(e.operand)
        return None if v is None else -v
    if isinstance(e, Pow):
        v = _value(e.base)
        if v is None or (v == 0 and e.exponent < 0):
            return None
        return v**e.exponent
    if isinstance(e, (Add, Sub, Mul, Div)):
        a = _value(e.left)
        b = None if a is None else _value(e.right)
        if b is None:
            return None
        if isinstance(e, Add):
            return a + b
        if isinstance(e, Sub):
            return a - b
        if isinstance(e, Mul):
            return a * b
        return a / b if b != 0 else None
    return None


def add(a, b):
    va, vb = _value(a), _value(b)
    if va is not None and vb is not None:
        return const(va + vb)
    if va == 0:
        return b
    if vb == 0:
        return a
    return Add(a, b)


def sub(a, b):
    va, vb = _value(a), _value(b)
    if va is not None and vb is not None:
        return const(va - vb)
    if vb == 0:
        return a
    if va == 0:
        return neg(b)
    return Sub(a, b)


def mul(a, b):
    va, vb = _value(a), _value(b)
    if va is not None and vb is not None:
        return const(va * vb)
    if va == 0 or vb == 0:
        return ZERO
    if va == 1:
        return b
    if vb == 1:
        return a
    if va == -1:
        return neg(b)
    if vb == -1:
        return neg(a)
    return Mul(a, b)


def div(a, b):
    va, vb = _value(a), _value(b)
    if va is not None and vb is not None and vb != 0:
        return const(va / vb)
    if va == 0 and vb != 0:
        return ZERO
    if vb == 1:
        return a
    return Div(a, b)


def neg(a):
    va = _value(a)
    if va is not None:
        return const(-va)
    if isinstance(a, Neg):
        return a.operand
    return Neg(a)


def power(a, n: int):
    va = _value(a)
    if va is not None and not (va == 0 and n < 0):
        return const(va**n)
    if n == 0:
        return ONE
    if n == 1:
        return a
    return Pow(a, n)


def differentiate(e: Expr) -> Expr:
    """Return d e/dx.

    Only literal-only subtrees are folded; no other algebraic
    simplification is attempted.

    >>> from .parser import parse
    >>> str(differentiate(parse("x^2")))
    '(2 * x)'
    """
    if isinstance(e, Constant):
        return ZERO
    if isinstance(e, Variable):
        return ONE
    if isinstance(e, Neg):
        return neg(differentiate(e.operand))
    if isinstance(e, Add):
        return add(differentiate(e.left), differentiate(e.right))
    if isinstance(e, Sub):
        return sub(differentiate(e.left), differentiate(e.right))
    if isinstance(e, Mul):
        u, v = e.left, e.right
        return add(mul(differentiate(u), v), mul(u, differentiate(v)))
    if isinstance(e, Div):
        u, v = e.left, e.right
        du, dv = differentiate(u), differentiate(v)
        if _value(dv) == 0:
            return div(du, v)
        return div(sub(mul(du, v), mul(u, dv)), power(v, 2))
    if isinstance(e, Pow):
        n = e.exponent
        return mul(mul(const(n), power(e.base, n - 1)), differentiate(e.base))
    if isinstance(e, Func):
        u = e.arg
        du = differentiate(u)
        if _value(du) == 0:
            return ZERO
        name = e.name
        if name == "sin":
            outer = Func("cos", u)
        elif name == "cos":
            outer = neg(Func("sin", u))
        elif name == "exp":
            outer = e
        elif name == "ln":
            return div(du, u)
        elif name == "sqrt":
            return div(du, mul(const(2), e))
        elif name == "arcsin":
            return div(du, Func("sqrt", sub(ONE, power(u, 2))))
        else:  # pragma: no cover - Func validates names
            raise ValueError(name)
        return mul(outer, du)
    raise TypeError(f"not an expression node: {e!r}")


def nth_derivative(e: Expr, k: int) -> Expr:
    for _ in range(k):
        e = differentiate(e)
    return e
