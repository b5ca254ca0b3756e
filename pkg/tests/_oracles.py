"""Independent reference computations used by several test modules."""

from multinewton.expr import evaluate


def expanded_scheme(f, fprime, x, m, ctx):
    """Next iterate from the expanded bracket form, built term by term.

    Each y_k is recomputed from x with the whole bracket, rather than by
    the incremental update the solver uses.
    """
    fx = evaluate(f, x, ctx)
    u = fx / evaluate(fprime, x, ctx)
    y = [None, x - u]
    if m == 1:
        return y[1]
    fy1 = evaluate(f, y[1], ctx)
    weight = 1 + 2 * fy1 / fx
    for k in range(2, m + 1):
        bracket = 1 + sum(evaluate(f, y[j], ctx) / fx * weight for j in range(1, k))
        y.append(x - u * bracket)
    return y[m]


def central_difference_check(e, x, ctx, h_exp=-66):
    """Compare the symbolic derivative with a central difference at ``x``.

    Returns ``(symbolic, finite_difference, allowed)``.  The allowance is the
    truncation term ``h^2 |f'''| / 6`` plus the rounding actually incurred in
    the two function values, measured against a double-precision evaluation.
    """
    from multinewton.expr import differentiate, evaluate, nth_derivative
    from multinewton.precision import PrecisionContext

    fine = PrecisionContext(2 * ctx.decimal_digits)
    h = ctx.power10(h_exp)
    x = ctx.real(x)
    lo, hi = x - h, x + h
    f_lo, f_hi = evaluate(e, lo, ctx), evaluate(e, hi, ctx)
    noise = abs(fine.real(f_lo) - evaluate(e, fine.real(lo), fine))
    noise += abs(fine.real(f_hi) - evaluate(e, fine.real(hi), fine))
    fd = (f_hi - f_lo) / (2 * h)
    d = evaluate(differentiate(e), x, ctx)
    third = evaluate(nth_derivative(e, 3), x, ctx)
    allowed = 10 * (abs(third) / 6 + 1) * h**2 + ctx.real(2 * noise + 4 * ctx.mp.eps) / (2 * h)
    return d, fd, allowed
