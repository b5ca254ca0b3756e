"""Convergence analysis: COC, fitted order and asymptotic error constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .expr import DomainError, Expr, evaluate, nth_derivative
from .precision import MIN_DIGITS, PrecisionContext
from .solver import Problem, SolveResult

DEFAULT_WINDOW_THRESHOLD = "1e-5"
DEFAULT_MIN_WINDOW = 3
# errors below this many ulps of the root count as exact
_RESOLUTION_GUARD = 10


class AnalysisError(ArithmeticError):
    pass


class InsufficientTrace(AnalysisError):
    pass


class NotAsymptotic(AnalysisError):
    pass


class NoConvergence(AnalysisError):
    pass


class SimpleRootViolation(AnalysisError):
    pass


class UnsupportedOrder(AnalysisError, ValueError):
    pass


def _context_of(values, digits=None):
    if digits is None:
        digits = max(getattr(getattr(v, "context", None), "dps", MIN_DIGITS) for v in values)
    return PrecisionContext(max(int(digits), MIN_DIGITS))


def _errors(iterates, gamma, ctx):
    """Signed errors x_n - gamma, with None where the error is below resolution."""
    g = ctx.real(gamma)
    floor = max(abs(g), 1) * ctx.power10(-ctx.decimal_digits + _RESOLUTION_GUARD)
    out = []
    for x in iterates:
        e = ctx.real(x) - g
        out.append(e if abs(e) > floor else None)
    return out


@dataclass(frozen=True)
class CocSequence:
    """COC values rho_n keyed by the middle iterate index n.

    ``omitted`` lists the indices whose three errors were not all resolvable
    (an iterate equal to the root at working precision) or whose ratio was
    degenerate.
    """

    indices: tuple[int, ...]
    values: tuple
    omitted: tuple[int, ...] = ()

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def at(self, n):
        return self.values[self.indices.index(n)]

    def items(self):
        return list(zip(self.indices, self.values))


def coc_sequence(iterates, gamma, digits=None) -> CocSequence:
    """Computational order of convergence for each admissible iterate.

    ``rho_n = log|e_(n+1)/e_n| / log|e_n/e_(n-1)|`` with ``e_n = x_n - gamma``.
    """
    iterates = list(iterates)
    if len(iterates) < 3:
        raise InsufficientTrace(f"need at least 3 iterates, got {len(iterates)}")
    ctx = _context_of(iterates + [gamma], digits)
    mp = ctx.mp
    errs = _errors(iterates, gamma, ctx)
    indices, values, omitted = [], [], []
    for n in range(1, len(errs) - 1):
        prev, cur, nxt = errs[n - 1], errs[n], errs[n + 1]
        if prev is None or cur is None or nxt is None:
            omitted.append(n)
            continue
        den = mp.log(abs(cur / prev))
        if not den:
            omitted.append(n)
            continue
        indices.append(n)
        values.append(mp.log(abs(nxt / cur)) / den)
    if not values and sum(e is not None for e in errs) < 3:
        raise InsufficientTrace("fewer than 3 iterates differ from the root")
    return CocSequence(tuple(indices), tuple(values), tuple(omitted))


def second_last_coc(coc: CocSequence, iterations: int):
    """COC of the second-last completed iteration.

    With ``iterations`` completed steps the candidates are rho_1 ..
    rho_(iterations-1); the second-last one is rho_(iterations-2).  When that
    entry is missing, the nearest earlier admissible one is used, and with a
    single candidate that one.
    """
    last = max(iterations - 1, 1)
    target = max(iterations - 2, 1)
    admissible = [n for n in coc.indices if n <= last]
    if not admissible:
        return None, None
    if target in admissible:
        n = target
    else:
        lower = [n for n in admissible if n < target]
        n = max(lower) if lower else min(admissible)
    return n, coc.at(n)


def observed_order_and_constant(
    iterates, gamma, m, *, threshold=DEFAULT_WINDOW_THRESHOLD,
    min_window=DEFAULT_MIN_WINDOW, digits=None,
):
    """Least-squares order and observed constant over the asymptotic window.

    The window holds iterates with ``0 < |e_n| < threshold``.  The fitted
    order is the slope of ``log|e_(n+1)|`` against ``log|e_n|`` over
    consecutive window pairs and needs ``min_window`` iterates; with fewer it
    is None.  The constant ``|e_(n+1)| / |e_n|^(2m)`` is taken at the last
    pair and needs only one.  Returns a dict with ``fitted_order``,
    ``order_spread`` (min and max of the local slopes), ``observed_constant``,
    ``signed_constant`` and ``window`` (iterate indices used).
    """
    iterates = list(iterates)
    if len(iterates) < 3:
        raise InsufficientTrace(f"need at least 3 iterates, got {len(iterates)}")
    ctx = _context_of(iterates + [gamma], digits)
    mp = ctx.mp
    errs = _errors(iterates, gamma, ctx)
    thr = ctx.real(Fraction(str(threshold)))
    window = [n for n, e in enumerate(errs) if e is not None and abs(e) < thr]
    pairs = [n for n in window if n + 1 < len(errs) and errs[n + 1] is not None]
    if not pairs:
        raise NotAsymptotic(f"no consecutive iterates with 0 < |e| < {threshold}")

    slope = spread = None
    used = sorted(set(pairs) | {p + 1 for p in pairs})
    if len(used) >= min_window and len(pairs) >= 2:
        xs = [mp.log(abs(errs[n])) for n in pairs]
        ys = [mp.log(abs(errs[n + 1])) for n in pairs]
        k = len(xs)
        mx, my = sum(xs) / k, sum(ys) / k
        sxx = sum((a - mx) ** 2 for a in xs)
        if sxx:
            slope = sum((a - mx) * (b - my) for a, b in zip(xs, ys)) / sxx
            local = [
                (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
                for i in range(k - 1)
                if xs[i + 1] != xs[i]
            ]
            spread = (min(local), max(local)) if local else (slope, slope)

    n = pairs[-1]
    signed = errs[n + 1] / errs[n] ** (2 * m)
    return {
        "fitted_order": slope,
        "order_spread": spread,
        "observed_constant": abs(signed),
        "signed_constant": signed,
        "window": tuple(used),
    }


@dataclass(frozen=True)
class TaylorCoefficients:
    """``c[k-1] = f^(k)(gamma) / k!`` for k = 1..K."""

    gamma: object
    c: tuple

    @property
    def K(self):
        return len(self.c)

    def __getitem__(self, k):
        """1-based access: ``tc[1]`` is c1."""
        if k < 1:
            raise IndexError(k)
        return self.c[k - 1]


def taylor_coefficients(f: Expr, gamma, K: int, ctx: PrecisionContext) -> TaylorCoefficients:
    """Taylor coefficients of ``f`` about ``gamma`` from symbolic derivatives."""
    g = ctx.real(gamma)
    coeffs = []
    d = f
    for k in range(1, K + 1):
        d = nth_derivative(d, 1)
        coeffs.append(evaluate(d, g, ctx) / math.factorial(k))
    if abs(coeffs[0]) < ctx.power10(-(ctx.decimal_digits // 2)):
        raise SimpleRootViolation(f"c1 = {coeffs[0]} vanishes; root is not simple")
    return TaylorCoefficients(g, tuple(coeffs))


def predicted_error_constant(tc: TaylorCoefficients, m: int):
    """Leading coefficient C in ``e_(n+1) = C e_n^(2m) + ...``.

    m = 1 is Newton's ``c2/c1``; m = 2..5 use the closed forms in c1, c2, c3.
    """
    if m not in (1, 2, 3, 4, 5):
        raise UnsupportedOrder(f"no closed-form error constant for m = {m}")
    if tc.K < 3 and m > 1:
        raise ValueError("need c1, c2, c3")
    c1, c2 = tc[1], tc[2]
    if m == 1:
        return c2 / c1
    c3 = tc[3]
    if m == 2:
        return -c2 * (12 * c3 * c1 - 60 * c2**2) / (12 * c1**3)
    if m == 3:
        return c2 * (-792 * c3 * c1 * c2**2 + 2160 * c2**4 + 72 * c3**2 * c1**2) / (72 * c1**5)
    if m == 4:
        return (
            c2
            * (
                77760 * c2**6
                - 41472 * c3 * c1 * c2**4
                + 7344 * c3**2 * c1**2 * c2**2
                - 432 * c3**3 * c1**3
            )
            / (432 * c1**7)
        )
    return (
        c2
        * (
            2799360 * c2**8
            - 1959552 * c3 * c1 * c2**6
            + 513216 * c3**2 * c1**2 * c2**4
            - 59616 * c3**3 * c1**3 * c2**2
            + 2592 * c3**4 * c1**4
        )
        / (2592 * c1**9)
    )


def refine_root(problem: Problem, digits: int, *, max_iter: int = 100, seed=None):
    """Root of ``problem.f`` to ``digits`` decimal digits.

    Newton's method runs at doubling precision starting from ``seed`` (or
    the problem's reference root, or ``x0``), finishing with a few guard
    digits.  The result satisfies ``|f(gamma)| < 10^(-digits+20)``.
    """
    if seed is None:
        seed = problem.reference_root if problem.reference_root is not None else problem.x0
    target = max(int(digits), MIN_DIGITS) + 10
    stages = []
    dps = min(MIN_DIGITS, target)
    while dps < target:
        stages.append(dps)
        dps *= 2
    stages.append(target)

    x = seed
    for dps in stages:
        ctx = PrecisionContext(dps)
        x = ctx.real(x)
        tiny = ctx.power10(-dps + 5)
        for _ in range(max_iter):
            try:
                fx = evaluate(problem.f, x, ctx)
                if not fx:
                    break
                d = evaluate(problem.fprime, x, ctx)
            except DomainError as exc:
                raise NoConvergence(f"left the domain of f: {exc}") from exc
            if not d:
                raise NoConvergence("zero derivative during refinement")
            step = fx / d
            x -= step
            if abs(step) <= tiny * max(abs(x), 1):
                break
        else:
            raise NoConvergence(f"Newton did not settle at {dps} digits")

    ctx = PrecisionContext(max(int(digits), MIN_DIGITS))
    gamma = ctx.real(x)
    residual = abs(evaluate(problem.f, gamma, ctx))
    if residual >= ctx.power10(-ctx.decimal_digits + 20):
        raise NoConvergence(f"residual {ctx.format_sci(residual)} too large")
    return gamma


def brackets_sign_change(problem: Problem, gamma, digits: int) -> bool:
    """True when f changes sign across gamma +- 10^(-digits+30)."""
    ctx = PrecisionContext(max(int(digits), MIN_DIGITS))
    g = ctx.real(gamma)
    delta = ctx.power10(-ctx.decimal_digits + 30) * max(abs(g), 1)
    lo = evaluate(problem.f, g - delta, ctx)
    hi = evaluate(problem.f, g + delta, ctx)
    return lo * hi < 0


@dataclass(frozen=True)
class ConvergenceReport:
    gamma: object
    coc: CocSequence
    second_last_index: int | None
    second_last_coc: object
    fitted_order: object = None
    order_spread: tuple | None = None
    observed_constant: object = None
    predicted_constant: object = None
    constant_ratio: object = None
    warnings: tuple[str, ...] = field(default=())


def analyze(
    result: SolveResult, problem: Problem, *, gamma=None,
    threshold=DEFAULT_WINDOW_THRESHOLD, min_window=DEFAULT_MIN_WINDOW,
) -> ConvergenceReport:
    """Build a :class:`ConvergenceReport` for a finished run.

    The root is always refined to the run's working precision, seeded from
    ``gamma`` when given, otherwise from the run's final iterate.
    Analysis failures become warnings.
    """
    m = result.m
    digits = result.config.precision if result.config else _context_of([result.root]).decimal_digits
    warnings = []
    seed = gamma if gamma is not None else result.root
    root = refine_root(problem, digits, seed=seed)
    ctx = PrecisionContext(digits)

    iterates = result.iterates
    coc = CocSequence((), (), ())
    fitted = spread = observed = predicted = ratio = None
    if len(iterates) < 3:
        warnings.append(
            f"NotAsymptotic: {len(iterates) - 1} full iteration(s), too few iterates for COC"
        )
    else:
        try:
            coc = coc_sequence(iterates, root, digits)
        except InsufficientTrace as exc:
            warnings.append(f"InsufficientTrace: {exc}")
        try:
            fit = observed_order_and_constant(
                iterates, root, m, threshold=threshold, min_window=min_window, digits=digits
            )
            fitted, spread = fit["fitted_order"], fit["order_spread"]
            observed = fit["observed_constant"]
            if fitted is None:
                warnings.append(
                    f"NotAsymptotic: fewer than {min_window} iterates with |e| < {threshold};"
                    " order not fitted"
                )
        except (NotAsymptotic, InsufficientTrace) as exc:
            warnings.append(f"{type(exc).__name__}: {exc}")
    n2, rho2 = second_last_coc(coc, result.iterations)

    if m <= 5:
        try:
            tc = taylor_coefficients(problem.f, root, 3, ctx)
            predicted = predicted_error_constant(tc, m)
        except (SimpleRootViolation, DomainError) as exc:
            warnings.append(f"{type(exc).__name__}: {exc}")
        if predicted and observed is not None:
            ratio = observed / abs(predicted)

    return ConvergenceReport(
        gamma=root,
        coc=coc,
        second_last_index=n2,
        second_last_coc=rho2,
        fitted_order=fitted,
        order_spread=spread,
        observed_constant=observed,
        predicted_constant=predicted,
        constant_ratio=ratio,
        warnings=tuple(warnings),
    )
