"""Order-2m multistep Newton iteration with evaluation accounting.

One outer iteration of order 2m from ``x`` evaluates ``f'`` once and
advances through substeps::

    y1 = x - f(x)/f'(x)
    yk = y(k-1) - f(y(k-1))/f'(x) * (1 + 2 f(y1)/f(x))     k = 2..m

``m = 1`` is the classical Newton method.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction

from .expr import DomainError, Expr, differentiate, evaluate, parse
from .precision import MIN_DIGITS, PrecisionContext

DEFAULT_TOL = "1e-300"
DEFAULT_DIGITS = 2005
DEFAULT_MAX_ITER = 100


class DerivativeBreakdown(ArithmeticError):
    pass


class NonFinite(ArithmeticError):
    pass


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITER = "MaxIterReached"
    DERIVATIVE_BREAKDOWN = "DerivativeBreakdown"
    DOMAIN_ERROR = "DomainError"
    NON_FINITE = "NonFinite"

    def __str__(self):
        return self.value


class Stopping(str, enum.Enum):
    """Where the convergence test is placed.

    ``LISTING`` also tests after every substep ``k >= 2`` and leaves the
    iteration early when both ``|y_k - y_(k-1)|`` and ``|f(y_k)|`` are below
    the tolerance; the interrupted iteration is not counted.  ``OUTER`` tests
    only ``|x_(n+1) - x_n|`` and ``|f(x_(n+1))|`` once per full iteration.
    The two agree for ``m = 1``.
    """

    LISTING = "listing"
    OUTER = "outer"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Problem:
    """An equation ``f(x) = 0`` with a starting guess.

    ``x0`` and ``reference_root`` are kept as exact values (strings,
    ints or Fractions) and converted at whatever precision a run uses.
    """

    name: str
    f: Expr
    x0: object
    reference_root: object = None
    fprime: Expr | None = None

    def __post_init__(self):
        if self.fprime is None:
            object.__setattr__(self, "fprime", differentiate(self.f))

    @classmethod
    def from_text(cls, name, text, x0, reference_root=None):
        return cls(name, parse(text), x0, reference_root)


@dataclass(frozen=True)
class SolverConfig:
    m: int = 1
    tol: object = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    precision: int = DEFAULT_DIGITS
    stopping: Stopping = Stopping.LISTING

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m!r}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValueError(f"max_iter must be a positive integer, got {self.max_iter!r}")
        if int(self.precision) != self.precision or self.precision < MIN_DIGITS:
            raise ValueError(f"precision must be an integer >= {MIN_DIGITS}")
        object.__setattr__(self, "stopping", Stopping(self.stopping))
        tol = Fraction(str(self.tol)) if not isinstance(self.tol, Fraction) else self.tol
        if tol <= 0:
            raise ValueError("tol must be positive")
        # -log10(tol) < precision - 10, checked exactly
        if tol * Fraction(10) ** (self.precision - 10) <= 1:
            raise ValueError(
                f"tol {self.tol} is not representable at {self.precision} digits"
            )

    def context(self) -> PrecisionContext:
        return PrecisionContext(self.precision)


@dataclass(frozen=True)
class IterationRecord:
    """One iterate of a run.

    ``step`` is ``|x_n - x_(n-1)|`` (None at ``n = 0``).  For a record that
    ended mid-iteration under listing stopping (``partial``), it is the last
    substep increment instead, and ``substeps`` says how far the iteration got.
    """

    n: int
    x: object
    step: object
    residual: object
    f_evals_cum: int
    dfdx_evals_cum: int
    substeps: int = 0
    partial: bool = False


@dataclass(frozen=True)
class SolveResult:
    status: Status
    root: object
    trace: tuple[IterationRecord, ...]
    total_f_evals: int
    total_dfdx_evals: int
    m: int
    message: str = ""
    config: SolverConfig | None = field(default=None, compare=False)

    @property
    def converged(self):
        return self.status is Status.CONVERGED

    @property
    def iterations(self) -> int:
        """Completed outer iterations (an interrupted final one is not counted)."""
        return sum(1 for r in self.trace[1:] if not r.partial)

    @property
    def iterates(self) -> list:
        """Iterates produced by full method steps, starting with x0."""
        return [r.x for r in self.trace if r.n == 0 or r.substeps == self.m]


class CountingFunction:
    """Evaluate an expression at a fixed precision and count the calls."""

    def __init__(self, expr: Expr, ctx: PrecisionContext):
        self.expr = expr
        self.ctx = ctx
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return evaluate(self.expr, x, self.ctx)


def _finite(value):
    if not value.context.isfinite(value):
        raise NonFinite(f"non-finite value {value}")
    return value


def _derivative(df, x, threshold):
    d = df(x)
    if abs(d) < threshold:
        raise DerivativeBreakdown(f"|f'(x)| = {abs(d)} below breakdown threshold")
    return d


def _settled(fy, d, x, y):
    """True when ``y`` is a root to working precision.

    That is, a Newton correction from ``y`` would be no larger than the
    rounding already incurred in stepping from ``x`` to ``y``.
    """
    if not fy:
        return True
    scale = max(abs(x), abs(y), 1)
    return abs(fy) <= abs(d) * scale * 16 * y.context.eps


def newton_update(f, df, x, *, threshold=0):
    """Classical Newton step ``x - f(x)/f'(x)``."""
    d = _derivative(df, x, threshold)
    return _finite(x - f(x) / d)


def multistep_update(f, df, x, m, *, threshold=0):
    """One iteration of the order-2m scheme from ``x``.

    Returns ``(y_m, [y_1, ..., y_m])``.  Exactly m evaluations of ``f``
    (at x, y_1, ..., y_(m-1)) and one of ``f'`` are made.  If ``f(x)`` is
    exactly zero, ``x`` is already a root and is returned unchanged.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    fx = f(x)
    d = _derivative(df, x, threshold)
    y = _finite(x - fx / d)
    substeps = [y]
    if m == 1:
        return y, substeps
    if not fx:
        return x, [x] * m
    fy = f(y)
    weight = 1 + 2 * fy / fx
    for k in range(2, m + 1):
        y = _finite(y - fy / d * weight)
        substeps.append(y)
        if k < m:
            fy = f(y)
    return y, substeps


def solve(problem: Problem, config: SolverConfig) -> SolveResult:
    """Iterate the order-2m scheme from ``problem.x0`` until converged.

    Convergence requires both the step and the residual below ``tol``.
    ``f`` at each new iterate is computed once and reused as ``f(x_n)`` of
    the following iteration, so every full iteration costs m fresh
    ``f`` calls and one ``f'`` call, plus one initial call at ``x0``.
    A run also stops when an iterate is a root to working precision (its
    Newton correction is at rounding level), so an affine ``f`` takes exactly
    one iteration whether or not its root is representable.
    Errors are reported through ``status``; nothing is raised.
    """
    ctx = config.context()
    f = CountingFunction(problem.f, ctx)
    df = CountingFunction(problem.fprime, ctx)
    tol = ctx.real(Fraction(str(config.tol)))
    threshold = ctx.breakdown_threshold
    m = config.m
    listing = config.stopping is Stopping.LISTING

    trace = []

    def record(x, step, fx, substeps, partial=False):
        trace.append(
            IterationRecord(
                n=len(trace),
                x=x,
                step=step,
                residual=abs(fx),
                f_evals_cum=f.calls,
                dfdx_evals_cum=df.calls,
                substeps=substeps,
                partial=partial,
            )
        )

    def result(status, message=""):
        return SolveResult(
            status=status,
            root=trace[-1].x if trace else ctx.real(problem.x0),
            trace=tuple(trace),
            total_f_evals=f.calls,
            total_dfdx_evals=df.calls,
            m=m,
            message=message,
            config=config,
        )

    try:
        x = ctx.real(problem.x0)
        fx = f(x)
        _finite(fx)
        record(x, None, fx, 0)
        if not fx:
            return result(Status.CONVERGED, "f(x0) is exactly zero")

        for _ in range(config.max_iter):
            d = _derivative(df, x, threshold)
            y = _finite(x - fx / d)
            fy = _finite(f(y))
            # Under listing stopping a root at y1 would otherwise leave the
            # iteration uncounted; the remaining substeps are identities.
            if m > 1 and not (listing and _settled(fy, d, x, y)):
                weight = 1 + 2 * fy / fx
                for k in range(2, m + 1):
                    previous = y
                    y = _finite(y - fy / d * weight)
                    fy = _finite(f(y))
                    if listing:
                        inc = abs(y - previous)
                        if inc < tol and abs(fy) < tol:
                            record(y, inc, fy, k, partial=True)
                            return result(Status.CONVERGED)
            step = abs(y - x)
            record(y, step, fy, m)
            settled = _settled(fy, d, x, y)
            x, fx = y, fy
            if settled or (step < tol and abs(fx) < tol):
                return result(Status.CONVERGED)
        return result(Status.MAX_ITER, f"no convergence in {config.max_iter} iterations")
    except DerivativeBreakdown as exc:
        return result(Status.DERIVATIVE_BREAKDOWN, str(exc))
    except DomainError as exc:
        return result(Status.DOMAIN_ERROR, str(exc))
    except (NonFinite, ZeroDivisionError) as exc:
        return result(Status.NON_FINITE, str(exc))


def reported_evaluations(result: SolveResult, m: int | None = None) -> tuple[int, int]:
    """Evaluation counts in the benchmark-table convention.

    Returns ``(m * iterations, (m + 1) * iterations)``: m function values
    and one derivative per completed iteration.  The raw call counts,
    including the initial ``f(x0)``, stay on ``result`` for auditing.
    """
    if m is None:
        m = result.m
    it = result.iterations
    return m * it, (m + 1) * it
