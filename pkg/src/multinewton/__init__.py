"""Arbitrary-precision multistep Newton solvers of order 2m."""

from .analysis import (
    ConvergenceReport,
    analyze,
    coc_sequence,
    observed_order_and_constant,
    predicted_error_constant,
    refine_root,
    taylor_coefficients,
)
from .corpus import builtin_problems
from .expr import differentiate, evaluate, parse
from .precision import PrecisionContext
from .solver import (
    Problem,
    SolveResult,
    SolverConfig,
    Status,
    Stopping,
    multistep_update,
    newton_update,
    reported_evaluations,
    solve,
)

__version__ = "0.1.0"
