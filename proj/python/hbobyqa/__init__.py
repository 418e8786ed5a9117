"""Trust-region optimization for bound-constrained problems with partially
known derivatives."""

from ._hbobyqa import (
    HbobyqaError,
    exact_yield,
    minimize,
    problem_gradient,
    problem_info,
    problem_names,
    problem_value,
    run_plan,
    solver_kinds,
    summarize,
    yield_estimate,
)

__all__ = [
    "HbobyqaError",
    "exact_yield",
    "minimize",
    "problem_gradient",
    "problem_info",
    "problem_names",
    "problem_value",
    "run_plan",
    "solver_kinds",
    "summarize",
    "yield_estimate",
]
