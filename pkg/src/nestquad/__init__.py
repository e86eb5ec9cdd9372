"""Nested quadrature rules for distributions given by their moments."""

from .estimator import NestedQuadrature
from .extension import (
    ExtensionOutcome,
    ExtensionSchedule,
    FailureReason,
    InsufficientMomentsError,
    auto_extend,
    extend,
    generate_chain,
    modified_moments,
)
from .moments import DistributionSpec, MomentSequence, load_moments, moment
from .numerics import (
    NestedRule,
    QuadratureFormula,
    build_formula,
    build_nested_rule,
    degree_of_exactness,
    real_roots,
    solve_weights,
)
from .ratpoly import Interval, Polynomial, count_real_roots, discriminant, gcd, resultant

__version__ = "0.1.0"

__all__ = [
    "DistributionSpec",
    "ExtensionOutcome",
    "ExtensionSchedule",
    "FailureReason",
    "InsufficientMomentsError",
    "Interval",
    "MomentSequence",
    "NestedQuadrature",
    "NestedRule",
    "Polynomial",
    "QuadratureFormula",
    "auto_extend",
    "build_formula",
    "build_nested_rule",
    "count_real_roots",
    "degree_of_exactness",
    "discriminant",
    "extend",
    "gcd",
    "generate_chain",
    "load_moments",
    "modified_moments",
    "moment",
    "real_roots",
    "resultant",
    "solve_weights",
]
