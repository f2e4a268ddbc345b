"""Unlabelled subcritical graph classes: series, constants, samplers and experiments."""

from .errors import (
    BudgetExhausted,
    ConsistencyError,
    DomainError,
    NumericError,
    SubcritError,
    UnsupportedFeature,
    UsageError,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExhausted",
    "ConsistencyError",
    "DomainError",
    "NumericError",
    "SubcritError",
    "UnsupportedFeature",
    "UsageError",
    "__version__",
]
