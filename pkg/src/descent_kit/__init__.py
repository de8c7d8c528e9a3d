"""Exact 2- and 3-descent for the elliptic curves attached to perfect cuboids."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CurveMismatch,
    DegenerateParameters,
    DescentError,
    DomainError,
    FactorizationIncomplete,
    SingularCurveError,
)

__all__ = [
    "CurveMismatch",
    "DegenerateParameters",
    "DescentError",
    "DomainError",
    "FactorizationIncomplete",
    "SingularCurveError",
    "__version__",
]
