"""Exact tropical geometry of a two-parameter Edwards family over Puiseux series."""

from .errors import (
    DegenerateParams,
    DisagreementBug,
    ExceptionalParameter,
    InsufficientPrecision,
    NotASquare,
    NotSmooth,
    ParseError,
    PrecisionError,
    RefusedInput,
    TropEdwardsError,
    UndefinedDelta,
)
from .series import BivariateSeries, PuiseuxSeries, Valuation, epsilon_bar, euler_epsilon, theta_bar
from .expr import parse_series
from .edwards import FamilyParams, family_coefficients, trop_valuations
from .tropcurve import classify
from .thetaparam import CycleParam, cycle_point, delta_shape

__all__ = [
    "BivariateSeries",
    "CycleParam",
    "DegenerateParams",
    "DisagreementBug",
    "ExceptionalParameter",
    "FamilyParams",
    "InsufficientPrecision",
    "NotASquare",
    "NotSmooth",
    "ParseError",
    "PrecisionError",
    "PuiseuxSeries",
    "RefusedInput",
    "TropEdwardsError",
    "UndefinedDelta",
    "Valuation",
    "classify",
    "cycle_point",
    "delta_shape",
    "epsilon_bar",
    "euler_epsilon",
    "family_coefficients",
    "parse_series",
    "theta_bar",
    "trop_valuations",
]
