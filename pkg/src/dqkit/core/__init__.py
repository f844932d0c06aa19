"""
Core substrate for dqkit.

This module contains:
- poly: exact sparse polynomials over ℚ
- series: truncated ℏ-series
- config: INI run defaults
- log: rich logging setup
- errors: exception types
"""

from dqkit.core.config import RunDefaults, WeightSettings, load_defaults
from dqkit.core.errors import (
    AdmissibilityError,
    CacheError,
    DegreeError,
    DimensionError,
    EnumerationGuardError,
    MissingWeightsError,
    SamplingError,
    SizeGuardError,
    TruncationError,
)
from dqkit.core.poly import MultiIndex, Poly, format_rational, monomials_up_to, parse_rational
from dqkit.core.series import DEFAULT_ORDER, HSeries

__all__ = [
    "AdmissibilityError",
    "CacheError",
    "DEFAULT_ORDER",
    "DegreeError",
    "DimensionError",
    "EnumerationGuardError",
    "HSeries",
    "MissingWeightsError",
    "MultiIndex",
    "Poly",
    "RunDefaults",
    "SamplingError",
    "SizeGuardError",
    "TruncationError",
    "WeightSettings",
    "format_rational",
    "load_defaults",
    "monomials_up_to",
    "parse_rational",
]
