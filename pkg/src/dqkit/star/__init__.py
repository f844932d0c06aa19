"""
Star-product assembly from graphs and weights.

This module contains:
- weighted: exact-plus-sampled operators with linear error propagation
- sources: closed-form, cached and chained weight sources
- assemble: U_n tables, P(Π), associativity and formality residuals
"""

from dqkit.star.assemble import (
    StarProduct,
    UnComponent,
    associativity_residual,
    build_star,
    build_un,
    compare_star,
    formality_residual,
    probe_tuples,
    u1,
)
from dqkit.star.sources import (
    CachedWeights,
    ChainedWeights,
    ClosedFormWeights,
    EmptyWeights,
    WeightSource,
)
from dqkit.star.weighted import ResidualReport, WeightedOperator, WeightedPoly

__all__ = [
    "CachedWeights",
    "ChainedWeights",
    "ClosedFormWeights",
    "EmptyWeights",
    "ResidualReport",
    "StarProduct",
    "UnComponent",
    "WeightSource",
    "WeightedOperator",
    "WeightedPoly",
    "associativity_residual",
    "build_star",
    "build_un",
    "compare_star",
    "formality_residual",
    "probe_tuples",
    "u1",
]
