"""
Kontsevich weights.

This module contains:
- angle: the hyperbolic angle map and its gradient
- sampler: gauge-fixed proposal distribution
- integrate: Monte-Carlo weights, closed forms, the three-point vanishing check
- cache: JSON weight cache
"""

from dqkit.weights.angle import angle, angle_gradient
from dqkit.weights.cache import WeightCache
from dqkit.weights.integrate import (
    WeightEstimate,
    form_density,
    integrate_weight,
    vanishing_check,
    wedge_weight_closed_form,
    weight_batch,
)
from dqkit.weights.sampler import ConfigBatch, gauge_fix_sample, sampler_density

__all__ = [
    "ConfigBatch",
    "WeightCache",
    "WeightEstimate",
    "angle",
    "angle_gradient",
    "form_density",
    "gauge_fix_sample",
    "integrate_weight",
    "sampler_density",
    "vanishing_check",
    "wedge_weight_closed_form",
    "weight_batch",
]
