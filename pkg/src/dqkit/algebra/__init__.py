"""
Algebraic layer of dqkit.

This module contains:
- tpoly: polyvector fields and the Schouten–Nijenhuis bracket
- dpoly: polydifferential operators, Gerstenhaber bracket, HKR, Moyal
- maurer_cartan: MC elements, gauge action, star-product equivalence
- hochschild: Hochschild cohomology of finite-dimensional algebras
"""

from dqkit.algebra.dpoly import (
    DPolyElement,
    PolyDiffOp,
    assoc_defect,
    associator,
    circle,
    circle_i,
    commutator_order1,
    gerstenhaber,
    hkr,
    hochschild_delta,
    moyal,
    moyal_star,
    poisson_operator,
    star_apply,
)
from dqkit.algebra.hochschild import (
    FinDimAlgebra,
    bar_differential,
    center_dim,
    deformation_obstruction,
    derivation_dims,
    hh_dim,
    homotopy_check,
    solve_next_order,
)
from dqkit.algebra.maurer_cartan import (
    GaugeElementD,
    GaugeElementT,
    McElementD,
    McElementT,
    bch_compose,
    conjugate_star,
    first_order_class,
    gauge_act,
    is_mc,
    mc_residual,
    star_gauge_equivalent,
)
from dqkit.algebra.tpoly import (
    PolyVector,
    TPolyElement,
    apply_bivector,
    is_poisson,
    jacobiator,
    lie_derivative,
    lie_poisson,
    sn_bracket,
    wedge,
)

__all__ = [
    "DPolyElement",
    "FinDimAlgebra",
    "GaugeElementD",
    "GaugeElementT",
    "McElementD",
    "McElementT",
    "PolyDiffOp",
    "PolyVector",
    "TPolyElement",
    "apply_bivector",
    "assoc_defect",
    "associator",
    "bar_differential",
    "bch_compose",
    "center_dim",
    "circle",
    "circle_i",
    "commutator_order1",
    "conjugate_star",
    "deformation_obstruction",
    "derivation_dims",
    "first_order_class",
    "gauge_act",
    "gerstenhaber",
    "hh_dim",
    "hkr",
    "hochschild_delta",
    "homotopy_check",
    "is_mc",
    "is_poisson",
    "jacobiator",
    "lie_derivative",
    "lie_poisson",
    "mc_residual",
    "moyal",
    "moyal_star",
    "poisson_operator",
    "sn_bracket",
    "solve_next_order",
    "star_apply",
    "star_gauge_equivalent",
    "wedge",
]
