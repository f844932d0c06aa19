"""
Maurer–Cartan calculus in T_poly and D_poly.

Both DGLAs are handled through a small Dgla object that knows the bracket
and the differential:

    T_poly: [, ] = Schouten–Nijenhuis, d = 0
    D_poly: [, ] = Gerstenhaber,       d = [−, μ]

MC elements are ℏ-series of degree-1 elements (bivectors / bidifferential
operators) with zero ℏ^0 term; gauge elements are ℏ-series of degree-0
elements (vector fields / 1-ary operators) with zero ℏ^0 term.

The gauge action is the truncated series

    α·l = Σ_{k≥0} ad_α^k(l)/k! + Σ_{k≥1} ad_α^{k−1}(dα)/k!

which is exp(ad_α)(θ + l) − θ with d = [−, θ] (θ = μ in D_poly, 0 in T_poly).
Every sum is finite because α starts at ℏ^1.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from fractions import Fraction
from typing import Generic, TypeVar, Union

from dqkit.algebra.dpoly import (
    PolyDiffOp,
    circle_i,
    compose,
    gerstenhaber,
    hochschild_delta,
)
from dqkit.algebra.tpoly import PolyVector, sn_bracket
from dqkit.core.errors import DegreeError, TruncationError
from dqkit.core.poly import Poly
from dqkit.core.series import HSeries

logger = logging.getLogger(__name__)

T = TypeVar("T", PolyVector, PolyDiffOp)

MAX_BCH_ORDER = 4


@dataclass(frozen=True)
class Dgla(Generic[T]):
    """Bracket, differential and zero elements of one DGLA."""

    name: str
    dim: int
    bracket: Callable[[T, T], T]
    differential: Callable[[T], T]
    zero: Callable[[int], T]

    def ad(self, a: HSeries[T], x: HSeries[T]) -> HSeries[T]:
        return a.mul(x, self.bracket)


def tpoly_dgla(dim: int) -> Dgla[PolyVector]:
    return Dgla(
        name="T_poly",
        dim=dim,
        bracket=sn_bracket,
        differential=lambda a: PolyVector.zero(dim, a.degree + 1),
        zero=lambda shifted: PolyVector.zero(dim, shifted + 1),
    )


def dpoly_dgla(dim: int) -> Dgla[PolyDiffOp]:
    return Dgla(
        name="D_poly",
        dim=dim,
        bracket=gerstenhaber,
        differential=hochschild_delta,
        zero=lambda shifted: PolyDiffOp.zero(dim, shifted + 1),
    )


# ========== element types ==========


@dataclass(frozen=True)
class _FormalElement(Generic[T]):
    series: HSeries[T]

    def __post_init__(self) -> None:
        if not self.series[0].is_zero():
            raise ValueError(f"{type(self).__name__} must have zero ℏ^0 coefficient")

    @property
    def order(self) -> int:
        return self.series.order

    @property
    def dim(self) -> int:
        return self.series[0].dim


class McElementT(_FormalElement[PolyVector]):
    """ℏΠ1 + ℏ²Π2 + ... with bivector coefficients."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for k, c in enumerate(self.series):
            if not c.is_zero() and c.degree != 2:
                raise DegreeError(f"ℏ^{k} coefficient has degree {c.degree}, expected 2")

    @property
    def dgla(self) -> Dgla[PolyVector]:
        return tpoly_dgla(self.dim)


class McElementD(_FormalElement[PolyDiffOp]):
    """ℏμ1 + ℏ²μ2 + ... with bidifferential coefficients."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for k, c in enumerate(self.series):
            if not c.is_zero() and c.arity != 2:
                raise DegreeError(f"ℏ^{k} coefficient has arity {c.arity}, expected 2")

    @property
    def dgla(self) -> Dgla[PolyDiffOp]:
        return dpoly_dgla(self.dim)


class GaugeElementT(_FormalElement[PolyVector]):
    """Generator of a formal diffeomorphism: ℏX1 + ℏ²X2 + ..., X_k vector fields."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for k, c in enumerate(self.series):
            if not c.is_zero() and c.degree != 1:
                raise DegreeError(f"ℏ^{k} coefficient has degree {c.degree}, expected 1")

    @property
    def dgla(self) -> Dgla[PolyVector]:
        return tpoly_dgla(self.dim)


class GaugeElementD(_FormalElement[PolyDiffOp]):
    """ℏD1 + ℏ²D2 + ..., D_k 1-ary differential operators."""

    def __post_init__(self) -> None:
        super().__post_init__()
        for k, c in enumerate(self.series):
            if not c.is_zero() and c.arity != 1:
                raise DegreeError(f"ℏ^{k} coefficient has arity {c.arity}, expected 1")

    @property
    def dgla(self) -> Dgla[PolyDiffOp]:
        return dpoly_dgla(self.dim)


McElement = Union[McElementT, McElementD]
GaugeElement = Union[GaugeElementT, GaugeElementD]


def mc_series(coefficients: Iterable[T], order: int) -> HSeries[T]:
    """ℏ·c1 + ℏ²·c2 + ... padded to ``order`` with zeros matching c1."""
    coeffs = list(coefficients)
    if not coeffs:
        raise ValueError("need at least one coefficient")
    first = coeffs[0]
    zero = first.scale(0)
    return HSeries.padded([zero, *coeffs], order, zero)


# ========== MC residual ==========


def mc_residual(s: McElement, order: int | None = None) -> dict[int, PolyVector | PolyDiffOp]:
    """
    Per-order Maurer–Cartan residuals.

    Args:
        s: MC element candidate (zero ℏ^0 term)
        order: Truncation N (defaults to the element's order)

    Returns:
        {k: d f_k + ½ Σ_{i+j=k} [f_i, f_j]} for 1 <= k <= N
    """
    series = s.series if order is None else s.series.truncate(order)
    dgla = s.dgla
    brackets = series.mul(series, dgla.bracket)  # type: ignore[arg-type]
    residuals: dict[int, PolyVector | PolyDiffOp] = {}
    for k in range(1, series.order + 1):
        residuals[k] = dgla.differential(series[k]) + brackets[k].scale(Fraction(1, 2))  # type: ignore[arg-type, operator]
    return residuals


def is_mc(s: McElement, order: int | None = None) -> bool:
    return all(r.is_zero() for r in mc_residual(s, order).values())


# ========== gauge action ==========


def _check_orders(a: _FormalElement[T], b: _FormalElement[T]) -> None:
    if a.order != b.order:
        raise TruncationError(f"truncation mismatch: {a.order} vs {b.order}")


def _act_series(dgla: Dgla[T], alpha: HSeries[T], l: HSeries[T]) -> HSeries[T]:
    d_alpha = alpha.map(dgla.differential)
    total = l
    term_l = l
    term_d = d_alpha
    total = total + term_d
    for k in range(1, alpha.order + 1):
        term_l = dgla.ad(alpha, term_l)
        term_d = dgla.ad(alpha, term_d)
        total = (
            total
            + term_l.scale(Fraction(1, math.factorial(k)))
            + term_d.scale(Fraction(1, math.factorial(k + 1)))
        )
    return total


def gauge_act(alpha: GaugeElement, l: McElement) -> McElement:
    """
    Act on an MC element by the gauge element exp(α).

    Raises:
        TruncationError: If α and l have different truncation orders
        TypeError: If α and l belong to different DGLAs
    """
    _check_orders(alpha, l)  # type: ignore[arg-type]
    if isinstance(alpha, GaugeElementT) and isinstance(l, McElementT):
        return McElementT(_act_series(l.dgla, alpha.series, l.series))
    if isinstance(alpha, GaugeElementD) and isinstance(l, McElementD):
        return McElementD(_act_series(l.dgla, alpha.series, l.series))
    raise TypeError(f"cannot act with {type(alpha).__name__} on {type(l).__name__}")


def bch_compose(x: GaugeElement, y: GaugeElement) -> GaugeElement:
    """
    BCH generator Z with exp(Z) = exp(X)·exp(Y), truncated at the shared order.

    Raises:
        TruncationError: On order mismatch
        ValueError: If the order exceeds the supported BCH depth (4)
    """
    _check_orders(x, y)  # type: ignore[arg-type]
    if x.order > MAX_BCH_ORDER:
        raise ValueError(
            f"BCH composition is implemented through ℏ^{MAX_BCH_ORDER}, got order {x.order}"
        )
    if type(x) is not type(y):
        raise TypeError(f"cannot compose {type(x).__name__} with {type(y).__name__}")
    dgla = x.dgla
    X, Y = x.series, y.series

    def br(a: HSeries[T], b: HSeries[T]) -> HSeries[T]:
        return dgla.ad(a, b)  # type: ignore[arg-type]

    xy = br(X, Y)
    z = (
        X
        + Y
        + xy.scale(Fraction(1, 2))
        + br(X, xy).scale(Fraction(1, 12))
        - br(Y, xy).scale(Fraction(1, 12))
        - br(Y, br(X, xy)).scale(Fraction(1, 24))
    )
    return type(x)(z)  # type: ignore[arg-type]


# ========== star products ↔ MC elements ==========


def star_to_mc(star: HSeries[PolyDiffOp]) -> McElementD:
    """Strip μ from a star-product series."""
    mu = PolyDiffOp.multiplication(star[0].dim)
    if star[0] != mu:
        raise ValueError("star product must have μ as its ℏ^0 coefficient")
    zero = PolyDiffOp.zero(mu.dim, 2)
    return McElementD(HSeries((zero, *star.coefficients[1:])))


def mc_to_star(m: McElementD) -> HSeries[PolyDiffOp]:
    """Attach μ to an MC element of D_poly."""
    return HSeries((PolyDiffOp.multiplication(m.dim), *m.series.coefficients[1:]))


def exp_unary(alpha: HSeries[PolyDiffOp]) -> HSeries[PolyDiffOp]:
    """exp(α) = Σ α^{∘k}/k! as a series of 1-ary operators."""
    dim = alpha[0].dim
    ident = HSeries.monomial(PolyDiffOp.identity(dim), 0, alpha.order, PolyDiffOp.zero(dim, 1))
    total = ident
    power = ident
    for k in range(1, alpha.order + 1):
        power = alpha.mul(power, compose)
        total = total + power.scale(Fraction(1, math.factorial(k)))
    return total


def _precompose_pair(star: HSeries[PolyDiffOp], e: HSeries[PolyDiffOp]) -> HSeries[PolyDiffOp]:
    """star∘(e⊗e) as a series of bidifferential operators."""
    first = star.mul(e, lambda b, a: circle_i(b, a, 1))
    return first.mul(e, lambda b, a: circle_i(b, a, 2))


def _postcompose(e: HSeries[PolyDiffOp], star: HSeries[PolyDiffOp]) -> HSeries[PolyDiffOp]:
    return e.mul(star, lambda a, b: circle_i(a, b, 1))


def conjugate_star(star: HSeries[PolyDiffOp], alpha: GaugeElementD) -> HSeries[PolyDiffOp]:
    """exp(α)∘star∘(exp(−α)⊗exp(−α)) by direct composition."""
    if star.order != alpha.order:
        raise TruncationError(f"truncation mismatch: {star.order} vs {alpha.order}")
    e_plus = exp_unary(alpha.series)
    e_minus = exp_unary(-alpha.series)
    return _postcompose(e_plus, _precompose_pair(star, e_minus))


def star_gauge_equivalent(
    star1: HSeries[PolyDiffOp],
    star2: HSeries[PolyDiffOp],
    alpha: GaugeElementD,
) -> bool:
    """
    Check star2∘(exp(α)⊗exp(α)) = exp(α)∘star1 through the shared order.

    Raises:
        TruncationError: On order mismatch
        ValueError: If the stars differ at ℏ^0
    """
    if not star1.order == star2.order == alpha.order:
        raise TruncationError(
            f"truncation mismatch: {star1.order}, {star2.order}, {alpha.order}"
        )
    if star1[0] != star2[0]:
        raise ValueError("star products must share the ℏ^0 coefficient")
    e = exp_unary(alpha.series)
    lhs = _precompose_pair(star2, e)
    rhs = _postcompose(e, star1)
    equivalent = (lhs - rhs).is_zero()
    logger.debug("gauge equivalence through ℏ^%d: %s", star1.order, equivalent)
    return equivalent


def first_order_class(c: PolyDiffOp) -> PolyVector:
    """
    Bivector part of a bidifferential 2-cocycle: ξ^{ij} = ½(c(x_i, x_j) − c(x_j, x_i)).

    A cocycle is the Hochschild coboundary of a 1-ary operator iff this is zero.
    """
    if c.arity != 2:
        raise DegreeError(f"expected a 2-cochain, got arity {c.arity}")
    d = c.dim
    comps: dict[tuple[int, ...], Poly] = {}
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            xi, xj = Poly.variable(d, i), Poly.variable(d, j)
            comps[(i, j)] = (c.apply(xi, xj) - c.apply(xj, xi)).scale(Fraction(1, 2))
    return PolyVector(d, 2, comps)
