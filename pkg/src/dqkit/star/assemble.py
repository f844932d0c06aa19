"""
Assembly of U_n components and the star product P(Π).

U_n(ξ1, ..., ξn) = Σ_Γ W_Γ U_Γ(ξ1, ..., ξn) over graphs with n first-type
vertices and 2n + nbar − 2 edges. Reordering a star multiplies both the
weight and the compiled operator by the same sign, and each weight carries
1/Π_j #star_j!, so the sum over all graphs equals the sum over star-sorted
representatives with their plain weights.

The star product is normalized so that its ℏ¹ term is the Poisson bracket:

    P(Π) = μ + ℏ U_1(2Π) + (ℏ²/2) U_2(2Π, 2Π) + ...
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

from dqkit.algebra.dpoly import PolyDiffOp, circle_i, gerstenhaber, hochschild_delta
from dqkit.algebra.tpoly import PolyVector, is_poisson, sn_bracket
from dqkit.core.errors import DegreeError, MissingWeightsError
from dqkit.core.poly import Poly, monomials_up_to
from dqkit.core.series import HSeries
from dqkit.graphs.graph import (
    DEFAULT_ENUMERATION_GUARD,
    AdmissibleGraph,
    canonical_star_order,
    compile_graph,
    degree_identity,
    enumerate_graphs,
)
from dqkit.star.sources import ChainedWeights, ClosedFormWeights, Weight, WeightSource
from dqkit.star.weighted import ResidualReport, WeightedOperator
from dqkit.weights.integrate import WeightEstimate

logger = logging.getLogger(__name__)

MAX_STAR_ORDER = 2


@dataclass(frozen=True)
class UnComponent:
    """Weighted graph table of U_n."""

    n: int
    table: tuple[tuple[AdmissibleGraph, Weight], ...]

    def provenance(self) -> str:
        if not self.table:
            return "exact"
        if all(isinstance(w, Fraction) for _, w in self.table):
            return "closed-form"
        return "monte-carlo"

    def apply(self, xis: Sequence[PolyVector]) -> WeightedOperator:
        """Σ W_Γ U_Γ(ξ) as an exact-plus-sampled operator."""
        if len(xis) != self.n:
            raise ValueError(f"U_{self.n} takes {self.n} polyvectors, got {len(xis)}")
        dim = xis[0].dim
        arity = sum(x.degree for x in xis) - 2 * self.n + 2
        exact = PolyDiffOp.zero(dim, max(arity, 0))
        sampled: dict[str, PolyDiffOp] = {}
        weights: dict[str, WeightEstimate] = {}
        for g, w in self.table:
            op = compile_graph(g, xis)
            if op.is_zero():
                continue
            if isinstance(w, Fraction):
                exact = exact + op.scale(w)
            else:
                key = g.key()
                sampled[key] = sampled[key] + op if key in sampled else op
                weights[key] = w
        return WeightedOperator(exact, sampled, weights)


def _representatives(
    n: int, nbar: int, degrees: Sequence[int] | None, guard: int
) -> list[AdmissibleGraph]:
    reps = []
    for g in enumerate_graphs(n, nbar, 2 * n + nbar - 2, guard):
        if degrees is not None and g.star_sizes != tuple(degrees):
            continue
        if canonical_star_order(g)[0] != g:
            continue
        if not degree_identity(g):
            raise AssertionError(f"degree bookkeeping fails for {g.key()}")
        reps.append(g)
    return reps


def build_un(
    n: int,
    nbar_range: Iterable[int],
    weight_source: WeightSource,
    xis: Sequence[PolyVector] | None = None,
    degrees: Sequence[int] | None = None,
    guard: int = DEFAULT_ENUMERATION_GUARD,
) -> UnComponent:
    """
    Collect star-sorted graphs and their weights.

    Args:
        n: Number of polyvector inputs
        nbar_range: Arities to include
        weight_source: Weight provider
        xis: Inputs; graphs compiling to zero on them are dropped before weights are requested
        degrees: Required star sizes (taken from ``xis`` when omitted)
        guard: Enumeration guard

    Raises:
        MissingWeightsError: If the source has no weight for some kept graph
        EnumerationGuardError: If enumeration is too large
    """
    if xis is not None and degrees is None:
        degrees = [x.degree for x in xis]
    graphs: list[AdmissibleGraph] = []
    for nbar in nbar_range:
        for g in _representatives(n, nbar, degrees, guard):
            if xis is not None and compile_graph(g, xis).is_zero():
                continue
            graphs.append(g)
    logger.debug("U_%d: %d representative graph(s) need weights", n, len(graphs))
    weight_source.prefetch(graphs)
    table = []
    missing = []
    for g in graphs:
        w = weight_source.weight(g)
        if w is None:
            missing.append(g.key())
        else:
            table.append((g, w))
    if missing:
        raise MissingWeightsError(missing)
    return UnComponent(n, tuple(table))


def u1(xi: PolyVector) -> WeightedOperator:
    """U_1(ξ) from the closed-form single-vertex weights (equals the HKR map)."""
    return build_un(1, [xi.degree], ClosedFormWeights(), xis=[xi]).apply([xi])


# ========== star products ==========


@dataclass(frozen=True)
class StarProduct:
    """μ + ℏB1 + ℏ²B2 + ... with per-order provenance."""

    terms: tuple[WeightedOperator, ...]
    provenance: dict[int, str] = field(default_factory=dict)

    @classmethod
    def from_series(cls, series: HSeries[PolyDiffOp]) -> StarProduct:
        return cls(
            tuple(WeightedOperator.of(b) for b in series),
            {k: "exact" for k in range(series.order + 1)},
        )

    @property
    def order(self) -> int:
        return len(self.terms) - 1

    def __getitem__(self, k: int) -> WeightedOperator:
        return self.terms[k]

    def is_exact(self) -> bool:
        return all(t.is_exact() for t in self.terms)

    def series(self) -> HSeries[PolyDiffOp]:
        """Exact operator series; raises if some order carries sampled weights."""
        return HSeries(tuple(t.to_exact() for t in self.terms))


def build_star(
    pi: PolyVector,
    order: int,
    weight_source: WeightSource,
    guard: int = DEFAULT_ENUMERATION_GUARD,
) -> StarProduct:
    """
    The graph star product through ℏ^order (order <= 2).

    Raises:
        ValueError: If order is outside 0..2
        DegreeError: If Π is not a bivector
        MissingWeightsError: If the source lacks an order-2 weight
    """
    if not 0 <= order <= MAX_STAR_ORDER:
        raise ValueError(f"assembled star products go up to ℏ^{MAX_STAR_ORDER}, got {order}")
    if pi.degree != 2:
        raise DegreeError(f"expected a bivector, got degree {pi.degree}")
    if not is_poisson(pi):
        logger.warning("Π is not Poisson; the assembled product will not be associative")
    dim = pi.dim
    terms = [WeightedOperator.of(PolyDiffOp.multiplication(dim))]
    provenance = {0: "exact"}
    two_pi = pi.scale(2)
    if order >= 1:
        component = build_un(1, [2], ClosedFormWeights(), xis=[two_pi], guard=guard)
        terms.append(component.apply([two_pi]))
        provenance[1] = component.provenance()
    if order >= 2:
        source = ChainedWeights(ClosedFormWeights(), weight_source)
        component = build_un(2, [2], source, xis=[pi, pi], guard=guard)
        terms.append(component.apply([pi, pi]).scale(2))
        provenance[2] = component.provenance()
    return StarProduct(tuple(terms), provenance)


# ========== residuals ==========


def probe_tuples(dim: int, degree: int, arity: int) -> list[tuple[Poly, ...]]:
    """All arity-tuples of non-constant monomials of degree <= ``degree``."""
    monos = monomials_up_to(dim, degree, include_constant=False)
    return list(itertools.product(monos, repeat=arity))


def associator_terms(star: StarProduct) -> list[WeightedOperator]:
    """Σ_{i+j=k} B_i(B_j(f, g), h) − B_i(f, B_j(g, h)) for k = 0..order."""
    out = []
    for k in range(star.order + 1):
        total = WeightedOperator.of(PolyDiffOp.zero(star[0].dim, 3))
        for i in range(k + 1):
            bi, bj = star[i], star[k - i]
            total = total + bi.combine(bj, lambda a, b: circle_i(a, b, 1) - circle_i(a, b, 2))
        out.append(total)
    return out


def associativity_residual(
    star: StarProduct | HSeries[PolyDiffOp],
    probes: Sequence[tuple[Poly, ...]],
    tolerance: float = 3.0,
) -> dict[int, ResidualReport]:
    """
    Per-order residual of f*(g*h) − (f*g)*h on probe triples.

    Exact orders must vanish exactly; sampled orders must stay within
    ``tolerance`` times the propagated weight error.
    """
    if isinstance(star, HSeries):
        star = StarProduct.from_series(star)
    probes = list(probes)
    reports = {}
    for k, op in enumerate(associator_terms(star)):
        reports[k] = op.report(probes, tolerance)
        logger.debug("associativity ℏ^%d: %s", k, reports[k])
    return reports


def formality_residual(
    n: int,
    xis: Sequence[PolyVector],
    probes: Sequence[tuple[Poly, ...]],
    weight_source: WeightSource,
    tolerance: float = 3.0,
    guard: int = DEFAULT_ENUMERATION_GUARD,
) -> ResidualReport:
    """
    Evaluate the formality equation on probe tuples.

    n = 1: δU_1(ξ).
    n = 2 (bivectors): δU_2(ξ1, ξ2) + [U_1ξ1, U_1ξ2] − U_1([ξ1, ξ2]).

    Raises:
        ValueError: For n outside {1, 2} or non-bivector inputs at n = 2
    """
    if len(xis) != n:
        raise ValueError(f"expected {n} polyvectors, got {len(xis)}")
    if n == 1:
        residual = u1(xis[0]).map(hochschild_delta)
    elif n == 2:
        if any(x.degree != 2 for x in xis):
            raise ValueError("the n = 2 formality residual is implemented for bivectors")
        xi1, xi2 = xis
        source = ChainedWeights(ClosedFormWeights(), weight_source)
        u2 = build_un(2, [2], source, xis=[xi1, xi2], guard=guard).apply([xi1, xi2])
        residual = (
            u2.map(hochschild_delta)
            + u1(xi1).combine(u1(xi2), gerstenhaber)
            - u1(sn_bracket(xi1, xi2))
        )
    else:
        raise ValueError(f"formality residual is implemented for n <= 2, got {n}")
    return residual.report(list(probes), tolerance)


def compare_star(
    star: StarProduct,
    reference: HSeries[PolyDiffOp],
    probes: Sequence[tuple[Poly, ...]],
    tolerance: float = 3.0,
) -> dict[int, ResidualReport]:
    """Per-order difference star − reference on probe pairs (orders both carry)."""
    probes = list(probes)
    reports = {}
    for k in range(min(star.order, reference.order) + 1):
        diff = star[k] - WeightedOperator.of(reference[k])
        reports[k] = diff.report(probes, tolerance)
    return reports
