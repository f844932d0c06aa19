"""Tests for MC residuals, gauge actions and star-product equivalence."""

import random
from fractions import Fraction

import pytest
from conftest import bivector3, random_op, random_poly

from dqkit.algebra.dpoly import (
    PolyDiffOp,
    compose,
    hkr,
    hochschild_delta,
    moyal_operator,
    moyal_star,
)
from dqkit.algebra.maurer_cartan import (
    GaugeElementD,
    GaugeElementT,
    McElementD,
    McElementT,
    bch_compose,
    conjugate_star,
    exp_unary,
    first_order_class,
    gauge_act,
    is_mc,
    mc_residual,
    mc_series,
    mc_to_star,
    star_gauge_equivalent,
    star_to_mc,
)
from dqkit.algebra.tpoly import PolyVector, sn_bracket
from dqkit.core.errors import DegreeError, TruncationError
from dqkit.core.poly import Poly
from dqkit.core.series import HSeries


def x(dim: int, i: int) -> Poly:
    return Poly.variable(dim, i)


def unary(dim: int, alpha: tuple[int, ...], coeff: Poly | None = None) -> PolyDiffOp:
    return PolyDiffOp(dim, 1, {(alpha,): coeff if coeff is not None else Poly.one(dim)})


def random_poisson_bivector(rng: random.Random) -> PolyVector:
    """A Poisson bivector on R^3: f∂1∧∂2, constant, or c·so(3) shifted by a constant."""
    kind = rng.randrange(3)
    if kind == 0:
        return PolyVector.basis(3, [1, 2], random_poly(rng, 3, 2))
    a = Fraction(rng.choice([-2, -1, 1, 2]), rng.randint(1, 2))
    b, c = (Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(2))
    constant = PolyVector.constant_bivector([[0, a, -c], [-a, 0, b], [c, -b, 0]])
    if kind == 1:
        return constant
    lie = bivector3(x(3, 3), x(3, 1), x(3, 2)).scale(rng.randint(1, 3))
    return lie + constant


def random_vector_field(rng: random.Random, dim: int) -> PolyVector:
    return PolyVector.vector_field([random_poly(rng, dim, 1, terms=2) for _ in range(dim)])


@pytest.fixture
def moyal2(symplectic2) -> HSeries[PolyDiffOp]:
    return moyal_star(symplectic2, 2)


@pytest.fixture
def alpha2() -> GaugeElementD:
    # ℏ (x1∂2 + ∂1∂2) + ℏ² ∂1²
    first = unary(2, (0, 1), x(2, 1)) + unary(2, (1, 1))
    return GaugeElementD(mc_series([first, unary(2, (2, 0))], 2))


class TestElements:
    def test_mc_series_pads_with_zeros(self, so3):
        s = mc_series([so3], 3)
        assert s.order == 3
        assert s[0].is_zero() and s[1] == so3 and s[3].is_zero()

    def test_nonzero_constant_term_rejected(self, so3):
        with pytest.raises(ValueError, match="zero"):
            McElementT(HSeries((so3, so3)))

    def test_wrong_degree_rejected(self, so3):
        with pytest.raises(DegreeError):
            GaugeElementT(mc_series([so3], 1))
        with pytest.raises(DegreeError):
            McElementD(mc_series([unary(2, (1, 0))], 1))

    def test_empty_coefficients_rejected(self):
        with pytest.raises(ValueError):
            mc_series([], 2)


class TestMcResidual:
    def test_poisson_bivector_is_mc(self, so3):
        assert is_mc(McElementT(mc_series([so3], 3)))

    def test_non_poisson_residual_at_order_two(self):
        bad = PolyVector(3, 2, {(1, 2): x(3, 2), (2, 3): x(3, 1)})
        residuals = mc_residual(McElementT(mc_series([bad], 2)))
        assert residuals[1].is_zero()
        assert residuals[2] == sn_bracket(bad, bad).scale(Fraction(1, 2))
        assert not residuals[2].is_zero()

    def test_residual_respects_truncation(self):
        bad = PolyVector(3, 2, {(1, 2): x(3, 2), (2, 3): x(3, 1)})
        element = McElementT(mc_series([bad], 3))
        assert is_mc(element, order=1)
        assert sorted(mc_residual(element, order=1)) == [1]

    def test_moyal_is_mc_in_dpoly(self, moyal2):
        element = star_to_mc(moyal2)
        assert is_mc(element)
        assert mc_to_star(element) == moyal2

    def test_hkr_of_poisson_is_mc_at_first_order(self, so3):
        # ℏ·hkr(Π) solves the ℏ¹ equation but not the ℏ² one
        element = McElementD(mc_series([hkr(so3)], 2))
        residuals = mc_residual(element)
        assert residuals[1].is_zero()
        assert not residuals[2].is_zero()

    def test_star_to_mc_requires_mu(self, symplectic2):
        series = HSeries((moyal_operator(symplectic2, 1), moyal_operator(symplectic2, 1)))
        with pytest.raises(ValueError, match="μ"):
            star_to_mc(series)


class TestGaugeTpoly:
    @pytest.fixture
    def fields(self, make_vector_field) -> tuple[GaugeElementT, GaugeElementT]:
        X = GaugeElementT(mc_series([make_vector_field(3), make_vector_field(3)], 3))
        Y = GaugeElementT(mc_series([make_vector_field(3)], 3))
        return X, Y

    def test_action_preserves_mc(self, so3, fields):
        X, _ = fields
        moved = gauge_act(X, McElementT(mc_series([so3], 3)))
        assert isinstance(moved, McElementT)
        assert is_mc(moved)
        assert moved.series[1] == so3

    @pytest.mark.parametrize("seed", range(20))
    def test_random_pairs_stay_maurer_cartan(self, seed):
        rng = random.Random(seed)
        pi = random_poisson_bivector(rng)
        hpi = McElementT(mc_series([pi], 3))
        assert is_mc(hpi)
        alpha = GaugeElementT(mc_series([random_vector_field(rng, 3) for _ in range(3)], 3))
        moved = gauge_act(alpha, hpi)
        assert is_mc(moved)
        assert moved.series[1] == pi

    def test_second_order_term_is_lie_derivative(self, so3, make_vector_field):
        v = make_vector_field(3)
        moved = gauge_act(GaugeElementT(mc_series([v], 2)), McElementT(mc_series([so3], 2)))
        assert moved.series[2] == sn_bracket(v, so3)

    def test_bch_composes_actions(self, so3, fields):
        X, Y = fields
        pi = McElementT(mc_series([so3, so3.scale(3)], 3))
        composed = gauge_act(bch_compose(X, Y), pi)
        stepwise = gauge_act(X, gauge_act(Y, pi))
        assert composed.series == stepwise.series

    def test_bch_order_limit(self, make_vector_field):
        big = GaugeElementT(mc_series([make_vector_field(2)], 5))
        with pytest.raises(ValueError, match="BCH"):
            bch_compose(big, big)

    def test_order_mismatch(self, so3, make_vector_field):
        X = GaugeElementT(mc_series([make_vector_field(3)], 2))
        with pytest.raises(TruncationError):
            gauge_act(X, McElementT(mc_series([so3], 3)))

    def test_mixed_dgla_rejected(self, so3, alpha2):
        with pytest.raises(TypeError):
            gauge_act(alpha2, McElementT(mc_series([PolyVector.basis(2, [1, 2])], 2)))


class TestGaugeDpoly:
    def test_exp_unary_inverts(self, alpha2):
        plus = exp_unary(alpha2.series)
        minus = exp_unary(-alpha2.series)
        product = plus.mul(minus, compose)
        assert product[0] == PolyDiffOp.identity(2)
        assert product[1].is_zero() and product[2].is_zero()

    def test_action_matches_conjugation(self, moyal2, alpha2):
        acted = gauge_act(alpha2, star_to_mc(moyal2))
        conjugated = star_to_mc(conjugate_star(moyal2, alpha2))
        assert acted.series == conjugated.series
        assert is_mc(acted)

    @pytest.mark.parametrize("seed", range(20))
    def test_random_pairs_stay_maurer_cartan(self, seed):
        rng = random.Random(seed)
        c = Fraction(rng.choice([-2, -1, 1, 2]), rng.randint(1, 3))
        star = moyal_star(PolyVector.constant_bivector([[0, c], [-c, 0]]), 3)
        ops = [random_op(rng, 2, 1, max_order=2, terms=1) for _ in range(3)]
        alpha = GaugeElementD(mc_series(ops, 3))
        acted = gauge_act(alpha, star_to_mc(star))
        assert is_mc(acted)
        assert acted.series == star_to_mc(conjugate_star(star, alpha)).series

    def test_first_order_shift_is_a_coboundary(self, moyal2, alpha2):
        conjugated = conjugate_star(moyal2, alpha2)
        delta = conjugated[1] - moyal2[1]
        assert not delta.is_zero()
        assert delta == hochschild_delta(alpha2.series[1])
        assert first_order_class(delta).is_zero()

    def test_conjugate_is_equivalent(self, moyal2, alpha2):
        assert star_gauge_equivalent(moyal2, conjugate_star(moyal2, alpha2), alpha2)

    def test_perturbed_star_is_not_equivalent(self, moyal2, alpha2):
        extra = PolyVector.basis(2, [1, 2], x(2, 1))
        conjugated = conjugate_star(moyal2, alpha2)
        shifted = HSeries(
            (conjugated[0], conjugated[1] + hkr(extra), conjugated[2])
        )
        assert not star_gauge_equivalent(moyal2, shifted, alpha2)
        assert first_order_class(hkr(extra)) == extra.scale(Fraction(1, 2))

    def test_equivalence_order_mismatch(self, moyal2, alpha2, symplectic2):
        with pytest.raises(TruncationError):
            star_gauge_equivalent(moyal2, moyal_star(symplectic2, 1), alpha2)


class TestFirstOrderClass:
    def test_recovers_poisson_bivector(self, so3, symplectic2):
        assert first_order_class(moyal_operator(symplectic2, 1)) == symplectic2
        assert first_order_class(hkr(so3).scale(2)) == so3

    def test_coboundaries_have_no_class(self, make_op):
        d = make_op(3, 1, max_order=2)
        assert first_order_class(hochschild_delta(d)).is_zero()

    def test_requires_bidifferential(self):
        with pytest.raises(DegreeError):
            first_order_class(unary(2, (1, 0)))
