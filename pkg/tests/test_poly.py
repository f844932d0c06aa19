"""Tests for exact sparse polynomials."""

from fractions import Fraction

import pytest

from dqkit.core.errors import DimensionError
from dqkit.core.poly import Poly, format_rational, monomials_up_to, parse_rational


def x(i: int, dim: int = 2) -> Poly:
    return Poly.variable(dim, i)


class TestArithmetic:
    def test_difference_of_squares(self):
        assert (x(1) + x(2)) * (x(1) - x(2)) == x(1) * x(1) - x(2) * x(2)

    def test_zero_terms_are_pruned(self):
        p = x(1) - x(1)
        assert p.is_zero()
        assert len(p) == 0
        assert p.degree == -1

    def test_scale_by_fraction(self):
        p = (x(1) + Poly.one(2)).scale(Fraction(1, 2))
        assert p.coefficient((1, 0)) == Fraction(1, 2)
        assert p.coefficient((0, 0)) == Fraction(1, 2)

    def test_scale_by_zero(self):
        assert x(1).scale(0).is_zero()

    def test_integer_multiplication_both_sides(self):
        assert 3 * x(1) == x(1) * 3 == x(1).scale(3)

    def test_power(self):
        assert (x(1) + x(2)) ** 2 == x(1) * x(1) + x(1) * x(2) * 2 + x(2) * x(2)
        assert x(1) ** 0 == Poly.one(2)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            _ = x(1, 2) + x(1, 3)

    def test_negative_exponent_rejected(self):
        with pytest.raises(ValueError):
            Poly(2, {(-1, 0): 1})

    def test_negative_power_rejected(self):
        with pytest.raises(ValueError, match="negative exponent"):
            _ = x(1) ** -1

    def test_variable_out_of_range(self):
        with pytest.raises(DimensionError):
            Poly.variable(2, 3)


class TestDerivatives:
    def test_partial(self):
        p = x(1) ** 3 * x(2)
        assert p.partial(1) == (x(1) ** 2 * x(2)).scale(3)
        assert p.partial(2) == x(1) ** 3

    def test_derivative_multi_index(self):
        p = x(1) ** 3 * x(2) ** 2
        assert p.derivative((2, 1)) == (x(1) * x(2)).scale(12)

    def test_derivative_kills_low_degree(self):
        assert x(1).derivative((2, 0)).is_zero()

    def test_partial_axis_out_of_range(self):
        with pytest.raises(DimensionError):
            x(1).partial(0)


class TestSerialization:
    def test_terms_emitted_in_grlex_order(self):
        p = Poly.one(2) + x(2) + x(1) * x(1)
        exps = [t["exps"] for t in p.to_dict()["terms"]]
        assert exps == [[2, 0], [0, 1], [0, 0]]

    def test_coefficients_written_as_fraction_strings(self):
        data = x(1).scale(Fraction(-3, 2)).to_dict()
        assert data["terms"][0]["coeff"] == "-3/2"
        assert Poly.from_dict(data) == x(1).scale(Fraction(-3, 2))

    def test_missing_field_is_named(self):
        with pytest.raises(ValueError, match="terms"):
            Poly.from_dict({"dim": 2})

    @pytest.mark.parametrize(
        "text, expected",
        [("1/2", Fraction(1, 2)), ("-4", Fraction(-4)), (7, Fraction(7))],
    )
    def test_parse_rational(self, text, expected):
        assert parse_rational(text) == expected

    def test_parse_rational_rejects_zero_denominator(self):
        with pytest.raises(ValueError):
            parse_rational("1/0")

    def test_format_rational_writes_denominator(self):
        assert format_rational(Fraction(3)) == "3/1"

    def test_str(self):
        assert str(x(1) * x(2) - Poly.constant(2, 2)) == "x1*x2 - 2"


class TestMonomials:
    @pytest.mark.parametrize("dim, degree, count", [(1, 3, 4), (2, 2, 6), (3, 2, 10), (2, 3, 10)])
    def test_counts(self, dim, degree, count):
        assert len(monomials_up_to(dim, degree)) == count

    def test_without_constant(self):
        monos = monomials_up_to(2, 2, include_constant=False)
        assert len(monos) == 5
        assert Poly.one(2) not in monos
