"""Tests for Hochschild cohomology of finite-dimensional algebras."""

from fractions import Fraction

import numpy as np
import pytest
import sympy

from dqkit.algebra.hochschild import (
    FIXTURES,
    FinDimAlgebra,
    apply_differential,
    bar_d,
    bar_differential,
    center_dim,
    deformation_obstruction,
    derivation_dims,
    dual_numbers,
    fd_bracket,
    hh_dim,
    homotopy_check,
    matrix_algebra,
    solve_next_order,
    square_zero_extension,
)
from dqkit.core.errors import SizeGuardError

EXPECTED_HH = {
    "mat2": (1, 0, 0),
    "dual": (2, 1, 1),
    "diag2": (2, 0, 0),
    "z2": (2, 0, 0),
}


def zeros(shape):
    arr = np.empty(shape, dtype=object)
    arr.fill(Fraction(0))
    return arr


def all_zero(arr) -> bool:
    return all(v == 0 for v in arr.reshape(-1))


def flipped_bar_d(a, tensor):
    return {k: -v for k, v in bar_d(a, tensor).items()}


class TestAlgebra:
    def test_fixtures_are_unital_and_associative(self):
        for make in FIXTURES.values():
            a = make()
            one = list(a.unit)
            assert a.mul(one, one) == one

    def test_matrix_units_multiply(self):
        a = matrix_algebra(2)
        # E12 · E21 = E11
        assert a.mul(a.basis(1), a.basis(2)) == a.basis(0)
        assert a.mul(a.basis(2), a.basis(1)) == a.basis(3)

    def test_non_associative_constants_rejected(self):
        c = [[[0] * 3 for _ in range(3)] for _ in range(3)]
        for i in range(3):
            c[0][i][i] = 1
            c[i][0][i] = 1
        c[1][1][2] = 1
        c[2][1][1] = 1
        with pytest.raises(ValueError, match="not associative"):
            FinDimAlgebra.from_constants(c, [1, 0, 0])

    def test_bad_unit_rejected(self):
        c = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
        with pytest.raises(ValueError, match="unit"):
            FinDimAlgebra.from_constants(c, [0, 1])

    def test_file_fixture(self, data_dir):
        assert FinDimAlgebra.from_file(data_dir / "dual.json").to_dict() == dual_numbers().to_dict()

    def test_save_and_load(self, tmp_path):
        path = tmp_path / "mat2.json"
        matrix_algebra(2).save(path)
        assert FinDimAlgebra.from_file(path).to_dict() == matrix_algebra(2).to_dict()

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            FinDimAlgebra.from_file(tmp_path / "nope.json")

    def test_missing_field(self):
        with pytest.raises(ValueError, match="unit"):
            FinDimAlgebra.from_dict({"dim": 2, "c": dual_numbers().to_dict()["c"]})

    def test_declared_dim_mismatch(self):
        data = dual_numbers().to_dict()
        data["dim"] = 3
        with pytest.raises(ValueError, match="declared dim"):
            FinDimAlgebra.from_dict(data)


class TestBarComplex:
    def test_shapes(self):
        assert bar_differential(dual_numbers(), 1).shape == (8, 4)
        assert bar_differential(matrix_algebra(2), 0).shape == (16, 4)

    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_squares_to_zero(self, name):
        a = FIXTURES[name]()
        for n in (0, 1):
            product = bar_differential(a, n + 1).matrix * bar_differential(a, n).matrix
            assert product.is_zero_matrix

    def test_identity_maps_to_multiplication(self):
        for make in FIXTURES.values():
            a = make()
            delta_id = apply_differential(a, a.identity_cochain())
            assert np.array_equal(delta_id, a.multiplication_cochain())

    def test_size_guard(self):
        with pytest.raises(SizeGuardError):
            bar_differential(matrix_algebra(2), 5, size_guard=1000)
        with pytest.raises(SizeGuardError):
            hh_dim(matrix_algebra(2), 3, size_guard=500)

    def test_negative_degree(self):
        with pytest.raises(ValueError):
            bar_differential(dual_numbers(), -1)


class TestCohomology:
    @pytest.mark.parametrize("name", sorted(EXPECTED_HH))
    def test_hh_dimensions(self, name):
        a = FIXTURES[name]()
        assert tuple(hh_dim(a, n) for n in range(3)) == EXPECTED_HH[name]

    @pytest.mark.parametrize("name", sorted(EXPECTED_HH))
    def test_low_degrees_agree_with_direct_routes(self, name):
        a = FIXTURES[name]()
        der, inner = derivation_dims(a)
        assert hh_dim(a, 0) == center_dim(a)
        assert hh_dim(a, 1) == der - inner

    def test_derivations_of_matrices_are_inner(self):
        assert derivation_dims(matrix_algebra(2)) == (3, 3)
        assert derivation_dims(dual_numbers()) == (1, 0)


class TestHomotopy:
    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_contracting_homotopy(self, name):
        a = FIXTURES[name]()
        assert all(homotopy_check(a, n) for n in range(3))

    def test_flipped_differential_fails(self):
        assert not homotopy_check(dual_numbers(), 1, differential=flipped_bar_d)

    def test_explicit_samples(self):
        a = dual_numbers()
        sample = {(0, 1, 1): Fraction(2), (1, 0, 1): Fraction(-1, 3)}
        assert homotopy_check(a, 1, samples=[sample])

    def test_guard(self):
        with pytest.raises(SizeGuardError):
            homotopy_check(matrix_algebra(2), 4, size_guard=100)


class TestDeformations:
    def test_multiplication_is_a_maurer_cartan_element(self):
        mu = matrix_algebra(2).multiplication_cochain()
        assert all_zero(fd_bracket(mu, mu))

    def test_trivial_deformation_extends(self):
        a = dual_numbers()
        d = zeros((2, 2))
        d[1, 0] = Fraction(1)
        nu1 = fd_bracket(d, a.multiplication_cochain())
        assert not all_zero(nu1)
        nu2 = solve_next_order(a, [nu1])
        assert nu2 is not None
        assert all(all_zero(r) for r in deformation_obstruction(a, [nu1, nu2]))

    def test_obstructed_deformation(self):
        a = square_zero_extension(2)
        psi = zeros((3, 3, 3))
        # ψ(v1, v1) = v2, ψ(v2, v1) = v1
        psi[1, 1, 2] = Fraction(1)
        psi[2, 1, 1] = Fraction(1)
        residuals = deformation_obstruction(a, [psi, zeros((3, 3, 3))])
        assert all_zero(residuals[0])
        assert residuals[1][1, 1, 1, 1] == 1
        assert solve_next_order(a, [psi]) is None

    def test_matrix_is_exact(self):
        delta = bar_differential(dual_numbers(), 0).matrix
        assert all(isinstance(v, sympy.Rational) for v in delta.values())
