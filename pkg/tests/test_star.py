"""Tests for weight sources, U_n assembly and the graph star product."""

import logging
from fractions import Fraction

import pytest

from dqkit.algebra.dpoly import PolyDiffOp, hkr, moyal_star, poisson_operator
from dqkit.algebra.tpoly import PolyVector
from dqkit.core.config import WeightSettings
from dqkit.core.errors import DegreeError, MissingWeightsError
from dqkit.core.poly import Poly
from dqkit.graphs import validate
from dqkit.star import (
    CachedWeights,
    ChainedWeights,
    ClosedFormWeights,
    EmptyWeights,
    ResidualReport,
    StarProduct,
    WeightedOperator,
    associativity_residual,
    build_star,
    build_un,
    compare_star,
    formality_residual,
    probe_tuples,
    u1,
)
from dqkit.weights import WeightCache, WeightEstimate


def graph(n, nbar, *stars):
    return validate({"n": n, "nbar": nbar, "stars": [s.split() for s in stars]})


G0 = graph(2, 2, "q1 q2", "q1 q2")


def cache_with_g0(tmp_path, value: float, stderr: float = 0.001) -> WeightCache:
    cache = WeightCache(tmp_path / "weights.json")
    cache.put(G0.key(), WeightEstimate(value, stderr, 100_000, 42))
    return cache


def quick_settings(tmp_path, samples: int = 20_000) -> WeightSettings:
    return WeightSettings(
        samples=samples, seed=42, chunk_size=5_000, workers=0, cache=tmp_path / "weights.json"
    )


class TestWeightSources:
    def test_closed_form_single_vertex(self):
        source = ClosedFormWeights()
        assert source.weight(graph(1, 2, "q1 q2")) == Fraction(1, 2)
        assert source.weight(graph(1, 3, "q1 q2 q3")) == Fraction(1, 6)
        assert source.weight(G0) is None

    def test_unsorted_star_picks_up_sign(self):
        assert ClosedFormWeights().weight(graph(1, 2, "q2 q1")) == Fraction(-1, 2)

    def test_cached_lookup_with_sign(self, tmp_path):
        source = CachedWeights(cache_with_g0(tmp_path, 0.25))
        assert source.weight(G0).value == 0.25
        assert source.weight(graph(2, 2, "q2 q1", "q1 q2")).value == -0.25

    def test_cache_miss_without_settings(self, tmp_path):
        source = CachedWeights(WeightCache(tmp_path / "weights.json"))
        assert source.weight(G0) is None

    def test_cache_miss_integrates_and_saves(self, tmp_path):
        settings = quick_settings(tmp_path, samples=2_000)
        source = CachedWeights(WeightCache(settings.cache), settings)
        estimate = source.weight(G0)
        assert isinstance(estimate, WeightEstimate)
        assert estimate.samples == 2_000
        assert G0.key() in WeightCache(settings.cache)

    def test_chained_sources(self, tmp_path):
        source = ChainedWeights(ClosedFormWeights(), CachedWeights(cache_with_g0(tmp_path, 0.25)))
        assert source.weight(graph(1, 2, "q1 q2")) == Fraction(1, 2)
        assert source.weight(G0).value == 0.25
        assert ChainedWeights(EmptyWeights()).weight(G0) is None


class TestUn:
    def test_u1_is_hkr(self, so3, make_vector_field):
        assert u1(so3).to_exact() == hkr(so3)
        X = make_vector_field(3)
        assert u1(X).to_exact() == PolyDiffOp.from_vector_field(X)

    def test_closed_form_provenance(self, so3):
        component = build_un(1, [2], ClosedFormWeights(), xis=[so3])
        assert component.provenance() == "closed-form"
        assert len(component.table) == 1

    def test_missing_weights_are_listed(self, so3):
        with pytest.raises(MissingWeightsError) as info:
            build_un(2, [2], EmptyWeights(), xis=[so3, so3])
        keys = info.value.keys
        assert G0.key() in keys
        assert len(keys) == len(set(keys))

    def test_constant_bivector_keeps_only_g0(self, symplectic2, tmp_path):
        component = build_un(2, [2], CachedWeights(cache_with_g0(tmp_path, 0.25)), xis=[symplectic2] * 2)
        assert [g for g, _ in component.table] == [G0]
        assert component.provenance() == "monte-carlo"

    def test_wrong_input_count(self, so3):
        component = build_un(1, [2], ClosedFormWeights(), xis=[so3])
        with pytest.raises(ValueError):
            component.apply([so3, so3])


class TestBuildStar:
    def test_order_zero_and_one(self, so3):
        star = build_star(so3, 1, EmptyWeights())
        assert star.order == 1
        assert star.provenance == {0: "exact", 1: "closed-form"}
        assert star[0].to_exact() == PolyDiffOp.multiplication(3)
        assert star[1].to_exact() == poisson_operator(so3)

    def test_constant_bivector_matches_moyal(self, symplectic2, tmp_path):
        star = build_star(symplectic2, 2, CachedWeights(cache_with_g0(tmp_path, 0.2503)))
        assert star.provenance[2] == "monte-carlo"
        assert not star.is_exact()
        reports = compare_star(star, moyal_star(symplectic2, 2), probe_tuples(2, 3, 2))
        assert reports[0].exact and reports[1].exact
        assert all(r.passed for r in reports.values())
        assert reports[2].residual > 0

    def test_wrong_g0_weight_is_detected(self, symplectic2, tmp_path):
        star = build_star(symplectic2, 2, CachedWeights(cache_with_g0(tmp_path, 0.3)))
        reports = compare_star(star, moyal_star(symplectic2, 2), probe_tuples(2, 2, 2))
        assert not reports[2].passed

    def test_series_needs_exact_terms(self, symplectic2, tmp_path):
        star = build_star(symplectic2, 2, CachedWeights(cache_with_g0(tmp_path, 0.25)))
        with pytest.raises(ValueError):
            star.series()
        assert build_star(symplectic2, 1, EmptyWeights()).series() == moyal_star(symplectic2, 1)

    def test_missing_order_two_weight(self, so3):
        with pytest.raises(MissingWeightsError):
            build_star(so3, 2, EmptyWeights())

    def test_order_limit(self, so3):
        with pytest.raises(ValueError, match="ℏ\\^2"):
            build_star(so3, 3, EmptyWeights())

    def test_requires_bivector(self):
        with pytest.raises(DegreeError):
            build_star(PolyVector.basis(2, [1]), 1, EmptyWeights())

    def test_warns_for_non_poisson(self, caplog):
        bad = PolyVector(3, 2, {(1, 2): Poly.variable(3, 2), (2, 3): Poly.variable(3, 1)})
        with caplog.at_level(logging.WARNING, logger="dqkit"):
            build_star(bad, 1, EmptyWeights())
        assert "not Poisson" in caplog.text


class TestAssociativity:
    def test_moyal_is_exactly_associative(self, symplectic2):
        reports = associativity_residual(moyal_star(symplectic2, 3), probe_tuples(2, 2, 3))
        assert all(r.passed and r.exact for r in reports.values())

    def test_so3_first_order_is_exact(self, so3):
        reports = associativity_residual(build_star(so3, 1, EmptyWeights()), probe_tuples(3, 2, 3))
        assert reports[1].exact and reports[1].passed

    def test_so3_second_order_with_integrated_weights(self, so3, tmp_path):
        settings = quick_settings(tmp_path)
        source = CachedWeights(WeightCache(settings.cache), settings)
        star = build_star(so3, 2, source)
        reports = associativity_residual(star, probe_tuples(3, 2, 3), tolerance=5.0)
        assert reports[1].exact
        assert not reports[2].exact
        assert reports[2].passed

    @pytest.mark.slow
    def test_so3_second_order_precise(self, so3, tmp_path):
        settings = quick_settings(tmp_path, samples=1_000_000)
        source = CachedWeights(WeightCache(settings.cache), settings)
        star = build_star(so3, 2, source)
        reports = associativity_residual(star, probe_tuples(3, 3, 3), tolerance=3.0)
        assert reports[2].passed


class TestFormality:
    def test_first_order_is_exact(self, so3):
        report = formality_residual(1, [so3], probe_tuples(3, 2, 3), EmptyWeights())
        assert report.exact and report.passed

    def test_second_order_constant_bivectors(self, symplectic2, tmp_path):
        source = CachedWeights(cache_with_g0(tmp_path, 0.2497))
        report = formality_residual(2, [symplectic2] * 2, probe_tuples(2, 2, 3), source)
        assert not report.exact
        assert report.passed

    def test_second_order_detects_wrong_weight(self, symplectic2, tmp_path):
        source = CachedWeights(cache_with_g0(tmp_path, 0.3))
        report = formality_residual(2, [symplectic2] * 2, probe_tuples(2, 2, 3), source)
        assert not report.passed

    def test_argument_checks(self, so3, make_vector_field):
        with pytest.raises(ValueError):
            formality_residual(3, [so3] * 3, [], EmptyWeights())
        with pytest.raises(ValueError):
            formality_residual(2, [so3], [], EmptyWeights())
        X = make_vector_field(3)
        with pytest.raises(ValueError, match="bivectors"):
            formality_residual(2, [X, X], [], EmptyWeights())


class TestWeightedOperator:
    def test_product_of_sampled_terms_is_rejected(self, symplectic2):
        op = poisson_operator(symplectic2)
        est = WeightEstimate(0.25, 0.01, 1000, 1)
        a = WeightedOperator(PolyDiffOp.zero(2, 2), {"a": op}, {"a": est})
        b = WeightedOperator(PolyDiffOp.zero(2, 2), {"b": op}, {"b": est})
        with pytest.raises(ValueError, match="linear"):
            a.combine(b, lambda x, y: x)

    def test_to_dict(self, symplectic2):
        op = poisson_operator(symplectic2)
        exact = WeightedOperator.of(op)
        assert exact.to_dict() == {"exact": op.to_dict()}
        sampled = WeightedOperator(PolyDiffOp.zero(2, 2), {"k": op}, {"k": WeightEstimate(0.5, 0.1, 10, 1)})
        data = sampled.to_dict()
        assert data["weights"]["k"]["value"] == 0.5

    def test_residual_report_dict(self):
        assert ResidualReport(0.0, 0.0, True, True).to_dict()["error_budget"] == "exact"
        assert ResidualReport.combine([]).passed

    def test_star_from_series(self, symplectic2):
        star = StarProduct.from_series(moyal_star(symplectic2, 2))
        assert star.is_exact()
        assert star.provenance == {0: "exact", 1: "exact", 2: "exact"}
