"""Tests for admissible graphs: validation, enumeration, symmetries and compilation."""

import itertools
import json

import pytest

from dqkit.algebra.dpoly import PolyDiffOp, hkr, moyal_operator, poisson_operator
from dqkit.algebra.tpoly import PolyVector
from dqkit.core.errors import AdmissibilityError, DimensionError, EnumerationGuardError
from dqkit.core.poly import Poly
from dqkit.graphs import (
    AdmissibleGraph,
    Target,
    candidate_count,
    canonical_star_order,
    compile_graph,
    degree_identity,
    enumerate_graphs,
    export_dot,
    parse_json,
    validate,
    vertex_permutation_sign,
)


def graph(n: int, nbar: int, *stars: str) -> AdmissibleGraph:
    return validate({"n": n, "nbar": nbar, "stars": [s.split() for s in stars]})


def brute_force_graphs(n: int, nbar: int, edges: int) -> set[AdmissibleGraph]:
    """Every assignment of star sizes and slot targets that validate accepts."""
    targets = [f"p{j}" for j in range(1, n + 1)] + [f"q{k}" for k in range(1, nbar + 1)]
    found: set[AdmissibleGraph] = set()
    for sizes in itertools.product(range(edges + 1), repeat=n):
        if sum(sizes) != edges:
            continue
        for slots in itertools.product(targets, repeat=edges):
            stars, start = [], 0
            for k in sizes:
                stars.append(list(slots[start : start + k]))
                start += k
            try:
                found.add(validate({"n": n, "nbar": nbar, "stars": stars}))
            except AdmissibilityError:
                pass
    return found


WEDGE = graph(1, 2, "q1 q2")
G0 = graph(2, 2, "q1 q2", "q1 q2")


class TestValidate:
    def test_stars_form(self):
        assert WEDGE.stars == ((Target("q", 1), Target("q", 2)),)
        assert WEDGE.edge_count == 2
        assert WEDGE.star_sizes == (2,)

    def test_edges_form_groups_by_source(self):
        g = validate({"n": 2, "nbar": 1, "edges": [["p2", "q1"], ["p1", "p2"], ["p1", "q1"]]})
        assert g == graph(2, 1, "p2 q1", "q1")

    def test_file_fixture(self, data_dir):
        g = parse_json((data_dir / "wedge2.json").read_text())
        assert g == WEDGE

    @pytest.mark.parametrize(
        "data,clause",
        [
            ({"n": 0, "nbar": 1, "stars": []}, 2),
            ({"n": 1, "nbar": 2, "stars": [["q1", "q3"]]}, 1),
            ({"n": 2, "nbar": 1, "stars": [["p1", "q1"], ["q1"]]}, 4),
            ({"n": 1, "nbar": 2, "edges": [["q1", "q2"]]}, 5),
            ({"n": 1, "nbar": 2, "edges": [["p2", "q2"]]}, 1),
            ({"n": 1, "nbar": 2, "stars": [["q1", "q1"]]}, 6),
        ],
    )
    def test_admissibility_clauses(self, data, clause):
        with pytest.raises(AdmissibilityError) as info:
            validate(data)
        assert info.value.clause == clause
        assert f"clause {clause}" in str(info.value)

    @pytest.mark.parametrize(
        "data,field",
        [
            ({"nbar": 2, "stars": [["q1", "q2"]]}, "n"),
            ({"n": 1, "stars": [["q1", "q2"]]}, "nbar"),
            ({"n": -1, "nbar": 2, "stars": []}, "n"),
            ({"n": 1, "nbar": 2}, "stars"),
            ({"n": 2, "nbar": 2, "stars": [["q1"]]}, "stars"),
        ],
    )
    def test_malformed_fields_are_named(self, data, field):
        with pytest.raises(ValueError, match=f"'{field}'"):
            validate(data)

    def test_malformed_vertex_name(self):
        with pytest.raises(ValueError, match="malformed vertex"):
            validate({"n": 1, "nbar": 2, "stars": [["x1", "q2"]]})

    def test_bad_json(self):
        with pytest.raises(ValueError, match="does not parse"):
            parse_json("{not json")

    def test_json_round_trip(self):
        assert AdmissibleGraph.from_json(G0.to_json()) == G0
        assert json.loads(G0.to_json())["stars"] == [["q1", "q2"], ["q1", "q2"]]

    def test_key_format(self):
        assert G0.key() == "n=2;nbar=2;p1:q1,q2;p2:q1,q2"
        assert str(WEDGE) == "n=1;nbar=2;p1:q1,q2"


class TestEnumerate:
    @pytest.mark.parametrize(
        "n,nbar,edges,expected",
        [(1, 1, 1, 1), (1, 2, 2, 2), (2, 2, 4, 72), (2, 3, 5, 768), (0, 2, 0, 1)],
    )
    def test_counts(self, n, nbar, edges, expected):
        graphs = enumerate_graphs(n, nbar, edges)
        assert len(graphs) == expected
        assert candidate_count(n, nbar, edges) == expected
        assert len(set(graphs)) == expected

    def test_every_graph_is_admissible(self):
        for g in enumerate_graphs(2, 2, 4):
            assert validate(g.to_dict()) == g
            assert degree_identity(g)

    @pytest.mark.parametrize(
        "n,nbar",
        [(0, 2), (0, 3), (1, 0), (1, 1), (1, 2), (1, 3), (2, 0), (2, 1), (2, 2), (2, 3)],
    )
    def test_matches_brute_force(self, n, nbar):
        edges = 2 * n + nbar - 2
        expected = brute_force_graphs(n, nbar, edges)
        graphs = enumerate_graphs(n, nbar, edges)
        assert set(graphs) == expected
        assert len(graphs) == len(expected) == candidate_count(n, nbar, edges)

    def test_no_parallel_edges_or_loops(self):
        for g in enumerate_graphs(2, 3, 5):
            for j, star in enumerate(g.stars, start=1):
                assert len(set(star)) == len(star)
                assert Target("p", j) not in star

    def test_guard(self):
        with pytest.raises(EnumerationGuardError) as info:
            enumerate_graphs(2, 3, 5, guard=100)
        assert info.value.count == 768
        assert info.value.bound == 100

    def test_negative_degree_rejected(self):
        with pytest.raises(AdmissibilityError):
            enumerate_graphs(0, 1, 0)

    def test_degree_identity_fails_off_count(self):
        assert not degree_identity(graph(2, 2, "q1", "q1 q2"))


class TestSymmetries:
    def test_g0_is_swap_invariant(self):
        swapped, sign = vertex_permutation_sign(G0, [2, 1])
        assert swapped == G0
        assert sign == 1

    def test_odd_stars_pick_up_a_sign(self):
        g = graph(2, 2, "q1", "p1 q1 q2")
        swapped, sign = vertex_permutation_sign(g, [2, 1])
        assert swapped == graph(2, 2, "p2 q1 q2", "q1")
        assert sign == -1

    def test_identity_permutation(self):
        assert vertex_permutation_sign(G0, [1, 2]) == (G0, 1)

    def test_not_a_permutation(self):
        with pytest.raises(ValueError):
            vertex_permutation_sign(G0, [1, 1])

    def test_relabeling_permutes_operator_inputs(self, make_vector_field):
        g = graph(2, 2, "q1", "p1 q1 q2")
        X = make_vector_field(3)
        trivector = PolyVector.basis(3, [1, 2, 3], Poly.variable(3, 1))
        swapped, _ = vertex_permutation_sign(g, [2, 1])
        assert compile_graph(swapped, [trivector, X]) == compile_graph(g, [X, trivector])

    def test_canonical_star_order(self, so3):
        reversed_wedge = graph(1, 2, "q2 q1")
        sorted_graph, sign = canonical_star_order(reversed_wedge)
        assert sorted_graph == WEDGE
        assert sign == -1
        assert compile_graph(reversed_wedge, [so3]) == compile_graph(WEDGE, [so3]).scale(sign)


class TestCompile:
    def test_wedge_gives_poisson_operator(self, so3):
        assert compile_graph(WEDGE, [so3]) == poisson_operator(so3)
        assert compile_graph(WEDGE, [so3]) == hkr(so3).scale(2)

    def test_single_edge_gives_vector_field(self, make_vector_field):
        X = make_vector_field(2)
        assert compile_graph(graph(1, 1, "q1"), [X]) == PolyDiffOp.from_vector_field(X)

    def test_g0_gives_twice_moyal_b2(self, symplectic2):
        assert compile_graph(G0, [symplectic2, symplectic2]) == moyal_operator(
            symplectic2, 2
        ).scale(2)

    def test_edge_into_first_type_vertex_differentiates(self):
        # p1 -> p2, p2 -> q1 with ξ1 = ∂1, ξ2 = x1² ∂1: x ↦ 2x1 ∂1 f
        g = graph(2, 1, "p2", "q1")
        x1 = Poly.variable(1, 1)
        op = compile_graph(g, [PolyVector.basis(1, [1]), PolyVector.basis(1, [1], x1 * x1)])
        assert op == PolyDiffOp(1, 1, {((1,),): x1.scale(2)})

    def test_degree_mismatch_gives_zero(self, so3):
        op = compile_graph(graph(1, 1, "q1"), [so3])
        assert op.is_zero()
        assert op.arity == 1

    def test_no_first_type_vertices_is_the_product(self):
        x1, x2 = Poly.variable(2, 1), Poly.variable(2, 2)
        op = compile_graph(graph(0, 2), [], dim=2)
        assert op == PolyDiffOp.multiplication(2)
        assert op.apply(x1, x2 + Poly.one(2)) == x1 * x2 + x1
        triple = compile_graph(AdmissibleGraph(0, 3, ()), [], dim=2)
        assert triple.arity == 3
        assert triple.apply(x1, x2, x1) == x1 * x1 * x2

    def test_argument_checks(self, so3):
        with pytest.raises(ValueError):
            compile_graph(G0, [so3])
        with pytest.raises(ValueError):
            compile_graph(graph(0, 2), [])
        with pytest.raises(DimensionError):
            compile_graph(G0, [so3, PolyVector.basis(2, [1, 2])])


def test_export_dot():
    text = export_dot(WEDGE)
    assert text.startswith('digraph "n=1;nbar=2;p1:q1,q2"')
    assert 'p1 -> q1 [label="1"]' in text
    assert 'p1 -> q2 [label="2"]' in text
    assert "rank=same" in text
