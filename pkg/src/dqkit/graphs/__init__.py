"""Admissible graphs: validation, enumeration, symmetries, compilation, export."""

from dqkit.graphs.graph import (
    DEFAULT_ENUMERATION_GUARD,
    AdmissibleGraph,
    GraphKey,
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

__all__ = [
    "DEFAULT_ENUMERATION_GUARD",
    "AdmissibleGraph",
    "GraphKey",
    "Target",
    "candidate_count",
    "canonical_star_order",
    "compile_graph",
    "degree_identity",
    "enumerate_graphs",
    "export_dot",
    "parse_json",
    "validate",
    "vertex_permutation_sign",
]
