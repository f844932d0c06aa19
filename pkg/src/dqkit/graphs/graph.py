"""
Admissible graphs and their polydifferential operators.

A graph has n first-type vertices p1..pn (in the upper half-plane) and
nbar second-type vertices q1..qnbar (on the real line). Every edge starts
at a first-type vertex; the edges leaving p_j form its ordered star.
Targets are written "p3" / "q2" (1-based).

Graph JSON:
    {"n": 1, "nbar": 2, "stars": [["q1", "q2"]]}

Raw input may instead list {"edges": [["p1", "q1"], ...]}; edges are then
grouped into stars in order of appearance. Admissibility clauses checked:

    1  targets name existing vertices
    2  2n + nbar - 2 >= 0
    4  no self-loops
    5  edges start at first-type vertices
    6  stars are ordered lists of pairwise distinct targets
"""

from __future__ import annotations

import itertools
import json
import logging
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from typing import Any, Literal

from dqkit.algebra.dpoly import PolyDiffOp
from dqkit.algebra.tpoly import PolyVector, permutation_sign
from dqkit.core.errors import AdmissibilityError, DimensionError, EnumerationGuardError
from dqkit.core.poly import MultiIndex, Poly, add_index, unit_index

logger = logging.getLogger(__name__)

DEFAULT_ENUMERATION_GUARD = 10_000_000

GraphKey = str


@dataclass(frozen=True, order=True)
class Target:
    """Edge target: ("p", j) or ("q", k), 1-based."""

    kind: Literal["p", "q"]
    index: int

    def __str__(self) -> str:
        return f"{self.kind}{self.index}"

    @classmethod
    def parse(cls, text: str) -> Target:
        text = str(text).strip()
        if len(text) < 2 or text[0] not in "pq" or not text[1:].isdigit():
            raise ValueError(f"malformed vertex name {text!r}, expected 'p<j>' or 'q<k>'")
        return cls(text[0], int(text[1:]))  # type: ignore[arg-type]


@dataclass(frozen=True)
class AdmissibleGraph:
    n: int
    nbar: int
    stars: tuple[tuple[Target, ...], ...]

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.stars)

    @property
    def star_sizes(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.stars)

    def edges(self) -> Iterator[tuple[int, Target]]:
        """Edges as (source j, target), ordered by source then star position."""
        for j, star in enumerate(self.stars, start=1):
            for t in star:
                yield j, t

    def key(self) -> GraphKey:
        stars = ";".join(
            f"p{j}:" + ",".join(str(t) for t in star) for j, star in enumerate(self.stars, start=1)
        )
        return f"n={self.n};nbar={self.nbar};{stars}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "nbar": self.nbar,
            "stars": [[str(t) for t in star] for star in self.stars],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> AdmissibleGraph:
        return parse_json(text)

    def __str__(self) -> str:
        return self.key()


# ========== validation ==========


def _field(data: dict[str, Any], name: str) -> Any:
    if name not in data:
        raise ValueError(f"graph JSON is missing field {name!r}")
    return data[name]


def _count(data: dict[str, Any], name: str) -> int:
    value = _field(data, name)
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise ValueError(f"field {name!r} must be a non-negative integer, got {value!r}")
    return value


def validate(data: dict[str, Any]) -> AdmissibleGraph:
    """
    Turn raw graph data into an AdmissibleGraph.

    Args:
        data: Mapping with n, nbar and either "stars" or "edges"

    Returns:
        The typed graph

    Raises:
        ValueError: On malformed fields (names the field)
        AdmissibilityError: On the first violated admissibility clause
    """
    if not isinstance(data, dict):
        raise ValueError("graph data must be a JSON object")
    n = _count(data, "n")
    nbar = _count(data, "nbar")
    if 2 * n + nbar - 2 < 0:
        raise AdmissibilityError(2, f"2n + nbar - 2 = {2 * n + nbar - 2} is negative")

    raw_stars: list[list[Target]]
    if "edges" in data and "stars" not in data:
        raw_stars = [[] for _ in range(n)]
        for edge in data["edges"]:
            if not isinstance(edge, (list, tuple)) or len(edge) != 2:
                raise ValueError(f"field 'edges' has malformed entry {edge!r}")
            source, target = Target.parse(edge[0]), Target.parse(edge[1])
            if source.kind != "p":
                raise AdmissibilityError(5, f"edge {source}->{target} starts at a second-type vertex")
            if not 1 <= source.index <= n:
                raise AdmissibilityError(1, f"edge source {source} does not exist")
            raw_stars[source.index - 1].append(target)
    else:
        stars_field = _field(data, "stars")
        if not isinstance(stars_field, list) or len(stars_field) != n:
            raise ValueError(f"field 'stars' must list exactly n = {n} stars")
        raw_stars = []
        for star in stars_field:
            if not isinstance(star, list):
                raise ValueError(f"field 'stars' has malformed entry {star!r}")
            raw_stars.append([Target.parse(t) for t in star])

    for j, star in enumerate(raw_stars, start=1):
        for t in star:
            bound = n if t.kind == "p" else nbar
            if not 1 <= t.index <= bound:
                raise AdmissibilityError(1, f"target {t} of p{j} does not exist")
            if t.kind == "p" and t.index == j:
                raise AdmissibilityError(4, f"self-loop at p{j}")
        if len(set(star)) != len(star):
            raise AdmissibilityError(6, f"star of p{j} repeats a target (parallel edges)")
    return AdmissibleGraph(n, nbar, tuple(tuple(s) for s in raw_stars))


def parse_json(text: str) -> AdmissibleGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"graph JSON does not parse: {e}") from e
    return validate(data)


def from_dict(data: dict[str, Any]) -> AdmissibleGraph:
    return validate(data)


# ========== enumeration ==========


def _size_splits(edge_count: int, n: int, max_size: int) -> Iterator[tuple[int, ...]]:
    for sizes in itertools.product(range(min(edge_count, max_size) + 1), repeat=n):
        if sum(sizes) == edge_count:
            yield sizes


def candidate_count(n: int, nbar: int, edge_count: int) -> int:
    """Σ over star-size splits of Π_j perm(n - 1 + nbar, k_j)."""
    choices = n - 1 + nbar
    if n == 0:
        return 1 if edge_count == 0 else 0
    return sum(
        math.prod(math.perm(choices, k) for k in sizes)
        for sizes in _size_splits(edge_count, n, choices)
    )


def enumerate_graphs(
    n: int,
    nbar: int,
    edge_count: int,
    guard: int = DEFAULT_ENUMERATION_GUARD,
) -> list[AdmissibleGraph]:
    """
    All admissible graphs with the given vertex and edge counts.

    Graphs are distinct as ordered data (star order matters).

    Raises:
        AdmissibilityError: If 2n + nbar - 2 < 0
        EnumerationGuardError: If the raw candidate count exceeds ``guard``
    """
    if 2 * n + nbar - 2 < 0:
        raise AdmissibilityError(2, f"2n + nbar - 2 = {2 * n + nbar - 2} is negative")
    count = candidate_count(n, nbar, edge_count)
    if count > guard:
        raise EnumerationGuardError(
            count, guard, f"sum over splits of prod perm({n - 1 + nbar}, k_j)"
        )
    logger.debug("enumerating %d graphs for n=%d nbar=%d edges=%d", count, n, nbar, edge_count)

    if n == 0:
        return [AdmissibleGraph(0, nbar, ())] if edge_count == 0 else []

    pools = [
        [Target("p", i) for i in range(1, n + 1) if i != j]
        + [Target("q", k) for k in range(1, nbar + 1)]
        for j in range(1, n + 1)
    ]
    graphs: list[AdmissibleGraph] = []
    for sizes in _size_splits(edge_count, n, n - 1 + nbar):
        per_vertex = [list(itertools.permutations(pools[j], k)) for j, k in enumerate(sizes)]
        for stars in itertools.product(*per_vertex):
            graphs.append(AdmissibleGraph(n, nbar, tuple(stars)))
    return graphs


def degree_identity(g: AdmissibleGraph) -> bool:
    """(nbar - 1) - Σ_j (#star_j - 1) == 1 - n, i.e. #E = 2n + nbar - 2."""
    return (g.nbar - 1) - sum(k - 1 for k in g.star_sizes) == 1 - g.n


# ========== symmetries ==========


def vertex_permutation_sign(
    g: AdmissibleGraph, sigma: Sequence[int]
) -> tuple[AdmissibleGraph, int]:
    """
    Relabel first-type vertices: new vertex i is old vertex sigma[i-1].

    Returns the relabeled graph and the Koszul sign
    Π_{inverted pairs} (−1)^{k_a k_b} by which its weight differs from the
    original one; the compiled operators agree once the inputs are
    permuted the same way.
    """
    n = g.n
    if sorted(sigma) != list(range(1, n + 1)):
        raise ValueError(f"{list(sigma)} is not a permutation of 1..{n}")
    new_label = {old: new for new, old in enumerate(sigma, start=1)}

    def relabel(t: Target) -> Target:
        return Target("p", new_label[t.index]) if t.kind == "p" else t

    stars = tuple(tuple(relabel(t) for t in g.stars[old - 1]) for old in sigma)
    sizes = g.star_sizes
    exponent = 0
    for a, b in itertools.combinations(range(n), 2):
        if sigma[a] > sigma[b]:
            exponent += sizes[sigma[a] - 1] * sizes[sigma[b] - 1]
    return AdmissibleGraph(n, g.nbar, stars), -1 if exponent % 2 else 1


def canonical_star_order(g: AdmissibleGraph) -> tuple[AdmissibleGraph, int]:
    """
    Sort every star; return the sorted graph and the product of sorting signs.

    Both the weight and the compiled operator of g equal sign times those of
    the sorted graph.
    """
    sign = 1
    stars = []
    for star in g.stars:
        order = sorted(range(len(star)), key=lambda i: star[i])
        sign *= permutation_sign([o + 1 for o in order])
        stars.append(tuple(star[i] for i in order))
    return AdmissibleGraph(g.n, g.nbar, tuple(stars)), sign


# ========== compilation ==========


def compile_graph(g: AdmissibleGraph, xis: Sequence[PolyVector], dim: int | None = None) -> PolyDiffOp:
    """
    The operator U_Γ(ξ1 ⊗ ... ⊗ ξn) of arity nbar.

    With n = 0 the graph has no edges and the operator is the nbar-ary
    product f1·...·f_nbar on R^dim; dim must then be given.

    Each edge carries a summation index; an edge into p_k differentiates
    ξ_k's coefficient, an edge into q_k differentiates argument k. A degree
    mismatch between ξ_j and the star of p_j gives the zero operator.

    Raises:
        DimensionError: If the ξ's live in different dimensions
        ValueError: If len(xis) != n, or n = 0 without dim
    """
    if len(xis) != g.n:
        raise ValueError(f"graph has {g.n} first-type vertices, got {len(xis)} polyvectors")
    if not xis:
        if dim is None:
            raise ValueError("compile_graph needs dim when the graph has no first-type vertices")
        return PolyDiffOp(dim, g.nbar, {((0,) * dim,) * g.nbar: Poly.one(dim)})
    if dim is not None and dim != xis[0].dim:
        raise DimensionError(f"dim={dim} does not match the polyvectors (dim={xis[0].dim})")
    dim = xis[0].dim
    if any(x.dim != dim for x in xis):
        raise DimensionError("polyvectors live in different dimensions")
    if any(x.degree != k for x, k in zip(xis, g.star_sizes)):
        return PolyDiffOp.zero(dim, g.nbar)

    edges = list(g.edges())
    zero_index: MultiIndex = (0,) * dim
    terms: dict[tuple[MultiIndex, ...], Poly] = {}
    for assignment in itertools.product(range(1, dim + 1), repeat=len(edges)):
        labels: list[list[int]] = [[] for _ in range(g.n)]
        incoming_p = [zero_index] * g.n
        incoming_q = [zero_index] * g.nbar
        for (source, target), i in zip(edges, assignment):
            labels[source - 1].append(i)
            unit = unit_index(dim, i - 1)
            if target.kind == "p":
                incoming_p[target.index - 1] = add_index(incoming_p[target.index - 1], unit)
            else:
                incoming_q[target.index - 1] = add_index(incoming_q[target.index - 1], unit)
        coeff = Poly.one(dim)
        for j, xi in enumerate(xis):
            factor = xi.component(labels[j]).derivative(incoming_p[j])
            if factor.is_zero():
                coeff = factor
                break
            coeff = coeff * factor
        if coeff.is_zero():
            continue
        key = tuple(incoming_q)
        terms[key] = terms[key] + coeff if key in terms else coeff
    return PolyDiffOp(dim, g.nbar, terms)


# ========== export ==========


def export_dot(g: AdmissibleGraph) -> str:
    """Graphviz text: solid first-type vertices above a baseline of second-type ones."""
    lines = [f'digraph "{g.key()}" {{', "    rankdir=TB;"]
    for j in range(1, g.n + 1):
        lines.append(f'    p{j} [shape=circle, style=filled, fillcolor=black, fontcolor=white, label="p{j}"];')
    lines.append("    subgraph baseline {")
    lines.append("        rank=same;")
    for k in range(1, g.nbar + 1):
        lines.append(f'        q{k} [shape=circle, style=solid, label="q{k}"];')
    for k in range(1, g.nbar):
        lines.append(f"        q{k} -> q{k + 1} [style=invis];")
    lines.append("    }")
    for j, star in enumerate(g.stars, start=1):
        for pos, t in enumerate(star, start=1):
            lines.append(f'    p{j} -> {t} [label="{pos}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
