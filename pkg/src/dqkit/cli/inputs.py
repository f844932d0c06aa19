"""
JSON input files for the command line.

Formats:
    polyvector   {"dim": 3, "degree": 2, "components": [{"idx": [1, 2], "poly": {...}}]}
    poly         {"dim": 2, "terms": [{"coeff": "1/2", "exps": [1, 0]}]}
    element      {"kind": "tpoly" | "dpoly", "coefficients": [c1, c2, ...]}
                 (ℏ^1 .. ℏ^N coefficients; polyvectors or operators)
    star         {"coefficients": [B0, B1, ...]} (operators, ℏ^0 .. ℏ^N)
    graph        {"n": 1, "nbar": 2, "stars": [["q1", "q2"]]}
    algebra      {"dim": 2, "c": [[[...]]], "unit": [...]}
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from dqkit.algebra.dpoly import PolyDiffOp
from dqkit.algebra.hochschild import FIXTURES, FinDimAlgebra
from dqkit.algebra.maurer_cartan import (
    GaugeElementD,
    GaugeElementT,
    McElementD,
    McElementT,
    mc_series,
)
from dqkit.algebra.tpoly import PolyVector
from dqkit.core.poly import Poly
from dqkit.core.series import HSeries
from dqkit.graphs.graph import AdmissibleGraph, validate


def load_json(path: str | Path) -> Any:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Input file not found: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValueError(f"{path} is not valid JSON: {e}") from e


def load_polyvector(path: str | Path) -> PolyVector:
    return PolyVector.from_dict(load_json(path))


def load_poly(path: str | Path) -> Poly:
    return Poly.from_dict(load_json(path))


def load_graph(path: str | Path) -> AdmissibleGraph:
    return validate(load_json(path))


def load_algebra(source: str) -> FinDimAlgebra:
    """A fixture name (dual, diag2, mat2, z2) or a JSON file path."""
    if source in FIXTURES:
        return FIXTURES[source]()
    return FinDimAlgebra.from_dict(load_json(source))


def load_star(path: str | Path) -> HSeries[PolyDiffOp]:
    return HSeries.from_dict(load_json(path), PolyDiffOp.from_dict)


def _kind_and_coefficients(data: Any) -> tuple[str, list[Any]]:
    if not isinstance(data, dict):
        raise ValueError("element JSON must be an object")
    kind = data.get("kind")
    if kind not in ("tpoly", "dpoly"):
        raise ValueError(f"field 'kind' must be 'tpoly' or 'dpoly', got {kind!r}")
    coeffs = data.get("coefficients")
    if not isinstance(coeffs, list) or not coeffs:
        raise ValueError("field 'coefficients' must be a non-empty list")
    return kind, coeffs


def load_mc_element(path: str | Path, order: int | None = None) -> McElementT | McElementD:
    kind, raw = _kind_and_coefficients(load_json(path))
    n = order if order is not None else len(raw)
    if kind == "tpoly":
        return McElementT(mc_series([PolyVector.from_dict(c) for c in raw], n))
    return McElementD(mc_series([PolyDiffOp.from_dict(c) for c in raw], n))


def load_gauge_element(path: str | Path, order: int | None = None) -> GaugeElementT | GaugeElementD:
    kind, raw = _kind_and_coefficients(load_json(path))
    n = order if order is not None else len(raw)
    if kind == "tpoly":
        return GaugeElementT(mc_series([PolyVector.from_dict(c) for c in raw], n))
    return GaugeElementD(mc_series([PolyDiffOp.from_dict(c) for c in raw], n))


def element_to_dict(element: McElementT | McElementD) -> dict[str, Any]:
    kind = "tpoly" if isinstance(element, McElementT) else "dpoly"
    return {
        "kind": kind,
        "coefficients": [c.to_dict() for c in element.series.coefficients[1:]],
    }
