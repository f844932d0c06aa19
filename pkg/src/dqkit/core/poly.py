"""
Sparse multivariate polynomials over the rationals.

A Poly in d variables is a map from exponent tuples (MultiIndex) to
nonzero Fractions. Variables are numbered 1..d in the public API
(x1, x2, ...) and stored 0-based in exponent tuples.

JSON layout:
    {"dim": 2, "terms": [{"coeff": "3/2", "exps": [1, 0]}, ...]}

Terms are emitted in graded-lexicographic order (highest first), so
serialization is deterministic.

Usage:
    >>> x1, x2 = Poly.variable(2, 1), Poly.variable(2, 2)
    >>> (x1 + x2) * (x1 - x2) == x1 * x1 - x2 * x2
    True
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Mapping
from fractions import Fraction
from typing import Any, Union

from dqkit.core.errors import DimensionError

MultiIndex = tuple[int, ...]
Scalar = Union[int, Fraction]


def format_rational(value: Fraction) -> str:
    """Serialize a rational as "p/q" (denominator always written)."""
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str | int) -> Fraction:
    """Parse "p/q", "p" or an int into a Fraction."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"invalid rational {text!r}: {e}") from e


def grlex_key(exps: MultiIndex) -> tuple[int, MultiIndex]:
    """Sort key for graded-lexicographic order."""
    return (sum(exps), exps)


def add_index(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return tuple(x + y for x, y in zip(a, b))


def unit_index(dim: int, axis: int) -> MultiIndex:
    """Multi-index with a single 1 at 0-based position ``axis``."""
    return tuple(1 if k == axis else 0 for k in range(dim))


class Poly:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("dim", "_terms")

    def __init__(self, dim: int, terms: Mapping[MultiIndex, Scalar] | None = None) -> None:
        if dim < 0:
            raise ValueError(f"dimension must be non-negative, got {dim}")
        self.dim = dim
        clean: dict[MultiIndex, Fraction] = {}
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != dim:
                raise DimensionError(
                    f"exponent tuple {exps} has length {len(exps)}, expected {dim}"
                )
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = Fraction(coeff)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
        self._terms = {k: v for k, v in clean.items() if v}

    # ----- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> Poly:
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, value: Scalar) -> Poly:
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def one(cls, dim: int) -> Poly:
        return cls.constant(dim, 1)

    @classmethod
    def variable(cls, dim: int, i: int) -> Poly:
        """The coordinate function x_i (1-based)."""
        if not 1 <= i <= dim:
            raise DimensionError(f"variable index {i} out of range 1..{dim}")
        return cls(dim, {unit_index(dim, i - 1): 1})

    @classmethod
    def monomial(cls, exps: MultiIndex, coeff: Scalar = 1) -> Poly:
        return cls(len(exps), {tuple(exps): coeff})

    # ----- inspection ---------------------------------------------------

    @property
    def terms(self) -> dict[MultiIndex, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[MultiIndex, Fraction]]:
        """Terms in graded-lexicographic order, highest first."""
        for exps in sorted(self._terms, key=grlex_key, reverse=True):
            yield exps, self._terms[exps]

    def coefficient(self, exps: MultiIndex) -> Fraction:
        return self._terms.get(tuple(exps), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def __len__(self) -> int:
        return len(self._terms)

    # ----- arithmetic ---------------------------------------------------

    def _check(self, other: Poly) -> None:
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: Poly) -> Poly:
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for exps, c in other._terms.items():
            out[exps] = out.get(exps, Fraction(0)) + c
        return Poly(self.dim, out)

    def __neg__(self) -> Poly:
        return Poly(self.dim, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: Poly) -> Poly:
        if not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: Poly | Scalar) -> Poly:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        self._check(other)
        out: dict[MultiIndex, Fraction] = {}
        for ea, ca in self._terms.items():
            for eb, cb in other._terms.items():
                e = add_index(ea, eb)
                out[e] = out.get(e, Fraction(0)) + ca * cb
        return Poly(self.dim, out)

    def __rmul__(self, other: Scalar) -> Poly:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, factor: Scalar) -> Poly:
        f = Fraction(factor)
        if not f:
            return Poly(self.dim)
        return Poly(self.dim, {k: v * f for k, v in self._terms.items()})

    def partial(self, i: int) -> Poly:
        """Formal partial derivative with respect to x_i (1-based)."""
        if not 1 <= i <= self.dim:
            raise DimensionError(f"axis {i} out of range 1..{self.dim}")
        return self.derivative(unit_index(self.dim, i - 1))

    def derivative(self, alpha: MultiIndex) -> Poly:
        """Apply ∂^alpha (0-based multi-index of derivative orders)."""
        if len(alpha) != self.dim:
            raise DimensionError(
                f"multi-index {alpha} has length {len(alpha)}, expected {self.dim}"
            )
        if not any(alpha):
            return self
        out: dict[MultiIndex, Fraction] = {}
        for exps, c in self._terms.items():
            if any(e < a for e, a in zip(exps, alpha)):
                continue
            factor = 1
            for e, a in zip(exps, alpha):
                factor *= math.perm(e, a)
            out[tuple(e - a for e, a in zip(exps, alpha))] = c * factor
        return Poly(self.dim, out)

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError(f"negative exponent {k}: polynomials have no inverses")
        result = Poly.one(self.dim)
        for _ in range(k):
            result = result * self
        return result

    # ----- comparison / display ----------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.dim == other.dim and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"Poly({self.dim}, {str(self)!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.items():
            mono = "*".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}"
                for i, e in enumerate(exps)
                if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # ----- serialization -----------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "terms": [
                {"coeff": format_rational(c), "exps": list(exps)}
                for exps, c in self.items()
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Poly:
        try:
            dim = int(data["dim"])
            raw_terms = data["terms"]
        except KeyError as e:
            raise ValueError(f"Poly JSON is missing field {e.args[0]!r}") from e
        terms: dict[MultiIndex, Fraction] = {}
        for entry in raw_terms:
            try:
                exps = tuple(int(x) for x in entry["exps"])
                coeff = parse_rational(entry["coeff"])
            except KeyError as e:
                raise ValueError(f"Poly term is missing field {e.args[0]!r}") from e
            terms[exps] = terms.get(exps, Fraction(0)) + coeff
        return cls(dim, terms)


def monomials_up_to(dim: int, max_degree: int, *, include_constant: bool = True) -> list[Poly]:
    """All monic monomials of total degree <= max_degree, graded-lex ascending."""
    exps_list: list[MultiIndex] = []

    def rec(prefix: list[int], remaining: int) -> None:
        if len(prefix) == dim:
            exps_list.append(tuple(prefix))
            return
        for e in range(remaining + 1):
            rec(prefix + [e], remaining - e)

    rec([], max_degree)
    exps_list.sort(key=grlex_key)
    return [
        Poly.monomial(e)
        for e in exps_list
        if include_constant or any(e)
    ]
