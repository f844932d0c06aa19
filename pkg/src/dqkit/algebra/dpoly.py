"""
Polydifferential operators on polynomial functions of ℝ^d.

An m-ary operator is a finite sum

    D(f1, ..., fm) = Σ c(x) ∂^{α1} f1 ··· ∂^{αm} fm

stored in normal form: a map from the tuple of per-slot multi-indices
(α1, ..., αm) to the polynomial coefficient c. Partials commute, so two
operators are equal iff their maps are equal.

Degree conventions: the shifted degree of an m-ary operator is m−1, and
every sign rule below uses shifted degrees.

    circle:        f∘g = Σ_i (−1)^{(i−1)(n+1)} f∘_i g
    bracket:       [f, g] = f∘g − (−1)^{(m−1)(n−1)} g∘f
    differential:  δf = [f, μ]

δ = [−, μ] is the negative of the classical alternating-sum differential
on cochains (the two agree up to that global sign, and cohomology is the
same). With it, μ + ν is associative iff δν + ½[ν, ν] = 0 order by order,
and assoc_defect computes exactly that.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterable, Iterator, Mapping, Sequence
from fractions import Fraction
from functools import lru_cache
from typing import Any

from dqkit.algebra.tpoly import PolyVector, TPolyElement, permutation_sign
from dqkit.core.errors import DegreeError, DimensionError, TruncationError
from dqkit.core.poly import MultiIndex, Poly, Scalar, add_index, unit_index
from dqkit.core.series import HSeries

Derivs = tuple[MultiIndex, ...]


@lru_cache(maxsize=4096)
def _compositions(total: int, parts: int) -> tuple[tuple[int, ...], ...]:
    """All ways to write ``total`` as an ordered sum of ``parts`` non-negative ints."""
    if parts == 1:
        return ((total,),)
    out = []
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            out.append((first, *rest))
    return tuple(out)


@lru_cache(maxsize=4096)
def leibniz_split(alpha: MultiIndex, parts: int) -> tuple[tuple[Derivs, int], ...]:
    """
    Distribute ∂^alpha over a product of ``parts`` factors.

    Returns:
        Pairs (γ_0, ..., γ_{parts−1}) with multinomial coefficients, so that
        ∂^alpha(F_0···F_{parts−1}) = Σ coeff · Π ∂^{γ_k} F_k
    """
    per_axis = [_compositions(a, parts) for a in alpha]
    out = []
    for choice in itertools.product(*per_axis):
        gammas = tuple(tuple(axis[k] for axis in choice) for k in range(parts))
        coeff = 1
        for a, axis in zip(alpha, choice):
            coeff *= math.factorial(a) // math.prod(math.factorial(x) for x in axis)
        out.append((gammas, coeff))
    return tuple(out)


class PolyDiffOp:
    """Immutable m-ary polydifferential operator in normal form."""

    __slots__ = ("dim", "arity", "_terms")

    def __init__(self, dim: int, arity: int, terms: Mapping[Sequence[MultiIndex], Poly] | None = None) -> None:
        if arity < 0:
            raise DegreeError(f"arity must be non-negative, got {arity}")
        self.dim = dim
        self.arity = arity
        acc: dict[Derivs, Poly] = {}
        for derivs, coeff in (terms or {}).items():
            key = tuple(tuple(a) for a in derivs)
            if len(key) != arity:
                raise DegreeError(f"term has {len(key)} slots, operator arity is {arity}")
            if any(len(a) != dim for a in key):
                raise DimensionError(f"multi-index length differs from dimension {dim}")
            if coeff.dim != dim:
                raise DimensionError(f"coefficient dimension {coeff.dim} != {dim}")
            if coeff.is_zero():
                continue
            acc[key] = acc[key] + coeff if key in acc else coeff
        self._terms = {k: v for k, v in acc.items() if not v.is_zero()}

    # ----- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int, arity: int) -> PolyDiffOp:
        return cls(dim, arity)

    @classmethod
    def multiplication(cls, dim: int) -> PolyDiffOp:
        """μ(f, g) = f·g."""
        z = (0,) * dim
        return cls(dim, 2, {(z, z): Poly.one(dim)})

    @classmethod
    def identity(cls, dim: int) -> PolyDiffOp:
        return cls(dim, 1, {((0,) * dim,): Poly.one(dim)})

    @classmethod
    def function(cls, f: Poly) -> PolyDiffOp:
        """A function as a 0-cochain."""
        return cls(f.dim, 0, {(): f})

    @classmethod
    def from_vector_field(cls, xi: PolyVector) -> PolyDiffOp:
        """f ↦ ξ(f) for a degree-1 field."""
        if xi.degree != 1:
            raise DegreeError(f"expected a vector field, got degree {xi.degree}")
        return cls(
            xi.dim,
            1,
            {(unit_index(xi.dim, i - 1),): c for (i,), c in xi.components.items()},
        )

    # ----- inspection ---------------------------------------------------

    @property
    def terms(self) -> dict[Derivs, Poly]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Derivs, Poly]]:
        for derivs in sorted(self._terms):
            yield derivs, self._terms[derivs]

    @property
    def shifted_degree(self) -> int:
        return self.arity - 1

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(c.is_constant() for c in self._terms.values())

    def slot_order(self) -> int:
        """Highest derivative order appearing in any slot."""
        return max((sum(a) for d in self._terms for a in d), default=0)

    def __len__(self) -> int:
        return len(self._terms)

    # ----- linear structure ---------------------------------------------

    def _check(self, other: PolyDiffOp) -> None:
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: PolyDiffOp) -> PolyDiffOp:
        if not isinstance(other, PolyDiffOp):
            return NotImplemented
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.arity != other.arity:
            raise DegreeError(f"cannot add arities {self.arity} and {other.arity}")
        terms = dict(self._terms)
        for k, v in other._terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return PolyDiffOp(self.dim, self.arity, terms)

    def __neg__(self) -> PolyDiffOp:
        return PolyDiffOp(self.dim, self.arity, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other: PolyDiffOp) -> PolyDiffOp:
        if not isinstance(other, PolyDiffOp):
            return NotImplemented
        return self + (-other)

    def __mul__(self, factor: Scalar) -> PolyDiffOp:
        if not isinstance(factor, (int, Fraction)):
            return NotImplemented
        return self.scale(factor)

    __rmul__ = __mul__

    def scale(self, factor: Scalar) -> PolyDiffOp:
        return PolyDiffOp(self.dim, self.arity, {k: v.scale(factor) for k, v in self._terms.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyDiffOp):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.dim == other.dim
        return self.dim == other.dim and self.arity == other.arity and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.dim, self.arity, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"PolyDiffOp(dim={self.dim}, arity={self.arity}, terms={len(self._terms)})"

    # ----- evaluation ---------------------------------------------------

    def apply(self, *args: Poly) -> Poly:
        """
        Evaluate the operator on polynomial arguments.

        Args:
            *args: Exactly ``arity`` polynomials

        Returns:
            Σ c · Π_k ∂^{α_k} args_k

        Example:
            >>> x1, x2 = Poly.variable(2, 1), Poly.variable(2, 2)
            >>> PolyDiffOp.multiplication(2).apply(x1, x2) == x1 * x2
            True
        """
        if len(args) != self.arity:
            raise DegreeError(f"operator of arity {self.arity} got {len(args)} arguments")
        for a in args:
            if a.dim != self.dim:
                raise DimensionError(f"argument dimension {a.dim} != {self.dim}")
        cache: dict[tuple[int, MultiIndex], Poly] = {}
        total = Poly.zero(self.dim)
        for derivs, coeff in self._terms.items():
            term = coeff
            for k, alpha in enumerate(derivs):
                key = (k, alpha)
                if key not in cache:
                    cache[key] = args[k].derivative(alpha)
                factor = cache[key]
                if factor.is_zero():
                    term = Poly.zero(self.dim)
                    break
                term = term * factor
            total = total + term
        return total

    # ----- serialization ------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "arity": self.arity,
            "terms": [
                {"coeff": coeff.to_dict(), "derivs": [list(a) for a in derivs]}
                for derivs, coeff in self.items()
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> PolyDiffOp:
        try:
            dim = int(data["dim"])
            arity = int(data["arity"])
            raw = data["terms"]
        except KeyError as e:
            raise ValueError(f"PolyDiffOp JSON is missing field {e.args[0]!r}") from e
        terms: dict[Derivs, Poly] = {}
        for entry in raw:
            try:
                derivs = tuple(tuple(int(x) for x in a) for a in entry["derivs"])
                coeff = Poly.from_dict(entry["coeff"])
            except KeyError as e:
                raise ValueError(f"operator term is missing field {e.args[0]!r}") from e
            terms[derivs] = terms[derivs] + coeff if derivs in terms else coeff
        return cls(dim, arity, terms)


# ========== circle products and brackets ==========


def circle_i(f: PolyDiffOp, g: PolyDiffOp, i: int) -> PolyDiffOp:
    """
    Insert g into slot i (1-based) of f.

    The slot-i derivatives of f are distributed by the Leibniz rule over
    g's coefficient and g's arguments.
    """
    if f.dim != g.dim:
        raise DimensionError(f"dimension mismatch: {f.dim} vs {g.dim}")
    if not 1 <= i <= f.arity:
        raise DegreeError(f"slot {i} out of range 1..{f.arity}")
    m, n = f.arity, g.arity
    terms: dict[Derivs, Poly] = {}
    for f_derivs, f_coeff in f.terms.items():
        alpha = f_derivs[i - 1]
        before, after = f_derivs[: i - 1], f_derivs[i:]
        for g_derivs, g_coeff in g.terms.items():
            for gammas, mult in leibniz_split(alpha, n + 1):
                dc = g_coeff.derivative(gammas[0])
                if dc.is_zero():
                    continue
                inner = tuple(add_index(b, gm) for b, gm in zip(g_derivs, gammas[1:]))
                key = before + inner + after
                value = (f_coeff * dc).scale(mult)
                terms[key] = terms[key] + value if key in terms else value
    return PolyDiffOp(f.dim, m + n - 1, terms)


def circle(f: PolyDiffOp, g: PolyDiffOp) -> PolyDiffOp:
    """f∘g = Σ_i (−1)^{(i−1)(n+1)} f∘_i g."""
    n = g.arity
    total = PolyDiffOp.zero(f.dim, max(f.arity + n - 1, 0))
    for i in range(1, f.arity + 1):
        term = circle_i(f, g, i)
        total = total + (term if ((i - 1) * (n + 1)) % 2 == 0 else -term)
    return total


def gerstenhaber(f: PolyDiffOp, g: PolyDiffOp) -> PolyDiffOp:
    """[f, g] = f∘g − (−1)^{(m−1)(n−1)} g∘f."""
    fg = circle(f, g)
    gf = circle(g, f)
    if ((f.arity - 1) * (g.arity - 1)) % 2 == 0:
        return fg - gf
    return fg + gf


def hochschild_delta(f: PolyDiffOp) -> PolyDiffOp:
    """
    Hochschild differential δf = [f, μ].

    On an n-cochain this is (−1) times the alternating sum
    a1·f(a2..) − f(a1a2, ..) + ... ± f(a1..an)·a_{n+1}.
    """
    return gerstenhaber(f, PolyDiffOp.multiplication(f.dim))


def compose(a: PolyDiffOp, b: PolyDiffOp) -> PolyDiffOp:
    """Composition of 1-ary operators a∘b."""
    if a.arity != 1 or b.arity != 1:
        raise DegreeError("compose expects 1-ary operators")
    return circle_i(a, b, 1)


# ========== HKR and Moyal ==========


def hkr(xi: PolyVector) -> PolyDiffOp:
    """
    HKR map Ψ: polyvector → polydifferential operator.

    Ψ(ξ)(f1, ..., fp) = (1/p!) Σ_I ξ^I Σ_σ sgn(σ) Π_k ∂_{I_σ(k)} f_k

    Example:
        >>> pi = PolyVector.basis(2, [1, 2])
        >>> x1, x2 = Poly.variable(2, 1), Poly.variable(2, 2)
        >>> hkr(pi).apply(x1, x2)
        Poly(2, '1/2')
    """
    p = xi.degree
    if p == 0:
        return PolyDiffOp(xi.dim, 0, {(): xi.component(())})
    norm = Fraction(1, math.factorial(p))
    terms: dict[Derivs, Poly] = {}
    for idx, coeff in xi.components.items():
        for perm in itertools.permutations(range(p)):
            derivs = tuple(unit_index(xi.dim, idx[perm[k]] - 1) for k in range(p))
            value = coeff.scale(norm * permutation_sign(perm))
            terms[derivs] = terms[derivs] + value if derivs in terms else value
    return PolyDiffOp(xi.dim, p, terms)


def _slotwise_product(a: PolyDiffOp, b: PolyDiffOp) -> PolyDiffOp:
    """Product of constant-coefficient operators of equal arity (symbols multiply)."""
    terms: dict[Derivs, Poly] = {}
    for da, ca in a.terms.items():
        for db, cb in b.terms.items():
            key = tuple(add_index(x, y) for x, y in zip(da, db))
            value = ca * cb
            terms[key] = terms[key] + value if key in terms else value
    return PolyDiffOp(a.dim, a.arity, terms)


def _require_constant_bivector(pi: PolyVector) -> None:
    if pi.degree != 2:
        raise DegreeError(f"expected a bivector, got degree {pi.degree}")
    if not pi.is_constant():
        raise ValueError("Moyal product requires a constant bivector")


def poisson_operator(pi: PolyVector) -> PolyDiffOp:
    """(f, g) ↦ Σ_{i,j} Π^{ij} ∂_i f ∂_j g over the full antisymmetric tensor."""
    if pi.degree != 2:
        raise DegreeError(f"expected a bivector, got degree {pi.degree}")
    d = pi.dim
    terms: dict[Derivs, Poly] = {}
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            c = pi.component((i, j))
            if not c.is_zero():
                terms[(unit_index(d, i - 1), unit_index(d, j - 1))] = c
    return PolyDiffOp(d, 2, terms)


def moyal_operator(pi: PolyVector, k: int) -> PolyDiffOp:
    """B_k = (1/k!) (Σ_{i,j} Π^{ij} ∂_i ⊗ ∂_j)^k for constant Π."""
    _require_constant_bivector(pi)
    base = poisson_operator(pi)
    result = PolyDiffOp.multiplication(pi.dim)
    for _ in range(k):
        result = _slotwise_product(result, base)
    return result.scale(Fraction(1, math.factorial(k)))


def moyal_star(pi: PolyVector, order: int) -> HSeries[PolyDiffOp]:
    """The Moyal star product as the series μ + ℏB_1 + ... + ℏ^N B_N."""
    _require_constant_bivector(pi)
    return HSeries(tuple(moyal_operator(pi, k) for k in range(order + 1)))


def moyal(f: Poly, g: Poly, pi: PolyVector, order: int) -> HSeries[Poly]:
    """
    Moyal product f * g through ℏ^order.

    Order-1 coefficient is {f, g}, so f*g − g*f = 2ℏ{f, g} + O(ℏ²).

    Raises:
        ValueError: If Π has non-constant components
    """
    star = moyal_star(pi, order)
    return HSeries(tuple(b.apply(f, g) for b in star))


def star_apply(star: HSeries[PolyDiffOp], a: HSeries[Poly], b: HSeries[Poly]) -> HSeries[Poly]:
    """ℏ-bilinear extension: (a*b)_l = Σ_{i+j+k=l} B_k(a_i, b_j)."""
    if not star.order == a.order == b.order:
        raise TruncationError(
            f"truncation mismatch: {star.order}, {a.order}, {b.order}"
        )
    dim = star[0].dim
    out = []
    for level in range(star.order + 1):
        total = Poly.zero(dim)
        for k in range(level + 1):
            for i in range(level - k + 1):
                total = total + star[k].apply(a[i], b[level - k - i])
        out.append(total)
    return HSeries(tuple(out))


def constant_series(f: Poly, order: int) -> HSeries[Poly]:
    """f viewed as an ℏ-series with no higher terms."""
    return HSeries.monomial(f, 0, order, Poly.zero(f.dim))


# ========== associativity ==========


def associator(star: HSeries[PolyDiffOp]) -> HSeries[PolyDiffOp]:
    """(f*g)*h − f*(g*h) as 3-ary operators per order."""

    def pair(bi: PolyDiffOp, bj: PolyDiffOp) -> PolyDiffOp:
        return circle_i(bi, bj, 1) - circle_i(bi, bj, 2)

    return star.mul(star, pair)


def assoc_defect(nu: HSeries[PolyDiffOp]) -> HSeries[PolyDiffOp]:
    """
    δν + ½[ν, ν] per ℏ-order for a deformation ν of μ.

    Zero through order N iff μ + ν is associative through order N.

    Raises:
        ValueError: If ν has a nonzero ℏ^0 coefficient
    """
    if not nu[0].is_zero():
        raise ValueError("deformation must have zero ℏ^0 coefficient")
    brackets = nu.mul(nu, gerstenhaber)
    return HSeries(
        tuple(
            hochschild_delta(nu[k]) + brackets[k].scale(Fraction(1, 2))
            for k in range(nu.order + 1)
        )
    )


# ========== inhomogeneous elements ==========


class DPolyElement:
    """Finite sum of polydifferential operators of different arities."""

    __slots__ = ("dim", "_parts")

    def __init__(self, dim: int, parts: Iterable[PolyDiffOp] = ()) -> None:
        self.dim = dim
        acc: dict[int, PolyDiffOp] = {}
        for part in parts:
            if part.dim != dim:
                raise DimensionError(f"part dimension {part.dim} != {dim}")
            if part.is_zero():
                continue
            acc[part.arity] = acc[part.arity] + part if part.arity in acc else part
        self._parts = {k: v for k, v in acc.items() if not v.is_zero()}

    @property
    def parts(self) -> dict[int, PolyDiffOp]:
        return dict(self._parts)

    def part(self, arity: int) -> PolyDiffOp:
        return self._parts.get(arity, PolyDiffOp.zero(self.dim, arity))

    def __add__(self, other: DPolyElement) -> DPolyElement:
        return DPolyElement(self.dim, [*self._parts.values(), *other._parts.values()])

    def bracket(self, other: DPolyElement) -> DPolyElement:
        return DPolyElement(
            self.dim,
            [gerstenhaber(a, b) for a in self._parts.values() for b in other._parts.values()],
        )

    def is_zero(self) -> bool:
        return not self._parts

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DPolyElement):
            return NotImplemented
        return self.dim == other.dim and self._parts == other._parts

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self._parts.items())))


def hkr_element(xi: TPolyElement) -> DPolyElement:
    """Ψ applied part by part to an inhomogeneous polyvector."""
    return DPolyElement(xi.dim, [hkr(x) for x in xi.parts.values()])


def commutator_order1(star: HSeries[PolyDiffOp], f: Poly, g: Poly) -> Poly:
    """ℏ¹ coefficient of f*g − g*f; equals 2{f, g} for a deformation quantization."""
    if star.order < 1:
        raise TruncationError("commutator_order1 needs a series of order >= 1")
    return star[1].apply(f, g) - star[1].apply(g, f)
