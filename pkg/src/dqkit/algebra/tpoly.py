"""
Polyvector fields on ℝ^d and the Schouten–Nijenhuis bracket.

A homogeneous polyvector of degree p is stored as components on strictly
increasing index tuples (1-based):

    ξ = Σ_{i1<...<ip} ξ^{i1...ip} ∂_{i1}∧...∧∂_{ip}

The bracket uses odd variables ζ_i standing for ∂_i. With
a•b = Σ_i (a ∂⃖/∂ζ_i)(∂b/∂x_i), where the ζ-derivative acts from the right
(move ζ_i to the end with sign, then strike it),

    [a, b] = a•b − (−1)^{(p1−1)(p2−1)} b•a

This is a graded Lie bracket for the shifted degree p−1 and restricts to
the commutator on vector fields.

Bivector convention:
    {f, g} = Σ_{i<j} Π^{ij} (∂_i f ∂_j g − ∂_j f ∂_i g)

so Π = ∂1∧∂2 gives {x1, x2} = 1. Whenever a full antisymmetric tensor is
needed (graph compilation, Moyal), Π^{ji} = −Π^{ij}.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Mapping, Sequence
from fractions import Fraction
from typing import Any

from dqkit.core.errors import DegreeError, DimensionError
from dqkit.core.poly import Poly, Scalar
from dqkit.core.series import HSeries

Index = tuple[int, ...]


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (0 if it has repeats)."""
    if len(set(seq)) != len(seq):
        return 0
    inversions = sum(
        1 for a, b in itertools.combinations(range(len(seq)), 2) if seq[a] > seq[b]
    )
    return -1 if inversions % 2 else 1


def _merge_sign(left: Index, right: Index) -> int:
    """Sign of ζ_left·ζ_right = ±ζ_sorted(left+right); 0 on overlap."""
    if set(left) & set(right):
        return 0
    inversions = sum(1 for a in left for b in right if a > b)
    return -1 if inversions % 2 else 1


class PolyVector:
    """Homogeneous polyvector field with polynomial coefficients."""

    __slots__ = ("dim", "degree", "_components")

    def __init__(
        self,
        dim: int,
        degree: int,
        components: Mapping[Sequence[int], Poly] | None = None,
    ) -> None:
        if degree < 0:
            raise DegreeError(f"degree must be non-negative, got {degree}")
        self.dim = dim
        self.degree = degree
        comps: dict[Index, Poly] = {}
        for idx, poly in (components or {}).items():
            idx = tuple(idx)
            if len(idx) != degree:
                raise DegreeError(f"index {idx} does not have {degree} entries")
            if any(not 1 <= i <= dim for i in idx):
                raise DimensionError(f"index {idx} out of range 1..{dim}")
            if poly.dim != dim:
                raise DimensionError(f"coefficient dimension {poly.dim} != {dim}")
            sign = permutation_sign(idx)
            if sign == 0 or poly.is_zero():
                continue
            key = tuple(sorted(idx))
            value = poly if sign > 0 else -poly
            comps[key] = comps[key] + value if key in comps else value
        self._components = {k: v for k, v in comps.items() if not v.is_zero()}

    # ----- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int, degree: int) -> PolyVector:
        return cls(dim, degree)

    @classmethod
    def scalar(cls, f: Poly) -> PolyVector:
        return cls(f.dim, 0, {(): f})

    @classmethod
    def basis(cls, dim: int, idx: Sequence[int], coeff: Poly | None = None) -> PolyVector:
        """coeff·∂_{idx[0]}∧...; coeff defaults to 1."""
        return cls(dim, len(idx), {tuple(idx): coeff if coeff is not None else Poly.one(dim)})

    @classmethod
    def vector_field(cls, coefficients: Sequence[Poly]) -> PolyVector:
        """Σ_i X^i ∂_i from a list of d coefficient polynomials."""
        dim = len(coefficients)
        return cls(dim, 1, {(i + 1,): c for i, c in enumerate(coefficients)})

    @classmethod
    def constant_bivector(cls, matrix: Sequence[Sequence[Scalar]]) -> PolyVector:
        """Constant Π with Π^{ij} = matrix[i][j] for i<j; matrix must be antisymmetric."""
        dim = len(matrix)
        for i in range(dim):
            if len(matrix[i]) != dim:
                raise DimensionError("bivector matrix must be square")
            for j in range(dim):
                if Fraction(matrix[i][j]) != -Fraction(matrix[j][i]):
                    raise ValueError(f"matrix is not antisymmetric at ({i + 1}, {j + 1})")
        return cls(
            dim,
            2,
            {
                (i + 1, j + 1): Poly.constant(dim, matrix[i][j])
                for i in range(dim)
                for j in range(i + 1, dim)
            },
        )

    # ----- inspection ---------------------------------------------------

    @property
    def components(self) -> dict[Index, Poly]:
        return dict(self._components)

    def component(self, idx: Sequence[int]) -> Poly:
        """Full antisymmetric tensor entry ξ^{idx} (any index order)."""
        sign = permutation_sign(idx)
        if sign == 0:
            return Poly.zero(self.dim)
        value = self._components.get(tuple(sorted(idx)))
        if value is None:
            return Poly.zero(self.dim)
        return value if sign > 0 else -value

    def is_zero(self) -> bool:
        return not self._components

    def is_constant(self) -> bool:
        return all(c.is_constant() for c in self._components.values())

    def max_coefficient_degree(self) -> int:
        return max((c.degree for c in self._components.values()), default=-1)

    # ----- linear structure ---------------------------------------------

    def _check(self, other: PolyVector) -> None:
        if self.dim != other.dim:
            raise DimensionError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: PolyVector) -> PolyVector:
        if not isinstance(other, PolyVector):
            return NotImplemented
        self._check(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.degree != other.degree:
            raise DegreeError(f"cannot add degrees {self.degree} and {other.degree}")
        comps = dict(self._components)
        for k, v in other._components.items():
            comps[k] = comps[k] + v if k in comps else v
        return PolyVector(self.dim, self.degree, comps)

    def __neg__(self) -> PolyVector:
        return PolyVector(self.dim, self.degree, {k: -v for k, v in self._components.items()})

    def __sub__(self, other: PolyVector) -> PolyVector:
        if not isinstance(other, PolyVector):
            return NotImplemented
        return self + (-other)

    def __mul__(self, factor: Scalar) -> PolyVector:
        if not isinstance(factor, (int, Fraction)):
            return NotImplemented
        return self.scale(factor)

    __rmul__ = __mul__

    def scale(self, factor: Scalar) -> PolyVector:
        return PolyVector(
            self.dim, self.degree, {k: v.scale(factor) for k, v in self._components.items()}
        )

    def times(self, f: Poly) -> PolyVector:
        """Multiply every component by the function f."""
        return PolyVector(self.dim, self.degree, {k: v * f for k, v in self._components.items()})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PolyVector):
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return self.dim == other.dim
        return (
            self.dim == other.dim
            and self.degree == other.degree
            and self._components == other._components
        )

    def __hash__(self) -> int:
        return hash((self.dim, self.degree, frozenset(self._components.items())))

    def __repr__(self) -> str:
        if self.is_zero():
            return f"PolyVector(dim={self.dim}, degree={self.degree}, 0)"
        parts = []
        for idx in sorted(self._components):
            basis = "∧".join(f"∂{i}" for i in idx) or "1"
            parts.append(f"({self._components[idx]}){basis}")
        return f"PolyVector(dim={self.dim}, degree={self.degree}, {' + '.join(parts)})"

    # ----- evaluation ---------------------------------------------------

    def evaluate_on(self, *functions: Poly) -> Poly:
        """ξ(df1, ..., dfp) using the full antisymmetric tensor."""
        if len(functions) != self.degree:
            raise DegreeError(
                f"degree-{self.degree} polyvector needs {self.degree} functions, "
                f"got {len(functions)}"
            )
        total = Poly.zero(self.dim)
        for idx, coeff in self._components.items():
            for perm in itertools.permutations(range(self.degree)):
                term = coeff if permutation_sign(perm) > 0 else -coeff
                for k, f in enumerate(functions):
                    term = term * f.partial(idx[perm[k]])
                total = total + term
        return total

    # ----- serialization ------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        return {
            "dim": self.dim,
            "degree": self.degree,
            "components": [
                {"idx": list(idx), "poly": self._components[idx].to_dict()}
                for idx in sorted(self._components)
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> PolyVector:
        try:
            dim = int(data["dim"])
            degree = int(data["degree"])
            raw = data["components"]
        except KeyError as e:
            raise ValueError(f"PolyVector JSON is missing field {e.args[0]!r}") from e
        comps: dict[Index, Poly] = {}
        for entry in raw:
            try:
                idx = tuple(int(i) for i in entry["idx"])
                poly = Poly.from_dict(entry["poly"])
            except KeyError as e:
                raise ValueError(f"component is missing field {e.args[0]!r}") from e
            comps[idx] = comps[idx] + poly if idx in comps else poly
        return cls(dim, degree, comps)


# ========== wedge and bracket ==========


def wedge(a: PolyVector, b: PolyVector) -> PolyVector:
    """Exterior product; degree a.degree + b.degree."""
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    comps: dict[Index, Poly] = {}
    for ia, ca in a.components.items():
        for ib, cb in b.components.items():
            sign = _merge_sign(ia, ib)
            if sign == 0:
                continue
            key = tuple(sorted(ia + ib))
            term = ca * cb if sign > 0 else -(ca * cb)
            comps[key] = comps[key] + term if key in comps else term
    return PolyVector(a.dim, a.degree + b.degree, comps)


def _right_zeta_derivative(idx: Index, i: int) -> tuple[int, Index]:
    """ζ_idx ∂⃖/∂ζ_i as (sign, remaining index); sign 0 if i ∉ idx."""
    if i not in idx:
        return 0, ()
    k = idx.index(i)
    sign = -1 if (len(idx) - 1 - k) % 2 else 1
    return sign, idx[:k] + idx[k + 1 :]


def _bullet(a: PolyVector, b: PolyVector) -> dict[Index, Poly]:
    out: dict[Index, Poly] = {}
    for i in range(1, a.dim + 1):
        db = {idx: c.partial(i) for idx, c in b.components.items()}
        db = {k: v for k, v in db.items() if not v.is_zero()}
        if not db:
            continue
        for ia, ca in a.components.items():
            s1, rest = _right_zeta_derivative(ia, i)
            if s1 == 0:
                continue
            for ib, cb in db.items():
                s2 = _merge_sign(rest, ib)
                if s2 == 0:
                    continue
                key = tuple(sorted(rest + ib))
                term = ca * cb
                if s1 * s2 < 0:
                    term = -term
                out[key] = out[key] + term if key in out else term
    return out


def sn_bracket(a: PolyVector, b: PolyVector) -> PolyVector:
    """
    Schouten–Nijenhuis bracket of homogeneous polyvectors.

    Args:
        a: Degree p1 polyvector
        b: Degree p2 polyvector

    Returns:
        [a, b] of degree p1 + p2 − 1 (degree 0 zero when both are scalars)

    Example:
        >>> d1 = PolyVector.basis(1, [1])
        >>> x_d1 = PolyVector.basis(1, [1], Poly.variable(1, 1))
        >>> sn_bracket(d1, x_d1) == d1
        True
    """
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    degree = max(a.degree + b.degree - 1, 0)
    ab = _bullet(a, b)
    ba = _bullet(b, a)
    sign = -1 if ((a.degree - 1) * (b.degree - 1)) % 2 else 1
    comps = dict(ab)
    for k, v in ba.items():
        term = -v if sign > 0 else v
        comps[k] = comps[k] + term if k in comps else term
    return PolyVector(a.dim, degree, comps)


# ========== Poisson structures ==========


def _require_bivector(pi: PolyVector) -> None:
    if pi.degree != 2:
        raise DegreeError(f"expected a bivector, got degree {pi.degree}")


def apply_bivector(pi: PolyVector, f: Poly, g: Poly) -> Poly:
    """{f, g} = Σ_{i<j} Π^{ij}(∂_i f ∂_j g − ∂_j f ∂_i g)."""
    _require_bivector(pi)
    total = Poly.zero(pi.dim)
    for (i, j), c in pi.components.items():
        total = total + c * (f.partial(i) * g.partial(j) - f.partial(j) * g.partial(i))
    return total


def jacobiator(pi: PolyVector, f: Poly, g: Poly, h: Poly) -> Poly:
    """{f,{g,h}} + {g,{h,f}} + {h,{f,g}}."""
    _require_bivector(pi)
    return (
        apply_bivector(pi, f, apply_bivector(pi, g, h))
        + apply_bivector(pi, g, apply_bivector(pi, h, f))
        + apply_bivector(pi, h, apply_bivector(pi, f, g))
    )


def is_poisson(pi: PolyVector) -> bool:
    """True iff [Π, Π]_SN vanishes identically."""
    _require_bivector(pi)
    return sn_bracket(pi, pi).is_zero()


def lie_poisson(structure_constants: Sequence[Sequence[Sequence[Scalar]]]) -> PolyVector:
    """
    Linear Poisson bivector of a Lie algebra.

    Args:
        structure_constants: c[k][i][j] = c^k_{ij} (0-based), [e_i, e_j] = Σ_k c^k_{ij} e_k

    Returns:
        Π = Σ_{i<j} Σ_k c^k_{ij} x_k ∂_i∧∂_j

    Raises:
        ValueError: If the constants are not skew in (i, j)
    """
    dim = len(structure_constants)
    comps: dict[Index, Poly] = {}
    for k in range(dim):
        ck = structure_constants[k]
        if len(ck) != dim or any(len(row) != dim for row in ck):
            raise DimensionError(f"structure constants must be {dim}x{dim}x{dim}")
        for i in range(dim):
            for j in range(dim):
                if Fraction(ck[i][j]) != -Fraction(ck[j][i]):
                    raise ValueError(
                        f"structure constants not skew: c^{k + 1}_{i + 1}{j + 1} "
                        f"= {ck[i][j]}, c^{k + 1}_{j + 1}{i + 1} = {ck[j][i]}"
                    )
    for i in range(dim):
        for j in range(i + 1, dim):
            coeff = Poly.zero(dim)
            for k in range(dim):
                c = Fraction(structure_constants[k][i][j])
                if c:
                    coeff = coeff + Poly.variable(dim, k + 1).scale(c)
            comps[(i + 1, j + 1)] = coeff
    return PolyVector(dim, 2, comps)


def lie_derivative(x: PolyVector, xi: PolyVector) -> PolyVector:
    """L_X ξ = [X, ξ] for a vector field X."""
    if x.degree != 1:
        raise DegreeError(f"expected a vector field, got degree {x.degree}")
    return sn_bracket(x, xi)


def formal_poisson_residual(pi: HSeries[PolyVector]) -> HSeries[PolyVector]:
    """Per-order coefficients of [Π_ℏ, Π_ℏ] for Π_ℏ = Π0 + ℏΠ1 + ...."""
    return pi.mul(pi, sn_bracket)


# ========== inhomogeneous elements ==========


class TPolyElement:
    """Finite sum of homogeneous polyvectors of different degrees."""

    __slots__ = ("dim", "_parts")

    def __init__(self, dim: int, parts: Iterable[PolyVector] = ()) -> None:
        self.dim = dim
        acc: dict[int, PolyVector] = {}
        for part in parts:
            if part.dim != dim:
                raise DimensionError(f"part dimension {part.dim} != {dim}")
            if part.is_zero():
                continue
            acc[part.degree] = acc[part.degree] + part if part.degree in acc else part
        self._parts = {k: v for k, v in acc.items() if not v.is_zero()}

    @property
    def parts(self) -> dict[int, PolyVector]:
        return dict(self._parts)

    def part(self, degree: int) -> PolyVector:
        return self._parts.get(degree, PolyVector.zero(self.dim, degree))

    def __add__(self, other: TPolyElement) -> TPolyElement:
        return TPolyElement(self.dim, [*self._parts.values(), *other._parts.values()])

    def bracket(self, other: TPolyElement) -> TPolyElement:
        return TPolyElement(
            self.dim,
            [sn_bracket(a, b) for a in self._parts.values() for b in other._parts.values()],
        )

    def is_zero(self) -> bool:
        return not self._parts

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TPolyElement):
            return NotImplemented
        return self.dim == other.dim and self._parts == other._parts

    def __hash__(self) -> int:
        return hash((self.dim, frozenset(self._parts.items())))
