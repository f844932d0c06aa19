"""
Hochschild cohomology of finite-dimensional algebras.

An algebra A of dimension m is given by structure constants
c[i][j][k] (e_i e_j = Σ_k c[i][j][k] e_k) and a unit vector. An
n-cochain f: A^⊗n → A is a numpy object array of shape (m,)*n + (m,)
holding Fractions; the last axis is the output coordinate.

Bar differential (classical sign):

    (δf)(a1..a_{n+1}) = a1 f(a2..) + Σ_{i=1}^{n} (−1)^i f(.., a_i a_{i+1}, ..)
                        + (−1)^{n+1} f(a1..an) a_{n+1}

Matrices are exact sympy SparseMatrix objects in the basis
(i1..in, k) ↦ column index (flattened row-major).

Algebra JSON:
    {"dim": 2, "c": [[["1", "0"], ["0", "1"]], [["0", "1"], ["0", "0"]]],
     "unit": ["1", "0"]}
"""

from __future__ import annotations

import itertools
import json
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np
import sympy

from dqkit.core.errors import SizeGuardError
from dqkit.core.poly import format_rational, parse_rational

logger = logging.getLogger(__name__)

DEFAULT_SIZE_GUARD = 100_000

Tensor = dict[tuple[int, ...], Fraction]


def _zeros(shape: tuple[int, ...]) -> np.ndarray:
    arr = np.empty(shape, dtype=object)
    arr.fill(Fraction(0))
    return arr


@dataclass(frozen=True)
class FinDimAlgebra:
    """
    Associative unital algebra given by structure constants.

    Attributes:
        dim: Dimension m
        c: Object array (m, m, m) of Fractions
        unit: Coordinates of 1

    Raises:
        ValueError: If the constants are not associative or the unit law fails
    """

    dim: int
    c: np.ndarray
    unit: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        m = self.dim
        if self.c.shape != (m, m, m):
            raise ValueError(f"structure constants must have shape {(m, m, m)}")
        if len(self.unit) != m:
            raise ValueError(f"unit must have {m} coordinates")
        for i, j, k in itertools.product(range(m), repeat=3):
            lhs = self.mul(self.mul(self.basis(i), self.basis(j)), self.basis(k))
            rhs = self.mul(self.basis(i), self.mul(self.basis(j), self.basis(k)))
            if lhs != rhs:
                raise ValueError(f"structure constants are not associative at ({i}, {j}, {k})")
        one = list(self.unit)
        for i in range(m):
            e = self.basis(i)
            if self.mul(one, e) != e or self.mul(e, one) != e:
                raise ValueError(f"unit law fails for basis element {i}")

    @classmethod
    def from_constants(
        cls, constants: Sequence[Sequence[Sequence[Any]]], unit: Sequence[Any]
    ) -> FinDimAlgebra:
        m = len(constants)
        c = _zeros((m, m, m))
        for i, j, k in itertools.product(range(m), repeat=3):
            c[i, j, k] = Fraction(constants[i][j][k])
        return cls(m, c, tuple(Fraction(u) for u in unit))

    def basis(self, i: int) -> list[Fraction]:
        return [Fraction(int(k == i)) for k in range(self.dim)]

    def mul(self, a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
        m = self.dim
        out = [Fraction(0)] * m
        for i in range(m):
            if not a[i]:
                continue
            for j in range(m):
                if not b[j]:
                    continue
                for k in range(m):
                    out[k] += a[i] * b[j] * self.c[i, j, k]
        return out

    def multiplication_cochain(self) -> np.ndarray:
        return self.c.copy()

    def identity_cochain(self) -> np.ndarray:
        out = _zeros((self.dim, self.dim))
        for i in range(self.dim):
            out[i, i] = Fraction(1)
        return out

    # ----- serialization -----------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        m = self.dim
        return {
            "dim": m,
            "c": [
                [[format_rational(self.c[i, j, k]) for k in range(m)] for j in range(m)]
                for i in range(m)
            ],
            "unit": [format_rational(u) for u in self.unit],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FinDimAlgebra:
        try:
            raw_c = data["c"]
            raw_unit = data["unit"]
        except KeyError as e:
            raise ValueError(f"algebra JSON is missing field {e.args[0]!r}") from e
        constants = [[[parse_rational(x) for x in row] for row in plane] for plane in raw_c]
        algebra = cls.from_constants(constants, [parse_rational(u) for u in raw_unit])
        if "dim" in data and int(data["dim"]) != algebra.dim:
            raise ValueError(f"declared dim {data['dim']} != {algebra.dim}")
        return algebra

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    @classmethod
    def from_file(cls, path: str | Path) -> FinDimAlgebra:
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Algebra file not found: {path}")
        return cls.from_dict(json.loads(path.read_text(encoding="utf-8")))


# ========== fixture algebras ==========


def dual_numbers() -> FinDimAlgebra:
    """k[x]/(x²) with basis (1, x)."""
    c = [[[1, 0], [0, 1]], [[0, 1], [0, 0]]]
    return FinDimAlgebra.from_constants(c, [1, 0])


def diagonal(k: int) -> FinDimAlgebra:
    """k^k with componentwise product (k orthogonal idempotents)."""
    c = [[[int(i == j == l) for l in range(k)] for j in range(k)] for i in range(k)]
    return FinDimAlgebra.from_constants(c, [1] * k)


def matrix_algebra(k: int = 2) -> FinDimAlgebra:
    """k×k matrices with basis E_{ab} ordered row-major."""
    m = k * k
    c = [[[0] * m for _ in range(m)] for _ in range(m)]
    for a, b, cc, d in itertools.product(range(k), repeat=4):
        if b == cc:
            c[a * k + b][cc * k + d][a * k + d] = 1
    unit = [int(a == b) for a in range(k) for b in range(k)]
    return FinDimAlgebra.from_constants(c, unit)


def group_algebra_z2() -> FinDimAlgebra:
    """k[ℤ/2] with basis (e, g), g² = e."""
    c = [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]
    return FinDimAlgebra.from_constants(c, [1, 0])


def square_zero_extension(dim_v: int) -> FinDimAlgebra:
    """k ⊕ V with V·V = 0, basis (1, v1, ..., v_dim_v)."""
    m = dim_v + 1
    c = [[[0] * m for _ in range(m)] for _ in range(m)]
    for i in range(m):
        c[0][i][i] = 1
        c[i][0][i] = 1
    return FinDimAlgebra.from_constants(c, [1] + [0] * dim_v)


FIXTURES: dict[str, Callable[[], FinDimAlgebra]] = {
    "dual": dual_numbers,
    "diag2": lambda: diagonal(2),
    "mat2": lambda: matrix_algebra(2),
    "z2": group_algebra_z2,
}


# ========== bar differential ==========


@dataclass(frozen=True)
class CochainMatrix:
    """Matrix of δ^n: C^n(A, A) → C^{n+1}(A, A)."""

    n: int
    matrix: sympy.SparseMatrix

    @property
    def shape(self) -> tuple[int, int]:
        return (self.matrix.rows, self.matrix.cols)

    def rank(self) -> int:
        return int(self.matrix.rank())


def _guard(m: int, n: int, size_guard: int) -> None:
    size = m ** (n + 2)
    if size > size_guard:
        raise SizeGuardError(f"m^(n+2) = {m}^{n + 2} = {size} exceeds size guard {size_guard}")


def _flat(idx: Sequence[int], k: int, m: int) -> int:
    pos = 0
    for i in idx:
        pos = pos * m + i
    return pos * m + k


def bar_differential(a: FinDimAlgebra, n: int, size_guard: int = DEFAULT_SIZE_GUARD) -> CochainMatrix:
    """
    Exact matrix of δ^n.

    Args:
        a: The algebra
        n: Cochain degree (n >= 0)
        size_guard: Refuse when m^(n+2) exceeds this

    Returns:
        CochainMatrix with m^(n+2) rows and m^(n+1) columns

    Raises:
        SizeGuardError: If the matrix would be too large
    """
    if n < 0:
        raise ValueError(f"cochain degree must be >= 0, got {n}")
    m = a.dim
    _guard(m, n, size_guard)
    c = a.c
    entries: dict[tuple[int, int], Fraction] = {}

    def add(row: int, col: int, value: Fraction) -> None:
        if value:
            entries[(row, col)] = entries.get((row, col), Fraction(0)) + value

    for J in itertools.product(range(m), repeat=n + 1):
        # a1 · f(a2, ..)
        for l, k in itertools.product(range(m), repeat=2):
            add(_flat(J, k, m), _flat(J[1:], l, m), c[J[0], l, k])
        # Σ (−1)^i f(.., a_i a_{i+1}, ..)
        for i in range(1, n + 1):
            sign = -1 if i % 2 else 1
            for s in range(m):
                coeff = c[J[i - 1], J[i], s]
                if not coeff:
                    continue
                idx = J[: i - 1] + (s,) + J[i + 1 :]
                for k in range(m):
                    add(_flat(J, k, m), _flat(idx, k, m), sign * coeff)
        # (−1)^{n+1} f(a1..an) · a_{n+1}
        sign = -1 if (n + 1) % 2 else 1
        for l, k in itertools.product(range(m), repeat=2):
            add(_flat(J, k, m), _flat(J[:n], l, m), sign * c[l, J[n], k])

    rows, cols = m ** (n + 2), m ** (n + 1)
    clean = {key: sympy.Rational(v.numerator, v.denominator) for key, v in entries.items() if v}
    logger.debug("δ^%d: %dx%d matrix with %d nonzeros", n, rows, cols, len(clean))
    return CochainMatrix(n, sympy.SparseMatrix(rows, cols, clean))


def cochain_vector(f: np.ndarray) -> sympy.Matrix:
    """Flatten a cochain array into a column vector (same order as the matrices)."""
    flat = [sympy.Rational(x.numerator, x.denominator) for x in f.reshape(-1)]
    return sympy.Matrix(flat)


def vector_cochain(v: sympy.Matrix, m: int, n: int) -> np.ndarray:
    out = _zeros((m,) * (n + 1))
    for pos, value in enumerate(v):
        q = sympy.Rational(value)
        out.reshape(-1)[pos] = Fraction(int(q.p), int(q.q))
    return out


def apply_differential(a: FinDimAlgebra, f: np.ndarray, size_guard: int = DEFAULT_SIZE_GUARD) -> np.ndarray:
    """δf for an n-cochain array f."""
    n = f.ndim - 1
    delta = bar_differential(a, n, size_guard)
    return vector_cochain(delta.matrix * cochain_vector(f), a.dim, n + 1)


def hh_dim(a: FinDimAlgebra, n: int, size_guard: int = DEFAULT_SIZE_GUARD) -> int:
    """dim HH^n(A, A) = dim ker δ^n − rank δ^{n−1}."""
    delta_n = bar_differential(a, n, size_guard)
    kernel = delta_n.shape[1] - delta_n.rank()
    image = bar_differential(a, n - 1, size_guard).rank() if n > 0 else 0
    return kernel - image


# ========== independent routes for HH^0 and HH^1 ==========


def center_dim(a: FinDimAlgebra) -> int:
    """dim Z(A) from the linear system x e_i = e_i x."""
    m = a.dim
    rows = []
    for i, k in itertools.product(range(m), repeat=2):
        rows.append([a.c[j, i, k] - a.c[i, j, k] for j in range(m)])
    return m - int(sympy.Matrix(rows).rank())


def derivation_dims(a: FinDimAlgebra) -> tuple[int, int]:
    """
    (dim Der(A), dim InnDer(A)) computed directly.

    D is encoded as D[p][q] = coefficient of e_q in D(e_p).
    """
    m = a.dim
    rows = []
    for i, j, k in itertools.product(range(m), repeat=3):
        row = [Fraction(0)] * (m * m)
        for s in range(m):
            row[s * m + k] += a.c[i, j, s]
        for b in range(m):
            row[i * m + b] -= a.c[b, j, k]
            row[j * m + b] -= a.c[i, b, k]
        rows.append(row)
    der = m * m - int(sympy.Matrix(rows).rank())
    inner = m - center_dim(a)
    return der, inner


# ========== bar resolution and its contracting homotopy ==========


def _add_into(out: Tensor, key: tuple[int, ...], value: Fraction) -> None:
    if value:
        total = out.get(key, Fraction(0)) + value
        if total:
            out[key] = total
        else:
            out.pop(key, None)


def bar_d(a: FinDimAlgebra, tensor: Tensor) -> Tensor:
    """d(a0⊗..⊗a_{n+1}) = Σ_{i=0}^{n} (−1)^i a0⊗..⊗a_i a_{i+1}⊗..⊗a_{n+1}."""
    out: Tensor = {}
    for idx, coeff in tensor.items():
        for i in range(len(idx) - 1):
            sign = -1 if i % 2 else 1
            for s in range(a.dim):
                cs = a.c[idx[i], idx[i + 1], s]
                if cs:
                    _add_into(out, idx[:i] + (s,) + idx[i + 2 :], sign * coeff * cs)
    return out


def bar_r(a: FinDimAlgebra, tensor: Tensor) -> Tensor:
    """r(x) = 1 ⊗ x."""
    out: Tensor = {}
    for idx, coeff in tensor.items():
        for u, cu in enumerate(a.unit):
            if cu:
                _add_into(out, (u, *idx), coeff * cu)
    return out


def homotopy_check(
    a: FinDimAlgebra,
    n: int,
    samples: Sequence[Tensor] | None = None,
    differential: Callable[[FinDimAlgebra, Tensor], Tensor] = bar_d,
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> bool:
    """
    Check d_{n+1}∘r_n + r_{n−1}∘d_n = id on A^⊗(n+2).

    Args:
        a: The algebra
        n: Resolution degree (n >= 0)
        samples: Elements of A^⊗(n+2); defaults to all basis tensors
        differential: Override for the bar differential (negative controls)
        size_guard: Refuse when m^(n+2) exceeds this

    Returns:
        True iff the identity holds exactly on every sample
    """
    _guard(a.dim, n, size_guard)
    if samples is None:
        samples = [
            {idx: Fraction(1)} for idx in itertools.product(range(a.dim), repeat=n + 2)
        ]
    for x in samples:
        lhs = differential(a, bar_r(a, x))
        for key, value in bar_r(a, differential(a, x)).items():
            _add_into(lhs, key, value)
        clean = {k: v for k, v in x.items() if v}
        if lhs != clean:
            logger.debug("homotopy identity fails on %s", x)
            return False
    return True


# ========== deformations ==========


def fd_circle(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """f∘g with the Gerstenhaber sign Σ_i (−1)^{(i−1)(n+1)} f∘_i g."""
    m = f.shape[-1]
    p, q = f.ndim - 1, g.ndim - 1
    out = _zeros((m,) * (p + q))
    for idx in itertools.product(range(m), repeat=p + q - 1):
        for i in range(1, p + 1):
            sign = -1 if ((i - 1) * (q + 1)) % 2 else 1
            inner = idx[i - 1 : i - 1 + q]
            for s in range(m):
                gs = g[inner + (s,)]
                if not gs:
                    continue
                outer = idx[: i - 1] + (s,) + idx[i - 1 + q :]
                for k in range(m):
                    fv = f[outer + (k,)]
                    if fv:
                        out[idx + (k,)] += sign * gs * fv
    return out


def fd_bracket(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    p, q = f.ndim - 1, g.ndim - 1
    sign = -1 if ((p - 1) * (q - 1)) % 2 == 0 else 1
    return fd_circle(f, g) + sign * fd_circle(g, f)


def deformation_obstruction(
    a: FinDimAlgebra,
    nu: Sequence[np.ndarray],
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> list[np.ndarray]:
    """
    Per-order residuals [ν_k, μ] + ½ Σ_{i+j=k} [ν_i, ν_j] for μ + Σ ℏ^k ν_k.

    ``nu[k−1]`` is the ℏ^k coefficient. [ν, μ] equals −δν with the bar sign,
    so each residual is the ℏ^k part of the associator of μ + ν.
    """
    _guard(a.dim, 2, size_guard)
    mu = a.multiplication_cochain()
    residuals = []
    for k in range(1, len(nu) + 1):
        res = fd_bracket(nu[k - 1], mu)
        for i in range(1, k):
            res = res + fd_bracket(nu[i - 1], nu[k - i - 1]) * Fraction(1, 2)
        residuals.append(res)
    return residuals


def solve_next_order(
    a: FinDimAlgebra,
    nu: Sequence[np.ndarray],
    size_guard: int = DEFAULT_SIZE_GUARD,
) -> np.ndarray | None:
    """
    Find ν_{N+1} cancelling the next-order obstruction, or None if none exists.

    Solves δν_{N+1} = ½ Σ_{i+j=N+1, i,j>=1} [ν_i, ν_j] exactly.
    """
    m = a.dim
    k = len(nu) + 1
    obstruction = _zeros((m,) * 4)
    for i in range(1, k):
        obstruction = obstruction + fd_bracket(nu[i - 1], nu[k - i - 1]) * Fraction(1, 2)
    delta = bar_differential(a, 2, size_guard).matrix
    try:
        solution, params = sympy.Matrix(delta).gauss_jordan_solve(cochain_vector(obstruction))
    except ValueError:
        logger.info("order-%d obstruction is not a coboundary", k)
        return None
    solution = solution.subs({p: 0 for p in params})
    return vector_cochain(solution, m, 2)
