"""
Truncated formal power series in ℏ.

HSeries[T] stores c_0 .. c_N for any coefficient type T that supports
``+``, ``-`` and unary ``-`` (Poly, Fraction, PolyVector, PolyDiffOp, ...).
Products take an explicit bilinear pairing so the same convolution serves
plain multiplication, operator application and Lie brackets.
"""

from __future__ import annotations

import operator
from collections.abc import Callable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Generic, TypeVar

from dqkit.core.errors import TruncationError

T = TypeVar("T")
U = TypeVar("U")
V = TypeVar("V")

DEFAULT_ORDER = 4


def _is_zero(value: Any) -> bool:
    check = getattr(value, "is_zero", None)
    if callable(check):
        return bool(check())
    return bool(value == 0)


@dataclass(frozen=True)
class HSeries(Generic[T]):
    """
    Formal series c_0 + c_1 ℏ + ... + c_N ℏ^N.

    Attributes:
        coefficients: Exactly N+1 coefficients

    Example:
        >>> a = HSeries((Fraction(1), Fraction(1), Fraction(0)))
        >>> b = HSeries((Fraction(1), Fraction(-1), Fraction(0)))
        >>> a.mul(b).coefficients
        (Fraction(1, 1), Fraction(0, 1), Fraction(-1, 1))
    """

    coefficients: tuple[T, ...]

    def __post_init__(self) -> None:
        if not self.coefficients:
            raise TruncationError("a series needs at least the ℏ^0 coefficient")

    @classmethod
    def padded(cls, coefficients: Sequence[T], order: int, zero: T) -> HSeries[T]:
        """Build a series of the given order, padding with ``zero``."""
        if len(coefficients) > order + 1:
            raise TruncationError(
                f"{len(coefficients)} coefficients do not fit order {order}"
            )
        return cls(tuple(coefficients) + (zero,) * (order + 1 - len(coefficients)))

    @classmethod
    def monomial(cls, value: T, power: int, order: int, zero: T) -> HSeries[T]:
        """value·ℏ^power (zero series if power > order)."""
        coeffs = [zero] * (order + 1)
        if power <= order:
            coeffs[power] = value
        return cls(tuple(coeffs))

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, k: int) -> T:
        return self.coefficients[k]

    def __iter__(self) -> Iterator[T]:
        return iter(self.coefficients)

    def _check(self, other: HSeries[Any]) -> None:
        if self.order != other.order:
            raise TruncationError(
                f"truncation mismatch: order {self.order} vs {other.order}"
            )

    def __add__(self, other: HSeries[T]) -> HSeries[T]:
        self._check(other)
        return HSeries(tuple(a + b for a, b in zip(self, other)))  # type: ignore[operator]

    def __sub__(self, other: HSeries[T]) -> HSeries[T]:
        self._check(other)
        return HSeries(tuple(a - b for a, b in zip(self, other)))  # type: ignore[operator]

    def __neg__(self) -> HSeries[T]:
        return HSeries(tuple(-a for a in self))  # type: ignore[operator]

    def scale(self, factor: int | Fraction) -> HSeries[T]:
        return HSeries(tuple(a * factor for a in self))  # type: ignore[operator]

    def map(self, fn: Callable[[T], U]) -> HSeries[U]:
        return HSeries(tuple(fn(a) for a in self))

    def mul(
        self,
        other: HSeries[U],
        product: Callable[[T, U], V] = operator.mul,
    ) -> HSeries[V]:
        """Cauchy product truncated at the shared order."""
        self._check(other)
        return HSeries(
            tuple(
                _sum(product(self[i], other[k - i]) for i in range(k + 1))
                for k in range(self.order + 1)
            )
        )

    def truncate(self, order: int) -> HSeries[T]:
        if order > self.order:
            raise TruncationError(f"cannot extend order {self.order} to {order}")
        return HSeries(self.coefficients[: order + 1])

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self)

    def to_dict(self, encode: Callable[[T], Any]) -> dict[str, Any]:
        return {"order": self.order, "coefficients": [encode(c) for c in self]}

    @classmethod
    def from_dict(cls, data: dict[str, Any], decode: Callable[[Any], T]) -> HSeries[T]:
        try:
            coeffs = tuple(decode(c) for c in data["coefficients"])
        except KeyError as e:
            raise ValueError(f"series JSON is missing field {e.args[0]!r}") from e
        series = cls(coeffs)
        if "order" in data and int(data["order"]) != series.order:
            raise TruncationError(
                f"declared order {data['order']} does not match "
                f"{len(coeffs)} coefficients"
            )
        return series


def _sum(values: Iterator[V]) -> V:
    it = iter(values)
    total = next(it)
    for v in it:
        total = total + v  # type: ignore[operator]
    return total
