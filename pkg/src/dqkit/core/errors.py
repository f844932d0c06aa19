"""
Exception types raised across dqkit.

All of them derive from ValueError so callers that only care about
"bad input" can catch that.
"""

from __future__ import annotations


class DimensionError(ValueError):
    """Operands live in different ambient dimensions."""


class DegreeError(ValueError):
    """A polyvector or operator has the wrong degree/arity for the operation."""


class TruncationError(ValueError):
    """Formal series with different truncation orders were combined."""


class AdmissibilityError(ValueError):
    """A graph violates one clause of the admissibility definition."""

    def __init__(self, clause: int, message: str) -> None:
        super().__init__(f"clause {clause}: {message}")
        self.clause = clause


class EnumerationGuardError(ValueError):
    """Graph enumeration would exceed the configured candidate bound."""

    def __init__(self, count: int, bound: int, formula: str) -> None:
        super().__init__(
            f"{count} raw candidates ({formula}) exceed the enumeration guard {bound}"
        )
        self.count = count
        self.bound = bound


class SizeGuardError(ValueError):
    """A finite-dimensional computation would exceed the size guard."""


class MissingWeightsError(ValueError):
    """A weight source has no value for some graphs."""

    def __init__(self, keys: list[str]) -> None:
        preview = ", ".join(keys[:5])
        more = f" (+{len(keys) - 5} more)" if len(keys) > 5 else ""
        super().__init__(f"missing weights for {len(keys)} graph(s): {preview}{more}")
        self.keys = keys


class CacheError(ValueError):
    """The weight cache file could not be parsed."""


class SamplingError(ValueError):
    """Monte-Carlo sampling failed (coincident points, rejection rate too high)."""
