"""
Operators and polynomials with Monte-Carlo weighted parts.

A WeightedOperator is

    exact + Σ_k w_k · R_k

where the R_k are exact PolyDiffOps and the w_k are estimated weights
keyed by graph key. Operator algebra stays exact; the weights only enter
when a result is read off numerically. Standard errors propagate
linearly: the error budget of a coefficient is Σ_k stderr_k · |R_k[m]|.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction

from dqkit.algebra.dpoly import PolyDiffOp
from dqkit.core.poly import MultiIndex, Poly
from dqkit.graphs.graph import GraphKey
from dqkit.weights.integrate import WeightEstimate


def _merge_weights(
    a: Mapping[GraphKey, WeightEstimate], b: Mapping[GraphKey, WeightEstimate]
) -> dict[GraphKey, WeightEstimate]:
    out = dict(a)
    for key, est in b.items():
        if key in out and out[key] != est:
            raise ValueError(f"conflicting estimates for {key}")
        out[key] = est
    return out


@dataclass(frozen=True)
class ResidualReport:
    """Largest residual coefficient, the propagated error budget and the verdict."""

    residual: float
    error_budget: float
    passed: bool
    exact: bool

    def to_dict(self) -> dict[str, object]:
        return {
            "residual": self.residual,
            "error_budget": "exact" if self.exact else self.error_budget,
            "passed": self.passed,
        }

    @classmethod
    def combine(cls, reports: list[ResidualReport]) -> ResidualReport:
        if not reports:
            return cls(0.0, 0.0, True, True)
        return cls(
            residual=max(r.residual for r in reports),
            error_budget=max(r.error_budget for r in reports),
            passed=all(r.passed for r in reports),
            exact=all(r.exact for r in reports),
        )


@dataclass(frozen=True)
class WeightedPoly:
    exact: Poly
    sampled: Mapping[GraphKey, Poly] = field(default_factory=dict)
    weights: Mapping[GraphKey, WeightEstimate] = field(default_factory=dict)

    def is_exact(self) -> bool:
        return all(p.is_zero() for p in self.sampled.values())

    def _monomials(self) -> set[MultiIndex]:
        monos = set(self.exact.terms)
        for p in self.sampled.values():
            monos.update(p.terms)
        return monos

    def values(self) -> dict[MultiIndex, float]:
        out = {}
        for m in self._monomials():
            v = float(self.exact.coefficient(m))
            for key, p in self.sampled.items():
                v += self.weights[key].value * float(p.coefficient(m))
            out[m] = v
        return out

    def budget(self) -> dict[MultiIndex, float]:
        out = {}
        for m in self._monomials():
            out[m] = sum(
                self.weights[key].stderr * abs(float(p.coefficient(m)))
                for key, p in self.sampled.items()
            )
        return out

    def report(self, tolerance: float) -> ResidualReport:
        """
        Compare every coefficient against ``tolerance`` times its error budget.

        Without sampled parts the verdict is exact: the polynomial must vanish.
        """
        if self.is_exact():
            residual = max((abs(float(c)) for c in self.exact.terms.values()), default=0.0)
            return ResidualReport(residual, 0.0, self.exact.is_zero(), True)
        values = self.values()
        budget = self.budget()
        residual = max((abs(v) for v in values.values()), default=0.0)
        worst_budget = max(budget.values(), default=0.0)
        passed = all(abs(values[m]) <= tolerance * budget[m] + 1e-12 for m in values)
        return ResidualReport(residual, worst_budget, passed, False)


@dataclass(frozen=True)
class WeightedOperator:
    exact: PolyDiffOp
    sampled: Mapping[GraphKey, PolyDiffOp] = field(default_factory=dict)
    weights: Mapping[GraphKey, WeightEstimate] = field(default_factory=dict)

    @classmethod
    def of(cls, op: PolyDiffOp) -> WeightedOperator:
        return cls(op)

    @property
    def dim(self) -> int:
        return self.exact.dim

    @property
    def arity(self) -> int:
        return self.exact.arity

    def is_exact(self) -> bool:
        return all(op.is_zero() for op in self.sampled.values())

    def to_exact(self) -> PolyDiffOp:
        if not self.is_exact():
            raise ValueError("operator has Monte-Carlo weighted parts")
        return self.exact

    def _zero(self) -> PolyDiffOp:
        return PolyDiffOp.zero(self.dim, self.arity)

    def __add__(self, other: WeightedOperator) -> WeightedOperator:
        sampled = dict(self.sampled)
        for key, op in other.sampled.items():
            sampled[key] = sampled[key] + op if key in sampled else op
        return WeightedOperator(
            self.exact + other.exact, sampled, _merge_weights(self.weights, other.weights)
        )

    def __neg__(self) -> WeightedOperator:
        return self.scale(-1)

    def __sub__(self, other: WeightedOperator) -> WeightedOperator:
        return self + (-other)

    def scale(self, factor: int | Fraction) -> WeightedOperator:
        return WeightedOperator(
            self.exact.scale(factor),
            {k: op.scale(factor) for k, op in self.sampled.items()},
            self.weights,
        )

    def map(self, fn: Callable[[PolyDiffOp], PolyDiffOp]) -> WeightedOperator:
        """Apply a linear operator-valued map part by part."""
        return WeightedOperator(
            fn(self.exact), {k: fn(op) for k, op in self.sampled.items()}, self.weights
        )

    def combine(
        self, other: WeightedOperator, fn: Callable[[PolyDiffOp, PolyDiffOp], PolyDiffOp]
    ) -> WeightedOperator:
        """
        Bilinear combination fn(self, other).

        Raises:
            ValueError: If both operands carry sampled parts
        """
        if not self.is_exact() and not other.is_exact():
            raise ValueError("product of two Monte-Carlo weighted terms is not linear in the weights")
        sampled: dict[GraphKey, PolyDiffOp] = {}
        for key, op in self.sampled.items():
            sampled[key] = fn(op, other.exact)
        for key, op in other.sampled.items():
            term = fn(self.exact, op)
            sampled[key] = sampled[key] + term if key in sampled else term
        return WeightedOperator(
            fn(self.exact, other.exact), sampled, _merge_weights(self.weights, other.weights)
        )

    def to_dict(self) -> dict[str, object]:
        if self.is_exact():
            return {"exact": self.exact.to_dict()}
        return {
            "exact": self.exact.to_dict(),
            "sampled": {k: op.to_dict() for k, op in sorted(self.sampled.items())},
            "weights": {k: self.weights[k].to_dict() for k in sorted(self.sampled)},
        }

    def apply(self, *args: Poly) -> WeightedPoly:
        return WeightedPoly(
            self.exact.apply(*args),
            {k: op.apply(*args) for k, op in self.sampled.items()},
            self.weights,
        )

    def report(self, probes: list[tuple[Poly, ...]], tolerance: float) -> ResidualReport:
        """Largest residual over probe tuples."""
        return ResidualReport.combine([self.apply(*args).report(tolerance) for args in probes])
