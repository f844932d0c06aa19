"""
Where graph weights come from.

Every source answers for star-sorted graphs; a graph with unsorted stars
gets the weight of its sorted representative times the sorting sign.
"""

from __future__ import annotations

import logging
import math
from collections import defaultdict
from collections.abc import Sequence
from dataclasses import replace
from fractions import Fraction
from typing import Union

from dqkit.core.config import WeightSettings
from dqkit.graphs.graph import AdmissibleGraph, canonical_star_order
from dqkit.weights.cache import WeightCache
from dqkit.weights.integrate import WeightEstimate, weight_batch

logger = logging.getLogger(__name__)

Weight = Union[Fraction, WeightEstimate]


def signed(weight: Weight, sign: int) -> Weight:
    if sign == 1:
        return weight
    if isinstance(weight, Fraction):
        return -weight
    return replace(weight, value=-weight.value)


class WeightSource:
    """Base class: look up one weight, optionally prefetch many."""

    def lookup(self, g: AdmissibleGraph) -> Weight | None:
        raise NotImplementedError

    def prefetch(self, graphs: Sequence[AdmissibleGraph]) -> None:
        """Hook for batch computation; the default does nothing."""

    def weight(self, g: AdmissibleGraph) -> Weight | None:
        rep, sign = canonical_star_order(g)
        found = self.lookup(rep)
        return None if found is None else signed(found, sign)


class ClosedFormWeights(WeightSource):
    """Single-vertex graphs: the sorted star to q1..q_nbar has weight 1/nbar!."""

    def lookup(self, g: AdmissibleGraph) -> Weight | None:
        if g.n != 1 or g.edge_count != g.nbar:
            return None
        return Fraction(1, math.factorial(g.nbar))


class CachedWeights(WeightSource):
    """
    Weights from a WeightCache, integrating misses when settings are given.

    Args:
        cache: Backing cache; updated in place and saved after fresh integration
        settings: Monte-Carlo settings; None disables integration on miss
    """

    def __init__(self, cache: WeightCache, settings: WeightSettings | None = None) -> None:
        self.cache = cache
        self.settings = settings

    def lookup(self, g: AdmissibleGraph) -> Weight | None:
        found = self.cache.get(g.key())
        if found is None and self.settings is not None:
            self.prefetch([g])
            found = self.cache.get(g.key())
        return found

    def prefetch(self, graphs: Sequence[AdmissibleGraph]) -> None:
        if self.settings is None:
            return
        groups: dict[tuple[int, int], list[AdmissibleGraph]] = defaultdict(list)
        seen = set()
        for g in graphs:
            rep, _ = canonical_star_order(g)
            key = rep.key()
            if key in seen or key in self.cache:
                continue
            seen.add(key)
            groups[(rep.n, rep.nbar)].append(rep)
        if not groups:
            return
        s = self.settings
        for (n, nbar), reps in sorted(groups.items()):
            logger.info("integrating %d weight(s) for n=%d nbar=%d", len(reps), n, nbar)
            estimates = weight_batch(
                reps, s.samples, s.seed, s.chunk_size, s.workers, s.rejection_threshold
            )
            for rep, est in zip(reps, estimates):
                self.cache.put(rep.key(), est)
        self.cache.save()


class ChainedWeights(WeightSource):
    """First source that knows the graph wins."""

    def __init__(self, *sources: WeightSource) -> None:
        self.sources = sources

    def lookup(self, g: AdmissibleGraph) -> Weight | None:
        for source in self.sources:
            found = source.lookup(g)
            if found is not None:
                return found
        return None

    def prefetch(self, graphs: Sequence[AdmissibleGraph]) -> None:
        # only graphs nobody earlier in the chain knows
        pending = list(graphs)
        for source in self.sources:
            source.prefetch(pending)
            pending = [g for g in pending if source.lookup(canonical_star_order(g)[0]) is None]
            if not pending:
                return


class EmptyWeights(WeightSource):
    def lookup(self, g: AdmissibleGraph) -> Weight | None:
        return None
