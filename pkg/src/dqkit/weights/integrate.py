"""
Monte-Carlo weights of admissible graphs.

The weight of a graph Γ with #E = 2n + nbar − 2 edges is

    W_Γ = (2π)^{−#E} ∫ ∧_e dφ_e

over the gauge slice q1 = 0, q2 = 1 of the configuration space, with no
1/Π_j(#star_j)! factor. Edges are ordered by (source, star position)
and slice coordinates are ordered (x_p1, y_p1, ..., x_pn, y_pn, q3, ...,
q_nbar). The top form is the determinant of the Jacobian of the edge
angles in those coordinates.

The estimator is the importance-sampling mean of det J / density. Samples
are drawn in a fixed chunk plan; chunk i uses its own Philox stream seeded
with (seed, i), so results depend only on (seed, samples, chunk_size).
"""

from __future__ import annotations

import logging
import math
import os
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from dqkit.core.errors import SamplingError
from dqkit.graphs.graph import AdmissibleGraph
from dqkit.weights.angle import angle_gradient, arg_gradient
from dqkit.weights.sampler import ConfigBatch, gauge_fix_sample, min_separation

logger = logging.getLogger(__name__)

COINCIDENCE_FLOOR = 1e-9
DEFAULT_CHUNK_SIZE = 65_536
DEFAULT_REJECTION_THRESHOLD = 1e-3


@dataclass(frozen=True)
class WeightEstimate:
    """Monte-Carlo estimate with its standard error."""

    value: float
    stderr: float
    samples: int
    seed: int
    rejected: int = 0

    def __post_init__(self) -> None:
        if self.stderr < 0:
            raise ValueError(f"stderr must be non-negative, got {self.stderr}")
        if self.samples <= 0:
            raise ValueError(f"samples must be positive, got {self.samples}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "samples": self.samples,
            "seed": self.seed,
            "rejected": self.rejected,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> WeightEstimate:
        return cls(
            value=float(data["value"]),
            stderr=float(data["stderr"]),
            samples=int(data["samples"]),
            seed=int(data["seed"]),
            rejected=int(data.get("rejected", 0)),
        )


def wedge_weight_closed_form(nbar: int) -> Fraction:
    """Weight of the graph with one vertex joined to every q: 1/nbar!."""
    if nbar < 1:
        raise ValueError(f"nbar must be >= 1, got {nbar}")
    return Fraction(1, math.factorial(nbar))


# ========== top-form densities ==========


def _check_top_form(g: AdmissibleGraph) -> None:
    dim = 2 * g.n + g.nbar - 2
    if g.edge_count != dim:
        raise ValueError(
            f"graph has {g.edge_count} edges, a top form on the {dim}-dimensional slice needs {dim}"
        )
    if g.n < 1:
        raise ValueError("weights need at least one first-type vertex")
    if g.nbar < 2:
        raise SamplingError(f"gauge fixing needs nbar >= 2, got {g.nbar}")


def jacobian(g: AdmissibleGraph, batch: ConfigBatch) -> np.ndarray:
    """Stack of Jacobians ∂(φ_e)/∂(slice coordinates), shape (B, #E, #E)."""
    size = batch.size
    dim = 2 * g.n + g.nbar - 2
    jac = np.zeros((size, g.edge_count, dim))
    for row, (source, target) in enumerate(g.edges()):
        p = batch.p[:, source - 1]
        if target.kind == "p":
            z = batch.p[:, target.index - 1]
        else:
            z = batch.q[:, target.index - 1].astype(complex)
        dx, dy, du, dv = angle_gradient(p.real, p.imag, z.real, z.imag)
        jac[:, row, 2 * (source - 1)] += dx
        jac[:, row, 2 * (source - 1) + 1] += dy
        if target.kind == "p":
            jac[:, row, 2 * (target.index - 1)] += du
            jac[:, row, 2 * (target.index - 1) + 1] += dv
        elif target.index >= 3:
            jac[:, row, 2 * g.n + target.index - 3] += du
    return jac


def form_density(g: AdmissibleGraph, p: Sequence[complex], q: Sequence[float]) -> float:
    """
    Value of ∧_e dφ_e at one configuration (q1 = 0, q2 = 1).

    Raises:
        ValueError: On a wrong edge count
        SamplingError: If two points are closer than the coincidence floor
    """
    _check_top_form(g)
    p_arr = np.asarray(p, dtype=complex).reshape(1, -1)
    q_arr = np.asarray(q, dtype=float).reshape(1, -1)
    if p_arr.shape[1] != g.n or q_arr.shape[1] != g.nbar:
        raise ValueError(f"configuration shape does not match n={g.n}, nbar={g.nbar}")
    batch = ConfigBatch(p_arr, q_arr, np.ones(1))
    if min_separation(batch)[0] < COINCIDENCE_FLOOR:
        raise SamplingError("configuration points are closer than the coincidence floor")
    return float(np.linalg.det(jacobian(g, batch))[0])


# ========== chunked Monte-Carlo driver ==========


@dataclass(frozen=True)
class _ChunkStats:
    count: int
    mean: np.ndarray
    m2: np.ndarray
    rejected: int


def _chunk_plan(samples: int, chunk_size: int) -> list[int]:
    full, rest = divmod(samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, index])))


def _merge(parts: Sequence[_ChunkStats]) -> _ChunkStats:
    """Chan et al. pairwise combination, applied in chunk order."""
    count, mean, m2, rejected = 0, parts[0].mean * 0.0, parts[0].m2 * 0.0, 0
    for part in parts:
        total = count + part.count
        delta = part.mean - mean
        mean = mean + delta * (part.count / total)
        m2 = m2 + part.m2 + delta * delta * (count * part.count / total)
        count = total
        rejected += part.rejected
    return _ChunkStats(count, mean, m2, rejected)


def _run_chunks(
    evaluate: Callable[[np.random.Generator, int], tuple[np.ndarray, np.ndarray]],
    samples: int,
    seed: int,
    chunk_size: int,
    workers: int,
    rejection_threshold: float,
) -> _ChunkStats:
    """
    Evaluate chunks in parallel and merge them deterministically.

    ``evaluate(rng, size)`` returns (values (k, size), rejected mask (size,)).
    """
    if samples <= 0:
        raise ValueError(f"samples must be positive, got {samples}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    plan = _chunk_plan(samples, chunk_size)

    def run(index: int) -> _ChunkStats:
        values, rejected = evaluate(_chunk_rng(seed, index), plan[index])
        values = np.where(rejected, 0.0, values)
        mean = values.mean(axis=1)
        m2 = ((values - mean[:, None]) ** 2).sum(axis=1)
        return _ChunkStats(plan[index], mean, m2, int(rejected.sum()))

    max_workers = workers if workers > 0 else (os.cpu_count() or 1)
    logger.debug("%d samples in %d chunks on %d workers", samples, len(plan), max_workers)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        parts = list(pool.map(run, range(len(plan))))
    stats = _merge(parts)

    rate = stats.rejected / samples
    if rate > rejection_threshold:
        raise SamplingError(
            f"rejection rate {rate:.2e} exceeds threshold {rejection_threshold:.2e}"
        )
    if stats.rejected:
        logger.info("rejected %d of %d samples (%.2e)", stats.rejected, samples, rate)
    return stats


def _estimates(stats: _ChunkStats, prefactor: float, seed: int) -> list[WeightEstimate]:
    n = stats.count
    variance = stats.m2 / (n - 1) if n > 1 else stats.m2 * 0.0
    return [
        WeightEstimate(
            value=float(prefactor * mean),
            stderr=float(prefactor * math.sqrt(var / n)),
            samples=n,
            seed=seed,
            rejected=stats.rejected,
        )
        for mean, var in zip(stats.mean, variance)
    ]


def weight_batch(
    graphs: Sequence[AdmissibleGraph],
    samples: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 0,
    rejection_threshold: float = DEFAULT_REJECTION_THRESHOLD,
) -> list[WeightEstimate]:
    """
    Estimate weights of several graphs on one shared sample stream.

    All graphs must have the same (n, nbar).

    Raises:
        ValueError: On mixed shapes or wrong edge counts
        SamplingError: If nbar < 2 or too many samples hit the coincidence floor
    """
    if not graphs:
        return []
    n, nbar = graphs[0].n, graphs[0].nbar
    for g in graphs:
        if (g.n, g.nbar) != (n, nbar):
            raise ValueError("weight_batch needs graphs with a common (n, nbar)")
        _check_top_form(g)

    def evaluate(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        batch = gauge_fix_sample(n, nbar, size, rng)
        rejected = (min_separation(batch) < COINCIDENCE_FLOOR) | ~(batch.density > 0)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            values = np.stack(
                [np.linalg.det(jacobian(g, batch)) / batch.density for g in graphs]
            )
        rejected = rejected | ~np.all(np.isfinite(values), axis=0)
        return values, rejected

    stats = _run_chunks(evaluate, samples, seed, chunk_size, workers, rejection_threshold)
    prefactor = (2.0 * np.pi) ** -(2 * n + nbar - 2)
    estimates = _estimates(stats, prefactor, seed)
    for g, est in zip(graphs, estimates):
        logger.debug("W[%s] = %.6f ± %.6f", g.key(), est.value, est.stderr)
    return estimates


def integrate_weight(
    g: AdmissibleGraph,
    samples: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 0,
    rejection_threshold: float = DEFAULT_REJECTION_THRESHOLD,
) -> WeightEstimate:
    """
    Monte-Carlo weight of one graph.

    Args:
        g: Graph with 2n + nbar − 2 edges, nbar >= 2
        samples: Number of samples
        seed: Non-negative RNG seed
        chunk_size: Samples per RNG stream
        workers: Thread count (0 = all cores); does not affect the result
        rejection_threshold: Maximum tolerated fraction of coincident samples

    Returns:
        WeightEstimate with value, stderr, samples, seed. The value is the
        normalized integral (2π)^{−#E} ∫ ∧_e dφ_e with no 1/Π_j(#star_j)!
        factor; the wedge graph gives 1/nbar!.
    """
    return weight_batch([g], samples, seed, chunk_size, workers, rejection_threshold)[0]


# ========== three-point vanishing check ==========


def _vanishing_sample(size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(ψ, p3, density) with p1 = 0, p2 = e^{iψ}; p3 from a full-plane mixture at p1, p2."""
    psi = 2.0 * np.pi * rng.random(size)
    p2 = np.exp(1j * psi)
    choice = rng.integers(0, 2, size)
    r = np.tan(0.5 * np.pi * rng.random(size))
    theta = 2.0 * np.pi * rng.random(size)
    centre = np.where(choice == 0, 0.0 + 0.0j, p2)
    p3 = centre + r * np.exp(1j * theta)

    def component(z: np.ndarray) -> np.ndarray:
        d = np.abs(z)
        return 2.0 / (np.pi * (1.0 + d * d)) / (2.0 * np.pi * d)

    density = (0.5 * (component(p3) + component(p3 - p2))) / (2.0 * np.pi)
    return psi, p3, density


def _vanishing_jacobian(
    edges: Sequence[tuple[int, int]], psi: np.ndarray, p3: np.ndarray
) -> np.ndarray:
    """Rows d Arg(p_i − p_j) in coordinates (ψ, x3, y3)."""
    size = psi.shape[0]
    points = [np.zeros(size, dtype=complex), np.exp(1j * psi), p3]
    # derivative of each point with respect to (ψ, x3, y3)
    tangents = [
        [np.zeros(size, dtype=complex)] * 3,
        [1j * np.exp(1j * psi), np.zeros(size, dtype=complex), np.zeros(size, dtype=complex)],
        [np.zeros(size, dtype=complex), np.ones(size, dtype=complex), 1j * np.ones(size, dtype=complex)],
    ]
    jac = np.zeros((size, 3, 3))
    for row, (i, j) in enumerate(edges):
        diff = points[i - 1] - points[j - 1]
        gx, gy = arg_gradient(diff.real, diff.imag)
        for col in range(3):
            t = tangents[i - 1][col] - tangents[j - 1][col]
            jac[:, row, col] = gx * t.real + gy * t.imag
    return jac


def vanishing_check(
    edges: Sequence[tuple[int, int]],
    samples: int,
    seed: int,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    workers: int = 0,
    rejection_threshold: float = DEFAULT_REJECTION_THRESHOLD,
) -> WeightEstimate:
    """
    (2π)^{−3} ∫ d Arg(p_i − p_j) ∧ ... over three points in ℂ modulo translation and scaling.

    Args:
        edges: Three ordered pairs (i, j) of vertex labels in {1, 2, 3}

    Returns:
        Estimate expected to vanish; exactly 0 when two edges join the same pair

    Raises:
        ValueError: On loops, labels outside {1, 2, 3} or a count other than three
    """
    pairs = [tuple(int(v) for v in e) for e in edges]
    if len(pairs) != 3:
        raise ValueError(f"need exactly three edges, got {len(pairs)}")
    for i, j in pairs:
        if not (1 <= i <= 3 and 1 <= j <= 3):
            raise ValueError(f"edge ({i}, {j}) uses a vertex outside 1..3")
        if i == j:
            raise ValueError(f"edge ({i}, {j}) is a loop")
    if len({frozenset(p) for p in pairs}) < 3:
        logger.debug("repeated edge in %s: form vanishes identically", pairs)
        return WeightEstimate(0.0, 0.0, samples, seed)

    def evaluate(rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
        psi, p3, density = _vanishing_sample(size, rng)
        sep = np.minimum(np.abs(p3), np.abs(p3 - np.exp(1j * psi)))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            values = np.linalg.det(_vanishing_jacobian(pairs, psi, p3)) / density  # type: ignore[arg-type]
        rejected = (sep < COINCIDENCE_FLOOR) | ~np.isfinite(values)
        return values[None, :], rejected

    stats = _run_chunks(evaluate, samples, seed, chunk_size, workers, rejection_threshold)
    return _estimates(stats, (2.0 * np.pi) ** -3, seed)[0]
