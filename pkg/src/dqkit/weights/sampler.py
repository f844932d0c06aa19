"""
Gauge-fixed sampling of configuration spaces.

Configurations of n points in the upper half-plane and nbar >= 2 ordered
reals are taken modulo z ↦ az + b; the slice q1 = 0, q2 = 1 leaves
2n + nbar − 2 real coordinates.

Proposal (sequential, every factor normalized):

    q_m = q_{m−1} + t,  t half-Cauchy: 2 / (π (1 + t²))
    p_j ~ equal mixture of
        - half-disk polar components at each q_k: p = q_k + r e^{iθ},
          θ ~ U(0, π), r half-Cauchy; density g(r) / (π r)
        - hyperbolic-disk components at each earlier p_k: w = ρ e^{iθ},
          ρ ~ U(0, 1), θ ~ U(0, 2π), p = (p_k − p̄_k w) / (1 − w);
          density 4 y_k² / (2π ρ |p − p̄_k|⁴)

The 1/r behaviour of each component matches the angle forms near
collisions, and the r⁻³ tails match their decay at infinity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dqkit.core.errors import SamplingError


@dataclass(frozen=True)
class ConfigBatch:
    """
    A batch of gauge-fixed configurations.

    Attributes:
        p: Complex array (B, n), all with positive imaginary part
        q: Real array (B, nbar), q[:, 0] = 0, q[:, 1] = 1, increasing
        density: Proposal density at each sample, shape (B,)
    """

    p: np.ndarray
    q: np.ndarray
    density: np.ndarray

    @property
    def size(self) -> int:
        return int(self.q.shape[0])


def half_cauchy(u: np.ndarray) -> np.ndarray:
    return np.tan(0.5 * np.pi * u)


def half_cauchy_density(t: np.ndarray) -> np.ndarray:
    return 2.0 / (np.pi * (1.0 + t * t))


def _polar_density(z: np.ndarray, centre: np.ndarray) -> np.ndarray:
    r = np.abs(z - centre)
    return half_cauchy_density(r) / (np.pi * r)


def _disk_density(z: np.ndarray, centre: np.ndarray) -> np.ndarray:
    y = centre.imag
    rho = np.abs((z - centre) / (z - np.conj(centre)))
    return 4.0 * y * y / (2.0 * np.pi * rho * np.abs(z - np.conj(centre)) ** 4)


def _p_density(z: np.ndarray, q: np.ndarray, earlier: np.ndarray) -> np.ndarray:
    """Mixture density of one p given q (B, nbar) and earlier p's (B, j)."""
    total = np.zeros(z.shape, dtype=float)
    for k in range(q.shape[1]):
        total += _polar_density(z, q[:, k].astype(complex))
    for k in range(earlier.shape[1]):
        total += _disk_density(z, earlier[:, k])
    return total / (q.shape[1] + earlier.shape[1])


def gauge_fix_sample(n: int, nbar: int, size: int, rng: np.random.Generator) -> ConfigBatch:
    """
    Draw ``size`` configurations from the proposal.

    Raises:
        SamplingError: If nbar < 2
    """
    if nbar < 2:
        raise SamplingError(f"gauge fixing q1 = 0, q2 = 1 needs nbar >= 2, got {nbar}")
    q = np.zeros((size, nbar))
    q[:, 1] = 1.0
    density = np.ones(size)
    for m in range(2, nbar):
        t = half_cauchy(rng.random(size))
        q[:, m] = q[:, m - 1] + t
        density *= half_cauchy_density(t)

    p = np.zeros((size, n), dtype=complex)
    for j in range(n):
        components = nbar + j
        choice = rng.integers(0, components, size)
        u1 = rng.random(size)
        u2 = rng.random(size)
        z = np.empty(size, dtype=complex)
        polar = half_cauchy(u1) * np.exp(1j * np.pi * u2)
        for k in range(nbar):
            mask = choice == k
            z[mask] = q[mask, k] + polar[mask]
        w = u1 * np.exp(2j * np.pi * u2)
        for k in range(j):
            mask = choice == nbar + k
            c = p[mask, k]
            z[mask] = (c - np.conj(c) * w[mask]) / (1.0 - w[mask])
        density *= _p_density(z, q, p[:, :j])
        p[:, j] = z
    return ConfigBatch(p, q, density)


def sampler_density(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """
    Proposal density at given configurations.

    Args:
        p: Complex array (n,) or (B, n)
        q: Real array (nbar,) or (B, nbar) with q1 = 0, q2 = 1

    Returns:
        Density values, shape () or (B,)
    """
    p_arr = np.atleast_2d(np.asarray(p, dtype=complex))
    q_arr = np.atleast_2d(np.asarray(q, dtype=float))
    density = np.ones(q_arr.shape[0])
    for m in range(2, q_arr.shape[1]):
        t = q_arr[:, m] - q_arr[:, m - 1]
        density *= np.where(t > 0, half_cauchy_density(t), 0.0)
    for j in range(p_arr.shape[1]):
        density *= _p_density(p_arr[:, j], q_arr, p_arr[:, :j])
    if np.ndim(p) == 1:
        return density[0]
    return density


def min_separation(batch: ConfigBatch) -> np.ndarray:
    """Smallest pairwise distance per sample, including distance to the real line."""
    p, q = batch.p, batch.q
    sep = np.full(batch.size, np.inf)
    for j in range(p.shape[1]):
        sep = np.minimum(sep, p[:, j].imag)
        for k in range(j):
            sep = np.minimum(sep, np.abs(p[:, j] - p[:, k]))
    for k in range(1, q.shape[1]):
        sep = np.minimum(sep, q[:, k] - q[:, k - 1])
    return sep
