"""
Hyperbolic angle map and its gradient.

    φ(p, z) = Arg((z − p) / (z − p̄))  mod 2π

for a source p in the open upper half-plane and a target z with Im z >= 0.
All functions are vectorized over numpy arrays.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi


def angle(p: complex | np.ndarray, z: complex | np.ndarray) -> float | np.ndarray:
    """
    φ(p, z) in [0, 2π).

    Raises:
        ValueError: If p and z coincide
    """
    p_arr = np.asarray(p, dtype=complex)
    z_arr = np.asarray(z, dtype=complex)
    if np.any(p_arr == z_arr):
        raise ValueError("angle map is undefined for coincident points")
    value = np.mod(np.angle((z_arr - p_arr) / (z_arr - np.conj(p_arr))), TWO_PI)
    return float(value) if value.ndim == 0 else value


def angle_gradient(
    x: np.ndarray, y: np.ndarray, u: np.ndarray, v: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """
    Partial derivatives of φ(x + iy, u + iv) with respect to (x, y, u, v).

    φ = atan2(v − y, u − x) − atan2(v + y, u − x).
    """
    a1 = u - x
    b1 = v - y
    a2 = u - x
    b2 = v + y
    r1 = a1 * a1 + b1 * b1
    r2 = a2 * a2 + b2 * b2
    dx = b1 / r1 - b2 / r2
    dy = -a1 / r1 - a2 / r2
    du = -b1 / r1 + b2 / r2
    dv = a1 / r1 - a2 / r2
    return dx, dy, du, dv


def arg_gradient(dx: np.ndarray, dy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gradient of Arg(dx + i·dy) with respect to (dx, dy)."""
    r = dx * dx + dy * dy
    return -dy / r, dx / r
