"""Deterministic sampling of the unit ball and of slice discs.

Ball samples come from a scrambled Sobol sequence: ``2n`` coordinates are
pushed through the normal quantile to get a direction in R^{2n} = C^n and one
more sets the radius as ``u^(1/(2n))`` (uniform volume in real dimension 2n).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm as _normal
from scipy.stats import qmc

from .geometry import Direction, line_disc

DEFAULT_BALL_POINTS = 4096
DEFAULT_SHELLS = (0.9, 0.99)
DEFAULT_SHELL_POINTS = 256


def _sobol(d: int, count: int, seed: int) -> np.ndarray:
    eng = qmc.Sobol(d, scramble=True, seed=np.random.default_rng(seed))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        u = eng.random(count)
    return np.clip(u, 1e-12, 1 - 1e-12)


def _directions(u: np.ndarray, n: int) -> np.ndarray:
    g = _normal.ppf(u)
    v = g[:, :n] + 1j * g[:, n: 2 * n]
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sobol_ball(count: int, n: int, seed: int = 0, radius: float = 1.0) -> np.ndarray:
    u = _sobol(2 * n + 1, count, seed)
    r = radius * u[:, 0] ** (1.0 / (2 * n))
    return _directions(u[:, 1:], n) * r[:, None]


def sphere_points(count: int, n: int, r: float, seed: int = 0) -> np.ndarray:
    u = _sobol(2 * n, count, seed)
    return _directions(u, n) * r


@dataclass(frozen=True, eq=False)
class PointGrid:
    points: np.ndarray
    label: str = "points"

    def __len__(self) -> int:
        return self.points.shape[0]

    def flat_points(self) -> np.ndarray:
        return self.points


@dataclass(frozen=True, eq=False)
class SliceGrid:
    """Base points ``z0`` (S, n) and per-slice parameters ``t`` (S, T)."""

    b: Direction
    z0: np.ndarray
    t: np.ndarray
    label: str = "slices"

    def __len__(self) -> int:
        return self.t.size

    def points(self) -> np.ndarray:
        return self.z0[:, None, :] + self.t[..., None] * self.b.coords

    def flat_points(self) -> np.ndarray:
        return self.points().reshape(-1, self.z0.shape[1])


def default_ball_grid(n: int, seed: int = 0, scale: float = 1.0,
                      shells=DEFAULT_SHELLS) -> PointGrid:
    """Sobol volume sample plus boundary-approach shells."""
    count = max(1, int(round(DEFAULT_BALL_POINTS * scale)))
    parts = [sobol_ball(count, n, seed)]
    shell_count = max(1, int(round(DEFAULT_SHELL_POINTS * scale)))
    for i, r in enumerate(shells):
        parts.append(sphere_points(shell_count, n, r, seed + 1 + i))
    return PointGrid(np.vstack(parts), label=f"ball(scale={scale:g})")


def polar_t_grid(center, radius, fractions=(0.0, 0.3, 0.6, 0.85, 0.95), angles: int = 8,
                 phase: float = 0.0) -> np.ndarray:
    """Polar sample of each slice disc; returns (S, T) complex."""
    center = np.atleast_1d(center)
    radius = np.atleast_1d(radius)
    rings = []
    for f in fractions:
        if f == 0.0:
            rings.append(np.zeros(1, dtype=np.complex128))
        else:
            rings.append(f * np.exp(1j * (phase + 2 * np.pi * np.arange(angles) / angles)))
    unit = np.concatenate(rings)
    return center[:, None] + radius[:, None] * unit[None, :]


def slice_grid_from_bases(z0: np.ndarray, b: Direction, label: str, **polar) -> SliceGrid:
    c, r = line_disc(z0, b)
    keep = np.isfinite(r) & (r > 0)
    z0 = z0[keep]
    t = polar_t_grid(c[keep], r[keep], **polar)
    return SliceGrid(b, z0, t, label)


def line_grid(z0, b: Direction, t_values, label: str = "line") -> SliceGrid:
    z0 = np.asarray(z0, dtype=np.complex128).reshape(1, -1)
    t = np.asarray(t_values, dtype=np.complex128).reshape(1, -1)
    return SliceGrid(b, z0, t, label)
