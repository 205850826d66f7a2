"""Complex n-vector arithmetic, unit-ball membership and slice discs.

Points are plain complex numpy arrays of shape ``(n,)`` (or ``(..., n)`` for
batches).  Directions carry their cached Euclidean norm.

The slice domain ``{t : |z + t b| < 1}`` is an open disc: expanding
``|z + t b|^2 < 1`` and completing the square in ``t`` gives centre
``-<z, b>/|b|^2`` and squared radius ``(1 - |z|^2 + |<z, b>|^2/|b|^2)/|b|^2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirection, OutsideBall, ZeroComponent, ZeroDirection


def as_point(z) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("a point must be a non-empty 1-D vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class Direction:
    coords: np.ndarray
    norm: float

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def scaled(self, theta: complex) -> "Direction":
        return as_direction(theta * self.coords)

    def __repr__(self) -> str:
        return f"Direction({self.coords.tolist()!r})"


def as_direction(b) -> Direction:
    if isinstance(b, Direction):
        return b
    arr = as_point(b)
    nb = float(np.linalg.norm(arr))
    if nb == 0.0:
        raise ZeroDirection("direction b must be non-zero")
    arr.setflags(write=False)
    return Direction(arr, nb)


def inner(z, w):
    """Hermitian product <z, w> = sum z_j conj(w_j) over the last axis."""
    return np.sum(np.asarray(z) * np.conj(np.asarray(w)), axis=-1)


def norm(z):
    return np.linalg.norm(np.asarray(z), axis=-1)


def in_ball(z) -> bool:
    return bool(np.linalg.norm(as_point(z)) < 1.0)


@dataclass(frozen=True)
class SliceDomain:
    center: complex
    radius: float

    def contains(self, t):
        return np.abs(np.asarray(t) - self.center) < self.radius

    def clearance(self, t):
        """Distance from ``t`` to the boundary circle (negative outside)."""
        return self.radius - np.abs(np.asarray(t) - self.center)


def line_disc(z, b: Direction, radius: float = 1.0):
    """Centre and radius of ``{t : |z + t b| < radius}`` (vectorised over z).

    No membership precondition: the radius is NaN where the complex line
    misses the ball.  ``radius = inf`` yields an infinite disc.
    """
    z = np.asarray(z, dtype=np.complex128)
    zb = inner(z, b.coords)
    nb2 = b.norm ** 2
    center = -zb / nb2
    if np.isinf(radius):
        return center, np.full(np.shape(center), np.inf)
    r2 = (radius ** 2 - np.sum(np.abs(z) ** 2, axis=-1) + np.abs(zb) ** 2 / nb2) / nb2
    with np.errstate(invalid="ignore"):
        rad = np.where(r2 > 0, np.sqrt(np.maximum(r2, 0.0)), np.nan)
    return center, rad


def slice_domain(z, b) -> SliceDomain:
    z = as_point(z)
    b = as_direction(b)
    if not np.linalg.norm(z) < 1.0:
        raise OutsideBall(f"|z| = {np.linalg.norm(z):.17g} is not < 1")
    if z.shape != b.coords.shape:
        raise ValueError("dimension mismatch between z and b")
    c, r = line_disc(z, b)
    return SliceDomain(complex(c), float(r))


def clearance(points, b: Direction, radius: float = 1.0):
    """Distance in ``t`` from ``t = 0`` to the edge of the slice disc through each point."""
    c, r = line_disc(points, b, radius)
    return r - np.abs(c)


def hyperplane_decompose(z, b, j0: int):
    """Split ``z = z0 + t b`` with ``z0[j0] == 0`` (``j0`` is 0-based)."""
    z = as_point(z)
    b = as_direction(b)
    if b.coords[j0] == 0:
        raise ZeroComponent(f"b[{j0}] = 0")
    t = z[j0] / b.coords[j0]
    z0 = z - t * b.coords
    z0[j0] = 0.0
    return z0, complex(t)


def hyperplane_decompose_sum(z, b):
    """Split ``z = z0 + t b`` with ``sum(z0) == 0``."""
    z = as_point(z)
    b = as_direction(b)
    sb = b.coords.sum()
    if sb == 0:
        raise DegenerateDirection("sum of direction components is zero")
    t = z.sum() / sb
    return z - t * b.coords, complex(t)


def project_to_hyperplane(points, b: Direction, c, level: complex = 1.0):
    """Slide points along ``b`` onto ``{<z, c> = level}``; returns (z0, t)."""
    c = as_point(c)
    bc = inner(b.coords, c)
    if abs(bc) == 0.0:
        from .errors import DegenerateParams

        raise DegenerateParams("<b, c> = 0: lines along b never leave the hyperplane")
    points = np.asarray(points, dtype=np.complex128)
    shift = (level - inner(points, c)) / bc
    z0 = points + shift[..., None] * b.coords
    return z0, -shift
