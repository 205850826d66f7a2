"""Slice zeros, the counting function and the exceptional sets G_r.

Counting uses the argument principle on a circle: with ``t = t0 + r e^{i s}``
the number of zeros inside is the winding number of ``g``, summed from the
phase increments between neighbouring nodes once none exceeds pi/4.  The
trapezoid value of the mean of ``(dg/ds) / (i g)`` (spectral derivative) must
agree within 0.25; otherwise the node count doubles up to 4096.

Root isolation subdivides squares; a square's count is the winding number of
``g`` along its edges, accumulated from phase increments with adaptive steps.
A cluster is accepted once a tiny circle around its contour-moment centroid
holds the whole count of the square.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (BadParams, BudgetExceeded, EmptyComplement, NonIntegerResidue,
                     ZeroOnCircle)
from .geometry import SliceDomain, as_direction, as_point, line_disc, slice_domain
from .quadrature import QuadratureSpec, dirderiv_batch, index_spec, unit_circle

MAX_NODES = 4096
ZERO_GUARD = 1e-9
# largest accepted phase increment between neighbouring circle nodes
MAX_STEP = math.pi / 4
SEARCH_FRACTION = 0.99
MAX_DEPTH = 40


# ---------------------------------------------------------------------------
# argument principle on circles
# ---------------------------------------------------------------------------


def _slice_eval(F, z0, b):
    z0 = np.asarray(z0, dtype=np.complex128)

    def g(t):
        t = np.asarray(t, dtype=np.complex128)
        return F(z0 + t[..., None] * b.coords)

    return g


def _winding_rows(vals: np.ndarray):
    """Mean of (dg/ds)/(i g) per row; the rows are samples on a circle."""
    N = vals.shape[-1]
    k = np.arange(N)
    dv = np.fft.ifft(np.fft.fft(vals, axis=-1) * (1j * k), axis=-1)
    return np.mean(dv / (1j * vals), axis=-1)


def _phase_rows(vals: np.ndarray):
    """(winding number from phase increments, largest increment) per row."""
    steps = np.angle(np.roll(vals, -1, axis=-1) / vals)
    return steps.sum(axis=-1) / (2 * math.pi), np.abs(steps).max(axis=-1)


def counting_rows(F, points, b, radii, nodes: int = 256):
    """Raw argument-principle values around each point; no rounding.

    Returns ``(quad, phase, step, clean)``: the trapezoid value of the
    argument integral, the winding number summed from phase increments, the
    largest increment and whether every sample is finite and non-zero.
    """
    b = as_direction(b)
    points = np.asarray(points, dtype=np.complex128).reshape(-1, b.n)
    radii = np.broadcast_to(np.asarray(radii, dtype=np.float64), points.shape[:1])
    t = radii[:, None] * unit_circle(nodes)[None, :]
    vals = F(points[:, None, :] + t[..., None] * b.coords)
    clean = np.all(np.isfinite(vals) & (vals != 0), axis=1)
    safe = np.where(clean[:, None], vals, 1.0)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        quad = _winding_rows(safe)
    phase, step = _phase_rows(safe)
    return quad, phase, step, clean


def counting_residue(F, z0, b, t0, r: float, spec: Optional[QuadratureSpec] = None):
    """(count, |raw - count|, nodes used) for the disc ``|t - t0| < r``."""
    b = as_direction(b)
    p = (as_point(z0) + complex(t0) * b.coords)[None, :]
    if not r > 0:
        raise BadParams("radius must be positive")
    spec = spec or QuadratureSpec(radius_policy="fixed", value=r)
    if spec.domain == "ball":
        c, R = line_disc(p, b, 1.0)
        if not (r < R[0] - abs(c[0])):
            raise BadParams("counting circle leaves the slice domain")
    nodes = spec.nodes
    while True:
        quad, phase, step, clean = counting_rows(F, p, b, np.array([float(r)]), nodes)
        if not clean[0]:
            raise ZeroOnCircle("g vanishes at a node of the circle")
        if step[0] <= MAX_STEP:
            n = int(round(phase[0]))
            res = abs(quad[0] - n)
            if res < 0.25:
                return n, float(res), nodes
        if nodes >= MAX_NODES:
            if step[0] > MAX_STEP:
                raise ZeroOnCircle(f"phase still jumps by {step[0]:.3g} rad between {nodes} nodes")
            raise NonIntegerResidue(f"argument-principle value {quad[0]:.6g} is not near an integer")
        nodes *= 2


def counting_function(F, z0, b, t0, r: float, spec: Optional[QuadratureSpec] = None) -> int:
    """Number of zeros of ``t -> F(z0 + t b)`` in ``|t - t0| < r`` with multiplicity."""
    return counting_residue(F, z0, b, t0, r, spec)[0]


def count_many(F, points, b, radii, nodes: int = 256):
    """Counts around many points from phase increments; ``-1`` marks a zero on or near the circle.

    Only the winding number is used here, so circles near clusters of
    high-multiplicity zeros (huge dynamic range of ``|g|``) still count.
    """
    b = as_direction(b)
    points = np.asarray(points, dtype=np.complex128).reshape(-1, b.n)
    radii = np.broadcast_to(np.asarray(radii, dtype=np.float64), points.shape[:1]).copy()
    out = np.full(points.shape[0], -1, dtype=np.int64)
    todo = np.arange(points.shape[0])
    n = nodes
    while todo.size:
        step = np.empty(todo.size)
        phase = np.empty(todo.size)
        clean = np.empty(todo.size, dtype=bool)
        chunk = max(1, (1 << 20) // n)
        for s in range(0, todo.size, chunk):
            idx = todo[s:s + chunk]
            _, phase[s:s + chunk], step[s:s + chunk], clean[s:s + chunk] = counting_rows(
                F, points[idx], b, radii[idx], n)
        ok = clean & (step <= MAX_STEP)
        out[todo[ok]] = np.round(phase[ok]).astype(np.int64)
        todo = todo[clean & ~ok]
        if n >= MAX_NODES:
            break
        n *= 2
    return out


# ---------------------------------------------------------------------------
# root isolation
# ---------------------------------------------------------------------------


class _EdgeZero(Exception):
    pass


def _segment_phase(g, a: complex, c: complex, guard: float, depth: int = 0) -> float:
    s = a + (c - a) * np.linspace(0.0, 1.0, 33)
    v = g(s)
    if np.any(np.abs(v) <= guard):
        raise _EdgeZero
    d = np.angle(v[1:] / v[:-1])
    total = 0.0
    for j in range(d.size):
        if abs(d[j]) <= math.pi / 3:
            total += d[j]
        elif depth < 30:
            total += _segment_phase(g, s[j], s[j + 1], guard, depth + 1)
        else:
            # the phase still jumps on a tiny step: a zero sits on the edge
            raise _EdgeZero
    return total


def _box_count(g, center: complex, half: float, guard: float) -> int:
    corners = [center + half * complex(x, y) for x, y in ((-1, -1), (1, -1), (1, 1), (-1, 1))]
    phase = sum(_segment_phase(g, corners[i], corners[(i + 1) % 4], guard) for i in range(4))
    return int(round(phase / (2 * math.pi)))


def _circle_moments(g, center: complex, radius: float, nodes: int = 256):
    """(count, sum of zeros) inside the circle, or None if not resolved."""
    while nodes <= MAX_NODES:
        t = center + radius * unit_circle(nodes)
        v = g(t)
        mag = np.abs(v)
        if not mag.min() > ZERO_GUARD * mag.max():
            return None
        k = np.arange(nodes)
        dv = np.fft.ifft(np.fft.fft(v) * (1j * k))
        ratio = dv / (1j * v)
        raw = np.mean(ratio)
        n = int(round(raw.real))
        if abs(raw - n) < 0.25:
            return n, np.mean(t * ratio)
        nodes *= 2
    return None


@dataclass
class SliceZeroSet:
    zeros: list
    search_domain: SliceDomain
    residual_tolerance: float
    residuals: list = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(m for _, m in self.zeros)

    def to_dict(self) -> dict:
        return {"zeros": [{"location": [a.real, a.imag], "multiplicity": m, "residual": r}
                          for (a, m), r in zip(self.zeros, self.residuals)],
                "search_domain": {"center": [self.search_domain.center.real,
                                             self.search_domain.center.imag],
                                  "radius": self.search_domain.radius},
                "residual_tolerance": self.residual_tolerance}


def default_region(z0, b, fraction: float = SEARCH_FRACTION) -> SliceDomain:
    dom = slice_domain(z0, b)
    return SliceDomain(dom.center, fraction * dom.radius)


def slice_zeros(F, z0, b, region: Optional[SliceDomain] = None, tol: float = 1e-10) -> SliceZeroSet:
    """Zeros of ``t -> F(z0 + t b)`` inside ``region`` (a disc), with multiplicities."""
    b = as_direction(b)
    z0 = as_point(z0)
    region = region or default_region(z0, b)
    if isinstance(region, tuple):
        region = SliceDomain(complex(region[0]), float(region[1]))
    g = _slice_eval(F, z0, b)
    R = region.radius
    scale = np.abs(g(region.center + R * unit_circle(64))).max()
    guard = 1e-300
    if scale == 0:
        return SliceZeroSet([], region, 0.0, [])
    eps = max(tol, 1e-8 * R)
    found = []
    # slightly inflated, off-centre root square so zeros rarely sit on an edge
    stack = [(region.center + 1e-7 * R * complex(1.0, 0.618), (1.0 + 3.1e-3) * R, 0)]
    while stack:
        c, h, depth = stack.pop()
        if depth > MAX_DEPTH:
            raise BudgetExceeded(f"subdivision deeper than {MAX_DEPTH} levels")
        try:
            m = _box_count(g, c, h, guard)
        except _EdgeZero:
            stack.append((c + 1e-3 * h * complex(0.7, 0.3), h * 1.001, depth + 1))
            continue
        if m <= 0:
            continue
        mom = _circle_moments(g, c, h * math.sqrt(2) * 1.02)
        if mom is not None and mom[0] == m:
            cen = mom[1] / m
            small = _circle_moments(g, cen, eps)
            if small is not None and small[0] == m:
                if m == 1:
                    cen = _polish_simple(g, cen, eps)
                found.append((complex(cen), m))
                continue
        if h < tol:
            found.append((complex(c), m))
            continue
        q = h / 2
        for dx, dy in ((-1, -1), (1, -1), (-1, 1), (1, 1)):
            stack.append((c + q * complex(dx, dy), q, depth + 1))
    inside = [(a, m) for a, m in found if abs(a - region.center) < R]
    inside.sort(key=lambda am: (am[0].real, am[0].imag))
    res = [float(abs(g(np.array([a]))[0])) for a, _ in inside]
    return SliceZeroSet(inside, region, float(1e-8 * scale), res)


def _polish_simple(g, a: complex, r: float) -> complex:
    """Refine a simple zero by the first contour moment on shrinking circles."""
    for _ in range(3):
        r = r / 16
        mom = _circle_moments(g, a, r)
        if mom is None or mom[0] != 1:
            break
        a = mom[1]
    return a


# ---------------------------------------------------------------------------
# exceptional sets
# ---------------------------------------------------------------------------


@dataclass
class ExceptionalSet:
    r: float
    zero_set: SliceZeroSet
    radii: np.ndarray
    z0: np.ndarray
    b: object

    def contains(self, t):
        t = np.asarray(t, dtype=np.complex128)
        if not self.zero_set.zeros:
            return np.zeros(t.shape, dtype=bool)
        a = np.array([z for z, _ in self.zero_set.zeros])
        d = np.abs(t[..., None] - a)
        return np.any(d <= self.radii, axis=-1)


def exceptional_set(F, L, b, z0, r: float, region: Optional[SliceDomain] = None) -> ExceptionalSet:
    b = as_direction(b)
    z0 = as_point(z0)
    zs = slice_zeros(F, z0, b, region)
    if zs.zeros:
        a = np.array([z for z, _ in zs.zeros])
        radii = r / np.asarray(L(z0 + a[:, None] * b.coords), dtype=np.float64)
    else:
        radii = np.zeros(0)
    return ExceptionalSet(float(r), zs, radii, z0, b)


def exceptional_contains(E: ExceptionalSet, z0, b, t, L=None) -> bool:
    """Whether ``z0 + t b`` lies in one of the discs ``|t - a_k| <= r / L(z0 + a_k b)``."""
    return bool(np.all(E.contains(t))) if np.ndim(t) == 0 else E.contains(t)


# ---------------------------------------------------------------------------
# logarithmic derivative / counting criterion
# ---------------------------------------------------------------------------


def _slices(grid):
    """(z0 (S, n), t (S, T)) for a SliceGrid; a point grid becomes one slice per point."""
    if hasattr(grid, "z0") and hasattr(grid, "t"):
        return np.asarray(grid.z0), np.asarray(grid.t), grid.label
    pts = np.asarray(getattr(grid, "points", grid), dtype=np.complex128)
    return pts, np.zeros((pts.shape[0], 1), dtype=np.complex128), getattr(grid, "label", "points")


def complement_points(F, L, b, r: float, grid):
    """Grid points outside G_r(F) as (points, excluded count, label).

    Raises EmptyComplement when nothing survives.
    """
    b = as_direction(b)
    z0s, ts, label = _slices(grid)
    keep_pts = []
    excluded = 0
    for s in range(z0s.shape[0]):
        E = exceptional_set(F, L, b, z0s[s], r)
        inside = E.contains(ts[s])
        excluded += int(inside.sum())
        keep = ts[s][~inside]
        keep_pts.append(z0s[s][None, :] + keep[:, None] * b.coords)
    pts = np.vstack(keep_pts) if keep_pts else np.zeros((0, b.n), dtype=np.complex128)
    if pts.shape[0] == 0:
        raise EmptyComplement("every grid point lies in the exceptional set")
    return pts, excluded, label


def thm12_logderiv(F, L, b, r: float, grid, spec: Optional[QuadratureSpec] = None):
    """sup of |dF/db| / (|F| L) over grid points outside the exceptional set G_r."""
    from .criteria import CriterionReport

    b = as_direction(b)
    pts, excluded, label = complement_points(F, L, b, r, grid)
    Lv = np.asarray(L(pts), dtype=np.float64)
    d = dirderiv_batch(F, pts, b, 1, spec or index_spec(), Lv)
    mag = np.abs(d[:, 0])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(np.abs(d[:, 1]) == 0, 0.0, np.abs(d[:, 1]) / (mag * Lv))
    tiny = mag <= 1e-300
    i = int(np.argmax(np.where(np.isnan(ratio), np.inf, ratio)))
    P = float(ratio[i])
    passed = bool(np.isfinite(P) and not tiny.any())
    return CriterionReport("thm12_logderiv", passed, {"P": P, "r": float(r)},
                           {"point": [[c.real, c.imag] for c in pts[i]], "ratio": P}, label,
                           {"excluded": excluded, "kept": int(pts.shape[0])})


def thm12_counting(F, L, b, r: float, grid, spec: Optional[QuadratureSpec] = None):
    """max over the grid of n(r / L(p), p, 1/F); per-slice maxima in ``extra``."""
    from .criteria import CriterionReport

    b = as_direction(b)
    z0s, ts, label = _slices(grid)
    pts = (z0s[:, None, :] + ts[..., None] * b.coords).reshape(-1, b.n)
    Lv = np.asarray(L(pts), dtype=np.float64)
    nodes = (spec or QuadratureSpec()).nodes
    counts = count_many(F, pts, b, r / Lv, nodes).reshape(ts.shape)
    skipped = int((counts < 0).sum())
    per = counts.max(axis=1)
    flat = int(np.argmax(counts))
    n_hat = int(counts.ravel()[flat]) if counts.size else 0
    return CriterionReport("thm12_counting", True, {"n_hat": n_hat, "r": float(r)},
                           {"point": [[c.real, c.imag] for c in pts[flat]], "count": n_hat}, label,
                           {"per_slice": [int(x) for x in per], "skipped_zero_on_circle": skipped})
