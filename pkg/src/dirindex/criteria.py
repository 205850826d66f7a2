"""Verifiers for the equivalent characterizations of bounded L-index.

Circle maxima use 720 equispaced samples followed by a golden-section polish
around the best sample.  Disc maxima of derivatives are taken on the boundary
circle only (maximum principle), evaluated from one Taylor expansion about
the centre computed on a circle twice as large.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gammaln

from . import kernels
from .errors import (AllCirclesDegenerate, BadLambdas, BadParams, BadRadii,
                     CircleEscapesDomain, EtaOutOfRange)
from .geometry import as_direction, as_point
from .index import DEFAULT_M_MAX, RTOL, _points_of, derivative_table
from .quadrature import (QuadratureSpec, circle_clearance, scaled_coeffs)

CIRCLE_SAMPLES = 720
SCAN_ANGLES = 360
# rounding in a_k, amplified by the re-summation on the smaller circle
RATIO_NOISE = 4096 * np.finfo(float).eps
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class CriterionReport:
    criterion: str
    passed: bool
    constants: dict = field(default_factory=dict)
    worst: dict = field(default_factory=dict)
    grid: str = ""
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"criterion": self.criterion, "passed": bool(self.passed),
                "constants": self.constants, "worst": self.worst, "grid": self.grid,
                "extra": self.extra}


@dataclass(frozen=True)
class CircleModulusStats:
    r: float
    max_mod: float
    max_term: float
    central_index: int


def _cpoint(p):
    return [[float(c.real), float(c.imag)] for c in np.asarray(p).ravel()]


# ---------------------------------------------------------------------------
# circle maxima
# ---------------------------------------------------------------------------


def _modulus(F, points, b, radii, theta):
    t = radii[:, None] * np.exp(1j * theta)
    return np.abs(F(points[:, None, :] + t[..., None] * b.coords))


def circle_extrema(F, points, b, radii, samples: int = CIRCLE_SAMPLES, polish: bool = True):
    """(max |F|, min |F|) on ``|t| = radius`` around each point (batched).

    Each extremum starts from the best equispaced sample and is refined by a
    vectorised golden-section search on the bracketing arc.
    """
    b = as_direction(b)
    points = np.asarray(points, dtype=np.complex128).reshape(-1, b.n)
    radii = np.broadcast_to(np.asarray(radii, dtype=np.float64), points.shape[:1]).copy()
    theta = 2 * np.pi * np.arange(samples) / samples
    vals = _modulus(F, points, b, radii, theta[None, :])
    lo, ilo, hi, ihi = kernels.row_extrema(vals)
    if not polish:
        return hi, lo
    step = 2 * np.pi / samples
    hi = np.maximum(hi, _golden(F, points, b, radii, theta[ihi], step, +1.0))
    lo = np.minimum(lo, _golden(F, points, b, radii, theta[ilo], step, -1.0))
    return hi, lo


def _golden(F, points, b, radii, center, half, sign, tol: float = 1e-10):
    a = center - half
    c = center + half
    x1 = c - _GOLDEN * (c - a)
    x2 = a + _GOLDEN * (c - a)

    def f(x):
        return sign * _modulus(F, points, b, radii, x[:, None])[:, 0]

    f1 = f(x1)
    f2 = f(x2)
    while np.max(c - a) > tol:
        left = f1 > f2  # keep the side with the larger signed value
        a = np.where(left, a, x1)
        c = np.where(left, x2, c)
        nx1 = np.where(left, c - _GOLDEN * (c - a), x2)
        nx2 = np.where(left, x1, a + _GOLDEN * (c - a))
        nf1 = np.where(left, np.nan, f2)
        nf2 = np.where(left, f1, np.nan)
        need1 = np.isnan(nf1)
        need2 = np.isnan(nf2)
        if need1.any():
            nf1 = np.where(need1, f(nx1), nf1)
        if need2.any():
            nf2 = np.where(need2, f(nx2), nf2)
        x1, x2, f1, f2 = nx1, nx2, nf1, nf2
    return sign * np.maximum(f1, f2)


def _require_inside(F, points, b, radii, spec: QuadratureSpec, closed: bool = True):
    clear, disc = circle_clearance(F, points, b, spec)
    if np.isinf(disc).all():
        return
    slack = 1e-12 * np.where(np.isfinite(disc), disc, 1.0)
    bad = (radii > clear + slack) if closed else (radii >= clear)
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise CircleEscapesDomain(f"circle of radius {radii[i]:.6g} leaves the {spec.domain} domain")


def circle_stats(F, z0, b, t0, r: float, series_orders: int = 30,
                 spec: Optional[QuadratureSpec] = None) -> CircleModulusStats:
    """Max modulus, maximal term and central index of the slice series at radius r."""
    spec = spec or QuadratureSpec()
    b = as_direction(b)
    p = (as_point(z0) + complex(t0) * b.coords)[None, :]
    r = float(r)
    if not r > 0:
        raise BadRadii("radius must be positive")
    _require_inside(F, p, b, np.array([r]), spec, closed=False)
    nodes = max(spec.nodes, 1 << int(math.ceil(math.log2(4 * (series_orders + 1)))))
    a = np.abs(scaled_coeffs(F, p, b, np.array([r]), series_orders, nodes)[0])
    mu = float(a.max())
    nu = int(np.flatnonzero(a >= mu * (1.0 - 1e-12))[-1])
    hi, _ = circle_extrema(F, p, b, np.array([r]))
    return CircleModulusStats(r, float(hi[0]), mu, nu)


# ---------------------------------------------------------------------------
# local derivative maximum
# ---------------------------------------------------------------------------


def boundary_derivative_ratios(F, L, b, points, eta: float, kmax: int,
                               spec: Optional[QuadratureSpec] = None, angles: int = SCAN_ANGLES,
                               with_error: bool = False):
    """max_{|t|=eta/L} |g^(k)(t)| / |g^(k)(0)| for k = 0..kmax at each point.

    The series is computed on radius ``rho2 = min(2 rho, 0.95 clearance)`` and
    summed on ``rho`` by an FFT over ``angles`` equispaced angles.  Orders whose
    coefficient sits at rounding level get ``inf``; ``with_error`` also returns
    the estimated relative error of every ratio.
    """
    spec = spec or QuadratureSpec()
    b = as_direction(b)
    points = np.asarray(points, dtype=np.complex128).reshape(-1, b.n)
    Lv = np.asarray(L(points), dtype=np.float64)
    rho = eta / Lv
    clear, _ = circle_clearance(F, points, b, spec)
    rho2 = np.minimum(2.0 * rho, 0.95 * clear)
    if np.any(rho2 < 1.25 * rho):
        raise CircleEscapesDomain("no room for the expansion circle around some point")
    N = spec.nodes
    a = scaled_coeffs(F, points, b, rho2, N - 1, N)
    q = rho / rho2
    m = np.arange(N)
    out = np.empty((points.shape[0], kmax + 1))
    noise = RATIO_NOISE * np.abs(a).max(axis=1)
    err = np.empty_like(out)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        for k in range(kmax + 1):
            mm = m[: N - k]
            # binom(m + k, k) q^m, in logs
            logw = gammaln(mm + k + 1) - gammaln(mm + 1) - gammaln(k + 1)
            w = np.exp(logw[None, :] + mm[None, :] * np.log(q)[:, None])
            seq = a[:, k:] * w
            size = angles * -(-seq.shape[1] // angles)
            vals = np.fft.ifft(seq, n=size, axis=1)[:, :: size // angles] * size
            top = np.abs(vals).max(axis=1)
            err[:, k] = noise / np.abs(a[:, k])
            # coefficients at rounding level carry no ratio information
            out[:, k] = np.where(err[:, k] < 0.5, top / np.abs(a[:, k]), np.inf)
    return (out, err) if with_error else out


def thm5_verify(F, L, b, eta: float, grid, n0_cap: int = DEFAULT_M_MAX,
                spec: Optional[QuadratureSpec] = None) -> CriterionReport:
    """Search k0 <= n0_cap minimising disc-max / centre of |g^(k0)| at each grid point."""
    if not 0 < eta <= L.beta:
        raise EtaOutOfRange(f"eta = {eta} not in (0, {L.beta}]")
    pts, label = _points_of(grid)
    ratios, err = boundary_derivative_ratios(F, L, b, pts, eta, n0_cap, spec, with_error=True)
    ratios = np.where(np.isnan(ratios), np.inf, ratios)
    # smallest order that ties with the minimal ratio within its error bar
    slack = np.minimum(err, 0.5) + 1e-9
    high = (ratios * (1.0 + slack)).min(axis=1, keepdims=True)
    k0 = np.argmax(ratios * (1.0 - slack) <= high, axis=1)
    best = ratios[np.arange(pts.shape[0]), k0]
    i = int(np.argmax(best))
    P1 = float(best[i])
    passed = bool(np.isfinite(best).all())
    return CriterionReport("thm5", passed,
                           {"P1": P1, "n0": int(k0.max()), "eta": float(eta), "n0_cap": int(n0_cap)},
                           {"point": _cpoint(pts[i]), "k0": int(k0[i]), "ratio": P1}, label)


# ---------------------------------------------------------------------------
# two-circle criterion
# ---------------------------------------------------------------------------


def _check_r1r2(r1, r2, beta):
    if not (0 < r1 < r2 <= beta):
        raise BadRadii(f"need 0 < r1 < r2 <= beta, got r1={r1}, r2={r2}, beta={beta}")


def thm8_ratios(F, L, b, r1: float, r2: float, points,
                spec: Optional[QuadratureSpec] = None) -> np.ndarray:
    spec = spec or QuadratureSpec()
    b = as_direction(b)
    _check_r1r2(r1, r2, L.beta)
    points = np.asarray(points, dtype=np.complex128).reshape(-1, b.n)
    Lv = np.asarray(L(points), dtype=np.float64)
    _require_inside(F, points, b, r2 / Lv, spec, closed=True)
    big, _ = circle_extrema(F, points, b, r2 / Lv)
    small, _ = circle_extrema(F, points, b, r1 / Lv)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(big == 0.0, 1.0, big / small)


def thm8_ratio(F, L, b, r1: float, r2: float, z0, t0=0.0,
               spec: Optional[QuadratureSpec] = None) -> float:
    """Max modulus on radius r2/L over max modulus on radius r1/L."""
    b = as_direction(b)
    p = as_point(z0) + complex(t0) * b.coords
    return float(thm8_ratios(F, L, b, r1, r2, p[None, :], spec)[0])


def thm8_sup(F, L, b, r1: float, r2: float, grid,
             spec: Optional[QuadratureSpec] = None) -> CriterionReport:
    pts, label = _points_of(grid)
    ratios = thm8_ratios(F, L, b, r1, r2, pts, spec)
    i = int(np.argmax(np.where(np.isnan(ratios), np.inf, ratios)))
    P1 = float(ratios[i])
    return CriterionReport("thm8", bool(np.isfinite(P1)), {"P1": P1, "r1": r1, "r2": r2},
                           {"point": _cpoint(pts[i]), "ratio": P1}, label)


def thm8_index_bound(r1: float, r2: float, P1: float) -> float:
    """-ln(1 - r1)/ln r2 + ln P1/ln r2."""
    if not (0 < r1 < 1 < r2):
        raise BadRadii(f"need 0 < r1 < 1 < r2, got r1={r1}, r2={r2}")
    if not P1 >= 1:
        raise BadParams(f"P1 must be >= 1, got {P1}")
    return (-math.log(1.0 - r1) + math.log(P1)) / math.log(r2)


# ---------------------------------------------------------------------------
# Hayman-type criterion
# ---------------------------------------------------------------------------


def hayman_verify(F, L, b, p: int, C: float, grid,
                  spec: Optional[QuadratureSpec] = None) -> CriterionReport:
    """|g^(p+1)|/L^(p+1) <= C max_{k<=p} |g^(k)|/L^k on the grid, plus the smallest C."""
    if p < 0 or not C > 0:
        raise BadParams("need p >= 0 and C > 0")
    pts, label = _points_of(grid)
    u, _ = derivative_table(F, L, b, pts, p + 1, spec)
    ratio, top, base = kernels.hayman_rows(u)
    holds = top <= C * base + RTOL * (C * base + 1.0)
    i = int(np.argmax(np.where(np.isnan(ratio), np.inf, ratio)))
    c_min = float(ratio[i])
    return CriterionReport("hayman", bool(holds.all()),
                           {"p": int(p), "C": float(C), "C_min": c_min},
                           {"point": _cpoint(pts[i]), "lhs": float(top[i]), "rhs_max": float(base[i])},
                           label, {"failures": int((~holds).sum())})


# ---------------------------------------------------------------------------
# max <= P min on some circle
# ---------------------------------------------------------------------------


def thm11_maxmin(F, L, b, R: float, z0, t0=0.0, r_scan: int = 64,
                 spec: Optional[QuadratureSpec] = None):
    """Scan radii r in [R/1000, R] (circle r/L); return (r*, min over r of max/min)."""
    spec = spec or QuadratureSpec()
    b = as_direction(b)
    if not 0 < R <= L.beta:
        raise BadRadii(f"need 0 < R <= beta, got {R}")
    p = as_point(z0) + complex(t0) * b.coords
    Lp = float(L(p[None, :])[0])
    rs = np.geomspace(R / 1000.0, R, int(r_scan))
    pts = np.repeat(p[None, :], rs.size, axis=0)
    _require_inside(F, pts, b, rs / Lp, spec, closed=True)
    hi, lo = circle_extrema(F, pts, b, rs / Lp)
    if not np.any(hi > 0):
        raise AllCirclesDegenerate("F vanishes on every scanned circle")
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lo > 0, hi / lo, np.inf)
    j = int(np.argmin(ratio))
    return float(rs[j]), float(ratio[j])


# ---------------------------------------------------------------------------
# proof constants
# ---------------------------------------------------------------------------


def theoretical_constants(N: int, lambda1: float, lambda2: float, eta: float):
    """q = [2 eta (N+1) l2^(N+1) l1^(-N)] + 1 and P1 = (2 l2^N l1^(-N))^q l2^N."""
    if not (0 < lambda1 <= lambda2 < math.inf):
        raise BadLambdas(f"need 0 < lambda1 <= lambda2, got {lambda1}, {lambda2}")
    if not eta > 0 or N < 0:
        raise BadParams("need eta > 0 and N >= 0")
    ratio = (lambda2 / lambda1) ** N
    q = int(math.floor(2.0 * eta * (N + 1) * lambda2 * ratio)) + 1
    P1 = (2.0 * ratio) ** q * lambda2 ** N
    return q, P1
