"""Directional derivatives along slices by trapezoid-rule Cauchy integrals.

For ``g(t) = F(z0 + t b)`` and a circle ``|t - t0| = rho`` sampled at ``N``
equispaced nodes, the discrete Fourier coefficients ``a_k`` approximate
``rho^k g^(k)(t0) / k!`` with error of order ``a_{k+N}`` (aliasing) plus
rounding of order ``eps * max|g|``.  Derivatives are recovered as
``k! * (a_k / rho^k)``.

Radius policies
---------------
``fixed``      rho = value
``clearance``  rho = value * (distance from t0 to the edge of the domain)
``eta_L``      rho = min(value / L(p), 0.9 * clearance); needs the weight L
``adaptive``   rho picked per point from a geometric ladder so the worst
               estimated relative error over orders 0..max_order is minimal

The domain is either the slice disc of the unit ball (``domain="ball"``) or
the disc on which F is analytic (``domain="analytic"``, the whole plane for
entire maps).  One radius serves all orders at a point, so a sequence and
its individual entries agree exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BadParams, CircleEscapesDomain, EtaOutOfRange, OrderTooHigh, OutsideBall
from .geometry import as_direction, as_point, line_disc, slice_domain

POLICIES = ("fixed", "clearance", "eta_L", "adaptive")
DOMAINS = ("ball", "analytic")
EPS = np.finfo(float).eps
_CHUNK = 1024
# reaches down far enough that a zero of multiplicity 12 at distance 1e-4 still
# leaves the low orders above rounding on the smallest circle
_LADDER = 2.0 ** np.arange(-24, 13)


@dataclass(frozen=True)
class QuadratureSpec:
    nodes: int = 256
    radius_policy: str = "adaptive"
    value: float = 0.5
    max_order: int = 20
    domain: str = "analytic"

    def __post_init__(self):
        n = int(self.nodes)
        if n < 8 or n & (n - 1):
            raise BadParams(f"nodes must be a power of two >= 8, got {self.nodes}")
        if self.radius_policy not in POLICIES:
            raise BadParams(f"unknown radius policy {self.radius_policy!r}")
        if self.domain not in DOMAINS:
            raise BadParams(f"unknown quadrature domain {self.domain!r}")
        if self.max_order < 0:
            raise BadParams("max_order must be >= 0")
        if self.radius_policy != "adaptive" and not self.value > 0:
            raise BadParams("radius value must be positive")
        if self.max_order >= n // 2:
            raise BadParams("max_order must stay below nodes / 2")


def index_spec(eta: float = 1.0, nodes: int = 256, max_order: int = 20) -> QuadratureSpec:
    """The rho = eta / L rule used by the index and criteria modules."""
    return QuadratureSpec(nodes=nodes, radius_policy="eta_L", value=eta, max_order=max_order)


# ---------------------------------------------------------------------------
# geometry of the quadrature circle
# ---------------------------------------------------------------------------


def domain_radius(F, spec: QuadratureSpec) -> float:
    return 1.0 if spec.domain == "ball" else float(F.analytic_radius)


def circle_clearance(F, points, b, spec: QuadratureSpec):
    """(clearance, disc radius) around ``t = 0`` for each point, in t units."""
    rad = domain_radius(F, spec)
    c, r = line_disc(points, b, rad)
    if math.isinf(rad):
        return np.full(np.shape(c), np.inf), r
    return r - np.abs(c), r


def _check_circles(F, points, b, radii, spec):
    clear, disc = circle_clearance(F, points, b, spec)
    if np.isinf(disc).all():
        return
    bad = ~(radii <= clear - 1e-6 * disc)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise CircleEscapesDomain(
            f"circle of radius {radii[i]:.6g} around point {i} leaves the {spec.domain} "
            f"domain (clearance {clear[i]:.6g})")


def unit_circle(nodes: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(nodes) / nodes)


def circle_values(F, points, b, radii, nodes: int) -> np.ndarray:
    """``F(p + rho e^{i theta} b)`` on ``nodes`` equispaced angles; shape (P, nodes)."""
    unit = unit_circle(nodes)
    t = radii[:, None] * unit[None, :]
    with np.errstate(over="ignore", invalid="ignore"):
        return F(points[:, None, :] + t[..., None] * b.coords)


def scaled_coeffs(F, points, b, radii, kmax: int, nodes: int) -> np.ndarray:
    """Scaled Taylor coefficients ``a_k = c_k rho^k``; shape (P, kmax+1)."""
    points = np.asarray(points, dtype=np.complex128).reshape(-1, b.n)
    radii = np.broadcast_to(np.asarray(radii, dtype=np.float64), points.shape[:1])
    out = np.empty((points.shape[0], kmax + 1), dtype=np.complex128)
    for s in range(0, points.shape[0], _CHUNK):
        g = circle_values(F, points[s:s + _CHUNK], b, radii[s:s + _CHUNK], nodes)
        out[s:s + _CHUNK] = kernels.taylor_rows(g, kmax)
    return out


# ---------------------------------------------------------------------------
# radius selection
# ---------------------------------------------------------------------------


def _adaptive_radii(F, points, b, spec: QuadratureSpec) -> np.ndarray:
    clear, _ = circle_clearance(F, points, b, spec)
    base = np.minimum(1.0, 0.5 * clear)
    cap = 0.9 * clear
    K = spec.max_order
    N = spec.nodes
    upper = slice(N // 2, N)
    unit = unit_circle(N)
    out = np.empty(points.shape[0])
    for s in range(0, points.shape[0], _CHUNK // 8):
        p = points[s:s + _CHUNK // 8]
        ladder = base[s:s + _CHUNK // 8, None] * _LADDER[None, :]
        ok = ladder <= cap[s:s + _CHUNK // 8, None]
        ok[:, 0] = True
        ladder[:, 0] = np.minimum(ladder[:, 0], cap[s:s + _CHUNK // 8])
        t = ladder[..., None] * unit
        with np.errstate(over="ignore", invalid="ignore"):
            g = F(p[:, None, None, :] + t[..., None] * b.coords)
            a = np.fft.fft(g, axis=-1) / N
            noise = 4.0 * EPS * np.abs(g).max(axis=-1) + np.abs(a[..., upper]).max(axis=-1)
            mag = np.abs(a[..., : K + 1])
            good = ok[..., None] & np.isfinite(mag) & np.isfinite(noise)[..., None]
            # orders that no radius resolves are numerically zero; skip them
            resolved = (good & (mag > 100.0 * noise[..., None])).any(axis=1)
            err = noise[..., None] / np.maximum(mag, 1e-300)
            err = np.where(resolved[:, None, :], err, 0.0)
            score = err.max(axis=-1)
        score = np.where(ok & np.isfinite(score) & np.isfinite(noise), score, np.inf)
        # largest radius within a factor 2 of the best score
        best = score.min(axis=1, keepdims=True)
        near = score <= 2.0 * best
        pick = near.shape[1] - 1 - np.argmax(near[:, ::-1], axis=1)
        out[s:s + _CHUNK // 8] = ladder[np.arange(p.shape[0]), pick]
    return out


def select_radii(F, points, b, spec: QuadratureSpec, L_values=None) -> np.ndarray:
    """Quadrature radius per point according to ``spec.radius_policy``."""
    points = np.asarray(points, dtype=np.complex128).reshape(-1, b.n)
    pol = spec.radius_policy
    if pol == "fixed":
        return np.full(points.shape[0], float(spec.value))
    if pol == "adaptive":
        return _adaptive_radii(F, points, b, spec)
    if pol == "clearance":
        # always a fraction of the ball slice, whatever the analytic domain
        c, r = line_disc(points, b, 1.0)
        return spec.value * (r - np.abs(c))
    clear, _ = circle_clearance(F, points, b, spec)
    if L_values is None:
        raise BadParams("the eta_L policy needs weight values")
    return np.minimum(spec.value / np.asarray(L_values, dtype=np.float64), 0.9 * clear)


def radius_select(z0, b, t0, L, eta: float) -> float:
    """min(eta / L(z0 + t0 b), 0.9 * clearance to the edge of the ball slice)."""
    z0 = as_point(z0)
    b = as_direction(b)
    if not 0 < eta <= L.beta:
        raise EtaOutOfRange(f"eta = {eta} not in (0, {L.beta}]")
    p = z0 + complex(t0) * b.coords
    if not np.linalg.norm(p) < 1.0:
        raise OutsideBall(f"|z0 + t0 b| = {np.linalg.norm(p):.17g} is not < 1")
    dom = slice_domain(z0, b)
    clear = dom.radius - abs(complex(t0) - dom.center)
    return float(min(eta / float(L(p)), 0.9 * clear))


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------


def coeffs_at(F, points, b, kmax: int, spec: QuadratureSpec, L_values=None, check: bool = True):
    """Scaled coefficients and the radii used; the batched core of the module."""
    b = as_direction(b)
    if kmax > spec.max_order:
        raise OrderTooHigh(f"order {kmax} exceeds max_order {spec.max_order}")
    points = np.asarray(points, dtype=np.complex128).reshape(-1, b.n)
    radii = select_radii(F, points, b, spec, L_values)
    if check:
        _check_circles(F, points, b, radii, spec)
    return scaled_coeffs(F, points, b, radii, kmax, spec.nodes), radii


def derivatives_from_coeffs(a: np.ndarray, radii: np.ndarray) -> np.ndarray:
    k = np.arange(a.shape[1])
    fact = np.array([math.factorial(int(j)) for j in k], dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        return (a / radii[:, None] ** k[None, :]) * fact[None, :]


def dirderiv_batch(F, points, b, kmax: int, spec: QuadratureSpec | None = None, L_values=None):
    """Derivatives of orders 0..kmax at every point; shape (P, kmax+1)."""
    spec = spec or QuadratureSpec()
    a, radii = coeffs_at(F, points, b, kmax, spec, L_values)
    return derivatives_from_coeffs(a, radii)


def dirderiv_sequence(F, z0, b, t0, k_max: int, spec: QuadratureSpec | None = None,
                      L=None) -> np.ndarray:
    b = as_direction(b)
    p = as_point(z0) + complex(t0) * b.coords
    L_values = None if L is None else L(p[None, :])
    return dirderiv_batch(F, p[None, :], b, int(k_max), spec, L_values)[0]


def dirderiv(F, z0, b, t0, k: int, spec: QuadratureSpec | None = None, L=None) -> complex:
    spec = spec or QuadratureSpec()
    if k > spec.max_order:
        raise OrderTooHigh(f"order {k} exceeds max_order {spec.max_order}")
    return complex(dirderiv_sequence(F, z0, b, t0, k, spec, L)[k])
