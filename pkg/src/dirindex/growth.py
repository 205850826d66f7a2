"""Growth along rays ``t -> z0 + t e^{i theta} b`` for bounded-index functions.

The weight integral ``int_0^r {(N+1) L + N (-L'_t)^+ / L} dt`` is computed with
adaptive quadrature after the change of variables ``s = -ln(1 - t/R)``, which
turns the typical ``1/(1 - t)`` blow-up at the ray exit into a smooth, slowly
growing integrand.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import BadParams, NonFiniteWeight, NotNormalized
from .geometry import as_direction, as_point, clearance
from .index import normalized_table
from .quadrature import QuadratureSpec

QUAD_EPSREL = 1e-10
QUAD_TARGET = 1e-8
DEFAULT_THETAS = 64


@dataclass(frozen=True)
class RadialRay:
    z0: np.ndarray
    theta: float
    b: object
    R: float

    @property
    def u(self) -> np.ndarray:
        return np.exp(1j * self.theta) * self.b.coords

    def points(self, r) -> np.ndarray:
        r = np.atleast_1d(np.asarray(r, dtype=np.float64))
        return self.z0[None, :] + r[:, None] * self.u[None, :]


def ray_exit(z0, b, theta: float) -> float:
    """Smallest positive t with ``|z0 + t e^{i theta} b| = 1``."""
    z0 = as_point(z0)
    b = as_direction(b)
    u = np.exp(1j * theta) * b.coords
    A = float(np.sum(np.abs(u) ** 2))
    B = float(np.real(np.sum(z0 * np.conj(u))))
    C = float(np.sum(np.abs(z0) ** 2)) - 1.0
    if C >= 0:
        raise BadParams("z0 must lie inside the unit ball")
    disc = math.sqrt(B * B - A * C)
    # stable root of A t^2 + 2 B t + C = 0 with t > 0
    return -C / (B + disc) if B > 0 else (disc - B) / A


def make_ray(z0, b, theta: float) -> RadialRay:
    z0 = as_point(z0)
    b = as_direction(b)
    return RadialRay(z0, float(theta), b, ray_exit(z0, b, theta))


# ---------------------------------------------------------------------------
# the weight integral
# ---------------------------------------------------------------------------


def _weight_along(L, ray: RadialRay):
    def ell(t):
        return np.asarray(L(ray.points(t)), dtype=np.float64)

    return ell


def weight_rate(L, ray: RadialRay, t, h: Optional[float] = None):
    """d/dt L(z0 + t e^{i theta} b): closed form when the weight has one, else central differences."""
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if getattr(L, "ddt", None) is not None:
        p = ray.points(t)
        return np.asarray(L.ddt(p, np.broadcast_to(ray.u, p.shape)), dtype=np.float64)
    ell = _weight_along(L, ray)
    if h is None:
        h = 1e-6 * np.maximum(np.minimum(t, ray.R - t), 1e-3 * ray.R)
    return (ell(t + h) - ell(t - h)) / (2 * h)


def growth_integral(L, ray: RadialRay, r: float, N: int, h: Optional[float] = None,
                    r_from: float = 0.0, quad_points: Optional[int] = None) -> float:
    """int_{r_from}^r {(N+1) L + N (-L'_t)^+ / L} dt along the ray.

    ``quad_points`` switches from adaptive quadrature to a fixed Gauss-Legendre
    rule in the logarithmic variable.
    """
    if not 0 <= r_from <= r < ray.R:
        raise BadParams(f"r = {r} must lie in [{r_from}, R = {ray.R})")
    if r == r_from:
        return 0.0
    ell = _weight_along(L, ray)
    R = ray.R
    if h is None:
        h = 1e-6 * min(r, R - r)

    def integrand(s):
        t = R * -math.expm1(-s)
        lv = float(ell(t)[0])
        if not (math.isfinite(lv) and lv > 0):
            raise NonFiniteWeight(f"L = {lv} at t = {t} on the ray")
        val = (N + 1) * lv
        if N:
            d = float(weight_rate(L, ray, t, h)[0])
            val += N * max(-d, 0.0) / lv
        return val * R * math.exp(-s)

    s0 = -math.log1p(-r_from / R)
    s1 = -math.log1p(-r / R)
    if quad_points:
        x, w = np.polynomial.legendre.leggauss(int(quad_points))
        half = 0.5 * (s1 - s0)
        return float(half * sum(wi * integrand(s0 + half * (xi + 1)) for xi, wi in zip(x, w)))
    with warnings.catch_warnings():
        # near the exit 1 - |z| carries rounding noise; judge the error estimate instead
        warnings.simplefilter("ignore", IntegrationWarning)
        total, err = quad(integrand, s0, s1, epsrel=QUAD_EPSREL, epsabs=0.0, limit=400)
    if err > QUAD_TARGET * abs(total):
        warnings.warn(f"weight integral error {err:.3g} above {QUAD_TARGET:g} relative",
                      RuntimeWarning, stacklevel=2)
    return float(total)


def _cumulative_integral(L, ray: RadialRay, rs: np.ndarray, N: int) -> np.ndarray:
    """Integral at every radius of a sorted grid, one piece per gap."""
    out = np.empty(rs.size)
    total, prev = 0.0, 0.0
    for i, r in enumerate(rs):
        total += growth_integral(L, ray, r, N, r_from=prev)
        prev = r
        out[i] = total
    return out


def log_start_term(F, L, b, z0, N: int, spec: Optional[QuadratureSpec] = None) -> float:
    """ln max_{k<=N} |d^k F / d b^k (z0)| / (k! L^k(z0)); the ln g(0) term."""
    v, _ = normalized_table(F, L, b, as_point(z0)[None, :], max(N, 1), spec)
    top = float(v[0, : N + 1].max())
    return math.log(top) if top > 0 else -math.inf


def growth_rhs(F, L, b, ray: RadialRay, r: float, N: int, quad_points: Optional[int] = None,
               spec: Optional[QuadratureSpec] = None) -> float:
    return (log_start_term(F, L, b, ray.z0, N, spec)
            + growth_integral(L, ray, r, N, quad_points=quad_points))


# ---------------------------------------------------------------------------
# verification along rays
# ---------------------------------------------------------------------------


@dataclass
class GrowthReport:
    theta: float
    R: float
    p: int
    N: int
    r: list
    lhs: list
    rhs: list
    margins: list
    passed: bool
    tolerance: float = 1e-6

    def to_dict(self) -> dict:
        return {"theta": self.theta, "R": self.R, "p": self.p, "N": self.N, "r": self.r,
                "lhs": self.lhs, "rhs": self.rhs, "margins": self.margins,
                "passed": self.passed, "tolerance": self.tolerance}


def growth_verify(F, L, b, ray: RadialRay, r_grid, p: int, N: int,
                  spec: Optional[QuadratureSpec] = None, tol: float = 1e-6) -> GrowthReport:
    """ln(|d^p F / d b^p| / (p! L^p)) at each radius against the right-hand side."""
    if p < 0 or N < 0:
        raise BadParams("p and N must be >= 0")
    rs = np.sort(np.asarray(r_grid, dtype=np.float64))
    v, _ = normalized_table(F, L, b, ray.points(rs), max(p, 1), spec)
    with np.errstate(divide="ignore"):
        lhs = np.log(v[:, p])
    start = log_start_term(F, L, b, ray.z0, N, spec)
    rhs = start + _cumulative_integral(L, ray, rs, N)
    margins = rhs - lhs
    return GrowthReport(ray.theta, ray.R, int(p), int(N), rs.tolist(), lhs.tolist(), rhs.tolist(),
                        margins.tolist(), bool(np.all(margins >= -tol)), tol)


@dataclass
class LimsupReport:
    estimate: float
    r: list
    ratios: list
    tail_from: int
    hypothesis_sup: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "r": self.r, "ratios": self.ratios,
                "tail_from": self.tail_from, "hypothesis_sup": self.hypothesis_sup}


def default_r_sequence(R: float, kmax: int = 24) -> np.ndarray:
    return R * (1.0 - 2.0 ** -np.arange(1, kmax + 1))


def limsup_ratio(F, L, b, ray: RadialRay, r_sequence=None) -> LimsupReport:
    """Tail running max of ln|F| / int_0^r L over r_k = R(1 - 2^-k), k <= 24."""
    rs = default_r_sequence(ray.R) if r_sequence is None else np.asarray(r_sequence, dtype=float)
    if np.any(np.diff(rs) <= 0) or rs[-1] >= ray.R:
        raise BadParams("r_sequence must increase strictly towards R")
    vals = np.abs(F(ray.points(rs)))
    with np.errstate(divide="ignore"):
        ratios = np.log(vals) / _cumulative_integral(L, ray, rs, 0)
    start = int(math.floor(0.75 * rs.size))
    est = float(np.max(ratios[start:]))
    # sampled (-L'_t)^+ / L^2 over the same tail
    Lv = np.asarray(L(ray.points(rs[start:])), dtype=np.float64)
    rate = weight_rate(L, ray, rs[start:])
    hyp = float(np.max(np.maximum(-rate, 0.0) / Lv ** 2))
    return LimsupReport(est, rs.tolist(), ratios.tolist(), start, hyp)


# ---------------------------------------------------------------------------
# Jensen two-sided chain
# ---------------------------------------------------------------------------


def jensen_chain(F, L, b, z0, r: float, N: int, spec: Optional[QuadratureSpec] = None,
                 thetas: int = DEFAULT_THETAS):
    """(lower, mid, upper) with lower = int_0^r n(t)/t dt, mid = ln max_{|t|=r} |F|."""
    from .criteria import circle_extrema
    from .zeros import counting_function, slice_zeros
    from .geometry import SliceDomain

    b = as_direction(b)
    z0 = as_point(z0)
    f0 = complex(F(z0[None, :])[0])
    if abs(f0 - 1.0) > 1e-10:
        raise NotNormalized(f"F(z0) = {f0} is not 1")
    R = float(clearance(z0[None, :], b)[0])
    if not 0 < r < R:
        raise BadParams(f"r = {r} must lie in (0, {R})")
    # n(t) is a step function: integrate it exactly through its jumps
    zs = slice_zeros(F, z0, b, SliceDomain(0j, float(r)))
    total = counting_function(F, z0, b, 0.0, r)
    if total != zs.total:
        raise BadParams(f"zero search found {zs.total} zeros but the count is {total}")
    lower = float(sum(m * math.log(r / abs(a)) for a, m in zs.zeros))
    hi, _ = circle_extrema(F, z0[None, :], b, np.array([float(r)]))
    mid = math.log(float(hi[0]))
    start = log_start_term(F, L, b, z0, N, spec)
    best = -math.inf
    for j in range(thetas):
        ray = make_ray(z0, b, 2 * math.pi * j / thetas)
        best = max(best, growth_integral(L, ray, r, N))
    return lower, mid, start + best
