"""Positive weights L on the ball, the boundary condition and the class Q_{b,beta}.

The boundary condition is ``L(z) > beta |b| / (1 - |z|)`` with ``beta > 1``.

Membership in Q_{b,beta} is estimated by sampling: for each base point the
ratio ``L(p + t b) / L(p)`` is evaluated on ``circles`` concentric circles of
``circle_samples`` points inside ``|t| <= eta / L(p)`` plus the centre.  The
reported ``lambda1`` is therefore an upper bound of the true infimum and
``lambda2`` a lower bound of the true supremum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .errors import (BadParams, EtaOutOfRange, NonPositiveL, PreconditionViolated,
                     UnknownFunction, ZeroTheta)
from .geometry import Direction, as_direction
from .sampling import default_ball_grid, sobol_ball, sphere_points


@dataclass(frozen=True, eq=False)
class LField:
    name: str
    beta: float
    fn: Callable[[np.ndarray], np.ndarray]
    # d/dt L(p + t u) at t = 0 for real t; None -> finite differences
    ddt: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None
    params: dict = field(default_factory=dict)
    direction: Optional[Direction] = None

    def __post_init__(self):
        if not self.beta > 1.0:
            raise BadParams(f"beta must be > 1, got {self.beta}")

    def __call__(self, z) -> np.ndarray:
        return np.asarray(self.fn(np.asarray(z, dtype=np.complex128)), dtype=np.float64)

    def scaled(self, factor: float, name: Optional[str] = None, beta: Optional[float] = None,
               direction: Optional[Direction] = None) -> "LField":
        base = self
        ddt = None if base.ddt is None else (lambda p, u: factor * base.ddt(p, u))
        return LField(name or f"{factor:g}*{self.name}", self.beta if beta is None else beta,
                      lambda z: factor * base.fn(z), ddt, dict(self.params, factor=factor),
                      direction or self.direction)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


def constant_field(c: float = 1.0, beta: float = 2.0) -> LField:
    c = float(c)

    def fn(z):
        return np.full(z.shape[:-1], c)

    def ddt(p, u):
        return np.zeros(np.shape(p)[:-1])

    return LField("constant", beta, fn, ddt, {"c": c})


def _radial_rate(p, u):
    # d/dt |p + t u| at t = 0 (one-sided |u| at the origin)
    r = np.linalg.norm(p, axis=-1)
    dot = np.real(np.sum(p * np.conj(u), axis=-1))
    with np.errstate(invalid="ignore", divide="ignore"):
        rate = np.where(r > 0, dot / np.where(r > 0, r, 1.0), np.linalg.norm(u, axis=-1))
    return rate


def reciprocal_field(c: float = 2.0, alpha: float = 1.0, beta: float = 2.0) -> LField:
    """c / (1 - |z|)^alpha."""
    c = float(c)
    alpha = float(alpha)

    def fn(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return c / (1.0 - np.linalg.norm(z, axis=-1)) ** alpha

    def ddt(p, u):
        one_minus = 1.0 - np.linalg.norm(p, axis=-1)
        return c * alpha * one_minus ** (-alpha - 1.0) * _radial_rate(p, u)

    return LField("reciprocal_one_minus_r", beta, fn, ddt, {"c": c, "alpha": alpha})


def remark4_field(beta: float = 2.0) -> LField:
    """2|z2 - z1| + 1 (violates the boundary condition near the sphere)."""

    def fn(z):
        return 2.0 * np.abs(z[..., 1] - z[..., 0]) + 1.0

    return LField("remark4_weight", beta, fn)


_BASE_CONTINUOUS = {
    "constant": lambda z: np.ones(z.shape[:-1]),
    "one_plus_abs_z1_sq": lambda z: 1.0 + np.abs(z[..., 0]) ** 2,
    "one_plus_norm_sq": lambda z: 1.0 + np.linalg.norm(z, axis=-1) ** 2,
}


def lemma4_construct(Lc, b, beta: float, alpha: float = 1.0, n: Optional[int] = None,
                     samples: int = 20000, seed: int = 0, name: str = "lemma4") -> LField:
    """(beta |b| / m) * Lc(z) / (1 - |z|)^alpha with m = sampled min of Lc on the closed ball."""
    b = as_direction(b)
    if alpha < 1:
        raise BadParams("alpha must be >= 1")
    if not beta > 1:
        raise BadParams("beta must be > 1")
    n = b.n if n is None else n
    sample = np.vstack([sobol_ball(samples, n, seed), sphere_points(max(256, samples // 8), n, 1.0, seed + 7)])
    vals = np.asarray(Lc(sample), dtype=np.float64)
    m = float(vals.min())
    if not m > 0:
        raise NonPositiveL(f"sampled minimum of Lc is {m}")
    scale = beta * b.norm / m

    def fn(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            return scale * Lc(z) / (1.0 - np.linalg.norm(z, axis=-1)) ** alpha

    return LField(name, beta, fn, None, {"m": m, "alpha": alpha, "scale": scale}, b)


def lfield_get(name: str, params: Optional[dict] = None, beta: float = 2.0,
               b=None) -> LField:
    params = dict(params or {})
    if name == "constant":
        return constant_field(params.get("c", 1.0), beta)
    if name == "reciprocal_one_minus_r":
        return reciprocal_field(params.get("c", 2.0), params.get("alpha", 1.0), beta)
    if name == "remark4_weight":
        return remark4_field(beta)
    if name == "lemma4":
        base = params.get("base", "constant")
        if base not in _BASE_CONTINUOUS:
            raise UnknownFunction(f"lemma4 base {base!r}")
        if b is None:
            raise BadParams("lemma4 needs the direction")
        return lemma4_construct(_BASE_CONTINUOUS[base], b, beta, params.get("alpha", 1.0),
                                samples=int(params.get("samples", 20000)))
    raise UnknownFunction(name)


# ---------------------------------------------------------------------------
# boundary condition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    point: tuple
    value: float
    bound: float
    margin: float


def check_condition2(L: LField, b, points, beta: Optional[float] = None) -> list[Violation]:
    """Sampled points where ``L(z) <= beta |b| / (1 - |z|)``."""
    b = as_direction(b)
    beta = L.beta if beta is None else beta
    pts = np.asarray(getattr(points, "flat_points", lambda: points)(), dtype=np.complex128)
    vals = L(pts)
    with np.errstate(divide="ignore"):
        bound = beta * b.norm / (1.0 - np.linalg.norm(pts, axis=-1))
    margin = vals - bound
    bad = np.flatnonzero(~(margin > 0))
    return [Violation(tuple(pts[i].tolist()), float(vals[i]), float(bound[i]), float(margin[i]))
            for i in bad]


# ---------------------------------------------------------------------------
# lambda estimates
# ---------------------------------------------------------------------------


@dataclass
class LambdaEstimate:
    lambda1: float
    lambda2: float
    eta: float
    samples_used: int
    worst_points: list
    outside_samples: int = 0

    @property
    def verdict(self) -> str:
        ok = 0 < self.lambda1 <= self.lambda2 < math.inf
        return "consistent-with-membership" if ok else "violation-found"


def disc_pattern(circles: int = 4, circle_samples: int = 32) -> np.ndarray:
    """Centre plus concentric circles of radii i/circles on the unit disc."""
    parts = [np.zeros(1, dtype=np.complex128)]
    ang = np.exp(2j * np.pi * np.arange(circle_samples) / circle_samples)
    for i in range(1, circles + 1):
        parts.append(ang * (i / circles))
    return np.concatenate(parts)


def _grid_points(grid) -> np.ndarray:
    if hasattr(grid, "flat_points"):
        return np.asarray(grid.flat_points(), dtype=np.complex128)
    return np.asarray(grid, dtype=np.complex128)


def estimate_lambda(L: LField, b, eta: float, grid, circle_samples: int = 32,
                    circles: int = 4) -> LambdaEstimate:
    b = as_direction(b)
    if not 0 <= eta <= L.beta:
        raise EtaOutOfRange(f"eta = {eta} not in [0, {L.beta}]")
    pts = _grid_points(grid)
    base = L(pts)
    unit = disc_pattern(circles, circle_samples)
    offsets = (eta / base)[:, None] * unit[None, :]
    q = pts[:, None, :] + offsets[..., None] * b.coords
    inside = np.linalg.norm(q, axis=-1) < 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = L(q) / base[:, None]
    ratio = np.where(inside & np.isfinite(ratio), ratio, np.nan)
    lo, ilo, hi, ihi = kernels.flat_extrema(ratio)
    s = unit.size
    worst = []
    for label, flat in (("lambda1", ilo), ("lambda2", ihi)):
        i, j = divmod(flat, s)
        worst.append({"which": label, "z": pts[i].tolist(), "t0": 0.0, "t": complex(offsets[i, j])})
    return LambdaEstimate(lo, hi, float(eta), int(np.isfinite(ratio).sum()), worst,
                          int((~inside).sum()))


# ---------------------------------------------------------------------------
# transformations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DirectionTransform:
    theta: complex
    b: Direction
    new_b: Direction


def scale_direction(L: LField, theta: complex, b=None):
    """|theta| L, tagged for direction theta*b with the same beta."""
    theta = complex(theta)
    if theta == 0:
        raise ZeroTheta("theta must be non-zero")
    b = as_direction(b if b is not None else (L.direction.coords if L.direction else [1.0]))
    new_b = b.scaled(theta)
    if theta == 1:
        return L, DirectionTransform(theta, b, b)
    scaled = L.scaled(abs(theta), name=f"|{theta}|*{L.name}", direction=new_b)
    return scaled, DirectionTransform(theta, b, new_b)


def combine_directions(L: LField, b1, b2, eta_cap: Optional[float] = None, grid=None,
                       seed: int = 0) -> LField:
    """min(lambda2^{b1}(beta), lambda2^{b2}(beta)) * L for direction b1 + b2."""
    b1 = as_direction(b1)
    b2 = as_direction(b2)
    bsum = as_direction(b1.coords + b2.coords)
    eta = L.beta if eta_cap is None else min(eta_cap, L.beta)
    if grid is None:
        grid = default_ball_grid(b1.n, seed=seed, scale=0.25)
    pts = _grid_points(grid)
    need = L.beta * max(b1.norm, b2.norm, bsum.norm)
    for bad in check_condition2(L, as_direction(np.eye(b1.n)[0]), pts, beta=need):
        raise PreconditionViolated(
            f"L(z) = {bad.value:.6g} <= {bad.bound:.6g} required by the strengthened condition",
            sample=bad.point)
    lam1 = estimate_lambda(L, b1, eta, pts)
    lam2 = estimate_lambda(L, b2, eta, pts)
    factor = min(lam1.lambda2, lam2.lambda2)
    if not math.isfinite(factor):
        raise PreconditionViolated("lambda2 estimate is not finite")
    return L.scaled(factor, name=f"combined({L.name})", direction=bsum)
