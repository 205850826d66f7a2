"""Analytic maps on the unit ball and the registry of concrete test functions.

Every map evaluates on batches: ``F(z)`` accepts an array of shape
``(..., n)`` and returns a complex array of shape ``(...)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import BadParams, UnknownFunction
from .geometry import Direction, SliceDomain, as_direction, as_point, inner, slice_domain


def parse_complex(value) -> complex:
    if isinstance(value, str):
        return complex(value.replace(" ", "").replace("i", "j"))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    return complex(value)


def parse_cvec(values) -> np.ndarray:
    if np.isscalar(values) or isinstance(values, str):
        values = [values]
    return np.array([parse_complex(v) for v in values], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class AnalyticMap:
    """An analytic function on the ball of radius ``analytic_radius``.

    ``closed_form`` is an optional ``(z, b, k) -> complex array`` giving the
    k-th derivative along ``b``; it only serves as an oracle.
    """

    name: str
    n: int
    fn: Callable[[np.ndarray], np.ndarray]
    closed_form: Optional[Callable[[np.ndarray, Direction, int], np.ndarray]] = None
    analytic_radius: float = math.inf
    params: dict = field(default_factory=dict)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        if z.shape[-1] != self.n:
            raise ValueError(f"{self.name} expects points in C^{self.n}, got shape {z.shape}")
        return np.asarray(self.fn(z), dtype=np.complex128)

    def dirderiv_closed(self, z, b, k: int) -> np.ndarray:
        if self.closed_form is None:
            raise NotImplementedError(f"{self.name} has no closed-form directional derivatives")
        return np.asarray(self.closed_form(np.asarray(z, dtype=np.complex128), as_direction(b), int(k)),
                          dtype=np.complex128)

    @property
    def entire(self) -> bool:
        return math.isinf(self.analytic_radius)


@dataclass(frozen=True, eq=False)
class SliceFunction:
    """g(t) = F(z0 + t b) on the slice disc of z0."""

    base: AnalyticMap
    z0: np.ndarray
    b: Direction
    domain: SliceDomain

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=np.complex128)
        return self.base(self.z0 + t[..., None] * self.b.coords)


def slice(F: AnalyticMap, z0, b) -> SliceFunction:  # noqa: A001 - mirrors the operation name
    z0 = as_point(z0)
    b = as_direction(b)
    return SliceFunction(F, z0, b, slice_domain(z0, b))


# ---------------------------------------------------------------------------
# registry entries
# ---------------------------------------------------------------------------


def _zeros_like_batch(z):
    return np.zeros(z.shape[:-1], dtype=np.complex128)


def make_constant(c=1.0, n: int = 2) -> AnalyticMap:
    c = parse_complex(c)

    def fn(z):
        return np.full(z.shape[:-1], c, dtype=np.complex128)

    def closed(z, b, k):
        return fn(z) if k == 0 else _zeros_like_batch(z)

    return AnalyticMap("constant", int(n), fn, closed, params={"c": c, "n": n})


def make_linear(c, c0=0.0) -> AnalyticMap:
    c = parse_cvec(c)
    c0 = parse_complex(c0)

    def fn(z):
        return inner(z, c) + c0

    def closed(z, b, k):
        if k == 0:
            return fn(z)
        if k == 1:
            return np.full(z.shape[:-1], complex(inner(b.coords, c)))
        return _zeros_like_batch(z)

    return AnalyticMap("linear", c.size, fn, closed, params={"c": c, "c0": c0})


def make_exp_linear(c) -> AnalyticMap:
    c = parse_cvec(c)

    def fn(z):
        return np.exp(z @ c)

    def closed(z, b, k):
        return (b.coords @ c) ** k * fn(z)

    return AnalyticMap("exp_linear", c.size, fn, closed, params={"c": c})


def _remark4_fn(z):
    return np.exp(-z[..., 0] ** 2 + z[..., 1] ** 2)


def _remark4_closed(z, b, k):
    # slice: F(z) * exp(A t + B t^2); expand and read off the k-th Taylor coefficient
    b1, b2 = b.coords
    a = 2.0 * (z[..., 1] * b2 - z[..., 0] * b1)
    bq = b2 ** 2 - b1 ** 2
    total = np.zeros(np.shape(a), dtype=np.complex128)
    for j in range(k // 2 + 1):
        total = total + a ** (k - 2 * j) * bq ** j / (math.factorial(k - 2 * j) * math.factorial(j))
    return math.factorial(k) * total * _remark4_fn(z)


def make_remark4() -> AnalyticMap:
    return AnalyticMap("remark4", 2, _remark4_fn, _remark4_closed)


def make_slice_poly(roots, n: int = 2, coord: int = 0, lead=1.0) -> AnalyticMap:
    roots = parse_cvec(roots)
    lead = parse_complex(lead)
    if not 0 <= coord < n:
        raise BadParams(f"coord {coord} out of range for n = {n}")

    def fn(z):
        x = z[..., coord]
        out = np.full(x.shape, lead, dtype=np.complex128)
        for r in roots:
            out = out * (x - r)
        return out

    return AnalyticMap("slice_poly", int(n), fn, params={"roots": roots, "n": n, "coord": coord})


def make_truncated_product(J: int, c, d) -> AnalyticMap:
    J = int(J)
    if J < 1:
        raise BadParams("J must be >= 1")
    c = parse_cvec(c)
    d = parse_cvec(d)
    if c.shape != d.shape:
        raise BadParams("c and d must have the same dimension")
    if np.allclose(c, d):
        raise BadParams("c and d must differ")

    def fn(z):
        zc = inner(z, c)
        out = 1.0 + inner(z, d)
        for j in range(1, J + 1):
            out = out * (1.0 + zc * 2.0 ** (-j)) ** j
        return out

    return AnalyticMap("truncated_product", c.size, fn, params={"J": J, "c": c, "d": d})


def make_normalized_zero(a, n: int = 2) -> AnalyticMap:
    a = parse_complex(a)
    if a == 0:
        raise BadParams("a must be non-zero")

    def fn(z):
        return (z[..., 0] - a) / (-a)

    return AnalyticMap("normalized_zero", int(n), fn, params={"a": a, "n": n})


def make_inverse_power(gamma, c=(1.0,)) -> AnalyticMap:
    """(1 - <z, c>)^(-gamma), analytic on the ball of radius 1/|c|."""
    c = parse_cvec(c)
    gamma = float(gamma)
    nc = float(np.linalg.norm(c))
    if nc == 0:
        raise BadParams("c must be non-zero")

    def fn(z):
        return (1.0 - inner(z, c)) ** (-gamma)

    return AnalyticMap("inverse_power", c.size, fn, analytic_radius=1.0 / nc,
                       params={"gamma": gamma, "c": c})


_REGISTRY = {
    "constant": make_constant,
    "linear": make_linear,
    "exp_linear": make_exp_linear,
    "remark4": make_remark4,
    "slice_poly": make_slice_poly,
    "truncated_product": make_truncated_product,
    "normalized_zero": make_normalized_zero,
    "inverse_power": make_inverse_power,
}


def registry_names():
    return sorted(_REGISTRY)


def registry_get(name: str, params: Optional[dict] = None) -> AnalyticMap:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise UnknownFunction(name) from None
    try:
        return factory(**(params or {}))
    except TypeError as exc:
        raise BadParams(f"{name}: {exc}") from None
