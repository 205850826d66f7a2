"""The index inequality, local and global L-index in a direction, slice indices.

All orders are compared through the normalized magnitudes
``v_k = |d^k F / d b^k| / (k! L^k) = |c_k| / L^k`` where ``c_k`` are the
slice Taylor coefficients.  With a circle of radius ``rho`` the quadrature
yields ``a_k = c_k rho^k`` so ``v_k = |a_k| (rho L)^(-k)``; under the default
``rho = 1/L`` rule this is the raw coefficient magnitude.

A local index equal to the truncation order is reported as not determined
(``None``): the maximum may keep moving to higher orders beyond ``M_max``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .errors import BadParams, DegenerateParams, ZeroComponent
from .funcs import AnalyticMap, SliceFunction
from .geometry import as_direction, as_point, project_to_hyperplane
from .quadrature import QuadratureSpec, coeffs_at, index_spec
from .sampling import (DEFAULT_BALL_POINTS, PointGrid, SliceGrid, default_ball_grid, sobol_ball,
                       slice_grid_from_bases, sphere_points)

RTOL = 1e-12
DEFAULT_M_MAX = 20


def _spec(spec, M_max):
    spec = spec or index_spec()
    if spec.max_order < M_max:
        spec = QuadratureSpec(spec.nodes, spec.radius_policy, spec.value, M_max, spec.domain)
    return spec


def normalized_table(F, L, b, points, M_max: int = DEFAULT_M_MAX,
                     spec: Optional[QuadratureSpec] = None):
    """``(v, L(points))`` with ``v[i, k] = |c_k| / L^k`` at every point."""
    b = as_direction(b)
    spec = _spec(spec, M_max)
    points = np.asarray(points, dtype=np.complex128).reshape(-1, b.n)
    Lv = np.asarray(L(points), dtype=np.float64)
    a, radii = coeffs_at(F, points, b, M_max, spec, Lv)
    return kernels.normalized_rows(a, 1.0 / (radii * Lv)), Lv


def derivative_table(F, L, b, points, M_max: int = DEFAULT_M_MAX,
                     spec: Optional[QuadratureSpec] = None):
    """``u[i, k] = |d^k F / d b^k| / L^k`` (no factorial)."""
    v, Lv = normalized_table(F, L, b, points, M_max, spec)
    fact = np.cumprod(np.concatenate([[1.0], np.arange(1, v.shape[1], dtype=np.float64)]))
    return v * fact[None, :], Lv


# ---------------------------------------------------------------------------
# the index inequality
# ---------------------------------------------------------------------------


def check_inequality3(F, L, b, z, m0: int, M_max: int = DEFAULT_M_MAX,
                      spec: Optional[QuadratureSpec] = None):
    """(holds, worst margin, worst order) over orders ``m0 < m <= M_max``.

    Margins are ``rhs - lhs``; without orders above ``m0`` the margin is
    ``+inf`` and the order ``-1``.
    """
    if M_max < m0:
        raise BadParams("M_max must be >= m0")
    v, _ = normalized_table(F, L, b, as_point(z)[None, :], M_max, spec)
    holds, _, worst, order = kernels.inequality_rows(v, m0, RTOL)
    return bool(holds[0]), float(worst[0]), int(order[0])


def inequality3_rows(F, L, b, points, m0: int, M_max: int = DEFAULT_M_MAX,
                     spec: Optional[QuadratureSpec] = None):
    """Batched check: arrays (holds, rhs, worst margin, worst order)."""
    v, _ = normalized_table(F, L, b, points, M_max, spec)
    return kernels.inequality_rows(v, m0, RTOL)


@dataclass
class IndexWitness:
    point: tuple
    n_local: Optional[int]
    margins: list
    truncation: int

    @property
    def determined(self) -> bool:
        return self.n_local is not None

    def to_dict(self) -> dict:
        return {"point": [[c.real, c.imag] for c in self.point],
                "n_local": "NotDetermined" if self.n_local is None else self.n_local,
                "margins": [list(m) for m in self.margins], "truncation": self.truncation}


def local_index_rows(v: np.ndarray):
    """Minimal m0 per row (``-1`` = not determined) and the matching rhs."""
    idx, rhs = kernels.local_index_rows(v, RTOL)
    last = v.shape[1] - 1
    idx = np.where((idx == last) & (last > 0), -1, idx)
    return idx, rhs


def _witness(point, v_row, idx, M_max):
    m0 = None if idx < 0 else int(idx)
    rhs = float(v_row[: (M_max if m0 is None else m0) + 1].max())
    margins = [(m, float(v_row[m]), rhs) for m in range(v_row.size)]
    return IndexWitness(tuple(complex(c) for c in point), m0, margins, M_max)


def local_index(F, L, b, z, M_max: int = DEFAULT_M_MAX,
                spec: Optional[QuadratureSpec] = None) -> IndexWitness:
    z = as_point(z)
    v, _ = normalized_table(F, L, b, z[None, :], M_max, spec)
    idx, _ = local_index_rows(v)
    return _witness(z, v[0], int(idx[0]), M_max)


@dataclass
class GlobalIndexEstimate:
    n_global: Optional[int]
    witnesses: list
    grid_spec: str
    attained_at: Optional[tuple]
    points: int = 0
    undetermined: int = 0
    histogram: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"n_global": "NotDetermined" if self.n_global is None else self.n_global,
                "grid": self.grid_spec, "points": self.points,
                "undetermined": self.undetermined,
                "attained_at": None if self.attained_at is None
                else [[c.real, c.imag] for c in self.attained_at],
                "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
                "witnesses": [w.to_dict() for w in self.witnesses]}


def _points_of(grid):
    if hasattr(grid, "flat_points"):
        return np.asarray(grid.flat_points(), dtype=np.complex128), getattr(grid, "label", "grid")
    return np.asarray(grid, dtype=np.complex128), "points"


def global_index_estimate(F, L, b, grid, M_max: int = DEFAULT_M_MAX,
                          spec: Optional[QuadratureSpec] = None) -> GlobalIndexEstimate:
    """Max of the local index over the grid; a lower bound for the true index."""
    pts, label = _points_of(grid)
    v, _ = normalized_table(F, L, b, pts, M_max, spec)
    idx, _ = local_index_rows(v)
    hist = {int(k): int(c) for k, c in zip(*np.unique(idx, return_counts=True))}
    und = int((idx < 0).sum())
    witnesses = []
    if und:
        i = int(np.flatnonzero(idx < 0)[0])
        n_global = None
    else:
        i = int(np.argmax(idx)) if idx.size else -1
        n_global = int(idx[i]) if idx.size else 0
    if i >= 0:
        witnesses.append(_witness(pts[i], v[i], int(idx[i]), M_max))
    attained = tuple(complex(c) for c in pts[i]) if i >= 0 else None
    return GlobalIndexEstimate(n_global, witnesses, label, attained, int(pts.shape[0]), und, hist)


# ---------------------------------------------------------------------------
# sufficient sets
# ---------------------------------------------------------------------------


def sufficient_set_grid(kind: str, b, params: Optional[dict] = None, n: Optional[int] = None,
                        seed: int = 0, scale: float = 1.0) -> SliceGrid:
    """Slice base points z0 with polar t-grids covering their slice discs.

    ``hyperplane_j0`` (``j0`` 0-based), ``hyperplane_sum`` and ``hyperplane_c``
    slide Sobol ball samples along ``b`` onto the hyperplane; ``spheres``
    samples the spheres ``|z| = 1 - 2^-p`` for ``p = 1..P`` with ``t = 0``.
    """
    b = as_direction(b)
    params = dict(params or {})
    n = b.n if n is None else n
    count = max(1, int(round(params.get("count", DEFAULT_BALL_POINTS // 8) * scale)))
    base = sobol_ball(count, n, seed)
    if kind == "hyperplane_j0":
        j0 = int(params.get("j0", 0))
        if b.coords[j0] == 0:
            raise ZeroComponent(f"b[{j0}] = 0")
        t = base[:, j0] / b.coords[j0]
        z0 = base - t[:, None] * b.coords
        z0[:, j0] = 0.0
        return slice_grid_from_bases(z0, b, f"hyperplane_j0(j0={j0})")
    if kind == "hyperplane_sum":
        sb = b.coords.sum()
        if sb == 0:
            raise DegenerateParams("sum of direction components is zero")
        t = base.sum(axis=1) / sb
        return slice_grid_from_bases(base - t[:, None] * b.coords, b, "hyperplane_sum")
    if kind == "hyperplane_c":
        c = as_point(params.get("c", np.ones(n)))
        z0, _ = project_to_hyperplane(base, b, c, complex(params.get("level", 1.0)))
        return slice_grid_from_bases(z0, b, "hyperplane_c")
    if kind == "spheres":
        P = int(params.get("p_max", 6))
        per = max(1, int(round(params.get("per_sphere", 256) * scale)))
        pts = np.vstack([sphere_points(per, n, 1.0 - 2.0 ** -p, seed + p) for p in range(1, P + 1)])
        return SliceGrid(b, pts, np.zeros((pts.shape[0], 1), dtype=np.complex128), f"spheres(p<={P})")
    raise BadParams(f"unknown sufficient-set kind {kind!r}")


def default_grid(n: int, seed: int = 0, scale: float = 1.0) -> PointGrid:
    return default_ball_grid(n, seed, scale)


# ---------------------------------------------------------------------------
# one-variable index along a slice
# ---------------------------------------------------------------------------


def line_map(g, analytic_radius: float = np.inf) -> AnalyticMap:
    """A plain callable of t as a map on C^1 (direction 1)."""
    return AnalyticMap("slice", 1, lambda z: np.asarray(g(z[..., 0]), dtype=np.complex128),
                       analytic_radius=analytic_radius)


def slice_index(g, l, t_grid, M_max: int = DEFAULT_M_MAX,
                spec: Optional[QuadratureSpec] = None) -> Optional[int]:
    """Max over ``t_grid`` of the one-variable local index of ``g`` with weight ``l(t)``."""
    t = np.atleast_1d(np.asarray(t_grid, dtype=np.complex128)).ravel()
    lt = np.asarray(l(t), dtype=np.float64) * np.ones(t.shape)
    if isinstance(g, SliceFunction):
        F, b = g.base, g.b
        pts = g.z0[None, :] + t[:, None] * b.coords
    else:
        F = g if isinstance(g, AnalyticMap) else line_map(g)
        b = as_direction([1.0])
        pts = t[:, None]
    v, _ = normalized_table(F, lambda _p: lt, b, pts, M_max, spec)
    idx, _ = local_index_rows(v)
    if (idx < 0).any():
        return None
    return int(idx.max())
