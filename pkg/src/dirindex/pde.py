"""Linear equations in directional derivatives and checks of their solutions.

An equation of order p reads

    g_0 d^p w/db^p + g_1 d^{p-1} w/db^{p-1} + ... + g_p w = h

with analytic coefficients.  Nothing here solves such an equation: candidate
solutions are supplied by the caller and their residuals sampled, alongside
the coefficient bound |g_j| <= T L^j |g_0| away from the zeros of g_0.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .criteria import CriterionReport
from .errors import BadParams, DirIndexError, EmptyComplement
from .geometry import as_direction, as_point
from .index import DEFAULT_M_MAX, _points_of, global_index_estimate
from .quadrature import QuadratureSpec, dirderiv_batch
from .zeros import complement_points

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class DirectionalPDE:
    coeffs: tuple  # g_0 .. g_p
    h: object
    b: object

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise BadParams("an equation needs g_0 and at least one more coefficient")
        dims = {getattr(g, "n", None) for g in (*self.coeffs, self.h)}
        dims.discard(None)
        if len(dims) > 1:
            raise BadParams(f"coefficients live in different dimensions {sorted(dims)}")
        object.__setattr__(self, "b", as_direction(self.b))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1


def make_pde(coeffs: Sequence, h, b) -> DirectionalPDE:
    return DirectionalPDE(tuple(coeffs), h, b)


def _spec(spec, p):
    # by default the adaptive radius only has to serve the orders in use
    spec = spec or QuadratureSpec(max_order=p)
    if spec.max_order < p:
        spec = QuadratureSpec(spec.nodes, spec.radius_policy, spec.value, p, spec.domain)
    return spec


def residual_rows(pde: DirectionalPDE, w, points, spec: Optional[QuadratureSpec] = None):
    """sum_j g_j d^{p-j} w/db^{p-j} - h at every point."""
    p = pde.order
    pts = np.asarray(points, dtype=np.complex128).reshape(-1, pde.b.n)
    d = dirderiv_batch(w, pts, pde.b, p, _spec(spec, p))
    out = -np.asarray(pde.h(pts), dtype=np.complex128) * np.ones(pts.shape[0])
    for j, g in enumerate(pde.coeffs):
        out = out + np.asarray(g(pts), dtype=np.complex128) * d[:, p - j]
    return out


def residual(pde: DirectionalPDE, w, z, spec: Optional[QuadratureSpec] = None) -> complex:
    return complex(residual_rows(pde, w, as_point(z)[None, :], spec)[0])


def _worst(pts, i, value):
    return {"point": [[c.real, c.imag] for c in pts[i]], "value": value}


def condition43_check(pde: DirectionalPDE, L, b, r: float, grid,
                      spec: Optional[QuadratureSpec] = None):
    """T = max_j |g_j| / (L^j |g_0|) over grid points outside G_r(g_0)."""
    pts, excluded, label = complement_points(pde.coeffs[0], L, b, r, grid)
    Lv = np.asarray(L(pts), dtype=np.float64)
    g0 = np.abs(np.asarray(pde.coeffs[0](pts), dtype=np.complex128)) * np.ones(pts.shape[0])
    ratios = np.zeros(pts.shape[0])
    with np.errstate(divide="ignore", invalid="ignore"):
        for j, g in enumerate(pde.coeffs[1:], start=1):
            gj = np.abs(np.asarray(g(pts), dtype=np.complex128)) * np.ones(pts.shape[0])
            q = np.where(gj == 0, 0.0, gj / (Lv ** j * g0))
            ratios = np.maximum(ratios, np.where(np.isnan(q), np.inf, q))
    i = int(np.argmax(ratios))
    T = float(ratios[i])
    rep = CriterionReport("condition43", bool(np.isfinite(T)), {"T": T, "r": float(r)},
                          _worst(pts, i, T), label,
                          {"excluded": excluded, "kept": int(pts.shape[0])})
    return T, rep


def lemma6_check(F, L, b, r: float, m: int, grid, spec: Optional[QuadratureSpec] = None):
    """P = sup |d^m F/db^m| / (L^m |F|) over grid points outside G_r(F)."""
    if m < 1:
        raise BadParams("m must be >= 1")
    b = as_direction(b)
    pts, excluded, label = complement_points(F, L, b, r, grid)
    Lv = np.asarray(L(pts), dtype=np.float64)
    d = dirderiv_batch(F, pts, b, m, _spec(spec, m))
    with np.errstate(divide="ignore", invalid="ignore"):
        top = np.abs(d[:, m])
        ratio = np.where(top == 0, 0.0, top / (Lv ** m * np.abs(d[:, 0])))
    ratio = np.where(np.isnan(ratio), np.inf, ratio)
    i = int(np.argmax(ratio))
    P = float(ratio[i])
    rep = CriterionReport("lemma6", bool(np.isfinite(P)), {"P": P, "m": int(m), "r": float(r)},
                          _worst(pts, i, P), label,
                          {"excluded": excluded, "kept": int(pts.shape[0])})
    return P, rep


@dataclass
class HarnessReport:
    verdict: str
    stages: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "consistent"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "stages": self.stages}


def _grid_for(grids, key):
    if isinstance(grids, dict):
        return grids.get(key, grids.get("default"))
    return grids


def thm13_harness(pde: DirectionalPDE, L, b, w_solution, grids, r: float = 1.0,
                  spec: Optional[QuadratureSpec] = None, M_max: int = DEFAULT_M_MAX,
                  residual_tol: float = RESIDUAL_TOL) -> HarnessReport:
    """Four stages: coefficient indices, coefficient bound, residuals, solution index.

    ``grids`` is one grid for every stage or a dict keyed by ``coefficients``,
    ``condition``, ``residual``, ``solution`` (``default`` as fallback).  The
    verdict is ``consistent`` when the first three stages pass and the
    solution index is determined, ``withheld`` when a hypothesis stage fails,
    and ``inconsistent`` when the hypotheses hold but the solution index does
    not come out finite.
    """
    b = as_direction(b)
    stages = {}
    ok = True

    # (a) every coefficient and the right-hand side of bounded index
    grid = _grid_for(grids, "coefficients")
    idx = []
    for name, g in [*((f"g{j}", g) for j, g in enumerate(pde.coeffs)), ("h", pde.h)]:
        est = global_index_estimate(g, L, b, grid, M_max, spec)
        idx.append({"map": name, "n_global": est.to_dict()["n_global"],
                    "undetermined": est.undetermined})
    a_ok = all(isinstance(e["n_global"], int) for e in idx)
    stages["coefficients"] = {"passed": a_ok, "indices": idx}
    ok &= a_ok

    # (b) coefficient bound outside the zeros of g_0
    try:
        T, rep = condition43_check(pde, L, b, r, _grid_for(grids, "condition"), spec)
        stages["condition"] = {"passed": rep.passed, "T": T, "report": rep.to_dict()}
        ok &= rep.passed
    except EmptyComplement:
        raise
    except DirIndexError as exc:
        stages["condition"] = {"passed": False, "error": type(exc).__name__, "message": str(exc)}
        ok = False

    # (c) the candidate solves the equation
    pts, _ = _points_of(_grid_for(grids, "residual"))
    res = np.abs(residual_rows(pde, w_solution, pts, spec))
    sup = float(res.max()) if res.size else 0.0
    c_ok = bool(sup <= residual_tol)
    stages["residual"] = {"passed": c_ok, "sup": sup, "tolerance": residual_tol,
                          "points": int(pts.shape[0])}
    ok &= c_ok

    # (d) the solution index
    est = global_index_estimate(w_solution, L, b, _grid_for(grids, "solution"), M_max, spec)
    d_ok = est.n_global is not None
    stages["solution"] = {"passed": d_ok, "estimate": est.to_dict()}
    verdict = ("consistent" if d_ok else "inconsistent") if ok else "withheld"
    return HarnessReport(verdict, stages)
