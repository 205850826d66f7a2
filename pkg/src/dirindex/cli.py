"""Configuration-driven runner: ``dirindex <subcommand> --config run.toml``.

A config names a registry function, a weight, a direction and the checks to
run.  Results go to one JSON report (keys sorted, so equal inputs give equal
bytes); wall-clock timings go to a ``<out>.timings.json`` sidecar so the
report itself stays reproducible.

Exit status: 0 when every requested check passes, 2 when one fails, 1 on a
configuration or runtime error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__, _accel
from .errors import ConfigError, DirIndexError, MissingSeries
from .funcs import parse_cvec, registry_get
from .geometry import as_direction
from .index import DEFAULT_M_MAX, default_grid, global_index_estimate, sufficient_set_grid
from .lfield import check_condition2, estimate_lambda, lfield_get

PIPELINE = ("lclass", "index", "thm5", "thm8", "hayman", "thm11", "thm12_logderiv",
            "thm12_counting", "zeros", "growth", "limsup", "jensen", "pde")
SUBCOMMANDS = {
    "index": ("index",),
    "criteria": ("thm5", "thm8", "hayman", "thm11", "thm12_logderiv", "thm12_counting"),
    "zeros": ("zeros", "thm12_counting"),
    "growth": ("growth", "limsup", "jensen"),
    "pde-check": ("pde",),
    "lclass": ("lclass",),
    "report": PIPELINE,
}
SUBCOMMAND_DEFAULTS = {
    "criteria": ("thm5", "thm8", "hayman"),
    "zeros": ("zeros",),
    "growth": ("growth", "limsup"),
}
PLOT_KINDS = ("growth", "ratio", "lambda")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    function: dict
    lfield: dict
    direction: list
    beta: float = 2.0
    criteria: list = field(default_factory=lambda: ["index"])
    grid: dict = field(default_factory=dict)
    seed: int = 0
    grid_scale: float = 1.0
    sections: dict = field(default_factory=dict)  # per-check parameters

    def section(self, name: str) -> dict:
        return dict(self.sections.get(name, {}))

    def echo(self) -> dict:
        return {"function": self.function, "lfield": self.lfield, "direction": self.direction,
                "beta": self.beta, "criteria": list(self.criteria), "grid": self.grid,
                "seed": self.seed, "grid_scale": self.grid_scale, "sections": self.sections}


def _require(raw: dict, key: str, kind, path: Optional[str] = None):
    path = path or key
    if key not in raw:
        raise ConfigError(path, "missing")
    val = raw[key]
    if not isinstance(val, kind):
        raise ConfigError(path, f"expected {getattr(kind, '__name__', kind)}")
    return val


def _named(raw, path: str, default: Optional[str] = None) -> dict:
    if raw is None and default is not None:
        return {"name": default, "params": {}}
    if isinstance(raw, str):
        return {"name": raw, "params": {}}
    if not isinstance(raw, dict):
        raise ConfigError(path, "expected a name or a table with name and params")
    name = _require(raw, "name", str, f"{path}.name")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        raise ConfigError(f"{path}.params", "expected a table")
    return {"name": name, "params": params}


def parse_config(raw: dict, seed: Optional[int] = None,
                 grid_scale: Optional[float] = None) -> ExperimentConfig:
    """Validate a parsed TOML document; errors name the offending field."""
    function = _named(raw.get("function"), "function")
    lfield = _named(raw.get("lfield"), "lfield", default="reciprocal_one_minus_r")
    direction = raw.get("direction")
    if direction is None:
        raise ConfigError("direction", "missing")
    try:
        b = parse_cvec(direction)
    except (TypeError, ValueError) as exc:
        raise ConfigError("direction", str(exc)) from None
    if not np.any(b != 0):
        raise ConfigError("direction", "must be non-zero")
    beta = raw.get("beta", 2.0)
    if not isinstance(beta, (int, float)) or isinstance(beta, bool) or not beta > 1:
        raise ConfigError("beta", "must be a number > 1")
    criteria = raw.get("criteria", ["index"])
    if not isinstance(criteria, list) or not criteria:
        raise ConfigError("criteria", "must be a non-empty list")
    for i, c in enumerate(criteria):
        if c not in PIPELINE:
            raise ConfigError(f"criteria[{i}]", f"unknown check {c!r}; known: {', '.join(PIPELINE)}")
    grid = raw.get("grid", {})
    if not isinstance(grid, dict):
        raise ConfigError("grid", "expected a table")
    s = raw.get("seed", 0) if seed is None else seed
    if not isinstance(s, int) or s < 0:
        raise ConfigError("seed", "must be a non-negative integer")
    gs = raw.get("grid_scale", 1.0) if grid_scale is None else grid_scale
    if not isinstance(gs, (int, float)) or not gs > 0:
        raise ConfigError("grid_scale", "must be positive")
    sections = {k: v for k, v in raw.items() if k in PIPELINE and isinstance(v, dict)}
    return ExperimentConfig(function, lfield, [[float(c.real), float(c.imag)] for c in b],
                            float(beta), list(criteria), grid, int(s), float(gs), sections)


def load_config(path, seed=None, grid_scale=None) -> ExperimentConfig:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError("--config", str(exc)) from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("--config", f"not valid TOML: {exc}") from None
    return parse_config(raw, seed, grid_scale)


# ---------------------------------------------------------------------------
# JSON helpers
# ---------------------------------------------------------------------------


def jsonable(obj):
    """Plain JSON types; complex numbers become [re, im] pairs."""
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(report: dict) -> str:
    return json.dumps(jsonable(report), sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# the pipeline
# ---------------------------------------------------------------------------


class _Context:
    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        try:
            self.F = registry_get(cfg.function["name"], cfg.function["params"])
        except DirIndexError as exc:
            raise ConfigError("function", str(exc)) from None
        self.b = as_direction([complex(*c) for c in cfg.direction])
        if self.b.n != self.F.n:
            raise ConfigError("direction", f"has {self.b.n} components, function lives in C^{self.F.n}")
        try:
            self.L = lfield_get(cfg.lfield["name"], cfg.lfield["params"], cfg.beta, self.b)
        except DirIndexError as exc:
            raise ConfigError("lfield", str(exc)) from None
        self.n_hat: Optional[int] = None
        self._grid = None

    @property
    def grid(self):
        if self._grid is None:
            g = self.cfg.grid
            kind = g.get("kind", "ball")
            if kind == "ball":
                self._grid = default_grid(self.F.n, self.cfg.seed, self.cfg.grid_scale)
            else:
                try:
                    self._grid = sufficient_set_grid(kind, self.b, g.get("params", {}), self.F.n,
                                                     self.cfg.seed, self.cfg.grid_scale)
                except DirIndexError as exc:
                    raise ConfigError("grid", str(exc)) from None
        return self._grid

    def index_value(self) -> int:
        if self.n_hat is None:
            est = global_index_estimate(self.F, self.L, self.b, self.grid)
            self.n_hat = DEFAULT_M_MAX if est.n_global is None else est.n_global
        return self.n_hat


def _point(raw, n, default=None):
    if raw is None:
        return np.zeros(n, dtype=np.complex128) if default is None else default
    return parse_cvec(raw)


def _run_lclass(ctx, sec):
    from .sampling import sobol_ball

    pts = ctx.grid.flat_points() if hasattr(ctx.grid, "flat_points") else ctx.grid
    viol = check_condition2(ctx.L, ctx.b, pts)
    sweep = []
    for eta in sec.get("etas", [0.25, 0.5, 1.0, 2.0]):
        if not 0 <= eta <= ctx.L.beta:
            raise ConfigError("lclass.etas", f"eta = {eta} outside [0, beta]")
        est = estimate_lambda(ctx.L, ctx.b, eta, sobol_ball(int(sec.get("points", 1024)),
                                                           ctx.F.n, ctx.cfg.seed))
        sweep.append({"eta": eta, "lambda1": est.lambda1, "lambda2": est.lambda2,
                      "verdict": est.verdict})
    passed = not viol and all(s["verdict"] == "consistent-with-membership" for s in sweep)
    return passed, {"condition2_violations": len(viol),
                    "first_violation": None if not viol else {"point": viol[0].point,
                                                              "value": viol[0].value,
                                                              "bound": viol[0].bound},
                    "lambda_sweep": sweep}


def _run_index(ctx, sec):
    est = global_index_estimate(ctx.F, ctx.L, ctx.b, ctx.grid, int(sec.get("M_max", DEFAULT_M_MAX)))
    ctx.n_hat = DEFAULT_M_MAX if est.n_global is None else est.n_global
    return est.n_global is not None, est.to_dict()


def _run_thm5(ctx, sec):
    from .criteria import thm5_verify

    rep = thm5_verify(ctx.F, ctx.L, ctx.b, float(sec.get("eta", 1.0)), ctx.grid,
                      int(sec.get("n0_cap", DEFAULT_M_MAX)))
    return rep.passed, rep.to_dict()


def _run_thm8(ctx, sec):
    from .criteria import thm8_index_bound, thm8_sup

    r1, r2 = float(sec.get("r1", 0.5)), float(sec.get("r2", min(2.0, ctx.L.beta)))
    rep = thm8_sup(ctx.F, ctx.L, ctx.b, r1, r2, ctx.grid)
    out = rep.to_dict()
    P1 = rep.constants["P1"]
    if rep.passed and r2 > 1 and P1 >= 1:
        out["index_bound"] = thm8_index_bound(r1, r2, P1)
    return rep.passed, out


def _run_hayman(ctx, sec):
    from .criteria import hayman_verify

    p = int(sec.get("p", ctx.index_value()))
    C = sec.get("C")
    rep = hayman_verify(ctx.F, ctx.L, ctx.b, p, float(C) if C is not None else 1.0, ctx.grid)
    out = rep.to_dict()
    if C is None:
        # no constant given: the check is that some finite constant works
        out["passed"] = bool(math.isfinite(rep.constants["C_min"]))
        out["constants"]["C"] = None
    return out["passed"], out


def _run_thm11(ctx, sec):
    from .criteria import thm11_maxmin

    z0 = _point(sec.get("z0"), ctx.F.n)
    r, ratio = thm11_maxmin(ctx.F, ctx.L, ctx.b, float(sec.get("R", ctx.L.beta)), z0)
    return math.isfinite(ratio), {"r_star": r, "ratio": ratio, "z0": z0}


def _run_thm12_logderiv(ctx, sec):
    from .zeros import thm12_logderiv

    rep = thm12_logderiv(ctx.F, ctx.L, ctx.b, float(sec.get("r", 1.0)), _slice_grid(ctx, sec))
    return rep.passed, rep.to_dict()


def _slice_grid(ctx, sec):
    from .sampling import PointGrid, sobol_ball

    count = max(1, int(round(sec.get("points", 256) * ctx.cfg.grid_scale)))
    return PointGrid(sobol_ball(count, ctx.F.n, ctx.cfg.seed), f"sobol({count})")


def _run_thm12_counting(ctx, sec):
    from .zeros import thm12_counting

    rep = thm12_counting(ctx.F, ctx.L, ctx.b, float(sec.get("r", 1.0)), _slice_grid(ctx, sec))
    return rep.passed, rep.to_dict()


def _run_zeros(ctx, sec):
    from .zeros import counting_residue, default_region, slice_zeros

    z0 = _point(sec.get("z0"), ctx.F.n)
    zs = slice_zeros(ctx.F, z0, ctx.b, default_region(z0, ctx.b))
    out = {"z0": z0, "zeros": zs.to_dict()}
    r = sec.get("r")
    if r is not None:
        n, res, nodes = counting_residue(ctx.F, z0, ctx.b, 0.0, float(r))
        out["counting"] = {"r": float(r), "n": n, "residue": res, "nodes": nodes}
    return True, out


def _rays(ctx, sec):
    from .growth import make_ray

    z0 = _point(sec.get("z0"), ctx.F.n)
    k = int(sec.get("rays", 8))
    return [make_ray(z0, ctx.b, 2 * math.pi * j / k) for j in range(k)]


def _run_growth(ctx, sec):
    from .growth import growth_verify

    N = int(sec.get("N", ctx.index_value()))
    p = int(sec.get("p", 0))
    radii = int(sec.get("radii", 32))
    frac = float(sec.get("fraction", 0.999))
    reps = [growth_verify(ctx.F, ctx.L, ctx.b, ray, np.linspace(0.0, frac * ray.R, radii), p, N)
            for ray in _rays(ctx, sec)]
    return all(r.passed for r in reps), {"N": N, "p": p, "rays": [r.to_dict() for r in reps]}


def _run_limsup(ctx, sec):
    from .growth import limsup_ratio

    N = int(sec.get("N", ctx.index_value()))
    reps = [limsup_ratio(ctx.F, ctx.L, ctx.b, ray) for ray in _rays(ctx, sec)]
    rays = []
    for ray, rep in zip(_rays(ctx, sec), reps):
        d = rep.to_dict()
        d["theta"] = ray.theta
        rays.append(d)
    est = max(r.estimate for r in reps)
    return est <= N + 1, {"N": N, "estimate": est, "bound": N + 1, "rays": rays}


def _run_jensen(ctx, sec):
    from .growth import jensen_chain

    z0 = _point(sec.get("z0"), ctx.F.n)
    N = int(sec.get("N", ctx.index_value()))
    rows = []
    for r in sec.get("r", [0.5]):
        lo, mid, up = jensen_chain(ctx.F, ctx.L, ctx.b, z0, float(r), N)
        rows.append({"r": float(r), "lower": lo, "mid": mid, "upper": up,
                     "ordered": bool(lo <= mid * (1 + 1e-6) + 1e-12 and mid <= up * (1 + 1e-6) + 1e-12)})
    return all(r["ordered"] for r in rows), {"N": N, "z0": z0, "chain": rows}


def _run_pde(ctx, sec):
    from .pde import make_pde, thm13_harness
    from .sampling import PointGrid, sobol_ball

    coeffs = sec.get("coeffs")
    if not isinstance(coeffs, list) or len(coeffs) < 2:
        raise ConfigError("pde.coeffs", "need a list of at least two coefficient maps")
    maps = []
    for i, c in enumerate(coeffs):
        spec = _named(c, f"pde.coeffs[{i}]")
        maps.append(registry_get(spec["name"], spec["params"]))
    hs = _named(sec.get("h"), "pde.h", default="constant")
    h = registry_get(hs["name"], hs["params"] or ({"c": 0.0, "n": ctx.F.n}
                                                  if hs["name"] == "constant" else {}))
    eq = make_pde(maps, h, ctx.b)
    count = max(1, int(round(sec.get("residual_points", 1000) * ctx.cfg.grid_scale)))
    grids = {"default": ctx.grid,
             "residual": PointGrid(sobol_ball(count, ctx.F.n, ctx.cfg.seed + 1), f"sobol({count})")}
    rep = thm13_harness(eq, ctx.L, ctx.b, ctx.F, grids, float(sec.get("r", 1.0)))
    return rep.passed, rep.to_dict()


_RUNNERS = {
    "lclass": _run_lclass, "index": _run_index, "thm5": _run_thm5, "thm8": _run_thm8,
    "hayman": _run_hayman, "thm11": _run_thm11, "thm12_logderiv": _run_thm12_logderiv,
    "thm12_counting": _run_thm12_counting, "zeros": _run_zeros, "growth": _run_growth,
    "limsup": _run_limsup, "jensen": _run_jensen, "pde": _run_pde,
}


def run(cfg: ExperimentConfig, only: Optional[tuple] = None):
    """Execute the requested checks in pipeline order; returns (report, timings).

    A failing check never stops its siblings: its error is recorded in place.
    """
    ctx = _Context(cfg)
    wanted = [c for c in PIPELINE if c in cfg.criteria and (only is None or c in only)]
    results, status, timings = {}, {}, {}
    for name in wanted:
        t0 = time.perf_counter()
        try:
            passed, out = _RUNNERS[name](ctx, cfg.section(name))
            status[name] = "passed" if passed else "failed"
            results[name] = out
        except ConfigError:
            raise
        except DirIndexError as exc:
            status[name] = "error"
            results[name] = {"error": type(exc).__name__, "message": str(exc)}
        timings[name] = time.perf_counter() - t0
    report = {"toolkit": {"name": "dirindex", "version": __version__},
              "config": cfg.echo(), "results": results, "status": status}
    return jsonable(report), timings


def exit_code(report: dict) -> int:
    st = report.get("status", {}).values()
    if any(s == "error" for s in st):
        return 1
    return 2 if any(s == "failed" for s in st) else 0


# ---------------------------------------------------------------------------
# plot data
# ---------------------------------------------------------------------------


def _growth_rows(report):
    rays = report.get("results", {}).get("growth", {}).get("rays")
    if not rays:
        raise MissingSeries("growth")
    header = ["ray", "theta", "r", "lhs", "rhs", "margin"]
    rows = [[i, ray["theta"], r, lhs, rhs, m]
            for i, ray in enumerate(rays)
            for r, lhs, rhs, m in zip(ray["r"], ray["lhs"], ray["rhs"], ray["margins"])]
    return header, rows


def _ratio_rows(report):
    rays = report.get("results", {}).get("limsup", {}).get("rays")
    if not rays:
        raise MissingSeries("ratio")
    header = ["ray", "theta", "r", "ratio"]
    rows = [[i, ray["theta"], r, q] for i, ray in enumerate(rays) for r, q in zip(ray["r"], ray["ratios"])]
    return header, rows


def _lambda_rows(report):
    sweep = report.get("results", {}).get("lclass", {}).get("lambda_sweep")
    if not sweep:
        raise MissingSeries("lambda")
    return ["eta", "lambda1", "lambda2"], [[s["eta"], s["lambda1"], s["lambda2"]] for s in sweep]


_PLOTS = {"growth": _growth_rows, "ratio": _ratio_rows, "lambda": _lambda_rows}


def emit_plot_data(report: dict, what: str, path) -> Path:
    """CSV with a '#'-prefixed header naming the columns; one row per sample."""
    if what not in _PLOTS:
        raise MissingSeries(what)
    header, rows = _PLOTS[what](report)
    path = Path(path)
    with open(path, "w", newline="") as fh:
        fh.write(f"# {what} series from dirindex {__version__}\n")
        fh.write("# columns: " + ",".join(header) + "\n")
        w = csv.writer(fh)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
    return path


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dirindex", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="TOML experiment file")
        p.add_argument("--out", help="report path (stdout when omitted)")
        p.add_argument("--seed", type=int, help="override the config seed")
        p.add_argument("--grid-scale", type=float, help="multiply default grid densities")
        p.add_argument("--plot-data", action="append", choices=PLOT_KINDS, default=[],
                       help="also write <out>.<kind>.csv")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _accel.apply_thread_cap()
    try:
        cfg = load_config(args.config, args.seed, args.grid_scale)
        only = SUBCOMMANDS[args.command]
        if args.command in SUBCOMMAND_DEFAULTS and not any(c in only for c in cfg.criteria):
            cfg.criteria = list(SUBCOMMAND_DEFAULTS[args.command])
        report, timings = run(cfg, only)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DirIndexError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = dumps(report)
    if args.out:
        out = Path(args.out)
        out.write_text(text)
        Path(f"{out}.timings.json").write_text(json.dumps(timings, sort_keys=True, indent=2) + "\n")
        for kind in args.plot_data:
            try:
                emit_plot_data(report, kind, f"{out}.{kind}.csv")
            except MissingSeries:
                print(f"warning: report has no {kind} series", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return exit_code(report)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
