"""Hot numeric kernels, each with a numba and a pure-numpy implementation.

The public names at the bottom of the module are bound to one of the two
implementations according to :data:`dirindex._accel.USE_NUMBA`.  Both
implementations are importable directly (``*_numpy`` / ``*_numba``) so the
test-suite and the benchmark can compare them.

All row kernels treat rows independently; every reduction across rows is a
sequential scan in row order, so results do not depend on the thread count.
"""
from __future__ import annotations

import numpy as np

from ._accel import NUMBA_AVAILABLE, USE_NUMBA, njit, prange

# ---------------------------------------------------------------------------
# Taylor coefficients from equispaced circle samples (trapezoid rule / DFT)
# ---------------------------------------------------------------------------


def taylor_rows_numpy(samples: np.ndarray, kmax: int) -> np.ndarray:
    n = samples.shape[1]
    return np.fft.fft(samples, axis=1)[:, : kmax + 1] / n


@njit(parallel=True)
def taylor_rows_numba(samples, kmax):
    p, n = samples.shape
    # contiguous twiddle table, one row per order
    tw = np.empty((kmax + 1, n), dtype=np.complex128)
    for k in range(kmax + 1):
        for j in range(n):
            ang = -2.0 * np.pi * ((j * k) % n) / n
            tw[k, j] = complex(np.cos(ang), np.sin(ang))
    out = np.empty((p, kmax + 1), dtype=np.complex128)
    for i in prange(p):
        row = samples[i]
        for k in range(kmax + 1):
            re = 0.0
            im = 0.0
            for j in range(n):
                a = row[j]
                w = tw[k, j]
                re += a.real * w.real - a.imag * w.imag
                im += a.real * w.imag + a.imag * w.real
            out[i, k] = complex(re, im) / n
    return out


# ---------------------------------------------------------------------------
# |a_k| * s^k  (normalized derivative magnitudes)
# ---------------------------------------------------------------------------


def normalized_rows_numpy(coeffs: np.ndarray, scale: np.ndarray) -> np.ndarray:
    k = np.arange(coeffs.shape[1])
    with np.errstate(over="ignore", invalid="ignore"):
        return np.abs(coeffs) * scale[:, None] ** k[None, :]


@njit(parallel=True)
def normalized_rows_numba(coeffs, scale):
    p, kk = coeffs.shape
    out = np.empty((p, kk), dtype=np.float64)
    for i in prange(p):
        s = 1.0
        for k in range(kk):
            out[i, k] = abs(coeffs[i, k]) * s
            s *= scale[i]
    return out


# ---------------------------------------------------------------------------
# minimal m0 for which the prefix maximum dominates every order
# ---------------------------------------------------------------------------


def local_index_rows_numpy(v: np.ndarray, rtol: float):
    prefix = np.maximum.accumulate(v, axis=1)
    total = prefix[:, -1:]
    ok = total <= prefix + rtol * (prefix + 1.0)
    idx = np.argmax(ok, axis=1)
    rhs = prefix[np.arange(v.shape[0]), idx]
    return idx.astype(np.int64), rhs


@njit(parallel=True)
def local_index_rows_numba(v, rtol):
    p, kk = v.shape
    idx = np.empty(p, dtype=np.int64)
    rhs = np.empty(p, dtype=np.float64)
    for i in prange(p):
        total = v[i, 0]
        for k in range(1, kk):
            if v[i, k] > total:
                total = v[i, k]
        run = -1.0
        for k in range(kk):
            if v[i, k] > run:
                run = v[i, k]
            if total <= run + rtol * (run + 1.0):
                idx[i] = k
                rhs[i] = run
                break
    return idx, rhs


# ---------------------------------------------------------------------------
# inequality check for a fixed m0: tightest margin over orders m > m0
# ---------------------------------------------------------------------------


def inequality_rows_numpy(v: np.ndarray, m0: int, rtol: float):
    rhs = v[:, : m0 + 1].max(axis=1)
    tail = v[:, m0 + 1 :]
    p = v.shape[0]
    if tail.shape[1] == 0:
        return (np.ones(p, dtype=np.bool_), rhs, np.full(p, np.inf),
                np.full(p, -1, dtype=np.int64))
    margin = rhs[:, None] - tail
    j = np.argmin(margin, axis=1)
    worst = margin[np.arange(p), j]
    holds = worst >= -rtol * (rhs + 1.0)
    return holds, rhs, worst, (j + m0 + 1).astype(np.int64)


@njit(parallel=True)
def inequality_rows_numba(v, m0, rtol):
    p, kk = v.shape
    holds = np.empty(p, dtype=np.bool_)
    rhs = np.empty(p, dtype=np.float64)
    worst = np.empty(p, dtype=np.float64)
    order = np.empty(p, dtype=np.int64)
    for i in prange(p):
        r = v[i, 0]
        for k in range(1, m0 + 1):
            if v[i, k] > r:
                r = v[i, k]
        w = np.inf
        o = -1
        for k in range(m0 + 1, kk):
            m = r - v[i, k]
            if m < w:
                w = m
                o = k
        rhs[i] = r
        worst[i] = w
        order[i] = o
        holds[i] = w >= -rtol * (r + 1.0)
    return holds, rhs, worst, order


# ---------------------------------------------------------------------------
# Hayman-type ratio  u_{p+1} / max_{k<=p} u_k
# ---------------------------------------------------------------------------


def hayman_rows_numpy(u: np.ndarray):
    top = u[:, -1]
    base = u[:, :-1].max(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(top == 0.0, 0.0, top / base)
    return ratio, top, base


@njit(parallel=True)
def hayman_rows_numba(u):
    p, kk = u.shape
    ratio = np.empty(p, dtype=np.float64)
    top = np.empty(p, dtype=np.float64)
    base = np.empty(p, dtype=np.float64)
    for i in prange(p):
        b = u[i, 0]
        for k in range(1, kk - 1):
            if u[i, k] > b:
                b = u[i, k]
        t = u[i, kk - 1]
        top[i] = t
        base[i] = b
        if t == 0.0:
            ratio[i] = 0.0
        elif b == 0.0:
            ratio[i] = np.inf
        else:
            ratio[i] = t / b
    return ratio, top, base


# ---------------------------------------------------------------------------
# Row-wise extrema (first index wins ties) and a flat deterministic reduction
# ---------------------------------------------------------------------------


def row_extrema_numpy(x: np.ndarray):
    return (x.min(axis=1), np.argmin(x, axis=1).astype(np.int64),
            x.max(axis=1), np.argmax(x, axis=1).astype(np.int64))


@njit(parallel=True)
def row_extrema_numba(x):
    p, s = x.shape
    lo = np.empty(p)
    ilo = np.empty(p, dtype=np.int64)
    hi = np.empty(p)
    ihi = np.empty(p, dtype=np.int64)
    for i in prange(p):
        a = x[i, 0]
        ia = 0
        b = x[i, 0]
        ib = 0
        for j in range(1, s):
            if x[i, j] < a:
                a = x[i, j]
                ia = j
            if x[i, j] > b:
                b = x[i, j]
                ib = j
        lo[i] = a
        ilo[i] = ia
        hi[i] = b
        ihi[i] = ib
    return lo, ilo, hi, ihi


def flat_extrema(x: np.ndarray):
    """(min, flat argmin, max, flat argmax) ignoring NaN, first index on ties."""
    flat = np.ravel(x)
    finite = ~np.isnan(flat)
    if not finite.any():
        return np.nan, -1, np.nan, -1
    lo_vals = np.where(finite, flat, np.inf)
    hi_vals = np.where(finite, flat, -np.inf)
    ilo = int(np.argmin(lo_vals))
    ihi = int(np.argmax(hi_vals))
    return float(flat[ilo]), ilo, float(flat[ihi]), ihi


_IMPLS = {
    "taylor_rows": (taylor_rows_numpy, taylor_rows_numba),
    "normalized_rows": (normalized_rows_numpy, normalized_rows_numba),
    "local_index_rows": (local_index_rows_numpy, local_index_rows_numba),
    "inequality_rows": (inequality_rows_numpy, inequality_rows_numba),
    "hayman_rows": (hayman_rows_numpy, hayman_rows_numba),
    "row_extrema": (row_extrema_numpy, row_extrema_numba),
}


def implementations(name: str):
    """Return ``(numpy_impl, numba_impl)`` for a kernel name."""
    return _IMPLS[name]


# pocketfft's O(N log N) transform and one vectorised power beat the compiled
# loops (see benchmarks/bench_kernels.py); the numba versions stay as cross-checks
NUMPY_PREFERRED = frozenset({"taylor_rows", "normalized_rows"})


def _pick(name):
    np_impl, nb_impl = _IMPLS[name]
    if name in NUMPY_PREFERRED:
        return np_impl
    return nb_impl if (USE_NUMBA and NUMBA_AVAILABLE) else np_impl


def selected(name: str):
    """The implementation the dispatcher of ``name`` currently calls."""
    return _pick(name)


def taylor_rows(samples, kmax):
    return _pick("taylor_rows")(np.ascontiguousarray(samples, dtype=np.complex128), int(kmax))


def normalized_rows(coeffs, scale):
    return _pick("normalized_rows")(np.ascontiguousarray(coeffs, dtype=np.complex128),
                                    np.ascontiguousarray(scale, dtype=np.float64))


def local_index_rows(v, rtol):
    return _pick("local_index_rows")(np.ascontiguousarray(v, dtype=np.float64), float(rtol))


def inequality_rows(v, m0, rtol):
    return _pick("inequality_rows")(np.ascontiguousarray(v, dtype=np.float64), int(m0), float(rtol))


def hayman_rows(u):
    return _pick("hayman_rows")(np.ascontiguousarray(u, dtype=np.float64))


def row_extrema(x):
    return _pick("row_extrema")(np.ascontiguousarray(x, dtype=np.float64))
