"""Time the numba kernels against their numpy fallbacks on index-sized inputs.

    python3 benchmarks/bench_kernels.py [--rows 20000] [--repeat 5]

Each kernel is first run once per backend (JIT warm-up, excluded) and the
outputs compared; timings are the best of ``--repeat`` runs.
"""
from __future__ import annotations

import argparse
import timeit

import numpy as np

from dirindex import kernels
from dirindex._accel import NUMBA_AVAILABLE


def _inputs(rows: int, nodes: int, kmax: int, rng):
    samples = rng.standard_normal((rows, nodes)) + 1j * rng.standard_normal((rows, nodes))
    coeffs = samples[:, : kmax + 1].copy()
    scale = rng.uniform(0.5, 2.0, rows)
    v = np.abs(coeffs) * rng.uniform(0.1, 1.0, (rows, kmax + 1)) ** np.arange(kmax + 1)
    return {
        "taylor_rows": (samples, kmax),
        "normalized_rows": (coeffs, scale),
        "local_index_rows": (v, 1e-12),
        "inequality_rows": (v, 2, 1e-12),
        "hayman_rows": (v[:, :6].copy(),),
        "row_extrema": (v,),
    }


def _same(a, b) -> bool:
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return all(np.allclose(x, y, rtol=1e-12, atol=0, equal_nan=True) for x, y in zip(a, b))


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=20000)
    ap.add_argument("--nodes", type=int, default=256)
    ap.add_argument("--kmax", type=int, default=20)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(args.seed)
    cases = _inputs(args.rows, args.nodes, args.kmax, rng)
    print(f"{'kernel':<18}{'numpy ms':>11}{'numba ms':>11}{'speedup':>9}  agree  dispatch")
    for name, call_args in cases.items():
        np_impl, nb_impl = kernels.implementations(name)
        agree = _same(np_impl(*call_args), nb_impl(*call_args))
        t_np = min(timeit.repeat(lambda: np_impl(*call_args), number=1, repeat=args.repeat))
        t_nb = min(timeit.repeat(lambda: nb_impl(*call_args), number=1, repeat=args.repeat))
        used = "numpy" if name in kernels.NUMPY_PREFERRED else "numba"
        print(f"{name:<18}{1e3 * t_np:>11.2f}{1e3 * t_nb:>11.2f}{t_np / t_nb:>8.1f}x  {agree!s:<5}  {used}")


if __name__ == "__main__":
    main()
