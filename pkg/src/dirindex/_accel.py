"""Backend selection for the hot kernels.

Numba is used when importable unless ``DIRINDEX_DISABLE_NUMBA`` is set to a
truthy value.  ``DIRINDEX_THREADS`` caps the numba worker pool.
"""
from __future__ import annotations

import os
import warnings

_TRUTHY = {"1", "true", "yes", "on"}


def _flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in _TRUTHY


try:  # pragma: no cover - exercised implicitly
    import numba

    # an old system TBB only disables that threading layer; numba falls back
    warnings.filterwarnings("ignore", message="The TBB threading layer", module="numba")
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    numba = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not _flag("DIRINDEX_DISABLE_NUMBA")


def thread_cap() -> int | None:
    raw = os.environ.get("DIRINDEX_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        return None
    return max(1, n)


def apply_thread_cap() -> None:
    if not USE_NUMBA:
        return
    cap = thread_cap()
    if cap is None:
        return
    numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))


def njit(*args, **kwargs):
    """``numba.njit`` when numba is present, identity decorator otherwise."""
    kwargs.setdefault("cache", True)
    if NUMBA_AVAILABLE:
        return numba.njit(*args, **kwargs)

    def wrap(fn):
        return fn

    if args and callable(args[0]):
        return args[0]
    return wrap


if NUMBA_AVAILABLE:
    prange = numba.prange
else:  # pragma: no cover
    prange = range


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
