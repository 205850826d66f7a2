import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dirindex import kernels
from dirindex._accel import NUMBA_AVAILABLE

needs_numba = pytest.mark.skipif(not NUMBA_AVAILABLE, reason="numba not installed")


def _rows(seed, p=40, k=12, ties=True):
    rng = np.random.default_rng(seed)
    v = np.abs(rng.standard_normal((p, k))) * 10.0 ** rng.integers(-3, 3, (p, 1))
    if ties:
        # exact ties and zero rows exercise the first-index rules
        v[::5, 3] = v[::5, 0]
        v[::7] = 0.0
    return v


@needs_numba
@given(st.integers(0, 10_000))
def test_taylor_parity(seed):
    rng = np.random.default_rng(seed)
    s = rng.standard_normal((6, 64)) + 1j * rng.standard_normal((6, 64))
    a, b = (f(s, 20) for f in kernels.implementations("taylor_rows"))
    assert np.allclose(a, b, rtol=0, atol=1e-13 * np.abs(s).max())


@needs_numba
@given(st.integers(0, 10_000))
def test_normalized_parity(seed):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal((10, 21)) + 1j * rng.standard_normal((10, 21))
    sc = rng.uniform(0.1, 3.0, 10)
    a, b = (f(c, sc) for f in kernels.implementations("normalized_rows"))
    assert np.allclose(a, b, rtol=1e-13)


@needs_numba
@given(st.integers(0, 10_000))
def test_local_index_parity(seed):
    v = _rows(seed)
    a, b = (f(v, 1e-12) for f in kernels.implementations("local_index_rows"))
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@needs_numba
@given(st.integers(0, 10_000), st.integers(0, 11))
def test_inequality_parity(seed, m0):
    v = _rows(seed)
    a, b = (f(v, m0, 1e-12) for f in kernels.implementations("inequality_rows"))
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


@needs_numba
@given(st.integers(0, 10_000))
def test_hayman_parity(seed):
    v = _rows(seed)
    v[1, :-1] = 0.0
    with np.errstate(divide="ignore"):
        a, b = (f(v) for f in kernels.implementations("hayman_rows"))
    for x, y in zip(a, b):
        assert np.array_equal(x, y)
    assert a[0][1] == np.inf


@needs_numba
@given(st.integers(0, 10_000))
def test_row_extrema_parity(seed):
    v = _rows(seed)
    a, b = (f(v) for f in kernels.implementations("row_extrema"))
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_local_index_definition():
    v = np.array([[1.0, 0.5, 2.0, 2.0, 0.1], [3.0, 1.0, 1.0, 1.0, 1.0]])
    idx, rhs = kernels.local_index_rows(v, 1e-12)
    assert idx.tolist() == [2, 0] and rhs.tolist() == [2.0, 3.0]


def test_flat_extrema_ignores_nan_and_takes_first():
    x = np.array([[np.nan, 2.0, 0.5], [0.5, 2.0, np.nan]])
    assert kernels.flat_extrema(x) == (0.5, 2, 2.0, 1)
    lo, ilo, hi, ihi = kernels.flat_extrema(np.full((2, 2), np.nan))
    assert ilo == ihi == -1


def test_disable_flag_selects_numpy():
    env = dict(os.environ, DIRINDEX_DISABLE_NUMBA="1")
    code = ("from dirindex import _accel, kernels; "
            "print(_accel.backend_name(), kernels.selected('local_index_rows') is kernels.local_index_rows_numpy)")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                         check=True).stdout.split()
    assert out == ["numpy", "True"]


@needs_numba
def test_numpy_preferred_dispatch():
    import dirindex._accel as acc
    if not acc.USE_NUMBA:
        pytest.skip("numba disabled")
    assert kernels.selected("taylor_rows") is kernels.taylor_rows_numpy
    assert kernels.selected("hayman_rows") is kernels.hayman_rows_numba
