import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dirindex import funcs
from dirindex.errors import EmptyComplement, ZeroOnCircle
from dirindex.geometry import SliceDomain, as_direction
from dirindex.lfield import constant_field, reciprocal_field
from dirindex.sampling import sobol_ball
from dirindex.zeros import (complement_points, count_many, counting_function, counting_residue,
                            exceptional_contains, exceptional_set, slice_zeros, thm12_counting,
                            thm12_logderiv)

P2 = funcs.make_slice_poly([0.5, -0.5])


def test_counting_examples():
    assert counting_function(P2, [0, 0], [1, 0], 0, 0.6) == 2
    assert counting_function(P2, [0, 0], [1, 0], 0, 0.4) == 0


def test_counting_multiplicity_of_product_factor():
    # roots -2^j/12: factor 2 sits at -1/3 with multiplicity 2
    F = funcs.make_truncated_product(3, [12.0, 0], [0, 0.5])
    assert counting_function(F, [0, 0], [1, 0], -1 / 3, 0.1) == 2
    assert counting_function(F, [0, 0], [1, 0], 0, 0.9) == 6


def test_counting_residue_is_near_integer():
    n, res, nodes = counting_residue(P2, [0, 0], [1, 0], 0.1, 0.55)
    assert n == 1 and abs(res) < 0.25 and nodes >= 256


def test_zero_on_circle():
    with pytest.raises(ZeroOnCircle):
        counting_function(P2, [0, 0], [1, 0], 0, 0.5)
    assert count_many(P2, np.zeros((1, 2)), as_direction([1, 0]), np.array([0.5]))[0] < 0


def test_slice_zero_examples():
    zs = slice_zeros(P2, [0, 0], [1, 0], SliceDomain(0j, 0.8))
    assert [m for _, m in zs.zeros] == [1, 1]
    assert np.allclose([a for a, _ in zs.zeros], [-0.5, 0.5], atol=1e-10)
    zs = slice_zeros(funcs.make_slice_poly([0.3, 0.3]), [0, 0], [1, 0], (0j, 0.8))
    assert len(zs.zeros) == 1
    a, m = zs.zeros[0]
    assert m == 2 and abs(a - 0.3) < 1e-8
    assert slice_zeros(funcs.make_exp_linear([1, 2]), [0, 0], [1, 1]).zeros == []


@given(st.integers(0, 10_000))
def test_slice_zeros_recovers_roots(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 6))
    roots = 0.7 * np.sqrt(rng.random(k)) * np.exp(2j * np.pi * rng.random(k))
    if k > 1 and np.min(np.abs(roots[:, None] - roots[None, :]) + np.eye(k)) < 1e-3:
        return
    zs = slice_zeros(funcs.make_slice_poly(roots), [0, 0], [1, 0], (0j, 0.9))
    assert zs.total == k
    found = np.array(sorted((a for a, _ in zs.zeros), key=lambda z: (z.real, z.imag)))
    want = np.array(sorted(roots, key=lambda z: (z.real, z.imag)))
    assert np.allclose(found, want, atol=1e-7)


@given(st.integers(0, 10_000))
def test_counting_matches_algebra(seed):
    rng = np.random.default_rng(seed)
    roots = 0.9 * rng.random(4) * np.exp(2j * np.pi * rng.random(4))
    c = complex(*(0.3 * rng.standard_normal(2)))
    r = float(0.1 + 0.8 * rng.random())
    if np.min(np.abs(np.abs(roots - c) - r)) < 1e-3:
        return
    want = int(np.sum(np.abs(roots - c) < r))
    assert counting_function(funcs.make_slice_poly(roots), [0, 0], [1, 0], c, r) == want


def test_exceptional_set():
    L = constant_field(10.0)
    E = exceptional_set(funcs.make_exp_linear([1, 0]), L, [1, 0], [0, 0], 1.0)
    assert not exceptional_contains(E, [0, 0], [1, 0], 0.0)
    E = exceptional_set(P2, L, [1, 0], [0, 0], 1.0)
    assert exceptional_contains(E, [0, 0], [1, 0], 0.5)
    assert exceptional_contains(E, [0, 0], [1, 0], 0.58)
    assert not exceptional_contains(E, [0, 0], [1, 0], 0.0)
    assert np.allclose(E.radii, 0.1)


def test_complement_empty():
    pts = np.array([[0.5, 0], [-0.5, 0]])
    with pytest.raises(EmptyComplement):
        complement_points(P2, constant_field(1.0), [1, 0], 1.0, pts)


def test_thm12_logderiv():
    rep = thm12_logderiv(funcs.make_constant(2), reciprocal_field(), [1, 0], 1.0, sobol_ball(64, 2, 0))
    assert rep.passed and rep.constants["P"] == 0.0
    c = np.array([1.0, 0.5])
    rep = thm12_logderiv(funcs.make_exp_linear(c), constant_field(2.0), [1, 0], 1.0, sobol_ball(64, 2, 0))
    # |F'| / (|F| L) = |c . b| / L = 0.5
    assert rep.constants["P"] == pytest.approx(0.5, rel=1e-10)


def test_thm12_counting():
    pts = sobol_ball(128, 2, 3)
    rep = thm12_counting(funcs.make_exp_linear([1, 1]), reciprocal_field(), [1, 0], 1.0, pts)
    assert rep.constants["n_hat"] == 0
    # three simple roots within 0.05 of the origin; L = 5 gives a disc of radius 0.2
    F = funcs.make_slice_poly([0.05, -0.03j, -0.02 + 0.01j])
    rep = thm12_counting(F, constant_field(5.0), [1, 0], 1.0, np.zeros((1, 2)))
    assert rep.constants["n_hat"] == 3
