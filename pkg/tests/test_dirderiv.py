import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dirindex import funcs
from dirindex.errors import BadParams, CircleEscapesDomain, EtaOutOfRange, OrderTooHigh
from dirindex.geometry import as_direction, slice_domain
from dirindex.lfield import reciprocal_field
from dirindex.quadrature import (QuadratureSpec, dirderiv, dirderiv_batch, dirderiv_sequence,
                                 index_spec, radius_select)

from conftest import random_ball


def test_spec_validation():
    with pytest.raises(BadParams):
        QuadratureSpec(nodes=100)
    with pytest.raises(BadParams):
        QuadratureSpec(radius_policy="nope")
    with pytest.raises(BadParams):
        QuadratureSpec(nodes=32, max_order=16)


def test_monomial_third_derivative():
    F = funcs.make_slice_poly([0, 0, 0])
    assert dirderiv(F, [0, 0], [1, 0], 0, 3) == pytest.approx(6.0, abs=1e-12)


def test_sequences():
    c = funcs.make_constant(2.5)
    assert np.allclose(dirderiv_sequence(c, [0.1, 0], [1, 1], 0, 4), [2.5, 0, 0, 0, 0], atol=1e-13)
    lin = funcs.make_linear([1, 0])
    assert np.allclose(dirderiv_sequence(lin, [0, 0], [1, 0], 0, 3), [0, 1, 0, 0], atol=1e-12)


def test_exp_linear_geometric():
    c = np.array([0.7 - 0.2j, 1.1])
    b = np.array([1.0, -0.5j])
    z = np.array([0.2, -0.3j])
    seq = dirderiv_sequence(funcs.make_exp_linear(c), z, b, 0, 10)
    a = b @ c
    want = a ** np.arange(11) * np.exp(z @ c)
    assert np.allclose(seq, want, rtol=1e-11, atol=0)


def test_order_too_high():
    with pytest.raises(OrderTooHigh):
        dirderiv(funcs.make_remark4(), [0, 0], [1, 1], 0, 25)


def test_radius_select_example():
    L = reciprocal_field(2.0)
    assert radius_select([0, 0], [1, 0], 0, L, 1.0) == pytest.approx(0.5)
    with pytest.raises(EtaOutOfRange):
        radius_select([0, 0], [1, 0], 0, L, 3.0)


def test_radius_select_at_beta_stays_inside(rng):
    L = reciprocal_field(2.0, beta=2.0)
    for z in random_ball(rng, 50, 2, 0.99):
        r = radius_select(z, [1, 0], 0, L, 2.0)
        ang = np.exp(2j * np.pi * np.arange(64) / 64)
        pts = z[None, :] + (r * ang)[:, None] * np.array([1, 0])
        assert np.all(np.linalg.norm(pts, axis=1) < 1)


def test_ball_domain_rejects_escaping_circle():
    spec = QuadratureSpec(radius_policy="fixed", value=0.5, domain="ball")
    with pytest.raises(CircleEscapesDomain):
        dirderiv_batch(funcs.make_remark4(), np.array([[0.8, 0]]), as_direction([1, 0]), 2, spec)


def test_inverse_power_respects_analytic_radius():
    F = funcs.make_inverse_power(2, [1.0])
    # f(t) = (1 - t)^-2, f^(k)(0) = (k + 1)!
    seq = dirderiv_sequence(F, [0.0], [1.0], 0, 8)
    want = [math.factorial(k + 1) for k in range(9)]
    assert np.allclose(seq, want, rtol=1e-9)


@given(st.integers(0, 10_000), st.sampled_from(["exp_linear", "remark4"]))
def test_closed_form_agreement(seed, name):
    rng = np.random.default_rng(seed)
    F = funcs.make_remark4() if name == "remark4" else funcs.make_exp_linear(
        rng.standard_normal(2) + 1j * rng.standard_normal(2))
    b = as_direction(rng.standard_normal(2) + 1j * rng.standard_normal(2))
    z = random_ball(rng, 5, 2, 0.95)
    d = dirderiv_batch(F, z, b, 12)
    for k in range(13):
        ref = F.dirderiv_closed(z, b, k)
        scale = np.maximum(np.abs(ref), 1e-300)
        ok = np.abs(d[:, k] - ref) <= 1e-9 * scale + 1e-12 * np.abs(d[:, 0])
        assert ok.all(), (k, d[:, k], ref)


def test_index_spec_radius_is_eta_over_L():
    L = reciprocal_field(2.0)
    F = funcs.make_slice_poly([0.1, -0.2])
    z = np.array([[0.3, 0.1]])
    d_eta = dirderiv_batch(F, z, as_direction([1, 0]), 3, index_spec(1.0), L(z))
    d_ada = dirderiv_batch(F, z, as_direction([1, 0]), 3)
    assert np.allclose(d_eta, d_ada, atol=1e-12)


def test_slice_disc_used_for_ball_policy():
    d = slice_domain([0.6, 0], [0, 1])
    spec = QuadratureSpec(radius_policy="clearance", value=0.5, domain="ball")
    seq = dirderiv_batch(funcs.make_remark4(), np.array([[0.6, 0]]), as_direction([0, 1]), 2, spec)
    # d/dz2 exp(-z1^2 + z2^2) at z2 = 0 -> 0; second derivative -> 2 F
    F0 = math.exp(-0.36)
    assert d.radius == pytest.approx(0.8)
    assert np.allclose(seq[0], [F0, 0, 2 * F0], atol=1e-13)
