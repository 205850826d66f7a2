import math

import numpy as np
import pytest

from dirindex import funcs
from dirindex.errors import BadParams, NotNormalized
from dirindex.growth import (default_r_sequence, growth_integral, growth_rhs, growth_verify,
                             jensen_chain, limsup_ratio, make_ray, ray_exit, weight_rate)
from dirindex.lfield import LField, constant_field, reciprocal_field


def test_ray_exit_examples():
    assert ray_exit([0, 0], [1, 0], 0.3) == pytest.approx(1.0)
    assert ray_exit([0.5, 0], [1, 0], 0.0) == pytest.approx(0.5)
    assert ray_exit([0.5, 0], [1, 0], math.pi) == pytest.approx(1.5)
    with pytest.raises(BadParams):
        ray_exit([1.0, 0], [1, 0], 0.0)


def test_ray_exit_on_sphere(rng):
    for _ in range(20):
        z = 0.6 * (rng.random(2) - 0.5) + 0.6j * (rng.random(2) - 0.5)
        b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        th = 2 * math.pi * rng.random()
        R = ray_exit(z, b, th)
        assert np.linalg.norm(z + R * np.exp(1j * th) * b) == pytest.approx(1.0, abs=1e-13)


@pytest.mark.parametrize("N", [0, 1, 3])
def test_integral_radial(N):
    # along the radius from 0: L = 2/(1-t) and L' > 0, so only (N+1) int L survives
    ray = make_ray([0, 0], [1, 0], 0.0)
    val = growth_integral(reciprocal_field(2.0), ray, 0.9, N)
    assert val == pytest.approx((N + 1) * 2 * math.log(10), rel=1e-12)


def test_integral_inward_rate():
    # from z0 = (0.5, 0) towards the centre L decreases first; closed form
    L = reciprocal_field(2.0)
    ray = make_ray([0.5, 0], [1, 0], math.pi)
    r = 0.5
    # L = 2/(0.5 + t) on [0, 0.5]: int L = 2 ln 2, int (-L')/L = ln 2
    assert growth_integral(L, ray, r, 1) == pytest.approx(2 * 2 * math.log(2) + math.log(2), rel=1e-9)


def test_weight_rate_matches_differences():
    L = reciprocal_field(2.0)
    ray = make_ray([0.2, 0.1j], [1, 1], 0.7)
    t = np.array([0.1, 0.3])
    closed = weight_rate(L, ray, t)
    L_fd = LField("no_rate", 2.0, L.fn)
    assert np.allclose(weight_rate(L_fd, ray, t), closed, rtol=1e-7)


def test_constant_function_growth():
    ray = make_ray([0, 0], [1, 0], 0.0)
    rep = growth_verify(funcs.make_constant(2.0), reciprocal_field(2.0), [1, 0], ray,
                        np.linspace(0.1, 0.9, 9), 0, 0)
    assert rep.passed
    assert np.allclose(rep.lhs, math.log(2.0))
    assert np.all(np.diff(rep.margins) > 0)
    assert rep.margins[0] > 0


def test_growth_rhs_fixed_rule_agrees():
    F, L = funcs.make_exp_linear([1.0, 0.5]), reciprocal_field(2.0)
    ray = make_ray([0.1, 0], [1, 0], 1.0)
    a = growth_rhs(F, L, [1, 0], ray, 0.5, 1)
    b = growth_rhs(F, L, [1, 0], ray, 0.5, 1, quad_points=64)
    assert a == pytest.approx(b, rel=1e-10)


def test_limsup_examples():
    L = reciprocal_field(2.0)
    ray = make_ray([0, 0], [1, 0], 0.0)
    assert limsup_ratio(funcs.make_constant(3.0), L, [1, 0], ray).estimate < 0.05
    rep = limsup_ratio(funcs.make_exp_linear([1.0, 0.5]), L, [1, 0], ray)
    assert rep.estimate < 0.05
    assert rep.tail_from == 18
    with pytest.raises(BadParams):
        limsup_ratio(funcs.make_constant(3.0), L, [1, 0], ray, [0.5, 0.2])


def test_limsup_one_variable():
    # ln f / int l = gamma/beta exactly for f = (1-t)^-gamma, l = beta/(1-t)
    F = funcs.make_inverse_power(3, [1.0])
    rep = limsup_ratio(F, reciprocal_field(2.0), [1.0], make_ray([0.0], [1.0], 0.0))
    assert rep.estimate == pytest.approx(1.5, rel=1e-9)


def test_r_sequence():
    r = default_r_sequence(2.0)
    assert r[0] == 1.0 and r.size == 24 and r[-1] < 2.0


def test_jensen_zero_free():
    F = funcs.make_exp_linear([1.0, 0.0])
    lower, mid, upper = jensen_chain(F, reciprocal_field(2.0), [1, 0], [0, 0], 0.5, 0)
    assert lower == 0.0 and mid == pytest.approx(0.5) and mid <= upper


def test_jensen_closed_forms():
    a = 0.6
    F = funcs.make_normalized_zero(a)
    lower, mid, upper = jensen_chain(F, reciprocal_field(2.0), [1, 0], [0, 0], 0.4, 1)
    assert lower == 0.0
    assert mid == pytest.approx(math.log((0.4 + a) / a), rel=1e-10)
    lower, mid, upper = jensen_chain(F, reciprocal_field(2.0), [1, 0], [0, 0], 0.8, 1)
    assert lower == pytest.approx(math.log(0.8 / a), rel=1e-8)
    assert lower <= mid <= upper


def test_jensen_requires_normalization():
    with pytest.raises(NotNormalized):
        jensen_chain(funcs.make_constant(2.0), constant_field(), [1, 0], [0, 0], 0.5, 0)
