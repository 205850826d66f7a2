import math

import numpy as np
import pytest

from dirindex import funcs
from dirindex.criteria import (circle_extrema, circle_stats, hayman_verify, theoretical_constants,
                               thm5_verify, thm8_index_bound, thm8_ratio, thm8_sup, thm11_maxmin)
from dirindex.errors import BadLambdas, BadRadii
from dirindex.geometry import as_direction
from dirindex.lfield import reciprocal_field, remark4_field
from dirindex.quadrature import QuadratureSpec
from dirindex.sampling import PointGrid, sobol_ball

L2 = reciprocal_field(2.0)
Z1 = funcs.make_linear([1, 0])


def test_circle_stats_linear():
    s = circle_stats(Z1, [0, 0], [1, 0], 0, 0.5)
    assert s.max_mod == pytest.approx(0.5, rel=1e-12)
    assert s.max_term == pytest.approx(0.5, rel=1e-12)
    assert s.central_index == 1


def test_circle_stats_constant():
    s = circle_stats(funcs.make_constant(-3), [0.1, 0], [1, 1], 0, 0.3)
    assert s.max_mod == pytest.approx(3.0) and s.central_index == 0


def test_circle_extrema_closed_form():
    F = funcs.make_normalized_zero(0.5)
    hi, lo = circle_extrema(F, np.zeros((1, 2)), as_direction([1, 0]), np.array([0.3]))
    assert hi[0] == pytest.approx(1.6, rel=1e-12)
    assert lo[0] == pytest.approx(0.4, rel=1e-12)


def test_thm5_constant():
    rep = thm5_verify(funcs.make_constant(2), L2, [1, 0], 1.0, sobol_ball(64, 2, 0))
    assert rep.passed
    assert rep.constants["P1"] == pytest.approx(1.0, abs=1e-12)
    assert rep.constants["n0"] == 0


def test_thm5_remark4_slices():
    from dirindex.index import sufficient_set_grid
    grid = sufficient_set_grid("hyperplane_sum", [1, 1], {"count": 32}, n=2)
    rep = thm5_verify(funcs.make_remark4(), remark4_field(), [1, 1], 1.0, grid)
    assert rep.passed and math.isfinite(rep.constants["P1"])
    assert rep.constants["n0"] == 0


def test_thm5_multiple_zero_fails():
    # factor j = 8 vanishes to order 8 at z1 = -2^8 / 300 along b = (1, 0)
    F = funcs.make_truncated_product(8, [300.0, 0], [0, 0.5])
    a = -(2.0 ** 8) / 300.0
    pts = np.array([[a + d * (1 - abs(a)), 0] for d in (1e-1, 1e-2, 0.0)])
    rep = thm5_verify(F, L2, [1, 0], 1.0, pts, n0_cap=4)
    assert not rep.passed
    ratios = [thm5_verify(F, L2, [1, 0], 1.0, pts[i: i + 1], n0_cap=4).constants["P1"]
              for i in range(3)]
    assert ratios[0] < ratios[1] < ratios[2] == math.inf


def test_thm8_examples():
    assert thm8_ratio(funcs.make_constant(5), L2, [1, 0], 0.5, 2.0, [0.2, 0]) == pytest.approx(1.0)
    assert thm8_ratio(Z1, L2, [1, 0], 0.5, 2.0, [0, 0]) == pytest.approx(4.0, rel=1e-10)
    c = np.array([1.5, 0.0])
    z = np.array([0.1, 0.2])
    a = float(np.real(np.array([1.0, 0]) @ c))
    want = math.exp(a * (2.0 - 0.5) / float(L2(z[None, :])[0]))
    assert thm8_ratio(funcs.make_exp_linear(c), L2, [1, 0], 0.5, 2.0, z) == pytest.approx(want, rel=1e-10)
    with pytest.raises(BadRadii):
        thm8_ratio(Z1, L2, [1, 0], 0.5, 3.0, [0, 0])


def test_thm8_index_bound_plugin():
    assert thm8_index_bound(0.5, math.e, 1.0) == pytest.approx(math.log(2), rel=1e-15)
    assert thm8_index_bound(0.5, math.e, math.e ** 2) == pytest.approx(math.log(2) + 2, rel=1e-15)


def test_thm8_sup_linear():
    # (|z1| + r2/L) / (|z1| + r1/L) peaks at the origin with value r2/r1
    pts = sobol_ball(256, 2, 1)
    rep = thm8_sup(Z1, L2, [1, 0], 0.5, 2.0, pts)
    assert rep.passed and 1.0 < rep.constants["P1"] < 4.0
    rep = thm8_sup(Z1, L2, [1, 0], 0.5, 2.0, np.vstack([pts, [[0, 0]]]))
    assert rep.constants["P1"] == pytest.approx(4.0, rel=1e-10)


def test_hayman_examples():
    rep = hayman_verify(funcs.make_constant(2), L2, [1, 0], 0, 1.0, sobol_ball(64, 2, 0))
    assert rep.passed and rep.constants["C_min"] == pytest.approx(0.0, abs=1e-12)
    rep = hayman_verify(Z1, L2, [1, 0], 1, 1e-3, sobol_ball(64, 2, 0))
    assert rep.passed and rep.constants["C_min"] < 1e-10
    pts = sobol_ball(1000, 2, 5)
    rep = hayman_verify(funcs.make_remark4(), remark4_field(), [1, 1], 0, 1.0, pts)
    w = np.abs(pts[:, 1] - pts[:, 0])
    assert rep.passed
    assert rep.constants["C_min"] == pytest.approx((2 * w / (2 * w + 1)).max(), rel=1e-9)


def test_thm11_constant_and_zero():
    r, ratio = thm11_maxmin(funcs.make_constant(1), L2, [1, 0], 1.0, [0, 0])
    assert ratio == pytest.approx(1.0)
    F = funcs.make_normalized_zero(0.5)
    r, ratio = thm11_maxmin(F, L2, [1, 0], 2.0, [0, 0])
    rt = r / 2.0
    assert ratio == pytest.approx((rt + 0.5) / abs(rt - 0.5), rel=1e-9)
    assert abs(rt - 0.5) > 0.1


def test_thm11_exp_linear():
    c = np.array([0.8, 0.0])
    r, ratio = thm11_maxmin(funcs.make_exp_linear(c), L2, [1, 0], 2.0, [0.2, 0])
    L0 = float(L2(np.array([[0.2, 0]]))[0])
    assert ratio == pytest.approx(math.exp(2 * 0.8 * r / L0), rel=1e-9)


def test_theoretical_constants_plugin():
    assert theoretical_constants(0, 1, 1, 1) == (3, 8.0)
    assert theoretical_constants(1, 1, 1, 0.5) == (3, 8.0)
    with pytest.raises(BadLambdas):
        theoretical_constants(1, 2.0, 1.0, 1.0)


@pytest.mark.parametrize("j", [11, 12])
@pytest.mark.parametrize("s", [1e-3, 1e-1])
def test_hayman_near_multiple_zero(j, s):
    # F has a zero of order j at a = -2^j/6000 on the z1 axis; at t-distance
    # s/L from it u_{k+1}/u_k = (j - k)/s, so the p = 4 ratio is (j - 4)/s
    F = funcs.make_truncated_product(12, [6000.0, 0], [0, 0.5])
    L = reciprocal_field(4.0)
    b = np.array([0.001, 0.0])
    a = -(2.0 ** j) / 6000.0
    p = np.array([[a + s * b[0] / (4.0 / (1 - abs(a))), 0]])
    rep = hayman_verify(F, L, b, 4, 1.0, p, QuadratureSpec(max_order=5))
    assert rep.constants["C_min"] == pytest.approx((j - 4) / s, rel=2 * s)
