import numpy as np
import pytest

from dirindex import funcs
from dirindex.errors import BadParams, EmptyComplement
from dirindex.lfield import constant_field, remark4_field
from dirindex.pde import (condition43_check, lemma6_check, make_pde, residual, residual_rows,
                          thm13_harness)
from dirindex.funcs import AnalyticMap
from dirindex.sampling import sobol_ball

from conftest import random_ball

ZERO = funcs.make_constant(0)
ONE = funcs.make_constant(1)
# d w / d b + 2 (z1 - z2) w = 0 with b = (1, 1) is solved by the remark4 map
G1 = funcs.make_linear([2, -2])
REMARK4_PDE = make_pde([ONE, G1], ZERO, [1, 1])


def test_remark4_residual():
    pts = sobol_ball(500, 2, 4)
    assert np.abs(residual_rows(REMARK4_PDE, funcs.make_remark4(), pts)).max() <= 1e-10


def test_trivial_solution():
    assert residual(REMARK4_PDE, ZERO, [0.1, 0.2]) == 0


def test_perturbed_solution_detected():
    base = funcs.make_remark4()
    w = AnalyticMap("perturbed", 2, lambda z: base(z) + 0.1 * z[..., 0])
    assert abs(residual(REMARK4_PDE, w, [0.3, -0.1j])) > 1e-3


def test_needs_two_coefficients():
    with pytest.raises(BadParams):
        make_pde([ONE], ZERO, [1, 1])


def test_condition43_remark4(rng):
    pts = random_ball(rng, 2000, 2, 1.0)
    T, rep = condition43_check(REMARK4_PDE, remark4_field(), [1, 1], 1.0, pts)
    w = np.abs(pts[:, 1] - pts[:, 0])
    assert T == pytest.approx((2 * w / (2 * w + 1)).max(), rel=1e-12)
    assert T <= 1 and rep.passed


def test_condition43_constants():
    pde = make_pde([funcs.make_constant(2), funcs.make_constant(3), funcs.make_constant(-5)], ZERO, [1, 0])
    T, _ = condition43_check(pde, constant_field(1.0), [1, 0], 1.0, sobol_ball(32, 2, 0))
    assert T == pytest.approx(2.5)


def test_condition43_excludes_zero_discs():
    pde = make_pde([funcs.make_linear([1, 0]), ONE], ZERO, [1, 0])
    pts = np.vstack([sobol_ball(512, 2, 1), [[0, 0], [1e-4, 0.1]]])
    Ts = []
    for r in (0.5, 0.2, 0.05):
        T, rep = condition43_check(pde, constant_field(2.0), [1, 0], r, pts)
        assert np.isfinite(T) and rep.extra["excluded"] >= 2
        Ts.append(T)
    assert Ts[0] < Ts[1] < Ts[2]
    assert Ts[0] <= 1 / (2 * 0.5 / 2.0) + 1e-12


def test_lemma6():
    P, _ = lemma6_check(funcs.make_constant(3), remark4_field(), [1, 1], 1.0, 2, sobol_ball(64, 2, 0))
    assert P == pytest.approx(0.0, abs=1e-12)
    pts = sobol_ball(1000, 2, 2)
    P, rep = lemma6_check(funcs.make_remark4(), remark4_field(), [1, 1], 1.0, 2, pts)
    w = np.abs(pts[:, 1] - pts[:, 0])
    assert P == pytest.approx((4 * w ** 2 / (2 * w + 1) ** 2).max(), rel=1e-9)
    assert P <= 1


def test_harness_consistent():
    rep = thm13_harness(REMARK4_PDE, remark4_field(), [1, 1], funcs.make_remark4(),
                        sobol_ball(1000, 2, 3))
    assert rep.verdict == "consistent" and rep.passed
    assert rep.stages["residual"]["sup"] <= 1e-10
    assert rep.stages["solution"]["estimate"]["n_global"] == 0


def test_harness_empty_complement():
    pde = make_pde([funcs.make_slice_poly([0.5, -0.5]), ONE], ZERO, [1, 0])
    pts = np.array([[0.5, 0], [-0.5, 0]])
    with pytest.raises(EmptyComplement):
        thm13_harness(pde, constant_field(1.0), [1, 0], ZERO, pts)


def test_harness_withheld_for_unbounded_rhs():
    from dirindex.lfield import reciprocal_field
    h = funcs.make_truncated_product(12, [300.0, 0], [0, 0.5])
    pde = make_pde([ONE, ONE], h, [1, 0])
    a = -(2.0 ** 12) / 300.0
    grids = {"default": sobol_ball(64, 2, 0), "coefficients": np.array([[a, 0]])}
    rep = thm13_harness(pde, reciprocal_field(2.0), [1, 0], ZERO, grids)
    assert rep.verdict == "withheld"
    assert not rep.stages["coefficients"]["passed"]
