from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.interpolate import BSpline

from sisampling import GeneratorSpec, ProblemError, SamplingProblem, SystemSpec, build_G
from sisampling.generators import generator_eval, lphi_samples, lphi_support

from conftest import G_ROWS


def scipy_bspline(m):
    return BSpline.basis_element(np.arange(m + 1), extrapolate=False)


def test_quadratic_values():
    N3 = GeneratorSpec.bspline(3)
    assert generator_eval(N3, F(4, 5)) == F(8, 25)
    assert generator_eval(N3, F(9, 5)) == F(33, 50)
    assert generator_eval(N3, F(14, 5)) == F(1, 50)
    for t in (F(-1, 3), 0, 3, F(7, 2), 100):
        assert generator_eval(N3, t) == 0


@pytest.mark.parametrize("m", [2, 3, 4, 5])
@given(t=st.fractions(min_value=-1, max_value=7, max_denominator=97))
def test_bspline_matches_scipy(m, t):
    ref = np.nan_to_num(scipy_bspline(m)(float(t)))
    assert float(generator_eval(GeneratorSpec.bspline(m), t)) == pytest.approx(ref, abs=1e-12)


def test_box_spline_is_half_open():
    g = GeneratorSpec.bspline(1)
    assert [g(t) for t in (F(-1, 9), 0, F(1, 2), 1)] == [0, 1, 1, 0]


@pytest.mark.parametrize("m", [2, 3, 4])
def test_piece_table_matches_exact_values(m):
    g = GeneratorSpec.bspline(m)
    t = np.linspace(-0.5, m + 0.5, 301)
    ref = np.nan_to_num(scipy_bspline(m)(t))
    assert np.max(np.abs(g.evaluate_float(t) - ref)) < 1e-12


def test_piecewise_generator_quadratic():
    # quadratic B-spline in ascending powers of the global t
    pw = GeneratorSpec.piecewise([0, 1, 2, 3],
                                 [[0, 0, F(1, 2)], [F(-3, 2), 3, -1], [F(9, 2), -3, F(1, 2)]])
    for t in np.linspace(-1, 4, 41):
        tf = F(t).limit_denominator(1000)
        assert pw(tf) == GeneratorSpec.bspline(3)(tf)


def test_piecewise_one_third_typo_is_discontinuous():
    # (1/3)(3 - t)^2 on the last piece breaks continuity at t = 2
    with pytest.raises(ProblemError, match="discontinuous"):
        GeneratorSpec.piecewise([0, 1, 2, 3],
                                [[0, 0, F(1, 2)], [F(-3, 2), 3, -1], [3, -2, F(1, 3)]])


@pytest.mark.parametrize("bad", [
    dict(breakpoints=[1, 2], coefficients=[[0]]),
    dict(breakpoints=[0, 2, 1], coefficients=[[0], [0]]),
    dict(breakpoints=[0, 1], coefficients=[[0], [0]]),
])
def test_piecewise_validation(bad):
    with pytest.raises(ProblemError):
        GeneratorSpec.piecewise(**bad)


def test_bspline_order_validation():
    with pytest.raises(ProblemError):
        GeneratorSpec.bspline(0)


def test_sample_table(quad_problem):
    tab = lphi_samples(quad_problem)
    assert tab[(1, 1)] == F(1, 2)
    assert tab[(5, -3)] == F(1, 50)
    for (j, n), v in tab.items():
        if j == 1:
            assert 0 < n < quad_problem.N
    for j, row in enumerate(G_ROWS, start=1):
        assert {n: v for (jj, n), v in tab.items() if jj == j} == row


def test_build_G_rows_exact(quad_problem):
    G = build_G(quad_problem)
    assert [g.coeffs for g in G.g] == G_ROWS
    N = quad_problem.N
    assert len(G.g[0].coeffs) <= N - 1
    assert all(len(g.coeffs) <= N for g in G.g[1:])
    assert min(g.valuation for g in G.g) >= -(quad_problem.r - 1)


def test_G_at_unit_frequency_matches_direct_sum(quad_problem):
    # G(w) entry (j, k) = sum_n (L phi)(n + (j-1) r/s) exp(-2 pi i (w + k/r) n)
    G = build_G(quad_problem)
    r, s = quad_problem.r, quad_problem.s
    for w in (0.0, 0.0371, 0.2):
        ref = np.zeros((s, r), complex)
        for j in range(s):
            tau = F(j * r, s)
            for n in range(-5, 6):
                v = float(quad_problem.lphi(n + tau))
                for k in range(r):
                    ref[j, k] += v * np.exp(-2j * np.pi * (w + k / r) * n)
        assert np.allclose(G.evaluate_w(w), ref, atol=1e-13)


def test_polyphase_rank_equals_G_rank(quad_problem):
    G = build_G(quad_problem)
    rng = np.random.default_rng(3)
    for _ in range(5):
        z0 = np.exp(2j * np.pi * rng.random()) * (0.5 + rng.random())
        H = G.polyphase()(z0 ** quad_problem.r)
        assert np.linalg.matrix_rank(H) == np.linalg.matrix_rank(G.evaluate(z0)) == 4


@pytest.mark.parametrize("m,sys_,N", [
    (3, SystemSpec.identity(), 3),
    (3, SystemSpec.shift(F(-1, 2)), 4),
    (2, SystemSpec.fir([(0, 1), (1, -1)]), 3),
    (4, SystemSpec.shift(F(-1, 3)), 5),
])
def test_N_recomputed_from_support(m, sys_, N):
    p = SamplingProblem(GeneratorSpec.bspline(m), sys_, 5, 6)
    assert p.N == N
    lo, hi = lphi_support(p.generator, p.system)
    assert lo >= 0 and N - 1 < hi <= N


def test_shift_sample_is_advance():
    p = SamplingProblem(GeneratorSpec.bspline(3), SystemSpec.shift(F(-1, 2)), 4, 5)
    assert p.lphi(F(13, 10)) == GeneratorSpec.bspline(3)(F(4, 5))


@pytest.mark.parametrize("kwargs", [
    dict(generator=GeneratorSpec.bspline(3), r=2, s=3),             # N > r
    dict(generator=GeneratorSpec.bspline(3), r=4, s=4),             # s = r
    dict(generator=GeneratorSpec.bspline(1), r=3, s=4),             # N = 1
    dict(generator=GeneratorSpec.bspline(3), r=4, s=5, N_declared=4),
    dict(generator=GeneratorSpec.bspline(2), system=SystemSpec.shift(F(1, 2)), r=3, s=4),
])
def test_problem_validation(kwargs):
    with pytest.raises(ProblemError):
        SamplingProblem(**kwargs)


def test_fir_needs_a_tap():
    with pytest.raises(ProblemError):
        SystemSpec.fir([(0, 0)])
