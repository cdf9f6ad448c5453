"""Shared fixtures: the quadratic B-spline problem with r = 4, s = 5."""
from fractions import Fraction as F

import numpy as np
import pytest

from sisampling import GeneratorSpec, SamplingProblem, SystemSpec, reduce_problem
from sisampling.leftinv import solve_min_oversampling

# Reference values for the quadratic B-spline, r = 4, s = 5.
G_ROWS = [
    {1: F(1, 2), 2: F(1, 2)},
    {0: F(8, 25), 1: F(33, 50), 2: F(1, 50)},
    {-1: F(9, 50), 0: F(37, 50), 1: F(2, 25)},
    {-2: F(2, 25), -1: F(37, 50), 0: F(9, 50)},
    {-3: F(1, 50), -2: F(33, 50), -1: F(8, 25)},
]

# tilde G as (constant part, lambda coefficient) per entry
TILDE_G = [
    [(0, F(1, 2)), (0, F(1, 2)), (0, 0), (0, 0)],
    [(0, F(33, 50)), (0, F(1, 50)), (0, 0), (F(8, 25), 0)],
    [(0, F(2, 25)), (0, 0), (F(9, 50), 0), (F(37, 50), 0)],
    [(0, 0), (F(2, 25), 0), (F(37, 50), 0), (F(9, 50), 0)],
    [(F(1, 50), 0), (F(33, 50), 0), (F(8, 25), 0), (0, 0)],
]

# Row operations giving [G'; 0]; rows 4 and 5 as they must read for R G = [G'; 0].
FIXTURE_R = [
    [0, 0, 1, 0, 0],
    [0, 1, 0, 0, 0],
    [1, 0, 0, 0, 0],
    [0, F(161, 18), F(-37, 9), 1, 0],
    [0, F(37, 9), F(-16, 9), 0, 1],
]

G_PRIME = [[F(9, 50), F(37, 50)], [0, F(8, 25)]]

M2_ENTRIES = [
    [(0, F(1, 2)), (0, F(1, 2))],
    [(0, F(5017, 900)), (F(2, 25), F(161, 900))],
    [(F(1, 50), F(1157, 450)), (F(33, 50), F(37, 450))],
]

# Reference left inverse to four decimals, scaled by 1e-3: constant term and lambda term (5 x 4 each).
L_REFERENCE = np.array([
    [[4.4812, -0.1438, 0.0166, -0.0043],
     [-3.4840, 0.1118, -0.0128, 0.0031],
     [1.6069, -0.0514, 0.0056, 0.0000],
     [-0.4125, 0.0125, 0.0000, -0.0000],
     [0.0500, 0.0000, -0.0000, 0.0000]],
    [[-0.0021, 0.0001, -0.0000, 0.0000],
     [0.0517, -0.0017, 0.0002, -0.0000],
     [-0.4133, 0.0133, -0.0015, 0.0004],
     [1.6071, -0.0516, 0.0059, -0.0015],
     [-3.4841, 0.1118, -0.0129, 0.0033]],
])


@pytest.fixture(scope="session")
def quad_problem():
    return SamplingProblem(GeneratorSpec.bspline(3), SystemSpec.identity(), 4, 5)


@pytest.fixture(scope="session")
def quad_trace(quad_problem):
    return reduce_problem(quad_problem)


@pytest.fixture(scope="session")
def quad_fixture_trace(quad_problem):
    return reduce_problem(quad_problem, R=np.array(FIXTURE_R, dtype=object))


@pytest.fixture(scope="session")
def quad_left_inverse(quad_trace, quad_problem):
    return solve_min_oversampling(quad_trace.pencil, quad_problem.N)


def corpus():
    """Problems with N <= r over B-splines of order 2..4 and identity/shift systems."""
    systems = [SystemSpec.identity(), SystemSpec.shift(F(-1, 2)), SystemSpec.shift(-1),
               SystemSpec.shift(F(-1, 3))]
    out = []
    for order in (2, 3, 4):
        for sys_ in systems:
            for r, s in ((3, 4), (4, 5), (4, 6), (5, 6)):
                try:
                    out.append(SamplingProblem(GeneratorSpec.bspline(order), sys_, r, s))
                except ValueError:
                    pass
    return out


def problem_id(p):
    sd = p.system.to_dict()
    sys_ = sd["kind"] if sd["kind"] != "shift" else f"shift{sd['d']}"
    return f"m{p.generator.to_dict().get('order')}-{sys_}-r{p.r}s{p.s}"


def sawtooth_generator():
    """Piecewise linear bumps of width 4/5 on [0, 4].

    It vanishes at every multiple of 4/5, so with r = 4, s = 5 the constant
    block of the reduced matrix is zero while every row of G is nonzero.
    """
    bp = [F(2 * k, 5) for k in range(11)]
    pieces = []
    for k in range(10):
        a = bp[k - k % 2]
        pieces.append([F(-5, 2) * a, F(5, 2)] if k % 2 == 0 else [F(5, 2) * (a + F(4, 5)), F(-5, 2)])
    return GeneratorSpec.piecewise(bp, pieces)


@pytest.fixture(scope="session")
def sawtooth_problem():
    return SamplingProblem(sawtooth_generator(), SystemSpec.identity(), 4, 5)


# --- acceptance reporting ----------------------------------------------------

_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        detail = dict(item.user_properties).get("detail", "")
        _ACCEPTANCE[n] = ("PASS" if rep.passed else "FAIL", title, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        status, title, detail = _ACCEPTANCE[n]
        line = f"criterion {n} {status}: {title}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)
