"""Reconstruction functions and end-to-end verification of the sampling formula.

With ``a_j(z) = sum_n c_{j,n} z**n`` the first row of a Laurent left inverse
of ``G(z)``, the functions ``S_j(t) = r sum_n c_{j,n} phi(t - n)`` recover
every ``f`` in the shift-invariant space from its samples:

    f(t) = sum_n sum_j (L f)(r n + (j-1) r/s) S_j(t - r n).

Samples are indexed by the flat position ``m = s n + (j-1)``, i.e. ``m`` is
the sample at time ``m r / s``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .decision import existence_check
from .generators import GeneratorSpec, SamplingProblem
from .leftinv import (LeftInverse, PreconditionFailed, backmap_to_G, min_oversampling_conditions,
                      exact_first_row,
                      solve_general, solve_min_oversampling)
from .pencil import DEFAULT_TOL
from .poly import LaurentPoly

__all__ = [
    "CoverageGap",
    "NoFilters",
    "ReconstructionFilters",
    "FilterDesign",
    "filters_from_row",
    "design_filters",
    "sample_function",
    "reconstruct_eval",
    "interior_interval",
    "verify_reconstruction",
]


class CoverageGap(LookupError):
    """Some sample needed for the requested points is not available."""

    def __init__(self, missing: Sequence[int]):
        self.missing = sorted(set(missing))
        head = ", ".join(map(str, self.missing[:10]))
        more = "" if len(self.missing) <= 10 else f" (+{len(self.missing) - 10} more)"
        super().__init__(f"missing samples at indices {head}{more}")


@dataclass
class ReconstructionFilters:
    """Per-channel coefficients ``c_{j,n}`` (channels ``0..s-1``).

    ``exact_channels`` keeps the rational coefficients when they are known.
    """

    channels: list[dict[int, float]]
    generator: GeneratorSpec
    r: int
    exact_channels: list[dict[int, Fraction]] | None = None

    @property
    def s(self) -> int:
        return len(self.channels)

    def window(self, j: int) -> tuple[int, int] | None:
        """Exponent range ``(min n, max n)`` of channel ``j``, or None if empty."""
        c = self.channels[j]
        return (min(c), max(c)) if c else None

    def support(self, j: int) -> tuple[float, float] | None:
        """Interval containing the support of ``S_j``."""
        w = self.window(j)
        if w is None:
            return None
        return float(w[0]), float(w[1] + self.generator.support_length)

    def evaluate(self, j: int, t) -> np.ndarray:
        """``S_j(t)``."""
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for n, c in self.channels[j].items():
            out += c * self.generator.evaluate_float(t - n)
        return self.r * out

    def rows(self) -> list[tuple[int, int, float]]:
        """``(channel, exponent, coefficient)`` rows, channels 1-based."""
        return [(j + 1, n, c) for j, ch in enumerate(self.channels) for n, c in sorted(ch.items())]


def filters_from_row(a_row: Sequence[LaurentPoly], p: SamplingProblem,
                     exact_row: Sequence[LaurentPoly] | None = None) -> ReconstructionFilters:
    """Read ``c_{j,n}`` off the first row of a left inverse of ``G(z)``.

    If ``exact_row`` is given it takes precedence for the float coefficients
    too, so both views agree to rounding.
    """
    chans, ex = [], None
    if exact_row is not None:
        ex = [dict(a.items()) for a in exact_row]
        chans = [{k: float(v) for k, v in c.items()} for c in ex]
    else:
        for a in a_row:
            chans.append({k: float(np.real(v)) for k, v in a.items() if np.real(v) != 0})
    return ReconstructionFilters(chans, p.generator, p.r, ex)


@dataclass
class FilterDesign:
    """Everything produced on the way from a problem to its filters."""

    problem: SamplingProblem
    report: object
    left_inverse: LeftInverse
    a_row: list[LaurentPoly]
    filters: ReconstructionFilters
    method: str = ""
    notes: list[str] = field(default_factory=list)


class NoFilters(ArithmeticError):
    """The problem admits no compactly supported reconstruction functions."""


def design_filters(p: SamplingProblem, tol: float = DEFAULT_TOL, nu_max: int | None = None,
                   report=None, oracle: bool = False) -> FilterDesign:
    """Decide existence, solve for a left inverse, back-map and build the filters.

    The minimum-oversampling solver is used when ``s = r + 1`` and its rank
    conditions hold; otherwise the general degree search runs up to
    ``nu_max`` (default ``r N``).
    """
    if report is None:
        report = existence_check(p, tol=tol, oracle=oracle)
    if not report.exists:
        raise NoFilters("no compactly supported reconstruction functions exist")
    trace = report.trace
    P = trace.pencil
    nu_max = p.r * p.N if nu_max is None else nu_max
    method = "general"
    L = None
    if p.s == p.r + 1 and min_oversampling_conditions(P, p.N)["ok"]:
        try:
            L = solve_min_oversampling(P, p.N)
            method = "minimum-oversampling"
        except PreconditionFailed:
            L = None
    if L is None:
        L = solve_general(P, nu_max)
    _, a_row = backmap_to_G(L, p.r, trace.G)
    exact_row = exact_first_row(L, p.r) if L.exact_coeffs is not None else None
    return FilterDesign(p, report, L, a_row, filters_from_row(a_row, p, exact_row), method)


def _lphi_memo(p: SamplingProblem):
    cache: dict[Fraction, Fraction] = {}

    def f(t: Fraction) -> Fraction:
        v = cache.get(t)
        if v is None:
            v = cache[t] = p.lphi(t)
        return v
    return f


def sample_function(coeffs: Mapping[int, Fraction], p: SamplingProblem,
                    m_range: tuple[int, int] | None = None) -> dict[int, Fraction]:
    """Exact samples ``(L f)(m r / s)`` of ``f = sum_k a_k phi(. - k)``.

    ``m_range`` is inclusive; by default it spans the support of ``L f``.
    Every index in the range is present, zeros included.
    """
    from .generators import lphi_support

    coeffs = {int(k): Fraction(v) for k, v in coeffs.items() if v != 0}
    if m_range is None:
        if not coeffs:
            return {}
        lo, hi = lphi_support(p.generator, p.system)
        m_range = (math.floor((min(coeffs) + lo) * p.s / p.r),
                   math.ceil((max(coeffs) + hi) * p.s / p.r))
    lphi = _lphi_memo(p)
    out = {}
    for m in range(m_range[0], m_range[1] + 1):
        t = Fraction(m * p.r, p.s)
        out[m] = sum((a * lphi(t - k) for k, a in coeffs.items()), Fraction(0))
    return out


def _needed(filters: ReconstructionFilters, t: np.ndarray):
    """Yield ``(j, n, mask)``: sample ``s n + j`` contributes at ``t[mask]``."""
    r, s = filters.r, filters.s
    for j in range(s):
        sup = filters.support(j)
        if sup is None:
            continue
        a, b = sup
        n_lo = math.ceil((t.min() - b) / r)
        n_hi = math.floor((t.max() - a) / r)
        for n in range(n_lo, n_hi + 1):
            x = t - r * n
            mask = (x > a) & (x < b)
            if mask.any():
                yield j, n, mask


def reconstruct_eval(samples: Mapping[int, float], filters: ReconstructionFilters,
                     t_grid, exact: bool = False) -> np.ndarray:
    """Evaluate the sampling formula at ``t_grid``.

    The default evaluates every ``S_j(t - r n)`` in floating point. With
    ``exact=True`` each ``S_j`` is expanded in translates of ``phi`` and the
    resulting coefficients ``d_p = r sum_{j,n} (L f)(s n + j) c_{j, p - r n}``
    are accumulated in rational arithmetic, so only the final evaluation of
    ``phi`` is rounded.

    Raises :class:`CoverageGap` if a translate overlapping the grid needs a
    sample that is not in ``samples``.
    """
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    out = np.zeros_like(t)
    if t.size == 0:
        return out
    s, r = filters.s, filters.r
    missing = []
    if exact:
        if filters.exact_channels is None:
            raise TypeError("exact evaluation needs exact filter coefficients")
        d: dict[int, Fraction] = {}
        for j, n, mask in _needed(filters, t):
            m = s * n + j
            if m not in samples:
                missing.append(m)
                continue
            v = Fraction(samples[m])
            if v:
                for k, c in filters.exact_channels[j].items():
                    d[r * n + k] = d.get(r * n + k, Fraction(0)) + r * v * c
        if missing:
            raise CoverageGap(missing)
        for p_, v in d.items():
            if v:
                out += float(v) * filters.generator.evaluate_float(t - p_)
        return out
    for j, n, mask in _needed(filters, t):
        m = s * n + j
        if m not in samples:
            missing.append(m)
            continue
        v = float(samples[m])
        if v:
            out[mask] += v * filters.evaluate(j, t[mask] - r * n)
    if missing:
        raise CoverageGap(missing)
    return out


def interior_interval(filters: ReconstructionFilters, m_lo: int, m_hi: int) -> tuple[float, float]:
    """Points ``t`` whose formula only uses samples ``m_lo..m_hi`` (conservative)."""
    r, s = filters.r, filters.s
    lo, hi = -np.inf, np.inf
    for j in range(s):
        sup = filters.support(j)
        if sup is None:
            continue
        a, b = sup
        # need s*n + j >= m_lo for the smallest n and <= m_hi for the largest
        lo = max(lo, b + r * (m_lo - j) / s)
        hi = min(hi, a + r * (m_hi - j) / s)
    return lo, hi


@dataclass
class VerificationReport:
    max_error: float
    per_trial: list[float]
    grid: tuple[float, float, int] | None = None
    design: FilterDesign | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {"maxError": self.max_error, "trials": len(self.per_trial),
               "perTrial": list(self.per_trial)}
        if self.grid is not None:
            out["grid"] = {"start": self.grid[0], "stop": self.grid[1], "points": self.grid[2]}
        if self.design is not None:
            out["nu"] = self.design.left_inverse.nu
            out["kappa"] = self.design.left_inverse.kappa
            out["method"] = self.design.method
        return out


def random_coefficients(rng: np.random.Generator, k_range=(-3, 3), denom: int = 1000) -> dict:
    """Uniform coefficients in ``[-1, 1]`` snapped to multiples of ``1/denom``."""
    ks = range(k_range[0], k_range[1] + 1)
    return {k: Fraction(int(round(u * denom)), denom) for k, u in zip(ks, rng.uniform(-1, 1, len(ks)))}


def verify_reconstruction(p: SamplingProblem, trials: int, seed: int = 0, points: int = 200,
                          design: FilterDesign | None = None, tol: float = DEFAULT_TOL,
                          nu_max: int | None = None, exact: bool = False) -> VerificationReport:
    """Reconstruct random ``f`` with coefficients ``a_-3..a_3`` and report the max error.

    Samples are computed exactly over a window wide enough for every
    translate that touches the support of ``f``; the grid has ``points``
    equally spaced values inside that support. ``exact`` selects the
    evaluation mode of :func:`reconstruct_eval`.
    """
    if trials < 0:
        raise ValueError("trials must be nonnegative")
    if trials == 0:
        return VerificationReport(0.0, [])
    if design is None:
        design = design_filters(p, tol=tol, nu_max=nu_max)
    F = design.filters
    L = float(p.generator.support_length)
    k_lo, k_hi = -3, 3
    t0, t1 = k_lo, k_hi + L
    reach = max(max(abs(a), abs(b)) for a, b in
                (F.support(j) for j in range(F.s) if F.support(j) is not None))
    m_lo = math.floor((t0 - reach - p.r) * p.s / p.r)
    m_hi = math.ceil((t1 + reach + p.r) * p.s / p.r)
    lo, hi = interior_interval(F, m_lo, m_hi)
    if not (lo <= t0 and t1 <= hi):
        raise CoverageGap([m for m in (m_lo, m_hi)])
    eps = 1e-9 * max(1.0, L)
    grid = np.linspace(t0 + eps, t1 - eps, points)
    errs = []
    for child in np.random.SeedSequence(seed).spawn(trials):
        rng = np.random.default_rng(child)
        a = random_coefficients(rng, (k_lo, k_hi))
        samples = sample_function(a, p, (m_lo, m_hi))
        rec = reconstruct_eval(samples, F, grid, exact=exact)
        truth = sum(float(v) * p.generator.evaluate_float(grid - k) for k, v in a.items())
        errs.append(float(np.max(np.abs(rec - truth))))
    return VerificationReport(max(errs), errs, (float(grid[0]), float(grid[-1]), points), design)
