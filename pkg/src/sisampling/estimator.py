"""scikit-learn style front end for filter design and reconstruction."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .generators import GeneratorSpec, SamplingProblem, SystemSpec, lphi_support
from .pencil import DEFAULT_TOL
from .reconstruct import design_filters, reconstruct_eval

__all__ = ["SamplingReconstructor", "as_generator", "as_system"]


def as_generator(g) -> GeneratorSpec:
    """Accept a :class:`GeneratorSpec`, a B-spline order or a descriptor dict."""
    if isinstance(g, GeneratorSpec):
        return g
    if isinstance(g, (int, np.integer)):
        return GeneratorSpec.bspline(int(g))
    if isinstance(g, dict):
        kind = g.get("kind")
        if kind == "bspline":
            return GeneratorSpec.bspline(g["order"])
        if kind == "piecewise":
            return GeneratorSpec.piecewise(g["breakpoints"], g["pieces"])
        raise ValueError(f"unknown generator kind {kind!r}")
    raise TypeError(f"cannot interpret {g!r} as a generator")


def as_system(sys_) -> SystemSpec:
    if sys_ is None:
        return SystemSpec.identity()
    if isinstance(sys_, SystemSpec):
        return sys_
    if isinstance(sys_, dict):
        kind = sys_.get("kind", "identity")
        if kind == "identity":
            return SystemSpec.identity()
        if kind == "shift":
            return SystemSpec.shift(sys_["d"])
        if kind == "fir":
            return SystemSpec.fir(sys_["taps"])
        raise ValueError(f"unknown system kind {kind!r}")
    raise TypeError(f"cannot interpret {sys_!r} as a system")


class SamplingReconstructor(BaseEstimator, TransformerMixin):
    """Compactly supported reconstruction from oversampled filtered samples.

    ``fit`` designs the filters for the problem given by the parameters (no
    data is needed). ``transform`` maps rows of flat samples
    ``x[i] = (L f)((sample_offset + i) r / s)`` to the coefficients ``d_p``
    of ``f = sum_p d_p phi(. - p)``; only coefficients whose samples are all
    available are returned, starting at index ``coef_offset_``.

    Parameters
    ----------
    generator : GeneratorSpec, int or dict
        Generator ``phi``; an int is a B-spline order.
    system : SystemSpec, dict or None
        LTI system applied before sampling (identity if None).
    r, s : int
        Sampling period ``r/s`` with ``N <= r < s``.
    tol : float
        Relative tolerance for rank decisions.
    nu_max : int or None
        Degree cap of the general left inverse search (``r N`` if None).
    sample_offset : int
        Flat index of the first sample in each row passed to ``transform``.
    """

    def __init__(self, generator=3, system=None, r=4, s=5, tol=DEFAULT_TOL, nu_max=None,
                 sample_offset=0):
        self.generator = generator
        self.system = system
        self.r = r
        self.s = s
        self.tol = tol
        self.nu_max = nu_max
        self.sample_offset = sample_offset

    def _problem(self) -> SamplingProblem:
        return SamplingProblem(as_generator(self.generator), as_system(self.system),
                               int(self.r), int(self.s))

    def fit(self, X=None, y=None):
        self.problem_ = self._problem()
        design = design_filters(self.problem_, tol=self.tol, nu_max=self.nu_max)
        self.design_ = design
        self.report_ = design.report
        self.left_inverse_ = design.left_inverse
        self.filters_ = design.filters
        self.n_channels_ = design.filters.s
        return self

    def _coef_range(self, n_samples: int) -> tuple[int, int]:
        F, r, s = self.filters_, self.problem_.r, self.problem_.s
        m0, m1 = self.sample_offset, self.sample_offset + n_samples - 1
        lo, hi = -math.inf, math.inf
        for j in range(s):
            w = F.window(j)
            if w is None:
                continue
            a, b = w
            # d_p uses n in [ceil((p-b)/r), floor((p-a)/r)]; all need s n + j in [m0, m1]
            n_first = math.ceil((m0 - j) / s)
            n_last = math.floor((m1 - j) / s)
            lo = max(lo, r * n_first + b)
            hi = min(hi, r * n_last + a)
        return int(lo), int(hi)

    def transform(self, X):
        check_is_fitted(self, "filters_")
        X = check_array(X, dtype=float)
        F, r, s = self.filters_, self.problem_.r, self.problem_.s
        p_lo, p_hi = self._coef_range(X.shape[1])
        self.coef_offset_ = p_lo
        out = np.zeros((X.shape[0], max(p_hi - p_lo + 1, 0)))
        if p_hi < p_lo:
            return out
        for j in range(s):
            for k, c in F.channels[j].items():
                # p = r n + k, sample index s n + j
                n = np.arange(math.ceil((p_lo - k) / r), math.floor((p_hi - k) / r) + 1)
                cols = s * n + j - self.sample_offset
                out[:, r * n + k - p_lo] += r * c * X[:, cols]
        return out

    def sample(self, coefs, coef_offset: int = 0, n_samples: int | None = None):
        """Exact flat samples of ``f = sum_p coefs[p - coef_offset] phi(. - p)``.

        Returns an array starting at ``sample_offset``; by default long enough
        to cover the whole support of ``L f``.
        """
        check_is_fitted(self, "filters_")
        p = self.problem_
        coefs = [Fraction(v).limit_denominator(10**12) if isinstance(v, float) else Fraction(v)
                 for v in np.ravel(coefs)]
        if n_samples is None:
            _, hi = lphi_support(p.generator, p.system)
            last = coef_offset + len(coefs) - 1 + hi
            n_samples = max(math.ceil(last * p.s / p.r) - self.sample_offset + 1, 0)
        out = np.zeros(n_samples)
        for i in range(n_samples):
            t = Fraction((self.sample_offset + i) * p.r, p.s)
            out[i] = float(sum((a * p.lphi(t - coef_offset - k) for k, a in enumerate(coefs) if a),
                               Fraction(0)))
        return out

    def predict(self, X, t):
        """Evaluate the reconstruction of each sample row at the points ``t``."""
        check_is_fitted(self, "filters_")
        X = check_array(X, dtype=float)
        t = np.asarray(t, dtype=float)
        rows = []
        for x in X:
            samples = {self.sample_offset + i: v for i, v in enumerate(x)}
            rows.append(reconstruct_eval(samples, self.filters_, t))
        return np.vstack(rows)
