"""Generators, LTI systems and the exact sample sequences of a sampling problem."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from . import exact
from .poly import Domain, LaurentPoly, PolyMatrix, polyphase_split

__all__ = [
    "ProblemError",
    "GeneratorSpec",
    "SystemSpec",
    "SamplingProblem",
    "SamplingMatrix",
    "generator_eval",
    "lphi_eval",
    "lphi_samples",
    "build_G",
]


class ProblemError(ValueError):
    """Invalid or degenerate sampling problem."""


def _frac(v) -> Fraction:
    if isinstance(v, str):
        return Fraction(v.strip())
    return Fraction(v)


def _bspline_exact(m: int, t: Fraction) -> Fraction:
    # N_1 = indicator of [0, 1); N_m(t) = (t N_{m-1}(t) + (m - t) N_{m-1}(t - 1)) / (m - 1)
    if t < 0 or t >= m:
        return Fraction(0)
    if m == 1:
        return Fraction(1)
    return (t * _bspline_exact(m - 1, t) + (m - t) * _bspline_exact(m - 1, t - 1)) / (m - 1)


@dataclass(frozen=True)
class GeneratorSpec:
    """Compactly supported, piecewise polynomial generator on ``[0, support_length]``.

    ``kind`` is ``"bspline"`` (cardinal B-spline of the given order, support
    ``[0, order]``) or ``"piecewise"``. Piecewise generators hold one
    coefficient tuple per interval ``[b_k, b_(k+1))``, in ascending powers of
    the global variable ``t``.
    """

    kind: str
    order: int | None = None
    breakpoints: tuple[Fraction, ...] = ()
    coefficients: tuple[tuple[Fraction, ...], ...] = ()

    @classmethod
    def bspline(cls, order: int) -> "GeneratorSpec":
        if int(order) != order or order < 1:
            raise ProblemError("B-spline order must be a positive integer")
        return cls("bspline", order=int(order))

    @classmethod
    def piecewise(cls, breakpoints: Sequence, coefficients: Sequence[Sequence]) -> "GeneratorSpec":
        bp = tuple(_frac(b) for b in breakpoints)
        co = tuple(tuple(_frac(c) for c in piece) for piece in coefficients)
        g = cls("piecewise", breakpoints=bp, coefficients=co)
        g.validate()
        return g

    def validate(self):
        if self.kind == "bspline":
            if not self.order or self.order < 1:
                raise ProblemError("B-spline order must be >= 1")
            return
        if self.kind != "piecewise":
            raise ProblemError(f"unknown generator kind {self.kind!r}")
        bp, co = self.breakpoints, self.coefficients
        if len(bp) < 2 or len(co) != len(bp) - 1:
            raise ProblemError("need k+1 breakpoints for k polynomial pieces")
        if bp[0] != 0:
            raise ProblemError("piecewise generator support must start at 0")
        if any(b >= c for b, c in zip(bp, bp[1:])):
            raise ProblemError("breakpoints must be strictly increasing")
        # continuity on R, including the zero extension at both ends
        for k, b in enumerate(bp):
            left = _polyval(co[k - 1], b) if k > 0 else Fraction(0)
            right = _polyval(co[k], b) if k < len(co) else Fraction(0)
            if left != right:
                raise ProblemError(f"generator is discontinuous at t = {b}")

    @property
    def support_length(self) -> Fraction:
        if self.kind == "bspline":
            return Fraction(self.order)
        return self.breakpoints[-1]

    def __call__(self, t) -> Fraction:
        return generator_eval(self, t)

    @cached_property
    def pieces(self) -> tuple[tuple[Fraction, ...], tuple[tuple[Fraction, ...], ...]]:
        """Breakpoints and exact ascending-power coefficients of every piece."""
        if self.kind == "piecewise":
            return self.breakpoints, self.coefficients
        m = self.order
        bp = tuple(Fraction(k) for k in range(m + 1))
        co = []
        for k in range(m):
            # degree m-1 interpolation at m interior points of [k, k+1)
            xs = [Fraction(k) + Fraction(i + 1, m + 1) for i in range(m)]
            V = [[x ** p for p in range(m)] for x in xs]
            ys = [_bspline_exact(m, x) for x in xs]
            co.append(tuple(exact.solve(V, ys)))
        return bp, tuple(co)

    def evaluate_float(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        bp, co = self.pieces
        out = np.zeros_like(t)
        for k, piece in enumerate(co):
            lo, hi = float(bp[k]), float(bp[k + 1])
            mask = (t >= lo) & (t < hi)
            if mask.any():
                out[mask] = np.polynomial.polynomial.polyval(t[mask], [float(c) for c in piece])
        return out

    def to_dict(self) -> dict:
        if self.kind == "bspline":
            return {"kind": "bspline", "order": self.order}
        return {"kind": "piecewise",
                "breakpoints": [str(b) for b in self.breakpoints],
                "pieces": [[str(c) for c in p] for p in self.coefficients]}


def _polyval(coeffs: Sequence[Fraction], t: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * t + c
    return acc


def generator_eval(g: GeneratorSpec, t) -> Fraction:
    """Exact value of the generator at rational ``t`` (zero off the support)."""
    t = _frac(t)
    if g.kind == "bspline":
        return _bspline_exact(g.order, t)
    bp, co = g.breakpoints, g.coefficients
    if t < bp[0] or t >= bp[-1]:
        return Fraction(0)
    for k in range(len(co)):
        if bp[k] <= t < bp[k + 1]:
            return _polyval(co[k], t)
    return Fraction(0)


@dataclass(frozen=True)
class SystemSpec:
    """Linear time-invariant system acting on the shift-invariant space.

    ``(L f)(t) = sum_i w_i f(t - delay_i)``; ``shift(d)`` means
    ``(L f)(t) = f(t + d)``, i.e. the single tap ``(-d, 1)``.
    """

    kind: str = "identity"
    d: Fraction = Fraction(0)
    taps_: tuple[tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def identity(cls) -> "SystemSpec":
        return cls("identity")

    @classmethod
    def shift(cls, d) -> "SystemSpec":
        return cls("shift", d=_frac(d))

    @classmethod
    def fir(cls, taps: Sequence[Sequence]) -> "SystemSpec":
        tp = tuple((_frac(dl), _frac(w)) for dl, w in taps)
        if not tp or all(w == 0 for _, w in tp):
            raise ProblemError("FIR combination needs at least one nonzero tap")
        return cls("fir", taps_=tp)

    @property
    def taps(self) -> tuple[tuple[Fraction, Fraction], ...]:
        if self.kind == "identity":
            return ((Fraction(0), Fraction(1)),)
        if self.kind == "shift":
            return ((-self.d, Fraction(1)),)
        if self.kind == "fir":
            return tuple((dl, w) for dl, w in self.taps_ if w != 0)
        raise ProblemError(f"unknown system kind {self.kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "identity":
            return {"kind": "identity"}
        if self.kind == "shift":
            return {"kind": "shift", "d": str(self.d)}
        return {"kind": "fir", "taps": [[str(dl), str(w)] for dl, w in self.taps_]}


def lphi_eval(g: GeneratorSpec, system: SystemSpec, t) -> Fraction:
    """``(L phi)(t)`` exactly."""
    t = _frac(t)
    return sum((w * generator_eval(g, t - dl) for dl, w in system.taps), Fraction(0))


def lphi_support(g: GeneratorSpec, system: SystemSpec) -> tuple[Fraction, Fraction]:
    delays = [dl for dl, _ in system.taps]
    return min(delays), max(delays) + g.support_length


@dataclass(frozen=True)
class SamplingProblem:
    """Generator, system and oversampling ratio ``s/r`` with ``1 < N <= r < s``.

    ``N`` is the smallest integer with ``supp(L phi)`` inside ``[0, N]``; it
    is always recomputed, and a user-supplied value is only checked.
    """

    generator: GeneratorSpec
    system: SystemSpec = field(default_factory=SystemSpec.identity)
    r: int = 1
    s: int = 2
    N_declared: int | None = None

    def __post_init__(self):
        self.generator.validate()
        lo, hi = lphi_support(self.generator, self.system)
        if lo < 0:
            raise ProblemError(
                f"support of L(phi) starts at {lo} < 0; samples would not fit the "
                "[0, N] layout (use a delay instead of an advance)")
        if self.N_declared is not None and self.N_declared != self.N:
            raise ProblemError(f"declared N={self.N_declared} but support gives N={self.N}")
        if not (isinstance(self.r, int) and isinstance(self.s, int)):
            raise ProblemError("r and s must be integers")
        if not 1 < self.N <= self.r < self.s:
            raise ProblemError(f"need 1 < N <= r < s, got N={self.N}, r={self.r}, s={self.s}")

    @property
    def N(self) -> int:
        return math.ceil(lphi_support(self.generator, self.system)[1])

    @property
    def period(self) -> Fraction:
        return Fraction(self.r, self.s)

    def lphi(self, t) -> Fraction:
        return lphi_eval(self.generator, self.system, t)

    def to_dict(self) -> dict:
        return {"generator": self.generator.to_dict(), "system": self.system.to_dict(),
                "r": self.r, "s": self.s}


def lphi_samples(p: SamplingProblem) -> dict[tuple[int, int], Fraction]:
    """Nonzero values ``(L phi)(n + (j-1) r/s)`` keyed by ``(j, n)``, ``j = 1..s``."""
    lo, hi = lphi_support(p.generator, p.system)
    out = {}
    for j in range(1, p.s + 1):
        tau = Fraction((j - 1) * p.r, p.s)
        for n in range(math.floor(lo - tau), math.ceil(hi - tau) + 1):
            v = p.lphi(n + tau)
            if v != 0:
                out[(j, n)] = v
    return out


@dataclass(frozen=True)
class SamplingMatrix:
    """The Laurent polynomials ``g_j`` together with ``r``.

    The ``s x r`` matrix with columns ``g_j(W**k z)``, ``W = exp(-2 pi i / r)``,
    has cyclotomic entries, so it is only materialised numerically via
    :meth:`evaluate`; :meth:`polyphase` gives an exact matrix of the same rank
    on ``C \\ {0}``.
    """

    g: tuple[LaurentPoly, ...]
    r: int

    @property
    def s(self) -> int:
        return len(self.g)

    def evaluate(self, z) -> np.ndarray:
        W = np.exp(-2j * np.pi / self.r)
        z = complex(z)
        return np.array([[gj(W ** k * z) for k in range(self.r)] for gj in self.g])

    def evaluate_w(self, w: float) -> np.ndarray:
        """Frequency-domain matrix ``G(w) = G(exp(-2 pi i w))``."""
        return self.evaluate(np.exp(-2j * np.pi * w))

    def polyphase(self) -> PolyMatrix:
        """Exact ``s x r`` matrix ``H(w)`` with ``g_j(z) = sum_q z**q H_jq(z**r)``."""
        return PolyMatrix([polyphase_split(gj, self.r) for gj in self.g])


def build_G(p: SamplingProblem) -> SamplingMatrix:
    samples = lphi_samples(p)
    g = []
    for j in range(1, p.s + 1):
        gj = LaurentPoly({n: v for (jj, n), v in samples.items() if jj == j}, Domain.EXACT)
        if not gj:
            raise ProblemError(f"row {j} of G is identically zero (degenerate problem)")
        g.append(gj)
    return SamplingMatrix(tuple(g), p.r)
