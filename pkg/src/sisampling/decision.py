"""Existence of compactly supported reconstruction filters.

The primary test works on the reduced pencil ``M2(lam)``: filters exist iff
the constant block has full column rank, ``M2`` has no right singular
blocks, and ``0`` is its only possible finite eigenvalue. Two independent
exact checks back it up:

* the gcd of the maximal minors of ``M2`` (:func:`spectrum_oracle`);
* the gcd of the ``r x r`` minors of the polyphase matrix of ``G``, which
  must be a monomial (:func:`monomial_minor_oracle`).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .generators import SamplingMatrix, SamplingProblem
from .pencil import (DEFAULT_TOL, KroneckerStructure, Pencil, RankAmbiguous,
                     spectrum_oracle, staircase)
from .poly import PolyMatrix, pm_minors, poly_gcd
from .reduction import ReductionTrace, reduce_problem

__all__ = [
    "OracleTooLarge",
    "ExistenceReport",
    "FrameScan",
    "existence_check",
    "monomial_minor_oracle",
    "frame_scan",
    "frame_bounds",
    "sufficient_pattern_check",
]

log = logging.getLogger(__name__)

MINOR_GUARD = 10_000


class OracleTooLarge(RuntimeError):
    """Too many minors for the exact minor oracle."""


@dataclass
class FrameScan:
    alpha_hat: float
    beta_hat: float
    min_rank: int
    grid_size: int

    def to_dict(self) -> dict:
        return {"alphaHat": self.alpha_hat, "betaHat": self.beta_hat,
                "minRank": self.min_rank, "gridSize": self.grid_size}


@dataclass
class ExistenceReport:
    scalar_rank_ok: bool
    no_right_singular: bool
    only_zero_finite_eigenvalue: bool
    kronecker: KroneckerStructure | None
    oracle_agrees: bool | None = None
    minor_oracle: bool | None = None
    sufficient_pattern_holds: bool | None = None
    frame_scan: FrameScan | None = None
    warnings: list[str] = field(default_factory=list)
    trace: ReductionTrace | None = field(default=None, repr=False)

    @property
    def exists(self) -> bool:
        return self.scalar_rank_ok and self.no_right_singular and self.only_zero_finite_eigenvalue

    def to_dict(self) -> dict:
        out = {
            "exists": self.exists,
            "scalarRankOK": self.scalar_rank_ok,
            "noRightSingular": self.no_right_singular,
            "onlyZeroFiniteEigenvalue": self.only_zero_finite_eigenvalue,
            "kronecker": self.kronecker.to_dict() if self.kronecker else None,
            "oracleAgrees": self.oracle_agrees,
            "minorOracle": self.minor_oracle,
            "sufficientPatternHolds": self.sufficient_pattern_holds,
            "frameScan": self.frame_scan.to_dict() if self.frame_scan else None,
            "warnings": list(self.warnings),
        }
        if self.trace is not None:
            p = self.trace.problem
            out["problem"] = {**p.to_dict(), "N": p.N}
        return out


def monomial_minor_oracle(G: SamplingMatrix | PolyMatrix, guard: int = MINOR_GUARD) -> bool:
    """True iff the gcd of all maximal (order ``r``) minors is ``c z**k``.

    A :class:`SamplingMatrix` is replaced by its exact polyphase matrix,
    which has the same rank as ``G(z)`` at every ``z != 0``.
    """
    H = G.polyphase() if isinstance(G, SamplingMatrix) else G
    s, r = H.shape
    if r > s:
        return False
    count = math.comb(s, r)
    if count > guard:
        raise OracleTooLarge(f"{count} minors of order {r} exceed the guard {guard}")
    minors = [m for m in pm_minors(H, r) if m]
    if not minors:
        return False
    return poly_gcd(minors).is_monomial()


def frame_bounds(G_of_w: Callable[[float], np.ndarray], r: int, grid_size: int = 256,
                 tol: float = DEFAULT_TOL) -> FrameScan:
    """Extreme eigenvalues of ``G(w)^* G(w)`` over a midpoint grid of ``(0, 1/r)``."""
    if grid_size < 16:
        raise ValueError("grid_size must be at least 16")
    lo, hi, min_rank = np.inf, 0.0, None
    for k in range(grid_size):
        w = (k + 0.5) / (r * grid_size)
        Gw = np.asarray(G_of_w(w))
        sv = np.linalg.svd(Gw, compute_uv=False)
        lo = min(lo, sv[-1] ** 2 if len(sv) == Gw.shape[1] else 0.0)
        hi = max(hi, sv[0] ** 2)
        rk = int(np.sum(sv > tol * max(sv[0], 1.0)))
        min_rank = rk if min_rank is None else min(min_rank, rk)
    return FrameScan(float(lo), float(hi), int(min_rank), grid_size)


def frame_scan(p: SamplingProblem | SamplingMatrix, grid_size: int = 256,
               tol: float = DEFAULT_TOL) -> FrameScan:
    """Numerical frame diagnostics of the sampling matrix ``G(w)``."""
    from .generators import build_G

    G = p if isinstance(p, SamplingMatrix) else build_G(p)
    return frame_bounds(G.evaluate_w, G.r, grid_size, tol)


def sufficient_pattern_check(P: Pencil, N: int, r: int) -> bool:
    """Entrywise sufficient condition for the minimum-oversampling solver.

    ``P`` is the ``(r+1) x r`` pencil ``(A^T, B^T)``. With 1-based indices,
    ``A^T[i, j]`` must be nonzero on the anti-diagonals ``i + j = r + 2``
    and ``i + j = r + N + 1``, and ``B^T[i, j]`` on ``i + j = N + 1`` for
    ``i >= 2``.
    """
    if P.shape != (r + 1, r):
        raise ValueError(f"expected an {(r + 1, r)} pencil, got {P.shape}")
    A, B = P.A, P.B
    for i in range(1, r + 2):
        for j in range(1, r + 1):
            if i + j in (r + 2, r + N + 1) and A[i - 1, j - 1] == 0:
                return False
            if i + j == N + 1 and i >= 2 and B[i - 1, j - 1] == 0:
                return False
    return True


def existence_check(p: SamplingProblem, tol: float = DEFAULT_TOL, R=None,
                    minor_guard: int = MINOR_GUARD, grid_size: int | None = None,
                    oracle: bool = True) -> ExistenceReport:
    """Decide whether ``G(z)`` has a Laurent polynomial left inverse.

    The staircase result on ``M2`` decides; the exact oracles only
    cross-check and are reported in ``oracle_agrees`` / ``minor_oracle``.
    """
    trace = reduce_problem(p, R=R, strict=False)
    warnings: list[str] = []
    if not trace.scalar_rank_ok:
        rep = ExistenceReport(False, False, False, None, trace=trace)
        rep.warnings.append(
            f"constant block has rank {trace.scalar_rank} < {trace.scalar_G.shape[1]}")
    else:
        M2 = trace.M2
        try:
            ks = staircase(M2, tol=tol)
        except RankAmbiguous as exc:
            exc.args = (f"staircase on M2 for {p.to_dict()}: {exc}",)
            raise
        no_right = not ks.right
        only_zero = not ks.finite
        rep = ExistenceReport(True, no_right, only_zero, ks, trace=trace)
        if oracle:
            rho, g = spectrum_oracle(M2)
            o_right = rho == M2.shape[1]
            o_zero = g.is_monomial()
            rep.oracle_agrees = (o_right == no_right) and (o_zero == only_zero)
            if not rep.oracle_agrees:
                warnings.append(
                    f"staircase ({ks.describe()}) disagrees with exact minors "
                    f"(normal rank {rho}, gcd {g})")
    if oracle:
        try:
            rep.minor_oracle = monomial_minor_oracle(trace.G, guard=minor_guard)
            if rep.minor_oracle != rep.exists:
                warnings.append("minor oracle disagrees with the pencil criterion")
        except OracleTooLarge as exc:
            log.warning("skipping minor oracle: %s", exc)
            warnings.append(f"minor oracle skipped: {exc}")
    if p.s == p.r + 1:
        rep.sufficient_pattern_holds = sufficient_pattern_check(trace.pencil, p.N, p.r)
    if grid_size:
        rep.frame_scan = frame_scan(trace.G, grid_size, tol)
    rep.warnings.extend(warnings)
    return rep

