"""Reduction of the sampling matrix to constant matrix pencils.

Starting from the Laurent polynomials ``g_j`` of a problem with
``1 < N <= r < s``:

* ``gt_j = z**(r-1) g_j`` are algebraic of degree ``< 2r``;
* their ``r``-harmonics are monomials ``c z**(k r + q)`` with ``k`` in {0, 1},
  giving the matrix ``Ghat``;
* dividing column ``q`` by ``z**q`` leaves ``Gtilde = [M | Gs]`` whose first
  ``N-1`` columns are affine in ``lam = z**r`` and whose trailing
  ``r-N+1`` columns are constant;
* a constant row compression ``R`` with ``R Gs = [G'; 0]`` isolates the
  pencil ``M2(lam)`` that decides existence.

Pencils follow the ``A - lam B`` convention, so ``Gtilde(lam) = A - lam B``
with ``A`` the constant part and ``B`` minus the ``lam`` coefficient.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exact
from .generators import SamplingMatrix, SamplingProblem, build_G
from .pencil import Pencil
from .poly import LaurentPoly, PolyMatrix, harmonic_split

__all__ = [
    "ReductionError",
    "RankDeficientScalarPart",
    "ReductionTrace",
    "to_algebraic",
    "harmonic_matrix",
    "normalize_and_split",
    "row_compression",
    "row_compress",
    "split_affine",
    "full_pencil",
    "reduce_problem",
    "fourier_matrix",
]


class ReductionError(ValueError):
    """The sampling matrix does not have the shape the reduction relies on."""


class RankDeficientScalarPart(ReductionError):
    """The constant block of ``Gtilde`` has rank below ``r - N + 1``."""

    def __init__(self, rank: int, needed: int):
        self.rank, self.needed = rank, needed
        super().__init__(f"constant block has rank {rank}, need {needed}; "
                         "no polynomial left inverse exists")


def _obj(rows) -> np.ndarray:
    out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            out[i, j] = Fraction(v)
    return out


def to_algebraic(g: SamplingMatrix | Sequence[LaurentPoly], r: int,
                 N: int | None = None) -> list[LaurentPoly]:
    """``z**(r-1) g_j`` for every row, with the degree bound checked.

    The bound is ``deg < 2r``; with ``N`` given the sharper ``N + r - 2``.
    """
    gs = g.g if isinstance(g, SamplingMatrix) else tuple(g)
    bound = 2 * r - 1 if N is None else N + r - 2
    out = []
    for j, gj in enumerate(gs, 1):
        if not gj:
            out.append(gj)
            continue
        if gj.valuation < -(r - 1):
            raise ReductionError(
                f"g_{j} has valuation {gj.valuation} < -(r-1) = {-(r - 1)}")
        gt = gj.shift(r - 1)
        if gt.degree > bound:
            raise ReductionError(
                f"z^(r-1) g_{j} has degree {gt.degree} > {bound}; "
                "the support of L(phi) is too long for this r")
        out.append(gt)
    return out


def harmonic_matrix(gt: Sequence[LaurentPoly], r: int) -> PolyMatrix:
    """``s x r`` matrix whose column ``q`` holds the order-``q`` harmonics.

    With ``W = exp(-2 pi i / r)`` this satisfies
    ``G(z) U(z) = Ghat(z) Omega_r``, ``U = diag((W**k z)**(r-1))``.
    """
    rows = []
    for j, p in enumerate(gt, 1):
        parts = harmonic_split(p, r)
        for q, h in enumerate(parts):
            if h and not h.is_monomial():
                raise ReductionError(
                    f"harmonic {q} of row {j} is not a monomial ({h}); degree bound violated")
        rows.append(parts)
    return PolyMatrix(rows)


def normalize_and_split(hatG: PolyMatrix, N: int):
    """Divide column ``q`` by ``z**q`` and split off the constant block.

    Returns ``(M, Gs, tildeG)``: ``M`` holds the first ``N-1`` columns
    (entries ``a + b z**r``), ``Gs`` the trailing constant block as a
    Fraction array and ``tildeG`` the full normalised matrix in ``z``.
    """
    s, r = hatG.shape
    if not 1 <= N - 1 < r:
        raise ReductionError(f"need 1 < N <= r, got N={N}, r={r}")
    cols = []
    for q in range(r):
        col = [e.shift(-q) for e in hatG.column(q)]
        for i, e in enumerate(col):
            if any(k not in (0, r) for k in e.exponents()):
                raise ReductionError(f"entry ({i + 1}, {q + 1}) is not affine in z^{r}: {e}")
        if q >= N - 1 and any(e[r] != 0 for e in col):
            raise ReductionError(
                f"trailing column {q + 1} has a z^{r} term; it should be constant")
        cols.append(col)
    tildeG = PolyMatrix([[cols[q][i] for q in range(r)] for i in range(s)])
    M = tildeG.submatrix(range(s), range(N - 1))
    Gs = _obj([[tildeG[i, q][0] for q in range(N - 1, r)] for i in range(s)])
    return M, Gs, tildeG


def split_affine(P: PolyMatrix, r: int) -> Pencil:
    """Pencil ``(A, B)`` with ``P(z) = A - z**r B``."""
    A = _obj([[e[0] for e in P.row(i)] for i in range(P.rows)])
    B = _obj([[-e[r] for e in P.row(i)] for i in range(P.rows)])
    for i in range(P.rows):
        for j, e in enumerate(P.row(i)):
            if any(k not in (0, r) for k in e.exponents()):
                raise ReductionError(f"entry ({i + 1}, {j + 1}) is not affine in z^{r}")
    return Pencil(A, B)


def row_compression(Gs) -> tuple[np.ndarray, list[int]]:
    """Invertible ``R`` with ``R Gs = [G'; 0]`` and ``G'`` upper triangular.

    Columns are processed left to right; the pivot is the first unused row
    (top to bottom) with a nonzero entry, and the column is cleared from the
    other unused rows only. Pivot rows move to the top in pivot order, the
    rest keep their original order. Returns ``R`` and the pivot rows.
    """
    G = exact.as_fractions(Gs)
    s = len(G)
    ncol = len(G[0]) if G else 0
    R = exact.identity(s)
    used: list[int] = []
    for c in range(ncol):
        piv = next((i for i in range(s) if i not in used and G[i][c] != 0), None)
        if piv is None:
            continue
        for i in range(s):
            if i in used or i == piv or G[i][c] == 0:
                continue
            f = G[i][c] / G[piv][c]
            G[i] = [a - f * b for a, b in zip(G[i], G[piv])]
            R[i] = [a - f * b for a, b in zip(R[i], R[piv])]
        used.append(piv)
    order = used + [i for i in range(s) if i not in used]
    return _obj([R[i] for i in order]), used


def row_compress(M: PolyMatrix, Gs, r: int, R=None):
    """Apply the row compression to ``[M | Gs]``.

    Returns ``(R, M1, M2, Gprime)`` with ``M1``/``M2`` as pencils in
    ``lam = z**r``. ``R`` may be supplied to reproduce a particular
    compression; it is then checked, not trusted.
    """
    k = Gs.shape[1]
    rank = exact.rank(Gs)
    if rank < k:
        raise RankDeficientScalarPart(rank, k)
    if R is None:
        R, _ = row_compression(Gs)
    else:
        R = _obj(exact.as_fractions(R))
        if exact.rank(R) < R.shape[0]:
            raise ReductionError("supplied R is singular")
    RG = _obj(exact.matmul(R.tolist(), Gs.tolist()))
    if any(v != 0 for v in RG[k:].ravel()):
        raise ReductionError("R does not annihilate the constant block below its top rows")
    Gprime = RG[:k]
    if exact.rank(Gprime) < k:
        raise ReductionError("top block of R Gs is singular")
    RM = PolyMatrix.from_constant(R.tolist()) @ M
    P = split_affine(RM, r)
    M1 = Pencil(P.A[:k], P.B[:k])
    M2 = Pencil(P.A[k:], P.B[k:])
    return R, M1, M2, Gprime


def full_pencil(tildeG: PolyMatrix, r: int) -> Pencil:
    """``Gtilde(lam) = A^T - lam B^T`` as the pencil ``(A^T, B^T)`` (``s x r``)."""
    return split_affine(tildeG, r)


@dataclass
class ReductionTrace:
    """Every intermediate object of the reduction.

    When the constant block is rank deficient ``R``, ``M1``, ``M2`` and
    ``G_prime`` are ``None`` and ``scalar_rank`` records the defect.
    """

    problem: SamplingProblem
    G: SamplingMatrix
    g_tilde: list[LaurentPoly]
    hat_G: PolyMatrix
    tilde_G: PolyMatrix
    M: PolyMatrix
    scalar_G: np.ndarray
    scalar_rank: int
    pencil: Pencil
    R: np.ndarray | None = None
    G_prime: np.ndarray | None = None
    M1: Pencil | None = None
    M2: Pencil | None = None

    @property
    def scalar_rank_ok(self) -> bool:
        return self.scalar_rank == self.scalar_G.shape[1]


def reduce_problem(p: SamplingProblem, R=None, strict: bool = True) -> ReductionTrace:
    """Run the whole reduction for a problem.

    With ``strict=False`` a rank deficient constant block is recorded in
    the trace instead of raising :class:`RankDeficientScalarPart`.
    """
    G = build_G(p)
    gt = to_algebraic(G, p.r, p.N)
    hatG = harmonic_matrix(gt, p.r)
    M, Gs, tildeG = normalize_and_split(hatG, p.N)
    trace = ReductionTrace(p, G, gt, hatG, tildeG, M, Gs, exact.rank(Gs),
                           full_pencil(tildeG, p.r))
    try:
        trace.R, trace.M1, trace.M2, trace.G_prime = row_compress(M, Gs, p.r, R)
    except RankDeficientScalarPart:
        if strict:
            raise
    return trace


def fourier_matrix(r: int) -> np.ndarray:
    """``Omega_r[k, q] = W**(k q)``, ``W = exp(-2 pi i / r)``."""
    k = np.arange(r)
    return np.exp(-2j * np.pi * np.outer(k, k) / r)

