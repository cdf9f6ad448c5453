"""Gaussian elimination over the rationals.

Matrices are plain nested lists (or object arrays) of :class:`Fraction`.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

import numpy as np


def as_fractions(M) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in np.asarray(M, dtype=object).tolist()]


def rref(M, pivot_cols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot columns.

    Only the first ``pivot_cols`` columns are used as pivots (all columns by
    default); the rest are carried along, as for right-hand sides.
    """
    A = as_fractions(M)
    if not A:
        return A, []
    m, n = len(A), len(A[0])
    pivots = []
    r = 0
    for c in range(n if pivot_cols is None else pivot_cols):
        p = next((i for i in range(r, m) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b if b else a for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return A, pivots


def rank(M) -> int:
    M = np.asarray(M, dtype=object)
    if M.size == 0:
        return 0
    return len(rref(M)[1])


def solve(M, b) -> list[Fraction] | None:
    """A solution of ``M x = b`` (free variables set to zero), or ``None``.

    ``None`` means the system is inconsistent.
    """
    M = as_fractions(M)
    b = [Fraction(v) for v in b]
    n = len(M[0])
    aug = [row + [bi] for row, bi in zip(M, b)]
    R, piv = rref(aug)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for row, c in zip(R, piv):
        x[c] = row[n]
    return x


def _integer_rows(rows: list[list[Fraction]]) -> list[list[int]]:
    out = []
    for row in rows:
        den = 1
        for v in row:
            den = lcm(den, v.denominator)
        out.append([int(v * den) for v in row])
    return out


def solve_many(M, rhs: Sequence[Sequence]) -> list[list[Fraction] | None]:
    """:func:`solve` for several right-hand sides with a single elimination.

    Forward elimination is fraction-free (Bareiss) on an integer-scaled copy;
    only the back substitution uses fractions.
    """
    M = as_fractions(M)
    m, n = len(M), len(M[0])
    k_rhs = len(rhs)
    A = _integer_rows([row + [Fraction(b[i]) for b in rhs] for i, row in enumerate(M)])
    width = n + k_rhs
    piv_cols: list[int] = []
    r, prev = 0, 1
    for c in range(n):
        p = next((i for i in range(r, m) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        pr, pv = A[r], A[r][c]
        for i in range(r + 1, m):
            row = A[i]
            f = row[c]
            if f:
                A[i] = [(pv * row[j] - f * pr[j]) // prev for j in range(width)]
            elif pv != prev:
                A[i] = [(pv * v) // prev for v in row]
        prev = pv
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    out: list[list[Fraction] | None] = []
    for c in range(k_rhs):
        if any(A[i][n + c] for i in range(r, m)):
            out.append(None)
            continue
        x = [Fraction(0)] * n
        for k in range(r - 1, -1, -1):
            pc, row = piv_cols[k], A[k]
            acc = Fraction(row[n + c])
            for k2 in range(k + 1, r):
                q = piv_cols[k2]
                if row[q]:
                    acc -= row[q] * x[q]
            x[pc] = acc / row[pc]
        out.append(x)
    return out


def matmul(A: Sequence[Sequence[Fraction]], B: Sequence[Sequence[Fraction]]):
    Bt = list(zip(*B))
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt] for row in A]


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def det(M) -> Fraction:
    A = as_fractions(M)
    n = len(A)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for i in range(c + 1, n):
            f = A[i][c] / A[c][c]
            if f:
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return d
