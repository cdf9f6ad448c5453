"""Polynomial left inverses of the reduced pencil and of ``G(z)``.

With ``Gtilde(lam) = A^T - lam B^T`` (``s x r``) a left inverse ``Lt`` of
``Gtilde`` is found column by column from ``(A - lam B) L_i(lam) = e_i``.
Writing ``L_i = l^0 + l^1 lam + ... + l^nu lam^nu`` and equating
coefficients gives a block bidiagonal system with ``-B`` on the diagonal
and ``A`` below it, unknowns ordered ``(l^nu, ..., l^0)``.

The right-hand side may also be placed at ``lam^kappa``; the solution then
satisfies ``Lt Gtilde = lam^kappa I`` and ``lam^-kappa Lt`` is a Laurent
left inverse. This is needed when ``Gtilde(0)`` is rank deficient.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg as sla

from . import exact
from .generators import SamplingMatrix
from .pencil import Pencil
from .poly import Domain, LaurentPoly, PolyMatrix

__all__ = [
    "NoPolynomialInverse",
    "PreconditionFailed",
    "DegreeCapExceeded",
    "NonRealFilters",
    "LeftInverse",
    "block_system",
    "min_oversampling_conditions",
    "solve_min_oversampling",
    "solve_general",
    "backmap_to_G",
    "exact_first_row",
    "inverse_family_projector",
]

FLOAT_CONSISTENCY = 1e-10


class NoPolynomialInverse(ArithmeticError):
    """The block systems are inconsistent."""


class PreconditionFailed(ValueError):
    """Rank conditions of the minimum-oversampling solver do not hold."""


class DegreeCapExceeded(ArithmeticError):
    """No degree up to the cap gives consistent systems."""

    def __init__(self, nu_max: int):
        self.nu_max = nu_max
        super().__init__(f"no polynomial left inverse of degree <= {nu_max}")


class NonRealFilters(ArithmeticError):
    """Back-mapped filter coefficients have a non-negligible imaginary part."""


@dataclass
class LeftInverse:
    """``L(lam) = sum_k coeffs[k] lam**k`` (``s x r``), ``L^T Gtilde = lam**kappa I``.

    ``exact_coeffs`` holds the Fraction solution when it was computed
    exactly; ``coeffs`` is always the float version.
    """

    nu: int
    coeffs: np.ndarray
    kappa: int = 0
    exact_coeffs: np.ndarray | None = None
    residual_norm: float = float("nan")

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape[1:]

    def __call__(self, lam) -> np.ndarray:
        """``L(lam) * lam**-kappa``."""
        acc = np.zeros(self.shape, dtype=complex)
        for k in range(self.nu, -1, -1):
            acc = acc * lam + self.coeffs[k]
        return acc * complex(lam) ** (-self.kappa)

    def column(self, i: int) -> np.ndarray:
        """Coefficient vectors ``l_i^0 .. l_i^nu`` of column ``i`` as rows."""
        return self.coeffs[:, :, i]

    def as_poly_matrix(self) -> PolyMatrix:
        """``lam**-kappa L(lam)`` as an ``s x r`` Laurent matrix in ``lam``."""
        src = self.exact_coeffs if self.exact_coeffs is not None else self.coeffs
        dom = Domain.EXACT if self.exact_coeffs is not None else Domain.FLOAT
        s, r = self.shape
        return PolyMatrix([[LaurentPoly({k - self.kappa: src[k, j, i] for k in range(self.nu + 1)}, dom)
                            for i in range(r)] for j in range(s)])

    def to_dict(self) -> dict:
        out = {"nu": self.nu, "kappa": self.kappa, "residualNorm": self.residual_norm,
               "shape": list(self.shape),
               "coefficients": [[[float(v) for v in row] for row in c] for c in np.real(self.coeffs)]}
        if self.exact_coeffs is not None:
            out["exactCoefficients"] = [[[str(v) for v in row] for row in c]
                                        for c in self.exact_coeffs]
        return out


def _AB(P: Pencil):
    """``(A, B)`` of ``(A - lam B) L = I`` from the pencil ``(A^T, B^T)``."""
    return P.A.T, P.B.T


def block_system(A, B, nu: int) -> np.ndarray:
    """The ``(nu+2) r x (nu+1) s`` matrix acting on ``(l^nu, ..., l^0)``."""
    A, B = np.asarray(A), np.asarray(B)
    r, s = A.shape
    dtype = object if A.dtype == object else np.result_type(A, B, float)
    S = np.zeros(((nu + 2) * r, (nu + 1) * s), dtype=dtype)
    if dtype == object:
        S[...] = Fraction(0)
    for b in range(nu + 1):
        S[b * r:(b + 1) * r, b * s:(b + 1) * s] = -B
        S[(b + 1) * r:(b + 2) * r, b * s:(b + 1) * s] = A
    return S


def _rhs(r: int, nu: int, kappa: int, i: int, dtype) -> np.ndarray:
    e = np.zeros((nu + 2) * r, dtype=dtype)
    if dtype == object:
        e[...] = Fraction(0)
    e[(nu + 1 - kappa) * r + i] = 1
    return e


def _unstack(x: np.ndarray, nu: int, s: int) -> np.ndarray:
    # (l^nu, ..., l^0) -> coefficient index k
    return np.stack([x[(nu - k) * s:(nu - k + 1) * s] for k in range(nu + 1)])


def min_oversampling_conditions(P: Pencil, N: int) -> dict:
    """Rank conditions for the unique minimum-oversampling inverse.

    Returns the ranks of ``A^T``, ``B^T`` and ``[[-B, 0], [A, -B]]`` with
    their targets ``r``, ``N-1`` and ``r+N-1``.
    """
    A, B = _AB(P)
    r, s = A.shape
    two = block_system(A, B, 1)[:2 * r]
    rank = exact.rank if P.is_exact else np.linalg.matrix_rank
    got = (rank(P.A), rank(P.B), rank(two))
    want = (r, N - 1, r + N - 1)
    return {"ranks": tuple(int(g) for g in got), "targets": want,
            "ok": all(g == w for g, w in zip(got, want))}


def _finish(P: Pencil, nu: int, kappa: int, X, exact_path: bool) -> LeftInverse:
    """Pack the solution columns and measure the residual."""
    s, r = P.shape
    C = np.stack([_unstack(np.asarray(x, dtype=object if exact_path else None), nu, s)
                  for x in X], axis=-1)
    if exact_path:
        L = LeftInverse(nu, C.astype(float), kappa, exact_coeffs=C)
        prod = L.as_poly_matrix().transpose() @ P.as_poly_matrix()
        bad = [prod[i, j] - LaurentPoly.constant(int(i == j)) for i in range(r) for j in range(r)]
        if any(bad):
            raise ArithmeticError("exact left inverse failed verification")
        L.residual_norm = 0.0
        return L
    L = LeftInverse(nu, np.asarray(C, dtype=float), kappa)
    L.residual_norm = residual_norm(P, L)
    return L


def residual_norm(P: Pencil, L: LeftInverse, samples: int = 20, seed: int = 0) -> float:
    """Max spectral norm of ``L^T Gtilde - I`` over random unit-circle ``lam``."""
    rng = np.random.default_rng(seed)
    r = P.shape[1]
    worst = 0.0
    for th in rng.uniform(0, 2 * np.pi, samples):
        lam = np.exp(1j * th)
        worst = max(worst, np.linalg.norm(L(lam).T @ P(lam) - np.eye(r), 2))
    return float(worst)


def solve_min_oversampling(P: Pencil, N: int) -> LeftInverse:
    """Unique inverse of degree ``N-2`` for the ``(r+1) x r`` case.

    Checks the three rank conditions, drops the identically zero equations
    of the top block and solves the remaining square systems.
    """
    s, r = P.shape
    if s != r + 1:
        raise PreconditionFailed(f"need s = r + 1, pencil is {P.shape}")
    cond = min_oversampling_conditions(P, N)
    if not cond["ok"]:
        raise PreconditionFailed(f"rank conditions fail: ranks {cond['ranks']}, "
                                 f"need {cond['targets']}")
    nu = N - 2
    A, B = _AB(P)
    S = block_system(A, B, nu)
    keep = [k for k in range(S.shape[0]) if any(v != 0 for v in S[k])]
    Sk = S[keep]
    exact_path = P.is_exact
    X = []
    for i in range(r):
        b = _rhs(r, nu, 0, i, object if exact_path else float)[keep]
        if exact_path:
            x = exact.solve(Sk, b)
            if x is None:
                raise NoPolynomialInverse(f"system for column {i + 1} is inconsistent")
            X.append(np.array(x, dtype=object))
        else:
            x, *_ = np.linalg.lstsq(Sk.astype(float), b, rcond=None)
            if np.linalg.norm(Sk.astype(float) @ x - b) > FLOAT_CONSISTENCY * np.linalg.norm(b):
                raise NoPolynomialInverse(f"system for column {i + 1} is inconsistent")
            X.append(x)
    return _finish(P, nu, 0, X, exact_path)


def _consistent_exact(S, rhs_cols):
    return [None if x is None else np.array(x, dtype=object)
            for x in exact.solve_many(S, rhs_cols)]


def _consistent_float(S, rhs_cols):
    Q, Rm, perm = sla.qr(S, pivoting=True, mode="economic")
    d = np.abs(np.diag(Rm))
    k = int(np.sum(d > 1e-12 * (d[0] if d.size else 1.0)))
    sols = []
    for b in rhs_cols:
        y = Q.T @ b
        z = np.zeros(S.shape[1])
        z[perm[:k]] = sla.solve_triangular(Rm[:k, :k], y[:k])
        ok = np.linalg.norm(S @ z - b) <= FLOAT_CONSISTENCY * np.linalg.norm(b)
        sols.append(z if ok else None)
    return sols


def solve_general(P: Pencil, nu_max: int, allow_shift: bool = True) -> LeftInverse:
    """Smallest ``nu <= nu_max`` (then smallest ``kappa``) with consistent systems.

    With ``allow_shift=False`` only ``kappa = 0`` is tried, i.e. a genuinely
    polynomial inverse of ``Gtilde(lam)``.
    """
    s, r = P.shape
    A, B = _AB(P)
    exact_path = P.is_exact
    for nu in range(nu_max + 1):
        S = block_system(A, B, nu)
        kappas = range(nu + 2) if allow_shift else range(1)
        dtype = object if exact_path else float
        rhs = [_rhs(r, nu, kp, i, dtype) for kp in kappas for i in range(r)]
        sols = _consistent_exact(S, rhs) if exact_path else _consistent_float(S.astype(float), rhs)
        for kp in kappas:
            X = sols[kp * r:(kp + 1) * r]
            if all(x is not None for x in X):
                return _finish(P, nu, kp, X, exact_path)
    raise DegreeCapExceeded(nu_max)


def fourier_inverse(r: int) -> np.ndarray:
    k = np.arange(r)
    return np.exp(2j * np.pi * np.outer(k, k) / r) / r


def backmap_to_G(L: LeftInverse, r: int, G: SamplingMatrix | None = None,
                 check_points: int = 8, seed: int = 0):
    """Laurent left inverse ``LG(z)`` of ``G(z)`` and its first row.

    ``LG(z) = U(z) Omega_r^-1 Q(z) L^T(z**r) z**(-r kappa)`` with
    ``U = diag((W**k z)**(r-1))`` and ``Q = diag(z**-q)``. The first row has
    real coefficients for real problems and is returned as real floats.
    When ``G`` is given, ``LG G = I`` is checked at random unit-circle points.
    """
    s = L.shape[0]
    W = np.exp(-2j * np.pi / r)
    Oi = fourier_inverse(r)
    rows = []
    for k in range(r):
        row = []
        for j in range(s):
            c: dict[int, complex] = {}
            for q in range(r):
                f = W ** (k * (r - 1)) * Oi[k, q]
                for m in range(L.nu + 1):
                    v = L.coeffs[m, j, q]
                    if v != 0:
                        e = r - 1 - q + r * (m - L.kappa)
                        c[e] = c.get(e, 0) + f * v
            row.append(LaurentPoly({e: v for e, v in c.items() if abs(v) > 0}, Domain.FLOAT))
        rows.append(row)
    LG = PolyMatrix(rows)
    imag = max(p.max_abs_imag() for p in LG.row(0))
    scale = max((abs(v) for p in LG.row(0) for _, v in p.items()), default=1.0)
    if imag > 1e-9 * max(scale, 1.0):
        raise NonRealFilters(f"first row has imaginary parts up to {imag:.3e}")
    a_row = [LaurentPoly({e: v.real for e, v in p.items()}, Domain.FLOAT) for p in LG.row(0)]
    if G is not None:
        rng = np.random.default_rng(seed)
        for th in rng.uniform(0, 2 * np.pi, check_points):
            z = np.exp(1j * th)
            err = np.abs(LG(z) @ G.evaluate(z) - np.eye(r)).max()
            if err > 1e-9 * max(scale, 1.0):
                raise ArithmeticError(f"back-mapped inverse fails at z={z:.4f}: error {err:.3e}")
    return LG, a_row


def exact_first_row(L: LeftInverse, r: int) -> list[LaurentPoly]:
    """First row of the back-mapped inverse in exact arithmetic.

    Row 0 of ``U Omega_r^-1`` is ``z**(r-1) / r`` times a row of ones, so
    ``a_j(z) = (1/r) sum_q z**(r-1-q) L[j, q](z**r) z**(-r kappa)`` is rational.
    """
    if L.exact_coeffs is None:
        raise TypeError("left inverse has no exact coefficients")
    s = L.shape[0]
    out = []
    for j in range(s):
        c: dict[int, Fraction] = {}
        for q in range(r):
            for m in range(L.nu + 1):
                v = L.exact_coeffs[m, j, q]
                if v:
                    e = r - 1 - q + r * (m - L.kappa)
                    c[e] = c.get(e, Fraction(0)) + Fraction(v) / r
        out.append(LaurentPoly(c))
    return out


def inverse_family_projector(P: Pencil, L: LeftInverse) -> PolyMatrix:
    """``I_s - Gtilde(lam) Lt(lam)`` (``Lt`` including the ``lam**-kappa`` factor).

    For any polynomial ``B(lam)`` of size ``r x s``, ``Lt + B (I - Gtilde Lt)``
    is again a left inverse.
    """
    s, r = P.shape
    Lm = L.as_poly_matrix()
    G = P.as_poly_matrix() if Lm.domain is Domain.EXACT else PolyMatrix.from_pencil(
        P.to_float().A.tolist(), P.to_float().B.tolist(), Domain.FLOAT)
    GL = G @ Lm.transpose()
    dom = Lm.domain
    return PolyMatrix([[LaurentPoly.constant(int(i == j), dom) - GL[i, j] for j in range(s)]
                       for i in range(s)])
