"""Kronecker structure of matrix pencils ``A - lam B``.

:func:`staircase` is a GUPTRI-style reduction built from SVD rank decisions:

1. right singular and zero-eigenvalue structure from repeated column
   compression of ``A`` and row compression of the matching block of ``B``;
2. infinite structure from the same procedure on the dual pencil ``B - lam A``;
3. left singular structure from the transposed remainder;
4. finite nonzero eigenvalues from the remaining square regular core, with
   Jordan block sizes from a zero-structure pass on ``(A - mu B) - lam B``.

:func:`spectrum_oracle` is the exact counterpart: normal rank over
``Q(lam)`` and the gcd of the maximal minors, whose roots are the finite
eigenvalues.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg as sla

from .poly import LaurentPoly, PolyMatrix, pm_minors, pm_rank, poly_gcd

__all__ = [
    "RankAmbiguous",
    "Pencil",
    "KroneckerStructure",
    "staircase",
    "normal_rank",
    "spectrum_oracle",
    "planted_pencil",
    "random_structure",
    "structure_key",
]

DEFAULT_TOL = 1e-10


class RankAmbiguous(ArithmeticError):
    """A numerical rank decision had no clear gap around the threshold."""

    def __init__(self, singular_values, threshold, context=""):
        self.singular_values = np.asarray(singular_values)
        self.threshold = threshold
        self.context = context
        msg = (f"ambiguous rank decision (threshold {threshold:.3e}, "
               f"singular values {np.array2string(self.singular_values, precision=3)})")
        super().__init__(f"{context}: {msg}" if context else msg)


@dataclass(frozen=True)
class Pencil:
    """Constant pair ``(A, B)`` standing for ``A - lam B``.

    Exact pencils hold :class:`Fraction` entries in object arrays.
    """

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        A, B = np.atleast_2d(self.A), np.atleast_2d(self.B)
        if A.shape != B.shape:
            raise ValueError(f"pencil blocks differ in shape: {A.shape} vs {B.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @classmethod
    def exact(cls, A, B) -> "Pencil":
        conv = np.vectorize(Fraction, otypes=[object])
        A = np.asarray(A, dtype=object)
        B = np.asarray(B, dtype=object)
        return cls(conv(A) if A.size else A, conv(B) if B.size else B)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    @property
    def is_exact(self) -> bool:
        return self.A.dtype == object

    def to_float(self) -> "Pencil":
        if not self.is_exact:
            return self
        return Pencil(self.A.astype(float), self.B.astype(float))

    def __call__(self, lam) -> np.ndarray:
        P = self.to_float()
        return P.A - lam * P.B

    def transpose(self) -> "Pencil":
        return Pencil(self.A.T, self.B.T)

    def as_poly_matrix(self) -> PolyMatrix:
        if not self.is_exact:
            raise TypeError("as_poly_matrix needs an exact pencil")
        return PolyMatrix.from_pencil(self.A.tolist(), self.B.tolist())


@dataclass
class KroneckerStructure:
    """Block inventory of the Kronecker canonical form.

    ``finite`` lists ``(eigenvalue, jordan_block_sizes)`` for the finite
    nonzero eigenvalues; zero eigenvalues live in ``zero_jordan``.
    """

    right: list[int] = field(default_factory=list)
    left: list[int] = field(default_factory=list)
    zero_jordan: list[int] = field(default_factory=list)
    infinite: list[int] = field(default_factory=list)
    finite: list[tuple[complex, list[int]]] = field(default_factory=list)

    def __post_init__(self):
        self.right = sorted(self.right)
        self.left = sorted(self.left)
        self.zero_jordan = sorted(self.zero_jordan)
        self.infinite = sorted(self.infinite)
        self.finite = [(complex(v), sorted(b)) for v, b in self.finite]

    @property
    def regular_size(self) -> int:
        return (sum(self.zero_jordan) + sum(self.infinite)
                + sum(sum(b) for _, b in self.finite))

    @property
    def shape(self) -> tuple[int, int]:
        reg = self.regular_size
        rows = sum(self.right) + sum(e + 1 for e in self.left) + reg
        cols = sum(e + 1 for e in self.right) + sum(self.left) + reg
        return rows, cols

    @property
    def normal_rank(self) -> int:
        return sum(self.right) + sum(self.left) + self.regular_size

    @property
    def finite_eigenvalue_count(self) -> int:
        return sum(self.zero_jordan) + sum(sum(b) for _, b in self.finite)

    def check_shape(self, m: int, n: int):
        if self.shape != (m, n):
            raise AssertionError(f"Kronecker blocks account for {self.shape}, pencil is {(m, n)}")

    def to_dict(self) -> dict:
        return {
            "rightMinimalIndices": list(self.right),
            "leftMinimalIndices": list(self.left),
            "zeroJordanBlocks": list(self.zero_jordan),
            "infiniteBlocks": list(self.infinite),
            "finiteNonzeroEigenvalues": [
                {"re": v.real, "im": v.imag, "blockSizes": list(b)} for v, b in self.finite],
        }

    def describe(self) -> str:
        parts = [f"L{e}" for e in self.right]
        parts += [f"J{k}(0)" for k in self.zero_jordan]
        parts += [f"J{k}({v:.6g})" for v, b in self.finite for k in b]
        parts += [f"N{k}" for k in self.infinite]
        parts += [f"L{e}^T" for e in self.left]
        return " + ".join(parts) or "(empty)"


# --- numerical rank decisions ------------------------------------------------

def _decide_rank(s: np.ndarray, thr: float, context: str) -> int:
    s = np.asarray(s)
    r = int(np.sum(s > thr))
    if 0 < r < len(s):
        hi, lo = s[r - 1], s[r]
        if lo > 0 and hi < 10 * lo:
            raise RankAmbiguous(s, thr, context)
    return r


def _column_nullspace_first(A: np.ndarray, thr: float, context: str):
    """Unitary ``V`` with the numerical null space of ``A`` in its leading columns."""
    m, n = A.shape
    if m == 0:
        return n, np.eye(n, dtype=A.dtype)
    _, s, Vh = np.linalg.svd(A, full_matrices=True)
    r = _decide_rank(s, thr, context)
    V = Vh.conj().T
    return n - r, np.hstack([V[:, r:], V[:, :r]])


def _row_range_first(B: np.ndarray, thr: float, context: str):
    """Unitary ``U`` such that ``U^H B`` has its nonzero rows on top."""
    m, n = B.shape
    if n == 0 or m == 0:
        return 0, np.eye(m, dtype=B.dtype)
    U, s, _ = np.linalg.svd(B, full_matrices=True)
    return _decide_rank(s, thr, context), U


def _zero_right_staircase(A, B, thr, context):
    """Peel off right-singular and zero-eigenvalue structure.

    Returns the staircase dimensions ``(n_i, m_i)`` and the deflated pencil.
    """
    ns, ms = [], []
    A = np.array(A, dtype=complex)
    B = np.array(B, dtype=complex)
    while A.shape[1] > 0:
        nu, V = _column_nullspace_first(A, thr, context)
        if nu == 0:
            break
        A, B = A @ V, B @ V
        A[:, :nu] = 0
        rho, U = _row_range_first(B[:, :nu], thr, context)
        Uh = U.conj().T
        A, B = Uh @ A, Uh @ B
        B[rho:, :nu] = 0
        ns.append(nu)
        ms.append(rho)
        A, B = A[rho:, nu:], B[rho:, nu:]
    return ns, ms, A, B


def _counts(ns, ms):
    """Right minimal indices and Jordan sizes at zero from staircase dimensions."""
    right, jordan = [], []
    ns_ext = list(ns) + [0]
    for i, (n_i, m_i) in enumerate(zip(ns, ms)):
        right += [i] * (n_i - m_i)
        jordan += [i + 1] * (m_i - ns_ext[i + 1])
    if any(n - m < 0 for n, m in zip(ns, ms)) or any(m - n < 0 for m, n in zip(ms, ns_ext[1:])):
        raise ArithmeticError("staircase dimensions are not monotone; rank decisions inconsistent")
    return right, jordan


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    clusters: list[list[int]] = []
    for i in np.argsort(np.abs(values)):
        for c in clusters:
            ref = np.mean(values[c])
            if abs(values[i] - ref) <= tol * max(1.0, abs(ref)):
                c.append(int(i))
                break
        else:
            clusters.append([int(i)])
    return clusters


def staircase(P: Pencil, tol: float = DEFAULT_TOL, cluster_tol: float = 1e-4) -> KroneckerStructure:
    """Kronecker structure of ``P`` by staircase reduction.

    Rank decisions treat singular values below ``tol * ||[A, B]||`` as zero and
    raise :class:`RankAmbiguous` when no factor-10 gap separates kept from
    dropped singular values.
    """
    P = P.to_float()
    m, n = P.shape
    A, B = P.A, P.B
    scale = max(np.linalg.norm(np.hstack([A, B]), 2) if A.size else 0.0, np.finfo(float).tiny)
    thr = tol * scale

    ns, ms, A1, B1 = _zero_right_staircase(A, B, thr, "right/zero structure")
    right, zero_jordan = _counts(ns, ms)

    ns, ms, B2, A2 = _zero_right_staircase(B1, A1, thr, "infinite structure")
    extra_right, infinite = _counts(ns, ms)

    ns, ms, A3t, B3t = _zero_right_staircase(A2.T, B2.T, thr, "left structure")
    left, extra_zero = _counts(ns, ms)
    A3, B3 = A3t.T, B3t.T

    if extra_right or extra_zero:
        raise ArithmeticError("inconsistent staircase: singular structure reappeared after deflation")
    if A3.shape[0] != A3.shape[1]:
        raise ArithmeticError(f"regular core is not square: {A3.shape}")

    finite = []
    if A3.shape[0]:
        alpha_beta = sla.eigvals(A3, B3, homogeneous_eigvals=True)
        alpha, beta = alpha_beta[0], alpha_beta[1]
        big = np.maximum(np.abs(alpha), np.abs(beta))
        inf_mask = np.abs(beta) <= tol * big
        zero_mask = (np.abs(alpha) <= tol * big) & ~inf_mask
        infinite += [1] * int(inf_mask.sum())
        zero_jordan += [1] * int(zero_mask.sum())
        keep = ~(inf_mask | zero_mask)
        lam = alpha[keep] / beta[keep]
        for c in _cluster(lam, cluster_tol):
            mu = np.mean(lam[c])
            if len(c) == 1:
                finite.append((mu, [1]))
                continue
            ns, ms, _, _ = _zero_right_staircase(A3 - mu * B3, B3, thr, f"Jordan structure at {mu:.6g}")
            r_extra, sizes = _counts(ns, ms)
            if r_extra or sum(sizes) != len(c):
                # rank decisions did not resolve the cluster; report semisimple
                sizes = [1] * len(c)
            finite.append((mu, sizes))
    finite = [(complex(np.real_if_close(v, tol=1e6)), b) for v, b in finite]
    ks = KroneckerStructure(right, left, zero_jordan, infinite, finite)
    ks.check_shape(m, n)
    return ks


def normal_rank(P: Pencil, tol: float = DEFAULT_TOL, probes: int = 5, rng=None) -> int:
    """Rank of ``A - lam B`` for generic ``lam``.

    Exact pencils use fraction-free elimination over ``Q[lam]``; float pencils
    take the largest numerical rank over random complex probes.
    """
    m, n = P.shape
    if m == 0 or n == 0:
        return 0
    if P.is_exact:
        return pm_rank(P.as_poly_matrix())
    rng = np.random.default_rng(0) if rng is None else rng
    scale = max(np.linalg.norm(np.hstack([P.A, P.B]), 2), np.finfo(float).tiny)
    best = 0
    for _ in range(probes):
        lam = complex(rng.normal(), rng.normal())
        s = np.linalg.svd(P(lam), compute_uv=False)
        best = max(best, int(np.sum(s > tol * scale * max(1.0, abs(lam)))))
    return best


def spectrum_oracle(P: Pencil) -> tuple[int, LaurentPoly]:
    """Exact normal rank and monic gcd of all maximal nonvanishing minors.

    The gcd is a polynomial in ``lam`` whose roots are exactly the finite
    eigenvalues of the pencil (with algebraic multiplicity).
    """
    if not P.is_exact:
        raise TypeError("spectrum_oracle needs an exact pencil")
    M = P.as_poly_matrix()
    rho = pm_rank(M)
    if rho == 0:
        return 0, LaurentPoly.constant(1)
    return rho, poly_gcd(pm_minors(M, rho))


# --- planted pencils ---------------------------------------------------------

def _block(kind: str, size: int, value=0):
    """``(A, B)`` blocks of the Kronecker canonical form as nested lists."""
    if kind == "L":          # size x (size + 1)
        A = [[int(j == i + 1) for j in range(size + 1)] for i in range(size)]
        B = [[int(j == i) for j in range(size + 1)] for i in range(size)]
    elif kind == "LT":       # (size + 1) x size
        A = [[int(i == j + 1) for j in range(size)] for i in range(size + 1)]
        B = [[int(i == j) for j in range(size)] for i in range(size + 1)]
    elif kind == "J":
        A = [[value if i == j else int(j == i + 1) for j in range(size)] for i in range(size)]
        B = [[int(i == j) for j in range(size)] for i in range(size)]
    elif kind == "N":
        A = [[int(i == j) for j in range(size)] for i in range(size)]
        B = [[int(j == i + 1) for j in range(size)] for i in range(size)]
    else:
        raise ValueError(kind)
    return A, B


def kronecker_form(ks: KroneckerStructure, exact_values=None) -> tuple[np.ndarray, np.ndarray]:
    """Block-diagonal canonical pencil for a structure.

    ``exact_values`` optionally maps finite eigenvalues to exact rationals.
    """
    blocks = [_block("L", e) for e in ks.right]
    blocks += [_block("J", k, 0) for k in ks.zero_jordan]
    for v, sizes in ks.finite:
        val = exact_values[v] if exact_values else (v.real if v.imag == 0 else v)
        blocks += [_block("J", k, val) for k in sizes]
    blocks += [_block("N", k) for k in ks.infinite]
    blocks += [_block("LT", e) for e in ks.left]
    m, n = ks.shape
    A = np.zeros((m, n), dtype=object)
    B = np.zeros((m, n), dtype=object)
    i = j = 0
    for a, b in blocks:
        h = len(a)
        w = len(a[0]) if a else (len(b[0]) if b else 0)
        if h and w:
            A[i:i + h, j:j + w] = np.array(a, dtype=object)
            B[i:i + h, j:j + w] = np.array(b, dtype=object)
        i += h
        # L_0 is 0 x 1, L_0^T is 1 x 0
        j += w if h else 1
    return A, B


def planted_pencil(ks: KroneckerStructure, rng: np.random.Generator, exact: bool = False,
                   exact_values=None, entry_range: int = 2) -> Pencil:
    """``U K V`` for the canonical pencil ``K`` of ``ks`` and random invertible ``U, V``.

    Exact pencils use small random integer transforms; float ones use
    Gaussian transforms.
    """
    K_A, K_B = kronecker_form(ks, exact_values)
    m, n = ks.shape

    def rand_inv(k):
        while True:
            if exact:
                X = rng.integers(-entry_range, entry_range + 1, size=(k, k))
                if k == 0 or round(np.linalg.det(X)) != 0:
                    return X.astype(object)
            else:
                X = rng.normal(size=(k, k))
                if k == 0 or np.linalg.cond(X) < 1e3:
                    return X

    U, V = rand_inv(m), rand_inv(n)
    if exact:
        conv = np.vectorize(Fraction, otypes=[object])
        Uf, Vf = conv(U) if m else U, conv(V) if n else V
        A = Uf.dot(K_A).dot(Vf) if m and n else np.zeros((m, n), dtype=object)
        B = Uf.dot(K_B).dot(Vf) if m and n else np.zeros((m, n), dtype=object)
        return Pencil.exact(A, B)
    KA = K_A.astype(complex if any(isinstance(v, complex) and v.imag for v, _ in ks.finite) else float)
    KB = K_B.astype(KA.dtype)
    return Pencil(U @ KA @ V, U @ KB @ V)


def structure_key(ks: KroneckerStructure, digits: int = 6):
    """Hashable summary used to compare two structures."""
    fin = sorted(((round(v.real, digits) + 0.0, round(v.imag, digits) + 0.0), tuple(b))
                 for v, b in ks.finite)
    return (tuple(ks.right), tuple(ks.left), tuple(ks.zero_jordan), tuple(ks.infinite),
            tuple(fin))


def random_structure(rng: np.random.Generator, max_rows: int = 8, max_cols: int = 8,
                     eigenvalues=(1, -2, 3, Fraction(1, 2))):
    """Random block inventory fitting in ``max_rows x max_cols``.

    Returns ``(structure, exact_values)`` where ``exact_values`` maps each
    planted finite nonzero eigenvalue to its rational value, as expected by
    :func:`planted_pencil`.
    """
    while True:
        k = int(rng.integers(0, 3))
        vals = [eigenvalues[i] for i in rng.choice(len(eigenvalues), size=k, replace=False)]

        def draw(lo, hi):
            return [int(v) for v in rng.integers(lo, hi, size=rng.integers(0, 3))]

        ks = KroneckerStructure(
            right=draw(0, 4), left=draw(0, 4), zero_jordan=draw(1, 4), infinite=draw(1, 4),
            finite=[(complex(float(v)), [int(b) for b in rng.integers(1, 3, size=rng.integers(1, 3))])
                    for v in vals])
        m, n = ks.shape
        if 0 < m <= max_rows and 0 < n <= max_cols:
            return ks, {complex(float(v)): Fraction(v) for v in vals}
