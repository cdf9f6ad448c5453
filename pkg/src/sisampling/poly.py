"""Sparse Laurent polynomials and polynomial matrices.

Two coefficient domains are supported: ``Domain.EXACT`` keeps rational
coefficients as :class:`fractions.Fraction`, ``Domain.FLOAT`` keeps complex
doubles. Structural computations (minors, gcds, invariant polynomials) are
only defined on exact data.
"""
from __future__ import annotations

import enum
import itertools
from fractions import Fraction
from math import comb, gcd
from numbers import Number
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Domain",
    "DomainMismatch",
    "LaurentPoly",
    "PolyMatrix",
    "harmonic_split",
    "polyphase_split",
    "poly_gcd",
    "pm_minors",
    "pm_rank",
    "determinant",
    "invariant_polynomials",
]


class Domain(enum.Enum):
    EXACT = "exact"
    FLOAT = "float"


class DomainMismatch(TypeError):
    """Raised when exact and floating polynomials are combined."""


def _coerce(value, domain):
    if domain is Domain.EXACT:
        if isinstance(value, complex):
            raise DomainMismatch("complex coefficient in an exact polynomial")
        return Fraction(value)
    return complex(value)


class LaurentPoly:
    """Finite sum ``sum_k c_k z**k`` with possibly negative exponents.

    Zero coefficients are never stored, so the empty map is the zero
    polynomial.
    """

    __slots__ = ("_c", "domain")

    def __init__(self, coeffs: Mapping[int, Number] | None = None,
                 domain: Domain = Domain.EXACT):
        self.domain = Domain(domain)
        c = {}
        for k, v in (coeffs or {}).items():
            v = _coerce(v, self.domain)
            if v != 0:
                c[int(k)] = v
        self._c = c

    # construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, value, domain=Domain.EXACT):
        return cls({0: value}, domain)

    @classmethod
    def monomial(cls, value, exponent: int, domain=Domain.EXACT):
        return cls({exponent: value}, domain)

    @classmethod
    def zero(cls, domain=Domain.EXACT):
        return cls({}, domain)

    @classmethod
    def from_ascending(cls, values: Sequence, start: int = 0,
                       domain=Domain.EXACT):
        return cls({start + i: v for i, v in enumerate(values)}, domain)

    @classmethod
    def _raw(cls, c: dict, domain: Domain):
        p = cls.__new__(cls)
        p.domain = domain
        p._c = c
        return p

    # inspection -----------------------------------------------------------
    @property
    def coeffs(self) -> dict:
        return dict(self._c)

    def __getitem__(self, k: int):
        return self._c.get(k, 0 if self.domain is Domain.EXACT else 0j)

    def items(self):
        return sorted(self._c.items())

    def exponents(self) -> list[int]:
        return sorted(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def __bool__(self):
        return bool(self._c)

    @property
    def degree(self) -> int | None:
        return max(self._c) if self._c else None

    @property
    def valuation(self) -> int | None:
        return min(self._c) if self._c else None

    @property
    def leading_coefficient(self):
        return self._c[self.degree] if self._c else 0

    def is_monomial(self) -> bool:
        """True for ``c * z**k`` with ``c != 0``."""
        return len(self._c) == 1

    def is_constant(self) -> bool:
        return not self._c or set(self._c) == {0}

    # arithmetic -----------------------------------------------------------
    def _check(self, other: "LaurentPoly"):
        if other.domain is not self.domain:
            raise DomainMismatch(
                f"cannot combine {self.domain.value} and {other.domain.value} polynomials")

    def _lift(self, other):
        if isinstance(other, LaurentPoly):
            self._check(other)
            return other
        if isinstance(other, Number):
            return LaurentPoly.constant(other, self.domain)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        c = dict(self._c)
        for k, v in other._c.items():
            w = c.get(k, 0) + v
            if w == 0:
                c.pop(k, None)
            else:
                c[k] = w
        return LaurentPoly._raw(c, self.domain)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({k: -v for k, v in self._c.items()}, self.domain)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        if isinstance(other, Number):
            v = _coerce(other, self.domain)
            if v == 0:
                return LaurentPoly.zero(self.domain)
            return LaurentPoly._raw({k: c * v for k, c in self._c.items()}, self.domain)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._check(other)
        c: dict = {}
        for i, a in self._c.items():
            for j, b in other._c.items():
                c[i + j] = c.get(i + j, 0) + a * b
        return LaurentPoly._raw({k: v for k, v in c.items() if v != 0}, self.domain)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            if self.domain is Domain.EXACT:
                return self * (1 / Fraction(other))
            return self * (1 / complex(other))
        if isinstance(other, LaurentPoly):
            # exact division in the Laurent ring: powers of z are units
            if not other:
                raise ZeroDivisionError("division by the zero polynomial")
            if not self:
                return self
            va, vb = self.valuation, other.valuation
            q, rem = self.shift(-va).divmod(other.shift(-vb))
            if rem:
                raise ArithmeticError("polynomial division is not exact")
            return q.shift(va - vb)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise ValueError("only monomials have Laurent inverses")
            (k, c), = self._c.items()
            return LaurentPoly.monomial(1 / c if self.domain is Domain.FLOAT else 1 / Fraction(c),
                                        -k, self.domain) ** (-n)
        out = LaurentPoly.constant(1, self.domain)
        for _ in range(n):
            out = out * self
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by ``z**k``."""
        return LaurentPoly._raw({e + k: v for e, v in self._c.items()}, self.domain)

    def scale_variable(self, factor: int) -> "LaurentPoly":
        """Substitute ``z -> z**factor``."""
        return LaurentPoly._raw({e * factor: v for e, v in self._c.items()}, self.domain)

    def divmod(self, other: "LaurentPoly"):
        """Euclidean division of algebraic polynomials (no negative exponents)."""
        self._check(other)
        if not other:
            raise ZeroDivisionError("division by the zero polynomial")
        if (self and self.valuation < 0) or other.valuation < 0:
            # Laurent division: normalise both sides, then restore.
            shift = -min(self.valuation or 0, other.valuation, 0)
            q, r = self.shift(shift).divmod(other.shift(shift))
            return q, r.shift(-shift)
        rem = dict(self._c)
        quot: dict = {}
        dd, lc = other.degree, other.leading_coefficient
        while rem:
            top = max(rem)
            if top < dd:
                break
            f = rem[top] / lc
            quot[top - dd] = f
            for e, v in other._c.items():
                k = e + top - dd
                w = rem.get(k, 0) - f * v
                if w == 0:
                    rem.pop(k, None)
                else:
                    rem[k] = w
            rem.pop(top, None)
        return LaurentPoly._raw(quot, self.domain), LaurentPoly._raw(rem, self.domain)

    def monic(self) -> "LaurentPoly":
        if not self:
            return self
        return self / self.leading_coefficient

    # evaluation / conversion ---------------------------------------------
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for k, v in self._c.items():
            out = out + complex(v) * z ** k
        return out if out.ndim else complex(out)

    def evaluate_exact(self, z: Fraction) -> Fraction:
        if self.domain is not Domain.EXACT:
            raise DomainMismatch("exact evaluation of a float polynomial")
        z = Fraction(z)
        return sum((v * z ** k for k, v in self._c.items()), Fraction(0))

    def to_float(self) -> "LaurentPoly":
        if self.domain is Domain.FLOAT:
            return self
        return LaurentPoly._raw({k: complex(v) for k, v in self._c.items()}, Domain.FLOAT)

    def real_part(self) -> dict:
        return {k: complex(v).real for k, v in self._c.items()}

    def max_abs_imag(self) -> float:
        return max((abs(complex(v).imag) for v in self._c.values()), default=0.0)

    def __eq__(self, other):
        if isinstance(other, Number):
            other = LaurentPoly.constant(other, self.domain)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.domain is other.domain and self._c == other._c

    def __hash__(self):
        return hash((self.domain, tuple(sorted(self._c.items()))))

    def __repr__(self):
        if not self._c:
            return "0"
        terms = []
        for k, v in sorted(self._c.items()):
            if k == 0:
                terms.append(f"{v}")
            elif k == 1:
                terms.append(f"({v})*z")
            else:
                terms.append(f"({v})*z^{k}")
        return " + ".join(terms)


def harmonic_split(p: LaurentPoly, n: int) -> list[LaurentPoly]:
    """Split an algebraic polynomial into its ``n`` harmonic components.

    Component ``j`` collects the monomials whose exponent is congruent to
    ``j`` modulo ``n``.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if p and p.valuation < 0:
        raise ValueError("harmonic_split needs an algebraic polynomial "
                         "(multiply by a power of z first)")
    parts: list[dict] = [{} for _ in range(n)]
    for k, v in p.items():
        parts[k % n][k] = v
    return [LaurentPoly._raw(c, p.domain) for c in parts]


def polyphase_split(p: LaurentPoly, n: int) -> list[LaurentPoly]:
    """Components ``H_q`` with ``p(z) = sum_q z**q H_q(z**n)``.

    Unlike :func:`harmonic_split` negative exponents are fine and the
    components are expressed in the decimated variable ``w = z**n``.
    """
    parts: list[dict] = [{} for _ in range(n)]
    for k, v in p.items():
        q, e = k % n, k // n
        parts[q][e] = v
    return [LaurentPoly._raw(c, p.domain) for c in parts]


def poly_gcd(ps: Iterable[LaurentPoly]) -> LaurentPoly:
    """Monic gcd of exact Laurent polynomials.

    The common power of ``z`` is factored out before running Euclid on the
    algebraic parts and re-attached afterwards, so ``gcd(z**3, z**5) = z**3``.
    """
    ps = [p for p in ps if p]
    if not ps:
        raise ValueError("gcd of zero polynomials is undefined")
    for p in ps:
        if p.domain is not Domain.EXACT:
            raise DomainMismatch("poly_gcd works on exact polynomials only")
    common = min(p.valuation for p in ps)
    g = None
    for p in ps:
        a = p.shift(-common)
        g = a if g is None else _euclid(g, a)
        if g.degree == 0:
            break
    return g.monic().shift(common)


def _euclid(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    while b:
        _, r = a.divmod(b)
        a, b = b, r.monic() if r else r
    return a


class PolyMatrix:
    """Dense matrix of :class:`LaurentPoly` sharing a coefficient domain."""

    def __init__(self, entries: Sequence[Sequence[LaurentPoly]]):
        rows = [list(r) for r in entries]
        if not rows or not rows[0]:
            raise ValueError("PolyMatrix needs at least one row and one column")
        ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged PolyMatrix rows")
        domains = {e.domain for r in rows for e in r}
        if len(domains) != 1:
            raise DomainMismatch("mixed coefficient domains in PolyMatrix")
        self.domain = domains.pop()
        self._rows = rows

    @classmethod
    def from_constant(cls, M, domain=Domain.EXACT):
        M = [list(r) for r in M]
        return cls([[LaurentPoly.constant(v, domain) for v in r] for r in M])

    @classmethod
    def from_pencil(cls, A, B, domain=Domain.EXACT):
        """``A - lam*B`` as a polynomial matrix in ``lam``."""
        A = [list(r) for r in A]
        B = [list(r) for r in B]
        return cls([[LaurentPoly({0: a, 1: -b}, domain) for a, b in zip(ra, rb)]
                    for ra, rb in zip(A, B)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self._rows), len(self._rows[0])

    @property
    def rows(self) -> int:
        return len(self._rows)

    @property
    def cols(self) -> int:
        return len(self._rows[0])

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def row(self, i) -> list[LaurentPoly]:
        return list(self._rows[i])

    def column(self, j) -> list[LaurentPoly]:
        return [r[j] for r in self._rows]

    def tolist(self) -> list[list[LaurentPoly]]:
        return [list(r) for r in self._rows]

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([list(c) for c in zip(*self._rows)])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix([[self._rows[i][j] for j in cols] for i in rows])

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        zero = LaurentPoly.zero(self.domain)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = zero
                for k in range(self.cols):
                    acc = acc + self._rows[i][k] * other[k, j]
                row.append(acc)
            out.append(row)
        return PolyMatrix(out)

    def __call__(self, z) -> np.ndarray:
        return np.array([[complex(e(z)) for e in r] for r in self._rows])

    def to_float(self) -> "PolyMatrix":
        return PolyMatrix([[e.to_float() for e in r] for r in self._rows])

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self._rows == other._rows

    def __repr__(self):
        body = ",\n ".join("[" + ", ".join(repr(e) for e in r) + "]" for r in self._rows)
        return f"PolyMatrix([{body}])"

    def minors(self, k: int) -> list[LaurentPoly]:
        return pm_minors(self, k)

    def rank(self) -> int:
        return pm_rank(self)

    def invariant_polynomials(self) -> list[LaurentPoly]:
        return invariant_polynomials(self)


def _require_exact(M: PolyMatrix, what: str):
    if M.domain is not Domain.EXACT:
        raise DomainMismatch(f"{what} is an exact-arithmetic operation")


def determinant(rows: Sequence[Sequence[LaurentPoly]]) -> LaurentPoly:
    """Determinant of a square exact Laurent matrix.

    Orders up to 3 use cofactor expansion; larger ones use Bareiss
    fraction-free elimination after shifting every row to nonnegative
    exponents.
    """
    n = len(rows)
    if n == 0:
        return LaurentPoly.constant(1)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        a = rows
        return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
    domain = rows[0][0].domain
    shift = 0
    M = []
    for r in rows:
        vals = [e.valuation for e in r if e]
        if not vals:
            return LaurentPoly.zero(domain)
        v = min(vals)
        shift += v
        M.append([e.shift(-v) for e in r])
    sign = 1
    prev = LaurentPoly.constant(1, domain)
    for k in range(n - 1):
        if not M[k][k]:
            piv = next((i for i in range(k + 1, n) if M[i][k]), None)
            if piv is None:
                return LaurentPoly.zero(domain)
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) / prev
        prev = M[k][k]
    det = M[n - 1][n - 1].shift(shift)
    return det if sign > 0 else -det


def _int_poly_divexact(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    while b and b[-1] == 0:
        b = b[:-1]
    if not a:
        return []
    db, lb = len(b) - 1, b[-1]
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c:
            f, rem = divmod(c, lb)
            if rem:
                raise ArithmeticError("inexact integer polynomial division")
            q[k - db] = f
            for i, bi in enumerate(b):
                a[k - db + i] -= f * bi
    if any(a[:db]):
        raise ArithmeticError("inexact integer polynomial division")
    return q


def _int_poly_mul(a: list[int], b: list[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _int_poly_sub(a: list[int], b: list[int]) -> list[int]:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    while out and out[-1] == 0:
        out.pop()
    return out


def _det_int_poly(M: list[list[list[int]]]) -> list[int]:
    """Bareiss determinant of a square matrix of dense integer polynomials."""
    n = len(M)
    if n == 0:
        return [1]
    M = [list(r) for r in M]
    sign, prev = 1, [1]
    for k in range(n - 1):
        if not M[k][k]:
            piv = next((i for i in range(k + 1, n) if M[i][k]), None)
            if piv is None:
                return []
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = _int_poly_sub(_int_poly_mul(M[i][j], M[k][k]),
                                    _int_poly_mul(M[i][k], M[k][j]))
                M[i][j] = _int_poly_divexact(num, prev)
        prev = M[k][k]
    d = M[n - 1][n - 1]
    return d if sign > 0 else [-c for c in d]


def pm_minors(M: PolyMatrix, k: int) -> list[LaurentPoly]:
    """All order-``k`` minors, rows and columns in lexicographic subset order.

    Orders up to 3 are expanded by cofactors; larger orders run Bareiss on
    an integer-scaled copy of the matrix.
    """
    _require_exact(M, "pm_minors")
    if not 0 <= k <= min(M.shape):
        raise ValueError(f"minor order {k} out of range for shape {M.shape}")
    rsets = list(itertools.combinations(range(M.rows), k))
    csets = list(itertools.combinations(range(M.cols), k))
    if k <= 3:
        return [determinant([[M[i, j] for j in cs] for i in rs]) for rs in rsets for cs in csets]
    shifts = []
    for i in range(M.rows):
        vals = [e.valuation for e in M.row(i) if e]
        shifts.append(min(vals) if vals else 0)
    denom = 1
    for i in range(M.rows):
        for e in M.row(i):
            for v in e.coeffs.values():
                denom = denom * v.denominator // gcd(denom, v.denominator)
    dense = []
    for i in range(M.rows):
        row = []
        for e in M.row(i):
            e = e.shift(-shifts[i])
            c = [0] * ((e.degree + 1) if e else 0)
            for p, v in e.items():
                c[p] = int(v * denom)
            row.append(c)
        dense.append(row)
    scale = Fraction(1, denom ** k)
    out = []
    for rs in rsets:
        sh = sum(shifts[i] for i in rs)
        for cs in csets:
            d = _det_int_poly([[dense[i][j] for j in cs] for i in rs])
            out.append(LaurentPoly({p + sh: c * scale for p, c in enumerate(d) if c}))
    return out


def pm_rank(M: PolyMatrix) -> int:
    """Rank over the rational function field (the order of the largest nonzero minor)."""
    _require_exact(M, "pm_rank")
    rows = []
    for r in M.tolist():
        vals = [e.valuation for e in r if e]
        if vals:
            v = min(vals)
            rows.append([e.shift(-v) for e in r])
    ncols = M.cols
    rank = 0
    prev = LaurentPoly.constant(1)
    col = 0
    while rank < len(rows) and col < ncols:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col]), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        p = rows[rank][col]
        for i in range(rank + 1, len(rows)):
            a = rows[i][col]
            rows[i] = [(rows[i][j] * p - a * rows[rank][j]) / prev for j in range(ncols)]
        prev = p
        rank += 1
        col += 1
    return rank


def invariant_polynomials(M: PolyMatrix) -> list[LaurentPoly]:
    """Smith invariant polynomials ``i_j = d_j / d_(j-1)`` via minor gcds."""
    _require_exact(M, "invariant_polynomials")
    rho = pm_rank(M)
    out = []
    prev = LaurentPoly.constant(1)
    for j in range(1, rho + 1):
        d = poly_gcd(pm_minors(M, j))
        out.append((d / prev).monic())
        prev = d
    return out


def minor_count(rows: int, cols: int, k: int) -> int:
    return comb(rows, k) * comb(cols, k)
