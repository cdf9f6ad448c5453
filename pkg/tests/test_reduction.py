from fractions import Fraction as F

import numpy as np
import pytest

from sisampling import Pencil, staircase
from sisampling.pencil import structure_key
from sisampling.poly import LaurentPoly, PolyMatrix
from sisampling.reduction import (RankDeficientScalarPart, ReductionError, fourier_matrix,
                                  full_pencil, harmonic_matrix, normalize_and_split,
                                  reduce_problem, row_compress, row_compression, to_algebraic)

from conftest import FIXTURE_R, G_PRIME, M2_ENTRIES, TILDE_G

z = LaurentPoly.monomial(1, 1)


def test_to_algebraic(quad_trace):
    assert quad_trace.g_tilde[4].coeffs == {0: F(1, 50), 1: F(33, 50), 2: F(8, 25)}
    N, r = quad_trace.problem.N, quad_trace.problem.r
    assert all(g.valuation >= 0 and g.degree <= N + r - 2 for g in quad_trace.g_tilde)
    assert to_algebraic([LaurentPoly.monomial(1, -3)], 4) == [LaurentPoly.constant(1)]


def test_to_algebraic_rejects_long_rows():
    with pytest.raises(ReductionError):
        to_algebraic([LaurentPoly.monomial(1, -4)], 4)
    with pytest.raises(ReductionError):
        to_algebraic([LaurentPoly.monomial(1, 5)], 4, N=3)


def test_harmonic_matrix_rows(quad_trace):
    H = quad_trace.hat_G
    mono = LaurentPoly.monomial
    assert H.row(0) == [mono(F(1, 2), 4), mono(F(1, 2), 5), 0 * z, 0 * z]
    assert H.row(1) == [mono(F(33, 50), 4), mono(F(1, 50), 5), 0 * z, mono(F(8, 25), 3)]
    for q in range(4):
        for e in H.column(q):
            assert not e or (e.is_monomial() and e.valuation % 4 == q)


def test_harmonic_matrix_trivial_row():
    H = harmonic_matrix([LaurentPoly.constant(1)], 3)
    assert H.row(0) == [LaurentPoly.constant(1), 0 * z, 0 * z]


def test_harmonic_matrix_sparsity_pattern_n3():
    # N = 3, r = 4: columns q >= N - 1 carry only the k = 0 monomial, the
    # first N - 1 columns may carry z^(4 + q)
    from sisampling import GeneratorSpec, SamplingProblem
    for s in (5, 6):
        t = reduce_problem(SamplingProblem(GeneratorSpec.bspline(3), r=4, s=s))
        for q in range(4):
            for e in t.hat_G.column(q):
                if e:
                    assert e.valuation in ((q, q + 4) if q < 2 else (q,))


def test_harmonic_matrix_rejects_long_polys():
    with pytest.raises(ReductionError):
        harmonic_matrix([LaurentPoly({0: 1, 4: 1})], 4)


def test_tilde_G_exact(quad_trace):
    P = quad_trace.pencil
    for i, row in enumerate(TILDE_G):
        for j, (a, b) in enumerate(row):
            assert quad_trace.tilde_G[i, j] == LaurentPoly({0: a, 4: b})
            assert (P.A[i, j], P.B[i, j]) == (a, -b)
    assert quad_trace.scalar_G.shape == (5, 2)
    assert quad_trace.scalar_rank == 2


def test_normalize_and_split_constant_case():
    one = LaurentPoly.constant(1)
    hat = PolyMatrix([[one, 0 * z, 0 * z], [0 * z, z, 0 * z], [0 * z, 0 * z, z * z]])
    M, Gs, tG = normalize_and_split(hat, 2)
    assert M.shape == (3, 1) and Gs.shape == (3, 2)
    assert not np.any(full_pencil(tG, 3).B != 0)


def test_normalize_and_split_rejects_z_r_in_trailing_column():
    hat = PolyMatrix([[LaurentPoly.constant(1), LaurentPoly.monomial(1, 4)]])
    with pytest.raises(ReductionError):
        normalize_and_split(hat, 2)


def test_pencil_matrices_transposed(quad_trace):
    A, B = quad_trace.pencil.A.T, quad_trace.pencil.B.T
    assert list(A[0]) == [0, 0, 0, 0, F(1, 50)]
    assert list(A[2]) == [0, 0, F(9, 50), F(37, 50), F(8, 25)]
    assert list(B[0]) == [F(-1, 2), F(-33, 50), F(-2, 25), 0, 0]
    assert not np.any(B[2:] != 0)


def test_zero_pattern_min_oversampling(quad_trace):
    # B^T[i, j] = 0 when i + j > N + 1 (1-based)
    N = quad_trace.problem.N
    B = quad_trace.pencil.B
    for i in range(B.shape[0]):
        for j in range(B.shape[1]):
            if i + j + 2 > N + 1:
                assert B[i, j] == 0


def test_fixture_R_stages(quad_fixture_trace):
    t = quad_fixture_trace
    assert (t.G_prime == np.array(G_PRIME, dtype=object)).all()
    for i, row in enumerate(M2_ENTRIES):
        for j, (a, b) in enumerate(row):
            assert (t.M2.A[i, j], -t.M2.B[i, j]) == (a, b)


def test_builtin_R_compresses(quad_trace):
    t = quad_trace
    RG = np.array([[sum(a * b for a, b in zip(row, col)) for col in t.scalar_G.T] for row in t.R])
    assert not np.any(RG[2:] != 0)
    assert np.linalg.matrix_rank(np.array(RG[:2], float)) == 2


def test_identity_R_when_already_compressed():
    Gs = np.array([[F(1), F(2)], [F(0), F(3)], [F(0), F(0)]], dtype=object)
    R, piv = row_compression(Gs)
    assert (R == np.eye(3, dtype=int)).all() and piv == [0, 1]


def test_wrong_R_rejected(quad_trace):
    t = quad_trace
    with pytest.raises(ReductionError):
        row_compress(t.M, t.scalar_G, 4, R=np.eye(5, dtype=int))
    with pytest.raises(ReductionError):
        row_compress(t.M, t.scalar_G, 4, R=np.zeros((5, 5), dtype=int))


def test_misplaced_R_rows_do_not_compress(quad_trace):
    # rows 4 and 5 with their weights on columns 1, 2 instead of 2, 3
    R = [list(r) for r in FIXTURE_R]
    R[3] = [F(37, 9), F(-161, 18), 0, 1, 0]
    R[4] = [F(16, 9), F(-37, 9), 0, 0, 1]
    t = quad_trace
    with pytest.raises(ReductionError):
        row_compress(t.M, t.scalar_G, 4, R=np.array(R, dtype=object))


def test_rank_deficient_scalar_part(sawtooth_problem):
    with pytest.raises(RankDeficientScalarPart):
        reduce_problem(sawtooth_problem)
    t = reduce_problem(sawtooth_problem, strict=False)
    assert not t.scalar_rank_ok and t.M2 is None


def test_chain_identity(quad_trace):
    # G(z) U(z) = Ghat(z) Omega_r with U = diag((W^k z)^(r-1))
    r = 4
    W = np.exp(-2j * np.pi / r)
    rng = np.random.default_rng(7)
    for _ in range(10):
        z0 = np.exp(2j * np.pi * rng.random())
        U = np.diag([(W ** k * z0) ** (r - 1) for k in range(r)])
        lhs = quad_trace.G.evaluate(z0) @ U
        rhs = quad_trace.hat_G(z0) @ fourier_matrix(r)
        assert np.max(np.abs(lhs - rhs)) < 1e-10
        rk = np.linalg.matrix_rank
        assert rk(quad_trace.tilde_G(z0)) == rk(quad_trace.G.evaluate(z0))


def test_kronecker_structure_independent_of_R(quad_trace, quad_fixture_trace):
    a = staircase(quad_trace.M2)
    b = staircase(quad_fixture_trace.M2)
    assert structure_key(a) == structure_key(b)
    rng = np.random.default_rng(0)
    t = quad_trace
    for _ in range(3):
        # any R' = [[X, Y], [0, Z]] R with X, Z invertible also compresses
        T = np.eye(5, dtype=object) * F(1)
        T[:2, :] = [[F(int(v)) for v in rng.integers(-3, 4, 5)] for _ in range(2)]
        T[0, 0], T[1, 1], T[1, 0] = F(1), F(2), F(0)
        T[2:, 2:] = [[F(int(v)) + (3 * F(1) if i == j else 0) for j, v in
                      enumerate(rng.integers(-1, 2, 3))] for i in range(3)]
        T[2:, :2] = 0
        R2 = T.dot(t.R)
        _, _, M2, _ = row_compress(t.M, t.scalar_G, 4, R=R2)
        assert structure_key(staircase(M2)) == structure_key(a)


def test_full_pencil_constant():
    P = full_pencil(PolyMatrix.from_constant([[1, 2], [3, 4], [5, 6]]), 2)
    assert isinstance(P, Pencil) and not np.any(P.B != 0)
