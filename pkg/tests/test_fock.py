"""Fock layer: representation matrices, ladder algebra, functional calculus.

The independent oracle for rep_matrix is the displacement closed form
M(w; lam) = e^{i lam s} D(gamma), gamma = sqrt(2|lam|)(x + i sgn(lam) y),
with <m|D|n> the standard Laguerre expression. The implementation never uses
it (entries come from Gauss-Hermite quadrature), so agreement is meaningful.
"""
import math

import numpy as np
import pytest
from scipy.special import eval_hermite, genlaguerre

from hgcalc.fock import (TruncatedBasis, check_ladder_commutation,
                         dlambda_matrix, functional_calculus, hermite_eval,
                         homomorphism_defect, ladder_matrices, rep_matrix)
from hgcalc.group import group_inv

RNG = np.random.default_rng(202)


def displacement_oracle(gamma, nmax):
    D = np.zeros((nmax + 1, nmax + 1), dtype=complex)
    g2 = abs(gamma) ** 2
    for m in range(nmax + 1):
        for n in range(nmax + 1):
            if m >= n:
                D[m, n] = (math.sqrt(math.factorial(n) / math.factorial(m))
                           * gamma ** (m - n) * math.exp(-g2 / 2)
                           * genlaguerre(n, m - n)(g2))
            else:
                D[m, n] = (math.sqrt(math.factorial(m) / math.factorial(n))
                           * (-np.conj(gamma)) ** (n - m) * math.exp(-g2 / 2)
                           * genlaguerre(m, n - m)(g2))
    return D


def test_hermite_eval_matches_physicists_normalization():
    t = np.linspace(-3.0, 3.0, 7)
    for n in (0, 1, 5, 12, 20):
        norm = math.sqrt(2.0 ** n * math.factorial(n) * math.sqrt(math.pi))
        ref = eval_hermite(n, t) * np.exp(-t * t / 2.0) / norm
        assert np.max(np.abs(hermite_eval(n, t) - ref)) <= 1e-10


def test_basis_enumeration():
    b = TruncatedBasis(2, 4, 1.0)
    assert b.dim == math.comb(4 + 2, 2) == len(b.indices)
    assert b.indices[0] == (0, 0)
    # graded order: the N_max = 3 basis is a prefix of the N_max = 4 one
    b3 = TruncatedBasis(2, 3, 1.0)
    assert b.indices[: b3.dim] == b3.indices


def test_center_is_scalar():
    for lam in (0.7, -1.3):
        b = TruncatedBasis(1, 12, lam)
        M = rep_matrix((0.0, 0.0, 0.4), b).mat
        err = np.max(np.abs(M - np.exp(1j * lam * 0.4) * np.eye(b.dim)))
        assert err <= 1e-12
    assert np.max(np.abs(rep_matrix((0.0, 0.0, 0.0), b).mat
                         - np.eye(b.dim))) <= 1e-12


def test_rep_matrix_displacement_closed_form():
    w = (0.3, -0.45, 0.2)
    x, y, s = w
    for lam in (0.8, -0.8, 2.0, -2.0):
        b = TruncatedBasis(1, 14, lam)
        sg = 1.0 if lam > 0 else -1.0
        gamma = math.sqrt(2 * abs(lam)) * (x + 1j * sg * y)
        D = np.exp(1j * lam * s) * displacement_oracle(gamma, b.N_max)
        inner = b.interior()
        err = np.max(np.abs((rep_matrix(w, b).mat - D)[np.ix_(inner, inner)]))
        assert err <= 1e-12


def test_adjoint_is_inverse_point():
    for lam in (1.0, -2.0):
        b = TruncatedBasis(1, 16, lam)
        w = RNG.uniform(-1, 1, 3)
        M = rep_matrix(w, b).mat
        Mi = rep_matrix(group_inv(w), b).mat
        # entrywise identity, no truncated products involved
        assert np.max(np.abs(Mi - M.conj().T)) <= 1e-12


def test_unitarity_interior_and_detector():
    b = TruncatedBasis(1, 24, 1.0)
    w = (0.2, 0.3, -0.4)
    M = rep_matrix(w, b, unitarity_tol=1e-8).mat  # must not raise
    g2 = 2.0 * (0.2 ** 2 + 0.3 ** 2)
    inner = b.degrees <= b.N_max - int(math.ceil(10 + 6 * g2))
    G = (M.conj().T @ M)[np.ix_(inner, inner)]
    assert np.max(np.abs(G - np.eye(G.shape[0]))) <= 1e-8
    # starved quadrature must trip the detector
    bad = TruncatedBasis(1, 24, 1.0, quad_points=12)
    with pytest.raises(RuntimeError):
        rep_matrix(w, bad, unitarity_tol=1e-8)


def test_homomorphism_in_enlarged_basis():
    worst = 0.0
    for lam in (1.0, -1.0, 2.0):
        b = TruncatedBasis(1, 16, lam)
        for _ in range(5):
            v = RNG.normal(size=3)
            w1 = v / max(1.0, float(np.linalg.norm(v)))
            v = RNG.normal(size=3)
            w2 = v / max(1.0, float(np.linalg.norm(v)))
            worst = max(worst, homomorphism_defect(w1, w2, b))
    assert worst <= 1e-7


def test_ladder_matrix_entries():
    b = TruncatedBasis(1, 6, 2.0)
    (Q, Qb), = ladder_matrices(b)
    root = math.sqrt(4.0)
    assert Q.mat[1, 0] == -root * 1.0 and Q.mat[0, 1] == 0.0
    assert Qb.mat[0, 1] == root * 1.0 and Qb.mat[1, 0] == 0.0
    bm = TruncatedBasis(1, 6, -2.0)
    (Qm, Qbm), = ladder_matrices(bm)
    assert Qm.mat[0, 1] == root * 1.0
    assert Qbm.mat[1, 0] == -root * 1.0


def test_ladder_dagger_and_dlambda_identity():
    for lam in (0.7, -0.7, 2.0):
        b = TruncatedBasis(1, 12, lam)
        (Q, Qb), = ladder_matrices(b)
        # ((1/i) Q)^dag = (1/i) Qb holds entry for entry
        assert np.max(np.abs((Q.mat / 1j).conj().T - Qb.mat / 1j)) == 0.0
        anti = 2.0 * (Q.mat @ Qb.mat + Qb.mat @ Q.mat)
        D = dlambda_matrix(b).mat
        inner = b.interior()
        sub = np.ix_(inner, inner)
        assert np.max(np.abs((anti + D)[sub])) <= 1e-12


def test_functional_calculus_square_root():
    b = TruncatedBasis(1, 10, 1.5)
    half = functional_calculus(lambda t: math.sqrt(t), b)
    D = dlambda_matrix(b)
    assert np.max(np.abs(half.mat @ half.mat - D.mat)) <= 1e-12
    one = functional_calculus(lambda t: 1.0, b)
    assert np.array_equal(one.mat, np.eye(b.dim))


def test_ladder_commutation_residual():
    # plain 4th-order central differences: residual approx 6e-6 at h = 1e-2
    for lam in (1.0, -1.0):
        b = TruncatedBasis(1, 12, lam)
        r = check_ladder_commutation((0.0, 0.0, 0.0), b, h=1e-2)
        assert r <= 2e-5
    rc = check_ladder_commutation((0.0, 0.0, 0.0),
                                  TruncatedBasis(1, 12, 1.0), h=2e-2)
    ratio = rc / check_ladder_commutation((0.0, 0.0, 0.0),
                                          TruncatedBasis(1, 12, 1.0), h=1e-2)
    assert 8.0 <= ratio <= 32.0  # O(h^4)


def test_saxis_commutator_is_quadrature_noise():
    b = TruncatedBasis(1, 12, 1.0)
    (Q, _), = ladder_matrices(b)
    M = rep_matrix((0.0, 0.0, 0.6), b).mat
    assert np.max(np.abs(Q.mat @ M - M @ Q.mat)) <= 1e-12


def test_hs_norm_submultiplicative():
    for _ in range(20):
        A = RNG.normal(size=(12, 12)) + 1j * RNG.normal(size=(12, 12))
        B = RNG.normal(size=(12, 12)) + 1j * RNG.normal(size=(12, 12))
        lhs = np.linalg.norm(B @ A) + np.linalg.norm(A @ B)
        rhs = 2.0 * np.linalg.norm(B, 2) * np.linalg.norm(A)
        assert lhs <= rhs + 1e-12


def test_rep_matrix_two_dim_reduces_to_product():
    b2 = TruncatedBasis(2, 3, 1.2)
    b1 = TruncatedBasis(1, 3, 1.2)
    w2 = (0.3, 0.0, -0.2, 0.0, 0.15)  # second axis inactive
    w1 = (0.3, -0.2, 0.15)
    M2 = rep_matrix(w2, b2).mat
    M1 = rep_matrix(w1, b1).mat
    idx = b2.indices
    for i, a in enumerate(idx):
        for j, c in enumerate(idx):
            want = M1[a[0], c[0]] if a[1] == c[1] else 0.0
            assert abs(M2[i, j] - want) <= 1e-12
