"""Truncated Fock/Hermite bases and representation matrices.

All operator matrices live in the coordinates of the orthonormal basis
F_alpha (graded lexicographic order, |alpha| <= N_max). Through the unitary
intertwiner these coordinates are shared by the rescaled Hermite functions
h_{alpha,lam}(xi) = |lam|^{d/4} h_alpha(sqrt|lam| xi), which is how matrix
elements are actually computed: in the Schrodinger realization

    v_w f(xi) = e^{i lam (s - 2 x.y + 2 y.xi)} f(xi - 2x),

the entries reduce per axis to shifted-Hermite overlaps

    M_{ab}(w; lam) = e^{i lam (s - 2 x.y)}
                     prod_j int h_{a_j}(t + c_j) e^{i b_j (t + c_j)}
                                h_{b_j}(t - c_j) dt,
    c_j = sqrt|lam| x_j,  b_j = 2 sgn(lam) sqrt|lam| y_j,

evaluated by Gauss-Hermite quadrature with the Gaussian weight peeled off
(exact for the polynomial part of the integrand).
"""

import math
from dataclasses import dataclass, field
from itertools import product as _iproduct

import numpy as np
from scipy.special import roots_hermite

from hgcalc import backend
from hgcalc.group import group_inv, group_mul, split_coords


def hermite_eval(n, t):
    """Orthonormal Hermite function h_n(t), stable normalized recurrence."""
    if n < 0:
        raise ValueError("n must be >= 0")
    table = backend.hermite_table(np.atleast_1d(np.asarray(t, float)), n)
    out = table[..., n]
    return float(out[0]) if np.isscalar(t) else out.reshape(np.shape(t))


def _enumerate_indices(d, n_max):
    """Multi-indices of N^d with |alpha| <= n_max, graded lexicographic."""
    idx = []
    for total in range(n_max + 1):
        for alpha in _iproduct(range(total + 1), repeat=d):
            if sum(alpha) == total:
                idx.append(alpha)
    return idx


@dataclass(frozen=True)
class TruncatedBasis:
    """Fock basis truncated to |alpha| <= N_max, at a fixed lam != 0."""
    d: int
    N_max: int
    lam: float
    quad_points: int = 0  # 0 -> default 2 N_max + 16

    def __post_init__(self):
        if self.lam == 0:
            raise ValueError("lam = 0 is excluded")
        if self.quad_points == 0:
            object.__setattr__(self, "quad_points", 2 * self.N_max + 16)

    @property
    def indices(self):
        return _enumerate_indices(self.d, self.N_max)

    @property
    def dim(self):
        return math.comb(self.N_max + self.d, self.d)

    @property
    def degrees(self):
        return np.array([sum(a) for a in self.indices])

    def gauss_hermite(self):
        """Nodes u_q and modified weights w_q e^{u_q^2} (Gaussian peeled)."""
        u, w = roots_hermite(self.quad_points)
        return u, w * np.exp(u * u)

    def interior(self, margin=2):
        """Boolean mask of indices with |alpha| <= N_max - margin."""
        return self.degrees <= self.N_max - margin


@dataclass(frozen=True)
class OperatorMatrix:
    lam: float
    mat: np.ndarray = field(compare=False)

    def hs_norm(self):
        return float(np.linalg.norm(self.mat))

    def op_norm(self):
        return float(np.linalg.norm(self.mat, 2))


def ladder_matrices(basis: TruncatedBasis):
    """The ladder pairs (Q_j, Qbar_j), j = 1..d, as matrices.

    lam > 0: Q raises (with a minus sign), Qbar lowers; the roles swap for
    lam < 0. Images leaving the truncation are dropped.
    """
    idx = basis.indices
    pos = {a: i for i, a in enumerate(idx)}
    root = math.sqrt(2.0 * abs(basis.lam))
    out = []
    for j in range(basis.d):
        Q = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
        Qb = np.zeros_like(Q)
        for i, a in enumerate(idx):
            up = list(a)
            up[j] += 1
            up = tuple(up)
            dn = list(a)
            dn[j] -= 1
            dn = tuple(dn) if dn[j] >= 0 else None
            if basis.lam > 0:
                if up in pos:
                    Q[pos[up], i] = -root * math.sqrt(a[j] + 1)
                if dn is not None:
                    Qb[pos[dn], i] = root * math.sqrt(a[j])
            else:
                if dn is not None:
                    Q[pos[dn], i] = root * math.sqrt(a[j])
                if up in pos:
                    Qb[pos[up], i] = -root * math.sqrt(a[j] + 1)
        out.append((OperatorMatrix(basis.lam, Q), OperatorMatrix(basis.lam, Qb)))
    return out


def dlambda_matrix(basis: TruncatedBasis):
    """Diagonal spectral image of the (positive) sub-Laplacian: 4|lam|(2|a|+d)."""
    diag = 4.0 * abs(basis.lam) * (2 * basis.degrees + basis.d)
    return OperatorMatrix(basis.lam, np.diag(diag.astype(np.complex128)))


def functional_calculus(chi, basis: TruncatedBasis):
    """chi(D_lam): diagonal with entries chi(4|lam|(2|alpha|+d))."""
    spec = 4.0 * abs(basis.lam) * (2 * basis.degrees + basis.d)
    vals = np.asarray([chi(x) for x in spec], dtype=np.complex128)
    return OperatorMatrix(basis.lam, np.diag(vals))


def _axis_factor(basis, c, b):
    """1D overlap table int h_n(t+c) e^{ib(t+c)} h_m(t-c) dt, all n, m."""
    u, w = basis.gauss_hermite()
    A = backend.hermite_table(u + c, basis.N_max)   # (Q, N+1)
    B = backend.hermite_table(u - c, basis.N_max)
    ph = w * np.exp(1j * b * (u + c))
    return np.einsum("q,qn,qm->nm", ph, A, B)


def rep_matrix(w, basis: TruncatedBasis, unitarity_tol=None):
    """Matrix of the representation at the point w.

    Entries are Gauss-Hermite quadratures of the shifted-Hermite overlaps (see
    module docstring); w = (0,0,s) gives e^{i lam s} Id exactly.

    With unitarity_tol set, M^dag M is compared against Id on an interior
    block chosen so that truncation leakage (which grows with the effective
    displacement 2|lam||z|^2) stays below the quadrature floor; a defect above
    the tolerance then indicates under-resolved quadrature and raises. If
    N_max is too small to leave such a block the check is vacuous.
    """
    lam = basis.lam
    x, y, s = split_coords(np.asarray(w, float), basis.d)
    root = math.sqrt(abs(lam))
    sg = 1.0 if lam > 0 else -1.0
    factors = [_axis_factor(basis, root * x[j], 2.0 * sg * root * y[j])
               for j in range(basis.d)]
    phase = np.exp(1j * lam * (s - 2.0 * float(np.dot(x, y))))
    idx = basis.indices
    if basis.d == 1:
        mat = phase * factors[0]
    else:
        mat = np.empty((basis.dim, basis.dim), dtype=np.complex128)
        for i, a in enumerate(idx):
            for k, bmi in enumerate(idx):
                v = phase
                for j in range(basis.d):
                    v = v * factors[j][a[j], bmi[j]]
                mat[i, k] = v
    if unitarity_tol is not None:
        g2 = 2.0 * abs(lam) * float(np.dot(x, x) + np.dot(y, y))
        margin = int(math.ceil(10 + 6 * g2))
        inner = basis.interior(margin)
        if np.any(inner):
            gram = (mat.conj().T @ mat)[np.ix_(inner, inner)]
            defect = np.max(np.abs(gram - np.eye(gram.shape[0])))
            if defect > unitarity_tol:
                raise RuntimeError(
                    f"representation quadrature under-resolved: unitarity "
                    f"defect {defect:.2e} > {unitarity_tol:.2e}")
    return OperatorMatrix(lam, mat)


def homomorphism_defect(w1, w2, basis: TruncatedBasis, working_margin=32):
    """Op-norm of M(w1)M(w2) - M(w1 w2) on the basis block.

    The product is formed in a basis enlarged by working_margin degrees, then
    compared on the original block; without the enlargement the intermediate
    sum over states above N_max is simply missing and the defect measures
    truncation, not the group law. Graded order makes the original basis a
    prefix of the enlarged one.
    """
    big = TruncatedBasis(basis.d, basis.N_max + working_margin, basis.lam)
    n = basis.dim
    M1 = rep_matrix(w1, big).mat
    M2 = rep_matrix(w2, big).mat
    M12 = rep_matrix(group_mul(w1, w2, d=basis.d), big).mat
    return float(np.linalg.norm((M1 @ M2 - M12)[:n, :n], 2))


def check_ladder_commutation(w, basis: TruncatedBasis, h=1e-2):
    """Residuals of the two ladder/representation identities.

    (a) applying the complex field Z_j (finite differences in w) to the map
        w -> M(w^{-1}) equals left multiplication by Q_j;
    (b) (1/2 lam) [Q_j, M(w)] = -conj(z_j) M(w).
    Returns the max matrix-norm residual over j, measured on the interior
    block (truncation leaks at top degree).
    """
    w = np.asarray(w, dtype=np.float64)
    d = basis.d
    lam = basis.lam
    inner = basis.interior()

    def minv(p):
        return rep_matrix(group_inv(p, d), basis).mat

    def fd(fun, coord):
        e = np.zeros(2 * d + 1)
        e[coord] = 1.0
        return (fun(w - 2 * h * e) - 8 * fun(w - h * e)
                + 8 * fun(w + h * e) - fun(w + 2 * h * e)) / (12 * h)

    x, y, _ = split_coords(w, d)
    resid = 0.0
    ladders = ladder_matrices(basis)
    M = rep_matrix(w, basis).mat
    for j in range(d):
        Q = ladders[j][0].mat
        # (a): Z_j = (d_x - i d_y)/2 + (i x_j + y_j) d_s on w -> M(w^{-1})
        zg = 0.5 * (fd(minv, j) - 1j * fd(minv, d + j)) \
            + (1j * x[j] + y[j]) * fd(minv, 2 * d)
        r1 = zg - Q @ minv(w)
        # (b): commutator identity at w
        r2 = (Q @ M - M @ Q) / (2.0 * lam) + (x[j] - 1j * y[j]) * M
        resid = max(resid,
                    float(np.max(np.abs(r1[np.ix_(inner, inner)]))),
                    float(np.max(np.abs(r2[np.ix_(inner, inner)]))))
    return resid
