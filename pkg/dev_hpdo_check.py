"""Dev measurement script for the pseudodifferential layer (deleted after
oracles are frozen into tests). Pins:

  P1  symbol matrix routes: poly/McCoy vs ladder matrices (exact oracle)
  P2  op_apply fast route: identity / S sign / Z1 / Y sign / -Delta / mult
  P3  pointwise trace route vs fast route
  P4  commutator operator-side oracles (b1, c1, p)
"""

import math
import time

import numpy as np

from hgcalc.group import (GridFunction, apply_vector_field, group_inv,
                          inner_l2, kohn_laplacian, norm_l2)
from hgcalc.gft import LambdaGrid, SpectralFunction, gft, inverse_gft
from hgcalc.fock import TruncatedBasis, dlambda_matrix, ladder_matrices, rep_matrix
from hgcalc.weyl import weyl_poly_matrix

N_MAX = 32

t0 = time.time()


def say(tag, val):
    print(f"{tag:58s} {val}")


# ---------------------------------------------------------------- P1: matrices
# Candidate builtin coefficient tables, coefficients of xi^m eta^n.
def z_coeffs(lam, bar=False):
    r = math.sqrt(abs(lam))
    sg = 1.0 if lam > 0 else -1.0
    if bar:
        return {(0, 1): r, (1, 0): -1j * sg * r}
    return {(0, 1): r, (1, 0): 1j * sg * r}


def symbol_matrix_poly(coeffs, n_max):
    return weyl_poly_matrix(coeffs, n_max)


for lam in (0.7, -0.7, 3.3, -3.3):
    basis = TruncatedBasis(1, N_MAX, lam)
    (Q, Qbar), = [ladder_matrices(basis)[0]]
    A_z = symbol_matrix_poly(z_coeffs(lam), N_MAX)
    A_zbar = symbol_matrix_poly(z_coeffs(lam, bar=True), N_MAX)
    say(f"P1 |(1/i)Q - A(Z1 sym)|      lam={lam:+.1f}",
        np.max(np.abs(Q.mat / 1j - A_z)))
    say(f"P1 |(1/i)Qbar - A(Zbar1 sym)| lam={lam:+.1f}",
        np.max(np.abs(Qbar.mat / 1j - A_zbar)))
    # X = Q + Qbar vs 2i sgn(lam) sqrt|lam| eta ; Y = i(Q-Qbar) vs
    # -2i sgn(lam) sqrt|lam| xi (candidate with sgn) and -2i sqrt|lam| xi.
    r = math.sqrt(abs(lam)); sg = 1.0 if lam > 0 else -1.0
    A_x = symbol_matrix_poly({(0, 1): 2j * sg * r}, N_MAX)
    say(f"P1 |(Q+Qbar) - A(X1 sym)|    lam={lam:+.1f}",
        np.max(np.abs(Q.mat + Qbar.mat - A_x)))
    A_y_sgn = symbol_matrix_poly({(1, 0): -2j * sg * r}, N_MAX)
    A_y_flat = symbol_matrix_poly({(1, 0): -2j * r}, N_MAX)
    say(f"P1 |i(Q-Qbar) - A(Y sgn)|    lam={lam:+.1f}",
        np.max(np.abs(1j * (Q.mat - Qbar.mat) - A_y_sgn)))
    say(f"P1 |i(Q-Qbar) - A(Y flat)|   lam={lam:+.1f}",
        np.max(np.abs(1j * (Q.mat - Qbar.mat) - A_y_flat)))
    # minusLaplacian: 4|lam|(xi^2+eta^2) vs dlambda diag
    A_d = symbol_matrix_poly({(2, 0): 4 * abs(lam), (0, 2): 4 * abs(lam)}, N_MAX)
    D = dlambda_matrix(basis)
    say(f"P1 |D_lam - A(4|lam| rho^2)| lam={lam:+.1f}",
        np.max(np.abs(D.mat - A_d)))

# ------------------------------------------------------- P2: op_apply fast path
grid = LambdaGrid.geometric()          # 256 nodes, |lam| in [1e-3, 8]
f = GridFunction.from_callable(
    lambda x, y, s: np.exp(-(x - 0.2) ** 2 - y * y - 0.8 * s * s), n=64)
F = gft(f, grid, N_MAX)
say("P2 gft time (s)", round(time.time() - t0, 1))


def op_fast(Amats, F, target):
    data = np.stack([F.data[k] @ Amats[k] for k in range(len(F.grid.lam))])
    return inverse_gft(SpectralFunction(F.grid, F.N_max, data), target)


def rel_err(got, ref, margin=5):
    mask = ref.interior_mask(margin)
    num = norm_l2(got.with_values((got.values - ref.values) * mask))
    den = norm_l2(ref.with_values(ref.values * mask))
    return num / den


eye = np.eye(N_MAX + 1)
ident = op_fast([eye] * len(grid.lam), F, f)
say("P2 identity rel err", rel_err(ident, f))

# S sign: candidates a = +i lam and a = -i lam vs FD d/ds
dsf = apply_vector_field("S", f)
for sign in (+1.0, -1.0):
    A = [sign * 1j * lam * eye for lam in grid.lam]
    got = op_fast(A, F, f)
    say(f"P2 Op({'+' if sign > 0 else '-'}i lam) vs d/ds f rel err",
        rel_err(got, dsf))

# Z1: a = sqrt|lam| (eta + i sgn(lam) xi)  vs (1/i) Z f
zf = apply_vector_field("Z", f)
zf = zf.with_values(zf.values / 1j)
A = [symbol_matrix_poly(z_coeffs(lam), N_MAX) for lam in grid.lam]
say("P2 Op(Z1 sym) vs (1/i)Z f rel err", rel_err(op_fast(A, F, f), zf))

# Y sign candidates vs FD Y f
yf = apply_vector_field("Y", f)
for label, use_sgn in (("sgn", True), ("flat", False)):
    A = [symbol_matrix_poly(
        {(1, 0): -2j * (math.copysign(1.0, lam) if use_sgn else 1.0)
         * math.sqrt(abs(lam))}, N_MAX) for lam in grid.lam]
    say(f"P2 Op(Y {label}) vs Y f rel err", rel_err(op_fast(A, F, f), yf))

# minusLaplacian vs -kohn
lapf = kohn_laplacian(f)
mlapf = lapf.with_values(-lapf.values)
A = [symbol_matrix_poly({(2, 0): 4 * abs(lam), (0, 2): 4 * abs(lam)}, N_MAX)
     for lam in grid.lam]
say("P2 Op(minusLap) vs -kohn f rel err", rel_err(op_fast(A, F, f), mlapf))

say("P2 elapsed (s)", round(time.time() - t0, 1))

# --------------------------------------------- P3: pointwise trace route check
pts = [np.array([0.3, -0.4, 0.5]), np.array([-0.9, 0.1, -1.3]),
       np.array([0.0, 0.0, 0.0])]
A_z = [symbol_matrix_poly(z_coeffs(lam), N_MAX) for lam in grid.lam]
cw = grid.c_d * grid.weight
fast_vals = op_fast(A_z, F, f)


def value_at(g, w):
    ix = int(np.argmin(np.abs(g.xg - w[0])))
    iy = int(np.argmin(np.abs(g.yg - w[1])))
    isx = int(np.argmin(np.abs(g.sg - w[2])))
    return g.values[ix, iy, isx], np.array([g.xg[ix], g.yg[iy], g.sg[isx]])


for w in pts:
    _, wsnap = value_at(f, w)
    acc = 0.0
    for k, lam in enumerate(grid.lam):
        basis = TruncatedBasis(1, N_MAX, float(lam))
        M = rep_matrix(group_inv(wsnap), basis)
        acc += cw[k] * np.trace(M.mat @ F.data[k] @ A_z[k])
    fval, _ = value_at(fast_vals, wsnap)
    say(f"P3 trace-route vs plane-route at {np.round(wsnap, 2)}",
        abs(acc - fval))

say("P3 elapsed (s)", round(time.time() - t0, 1))

# --------------------------------------------- P4: commutator operator oracles
# a = xi_1 (order 1 test symbol). Candidate b1 = -sqrt|lam| (all lam,
# paper-convention bracket) vs +sqrt|lam|.
A_a = [symbol_matrix_poly({(1, 0): 1.0}, N_MAX) for lam in grid.lam]
op_a_f = op_fast(A_a, F, f)
F_opa = gft(op_a_f, grid, N_MAX)
z_opa = apply_vector_field("Z", op_a_f)
op_a_zf0 = op_fast(A_a, gft(apply_vector_field("Z", f), grid, N_MAX), f)
comm = z_opa.with_values(z_opa.values - op_a_zf0.values)
for sign in (-1.0, +1.0):
    A_b = [sign * math.sqrt(abs(lam)) * eye for lam in grid.lam]
    got = op_fast(A_b, F, f)
    say(f"P4 [Z1,Op(xi)] vs Op({'+' if sign > 0 else '-'}sqrt|lam|)",
        rel_err(got, comm, margin=8))

# c1 = (1/(2 sqrt|lam|)) {a, i xi - sgn eta} = sgn(lam)/(2 sqrt|lam|) for a=xi
X3, Y3, S3 = np.meshgrid(f.xg, f.yg, f.sg, indexing="ij")
z_mult = (X3 + 1j * Y3)
zop = op_a_f.with_values(z_mult * op_a_f.values)
opz = op_fast(A_a, gft(f.with_values(z_mult * f.values), grid, N_MAX), f)
comm_z = zop.with_values(zop.values - opz.values)
for sign in (+1.0, -1.0):
    A_c = [sign * math.copysign(1.0, lam) / (2 * math.sqrt(abs(lam))) * eye
           for lam in grid.lam]
    got = op_fast(A_c, F, f)
    say(f"P4 [z,Op(xi)] vs Op({'+' if sign > 0 else '-'}sgn/(2 sqrt|lam|))",
        rel_err(got, comm_z, margin=8))

# p for a = -i lam (the honest S symbol): [is, Op(a)] should be -i f if
# Op(-i lam) = d/ds. p candidate = -g with g = -d_lam a = +i -> p = -i.
s_op = op_fast([-1j * lam * eye for lam in grid.lam], F, f)
is_comm = s_op.with_values(1j * S3 * s_op.values
                           - 0.0)  # placeholder, fixed below
op_isf = op_fast([-1j * lam * eye for lam in grid.lam],
                 gft(f.with_values(1j * S3 * f.values), grid, N_MAX), f)
is_comm = is_comm.with_values(1j * S3 * s_op.values - op_isf.values)
ref = f.with_values(-1j * f.values)
say("P4 [is, Op(-i lam)] vs -i f rel err", rel_err(is_comm, ref, margin=8))

say("total elapsed (s)", round(time.time() - t0, 1))
