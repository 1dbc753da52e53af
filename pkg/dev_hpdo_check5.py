"""Dev part 5: repeat commutator structure fits with a lambda-band-limited
test function built by inverse transform of compactly supported data."""

import math
import time

import numpy as np

from hgcalc.group import GridFunction, norm_l2
from hgcalc.gft import LambdaGrid, SpectralFunction, gft, inverse_gft
from hgcalc.weyl import smooth_step, weyl_poly_matrix

N_MAX = 32
t0 = time.time()


def say(tag, val):
    print(f"{tag:58s} {val}")


grid = LambdaGrid.geometric()
target = GridFunction.from_callable(lambda x, y, s: 0.0 * x, n=64)

# band-limited synthetic input: chi(lam) * fixed low-rank matrix
rng = np.random.default_rng(7)
G = np.zeros((N_MAX + 1, N_MAX + 1), dtype=complex)
G[:5, :5] = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
lam_arr = grid.lam
chi = np.exp(-(np.abs(lam_arr) - 3.5) ** 2 / 1.0)
data = np.stack([chi[k] * G for k in range(len(lam_arr))])
f = inverse_gft(SpectralFunction(grid, N_MAX, data), target)
say("band-limited f norm", norm_l2(f))

F = gft(f, grid, N_MAX)
say("round-trip data rel err", np.linalg.norm(F.data - data)
    / np.linalg.norm(data))

eye = np.eye(N_MAX + 1)
X3, Y3, S3 = np.meshgrid(f.xg, f.yg, f.sg, indexing="ij")
mask = f.interior_mask(8).astype(bool)
Z3 = X3 + 1j * Y3
Zb3 = X3 - 1j * Y3


def op_fast(Amats, FF):
    dd = np.stack([FF.data[k] @ Amats[k] for k in range(len(FF.grid.lam))])
    return inverse_gft(SpectralFunction(FF.grid, FF.N_max, dd), f).values


def fit(lhs, basis):
    M = np.stack([b[mask] for b in basis], axis=1)
    coef, _, _, _ = np.linalg.lstsq(M, lhs[mask], rcond=None)
    fitted = sum(c * b for c, b in zip(coef, basis))
    r = np.linalg.norm((lhs - fitted)[mask]) / np.linalg.norm(lhs[mask])
    return np.round(coef, 5), round(r, 6)


A_xi = [weyl_poly_matrix({(1, 0): 1.0}, N_MAX) for _ in grid.lam]
A_eta = [weyl_poly_matrix({(0, 1): 1.0}, N_MAX) for _ in grid.lam]
op_xi_f = op_fast(A_xi, F)
op_eta_f = op_fast(A_eta, F)
F_zf = gft(f.with_values(Z3 * f.values), grid, N_MAX)
F_zbf = gft(f.with_values(Zb3 * f.values), grid, N_MAX)
u_sgn = op_fast([math.copysign(1.0, lam) / math.sqrt(abs(lam)) * eye
                 for lam in grid.lam], F)
u_one = op_fast([1.0 / math.sqrt(abs(lam)) * eye for lam in grid.lam], F)

say("[z1,Op(xi)] fit  (thy +0.5)",
    fit(Z3 * op_xi_f - op_fast(A_xi, F_zf), [u_sgn]))
say("[z1,Op(eta)] fit (thy +0.5i)",
    fit(Z3 * op_eta_f - op_fast(A_eta, F_zf), [u_one]))
say("[zb1,Op(xi)] fit (thy -0.5)",
    fit(Zb3 * op_xi_f - op_fast(A_xi, F_zbf), [u_sgn]))
say("[zb1,Op(eta)] fit (thy +0.5i)",
    fit(Zb3 * op_eta_f - op_fast(A_eta, F_zbf), [u_one]))

# s-commutator for a = xi_1
F_sf = gft(f.with_values(1j * S3 * f.values), grid, N_MAX)
lhs_s_xi = 1j * S3 * op_xi_f - op_fast(A_xi, F_sf)
B1 = op_fast([weyl_poly_matrix({(1, 0): 1.0 / lam}, N_MAX)
              for lam in grid.lam], F)
B6 = op_fast([weyl_poly_matrix({(0, 1): 1.0 / lam}, N_MAX)
              for lam in grid.lam], F)
say("[is,Op(xi)] fit on [B1, x u_sgn, y u_one, B6]",
    fit(lhs_s_xi, [B1, X3 * u_sgn, Y3 * u_one, B6]))

# direct candidate-A check, a = xi: p = -xi/(2 lam) - sgn x/sqrt|lam|
rhs_A = -0.5 * B1 - X3 * u_sgn
err_A = np.linalg.norm((lhs_s_xi - rhs_A)[mask]) / np.linalg.norm(lhs_s_xi[mask])
say("[is,Op(xi)] candidate A rel err", err_A)

# s-commutator for a = rho^2: R/i should be Op(p), p = -rho^2/lam
#   - (2/sqrt|lam|)(y eta + sgn(lam) x xi)
A_r = [weyl_poly_matrix({(2, 0): 1.0, (0, 2): 1.0}, N_MAX) for _ in grid.lam]
P_sf = op_fast(A_r, gft(f.with_values(S3 * f.values), grid, N_MAX))
R = (P_sf - S3 * op_fast(A_r, F)) / 1j
C1 = op_fast([weyl_poly_matrix({(2, 0): 1.0 / lam, (0, 2): 1.0 / lam}, N_MAX)
              for lam in grid.lam], F)
v_eta = op_fast([weyl_poly_matrix({(0, 1): 1.0 / math.sqrt(abs(lam))}, N_MAX)
                 for lam in grid.lam], F)
v_xi = op_fast([weyl_poly_matrix(
    {(1, 0): math.copysign(1.0, lam) / math.sqrt(abs(lam))}, N_MAX)
    for lam in grid.lam], F)
say("[s-comm,Op(rho2)]/i fit on [C1, y veta, x vxi]",
    fit(R, [C1, Y3 * v_eta, X3 * v_xi]))
rhs_r = -C1 - 2.0 * (Y3 * v_eta + X3 * v_xi)
say("[s-comm,Op(rho2)] candidate rel err",
    np.linalg.norm((R - rhs_r)[mask]) / np.linalg.norm(R[mask]))

say("elapsed (s)", round(time.time() - t0, 1))
