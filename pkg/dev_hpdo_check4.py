"""Dev part 4: pin the z and z-bar commutator coefficient maps separately,
then re-assemble the s-commutator symbol from measured pieces."""

import math
import time

import numpy as np

from hgcalc.group import GridFunction, norm_l2
from hgcalc.gft import LambdaGrid, SpectralFunction, gft, inverse_gft
from hgcalc.weyl import weyl_poly_matrix

N_MAX = 32
t0 = time.time()


def say(tag, val):
    print(f"{tag:58s} {val}")


grid = LambdaGrid.geometric()
f = GridFunction.from_callable(
    lambda x, y, s: np.exp(-(x - 0.2) ** 2 - y * y - 0.8 * s * s), n=64)
F = gft(f, grid, N_MAX)
eye = np.eye(N_MAX + 1)
X3, Y3, S3 = np.meshgrid(f.xg, f.yg, f.sg, indexing="ij")
mask = f.interior_mask(8).astype(bool)
Z3 = X3 + 1j * Y3
Zb3 = X3 - 1j * Y3


def op_fast(Amats, FF):
    data = np.stack([FF.data[k] @ Amats[k] for k in range(len(FF.grid.lam))])
    return inverse_gft(SpectralFunction(FF.grid, FF.N_max, data), f).values


def fit1(lhs, basis_fn):
    """Complex coefficient of lhs against one basis function + residual."""
    b = basis_fn[mask]
    l = lhs[mask]
    c = np.vdot(b, l) / np.vdot(b, b)
    r = np.linalg.norm(l - c * b) / np.linalg.norm(l)
    return c, r


A_xi = [weyl_poly_matrix({(1, 0): 1.0}, N_MAX) for _ in grid.lam]
A_eta = [weyl_poly_matrix({(0, 1): 1.0}, N_MAX) for _ in grid.lam]
op_xi_f = op_fast(A_xi, F)
op_eta_f = op_fast(A_eta, F)
F_zf = gft(f.with_values(Z3 * f.values), grid, N_MAX)
F_zbf = gft(f.with_values(Zb3 * f.values), grid, N_MAX)

# scalar per-lambda reference fields
u_sgn = op_fast([math.copysign(1.0, lam) / math.sqrt(abs(lam)) * eye
                 for lam in grid.lam], F)      # Op(sgn/sqrt|lam|) f
u_one = op_fast([1.0 / math.sqrt(abs(lam)) * eye
                 for lam in grid.lam], F)      # Op(1/sqrt|lam|) f

# [z1, Op(xi)] f  and  [z1, Op(eta)] f
lhs_z_xi = Z3 * op_xi_f - op_fast(A_xi, F_zf)
lhs_z_eta = Z3 * op_eta_f - op_fast(A_eta, F_zf)
# [zbar1, Op(xi)] f  and  [zbar1, Op(eta)] f
lhs_zb_xi = Zb3 * op_xi_f - op_fast(A_xi, F_zbf)
lhs_zb_eta = Zb3 * op_eta_f - op_fast(A_eta, F_zbf)

c, r = fit1(lhs_z_xi, u_sgn)
say("[z1, Op(xi)]  coeff on Op(sgn/sqrt|lam|)  (thy +1/2)", (np.round(c, 5), round(r, 5)))
c, r = fit1(lhs_z_eta, u_one)
say("[z1, Op(eta)] coeff on Op(1/sqrt|lam|)    (thy +i/2)", (np.round(c, 5), round(r, 5)))
c, r = fit1(lhs_zb_xi, u_sgn)
say("[zb1, Op(xi)] coeff on Op(sgn/sqrt|lam|)  (thy -1/2)", (np.round(c, 5), round(r, 5)))
c, r = fit1(lhs_zb_eta, u_one)
say("[zb1, Op(eta)] coeff on Op(1/sqrt|lam|)   (thy +i/2)", (np.round(c, 5), round(r, 5)))

say("elapsed (s)", round(time.time() - t0, 1))
