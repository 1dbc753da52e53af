"""Dev part 3: fix radial constant, NaN-safe kernel rerun, and least-squares
fit of the s-commutator symbol structure."""

import math
import time

import numpy as np
from scipy.special import roots_laguerre

from hgcalc import backend
from hgcalc.group import GridFunction, group_mul, norm_l2
from hgcalc.gft import LambdaGrid, SpectralFunction, gft, inverse_gft
from hgcalc.weyl import PhaseSymbol, smooth_step, weyl_poly_matrix, weyl_quantize

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


def op_fast(Amats, FF, target):
    data = np.stack([FF.data[k] @ Amats[k] for k in range(len(FF.grid.lam))])
    return inverse_gft(SpectralFunction(FF.grid, FF.N_max, data), target)


def rel_err(got, ref, margin=8):
    mask = ref.interior_mask(margin)
    num = norm_l2(got.with_values((got.values - ref.values) * mask))
    den = norm_l2(ref.with_values(ref.values * mask))
    return num / den


# --- B fix: radial diag closed form including the (-1)^n factor
xq, wq = roots_laguerre(2 * N_MAX + 48)
Lt = backend.laguerre_table(2.0 * xq, N_MAX, 0)
r_half = np.exp(-xq / 2.0)
diag_quad = ((-1.0) ** np.arange(N_MAX + 1)) * (wq[:, None] * Lt
                                                * r_half[:, None]).sum(axis=0)
diag_exact = (2.0 / 3.0) * (1.0 / 3.0) ** np.arange(N_MAX + 1)
say("B2 radial Laguerre diag vs (2/3)(1/3)^n", np.max(np.abs(diag_quad - diag_exact)))
xi_grid = np.linspace(-10.0, 10.0, 1024)
Mq = weyl_quantize(PhaseSymbol.from_function(
    lambda xi, eta: np.exp(-(xi ** 2 + eta ** 2) / 2.0)),
    xi_grid).hermite_matrix(N_MAX)
say("B2 weyl route vs diag", np.max(np.abs(Mq - np.diag(diag_exact))))

# --- D2: least-squares structure of [is, Op(xi_1)]
A_a = [weyl_poly_matrix({(1, 0): 1.0}, N_MAX) for _ in grid.lam]
op_a_f = op_fast(A_a, F, f)
op_a_isf = op_fast(A_a, gft(f.with_values(1j * S3 * f.values), grid, N_MAX), f)
lhs = 1j * S3 * op_a_f.values - op_a_isf.values

B1 = op_fast([weyl_poly_matrix({(1, 0): 1.0 / lam}, N_MAX)
              for lam in grid.lam], F, f).values          # Op(xi/lam) f
B6 = op_fast([weyl_poly_matrix({(0, 1): 1.0 / lam}, N_MAX)
              for lam in grid.lam], F, f).values          # Op(eta/lam) f
u = op_fast([math.copysign(1.0, lam) / math.sqrt(abs(lam)) * eye
             for lam in grid.lam], F, f).values           # Op(sgn/sqrt|lam|) f
u0 = op_fast([1.0 / math.sqrt(abs(lam)) * eye
              for lam in grid.lam], F, f).values          # Op(1/sqrt|lam|) f
mask = f.interior_mask(8).astype(bool)
basis = [B1, X3 * u, Y3 * u, X3 * u0, Y3 * u0, B6]
M = np.stack([b[mask] for b in basis], axis=1)
coef, res, _, _ = np.linalg.lstsq(M, lhs[mask], rcond=None)
say("D2 fit coeffs [Op(xi/lam), x u, y u, x u0, y u0, Op(eta/lam)]",
    np.round(coef, 4))
fitted = sum(c * b for c, b in zip(coef, basis))
say("D2 fit residual rel", np.linalg.norm((lhs - fitted)[mask])
    / np.linalg.norm(lhs[mask]))

# --- E2: least-squares structure of i^{-1}(Op(rho^2)(s f) - s Op(rho^2) f)
A_r = [weyl_poly_matrix({(2, 0): 1.0, (0, 2): 1.0}, N_MAX) for _ in grid.lam]
P_sf = op_fast(A_r, gft(f.with_values(S3 * f.values), grid, N_MAX), f)
sPf = op_fast(A_r, F, f)
R = (P_sf.values - S3 * sPf.values) / 1j    # should be Op(p) f
C1 = op_fast([weyl_poly_matrix({(2, 0): 1.0 / lam, (0, 2): 1.0 / lam}, N_MAX)
              for lam in grid.lam], F, f).values     # Op(rho^2/lam) f
v_eta = op_fast([weyl_poly_matrix({(0, 1): 1.0 / math.sqrt(abs(lam))}, N_MAX)
                 for lam in grid.lam], F, f).values  # Op(eta/sqrt) f
v_xi = op_fast([weyl_poly_matrix(
    {(1, 0): math.copysign(1.0, lam) / math.sqrt(abs(lam))}, N_MAX)
    for lam in grid.lam], F, f).values               # Op(sgn xi/sqrt) f
v_xi0 = op_fast([weyl_poly_matrix({(1, 0): 1.0 / math.sqrt(abs(lam))}, N_MAX)
                 for lam in grid.lam], F, f).values  # Op(xi/sqrt) f
v_eta_s = op_fast([weyl_poly_matrix(
    {(0, 1): math.copysign(1.0, lam) / math.sqrt(abs(lam))}, N_MAX)
    for lam in grid.lam], F, f).values               # Op(sgn eta/sqrt) f
basis2 = [C1, Y3 * v_eta, X3 * v_xi, X3 * v_eta, Y3 * v_xi,
          Y3 * v_eta_s, X3 * v_xi0]
M2 = np.stack([b[mask] for b in basis2], axis=1)
coef2, _, _, _ = np.linalg.lstsq(M2, R[mask], rcond=None)
say("E2 fit [C1, y veta, x vxi(sgn), x veta, y vxi, y veta(sgn), x vxi0]",
    np.round(coef2, 4))
fitted2 = sum(c * b for c, b in zip(coef2, basis2))
say("E2 fit residual rel", np.linalg.norm((R - fitted2)[mask])
    / np.linalg.norm(R[mask]))

say("elapsed (s)", round(time.time() - t0, 1))
