"""Dev measurements part 2: mult route, radial diagonals, kernels, the
s-commutator symbol for generic a, asymptotic terms, reduction, growth demo."""

import math
import time

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.special import roots_laguerre

from hgcalc import backend
from hgcalc.group import (GridFunction, apply_vector_field, group_inv,
                          group_mul, norm_l2)
from hgcalc.gft import LambdaGrid, SpectralFunction, gft, inverse_gft
from hgcalc.fock import TruncatedBasis, rep_matrix
from hgcalc.weyl import (PhaseSymbol, smooth_step, weyl_poly_matrix,
                         weyl_quantize)

N_MAX = 32
t0 = time.time()


def say(tag, val):
    print(f"{tag:58s} {val}")


grid = LambdaGrid.geometric()
f = GridFunction.from_callable(
    lambda x, y, s: np.exp(-(x - 0.2) ** 2 - y * y - 0.8 * s * s), n=64)
F = gft(f, grid, N_MAX)
eye = np.eye(N_MAX + 1)
cw = grid.c_d * grid.weight
X3, Y3, S3 = np.meshgrid(f.xg, f.yg, f.sg, indexing="ij")


def op_fast(Amats, FF, target):
    data = np.stack([FF.data[k] @ Amats[k] for k in range(len(FF.grid.lam))])
    return inverse_gft(SpectralFunction(FF.grid, FF.N_max, data), target)


def rel_err(got, ref, margin=5):
    mask = ref.interior_mask(margin)
    num = norm_l2(got.with_values((got.values - ref.values) * mask))
    den = norm_l2(ref.with_values(ref.values * mask))
    return num / den


# ------------------------------------------------- A: multiplication route
# vals(w) = sum_k cw_k H_k(x,y) e^{-i lam_k s} b(w); reuse inverse by
# splitting b out when lam-independent (machine check), vs b*f (roundtrip).
def bfun(x, y, s):
    return np.exp(-0.3 * (x * x + y * y + s * s)) * (1.0 + 0.2 * x)


bgrid = bfun(X3, Y3, S3)
ident = inverse_gft(F, f)
mult_direct = ident.with_values(bgrid * ident.values)
say("A mult vs b*f rel err", rel_err(mult_direct, f.with_values(bgrid * f.values)))

# ------------------------------------------------- B: radial diagonal route
# a = chi(lam) exp(-rho^2/2): diag_n = chi * (-1)^n int r L_n(2x) e^{-x} dx
# closed form (2/3)(-1/3)^n for r = e^{-x/2}.
xq, wq = roots_laguerre(2 * N_MAX + 48)
Lt = backend.laguerre_table(2.0 * xq, N_MAX, 0)
r_half = np.exp(-xq / 2.0)
diag_quad = ((-1.0) ** np.arange(N_MAX + 1)) * (wq[:, None] * Lt
                                                * r_half[:, None]).sum(axis=0)
diag_exact = (2.0 / 3.0) * (-1.0 / 3.0) ** np.arange(N_MAX + 1)
say("B radial Laguerre diag vs closed form", np.max(np.abs(diag_quad - diag_exact)))

xi_grid = np.linspace(-10.0, 10.0, 1024)
sym_half = PhaseSymbol.from_function(
    lambda xi, eta: np.exp(-(xi ** 2 + eta ** 2) / 2.0))
Mq = weyl_quantize(sym_half, xi_grid).hermite_matrix(N_MAX)
say("B weyl-route matrix vs diag (off-diag max)",
    np.max(np.abs(Mq - np.diag(diag_exact))))

# ------------------------------------------------- C: kernel quadratures
def chi(lam):
    al = np.abs(lam)
    return smooth_step(al, 0.5, 1.0) * (1.0 - smooth_step(al, 3.0, 4.0))


def sigma_a(lam, xi, eta):
    # sigma of a = chi(lam) exp(-rho^2/2): chi * exp(-(xi^2+eta^2)/(2|lam|))
    return chi(lam) * np.exp(-(xi ** 2 + eta ** 2) / (2.0 * np.abs(lam)))


def simpson_w(n, h):
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def kernel_on_vgrid(sigma_fn, xv, yv, sv, lam_ax, xi_ax, zt_ax):
    """K(v) = (1/(2 pi^3)) int sigma e^{i lam s_v + 2 i xi y_v - 2 i zt x_v}."""
    wl = simpson_w(len(lam_ax), lam_ax[1] - lam_ax[0])
    wx = simpson_w(len(xi_ax), xi_ax[1] - xi_ax[0])
    wz = simpson_w(len(zt_ax), zt_ax[1] - zt_ax[0])
    L, XI, ZT = np.meshgrid(lam_ax, xi_ax, zt_ax, indexing="ij")
    sig = sigma_fn(L, XI, ZT) * (wl[:, None, None] * wx[None, :, None]
                                 * wz[None, None, :])
    E_y = np.exp(2j * np.outer(xi_ax, yv))         # (n_xi, ny)
    T1 = np.einsum("lxz,xy->lzy", sig, E_y, optimize=True)
    E_x = np.exp(-2j * np.outer(zt_ax, xv))        # (n_zt, nx)
    T2 = np.einsum("lzy,zx->lxy", T1, E_x, optimize=True)
    E_s = np.exp(1j * np.outer(lam_ax, sv))        # (n_lam, ns)
    K = np.einsum("lxy,ls->xys", T2, E_s, optimize=True)
    return K / (2.0 * math.pi ** 3)


nv = 49
xv = np.linspace(-6.0, 6.0, nv)
yv = np.linspace(-6.0, 6.0, nv)
sv = np.linspace(-10.0, 10.0, 2 * nv - 1)
lam_ax = np.linspace(-4.2, 4.2, 301)
xi_ax = np.linspace(-9.0, 9.0, 121)
zt_ax = np.linspace(-9.0, 9.0, 121)
K = kernel_on_vgrid(sigma_a, xv, yv, sv, lam_ax, xi_ax, zt_ax)
say("C kernel build time (s)", round(time.time() - t0, 1))
say("C kernel edge/peak (x, y, s edges)",
    (np.max(np.abs(K[0])) / np.max(np.abs(K)),
     np.max(np.abs(K[:, 0])) / np.max(np.abs(K)),
     np.max(np.abs(K[:, :, 0])) / np.max(np.abs(K))))

# dual path: Op(a) f at points via kernel:  int K(v) f(w v) dv
wvx = simpson_w(nv, xv[1] - xv[0])
wvs = simpson_w(len(sv), sv[1] - sv[0])
WV = wvx[:, None, None] * wvx[None, :, None] * wvs[None, None, :]


def interp_f(g, pts):
    cx = np.interp(pts[..., 0], g.xg, np.arange(len(g.xg)))
    cy = np.interp(pts[..., 1], g.yg, np.arange(len(g.yg)))
    cs = np.interp(pts[..., 2], g.sg, np.arange(len(g.sg)))
    out = map_coordinates(g.values.real, [cx, cy, cs], order=3, mode="constant")
    if np.iscomplexobj(g.values):
        out = out + 1j * map_coordinates(g.values.imag, [cx, cy, cs],
                                         order=3, mode="constant")
    return out


VX, VY, VS = np.meshgrid(xv, yv, sv, indexing="ij")
Vpts = np.stack([VX, VY, VS], axis=-1)

# fast-route reference: radial diag per node
diag_ref = np.stack([chi(lam) * diag_exact for lam in grid.lam])
A_chi = [np.diag(diag_ref[k]) for k in range(len(grid.lam))]
op_ref = op_fast(A_chi, F, f)

pts = [np.array([0.3, -0.4, 0.5]), np.array([-0.9, 0.1, -1.3]),
       np.array([0.2, 0.2, 0.0])]
for w in pts:
    ix = int(np.argmin(np.abs(f.xg - w[0])))
    iy = int(np.argmin(np.abs(f.yg - w[1])))
    isx = int(np.argmin(np.abs(f.sg - w[2])))
    wsnap = np.array([f.xg[ix], f.yg[iy], f.sg[isx]])
    shifted = group_mul(wsnap[None, None, None, :], Vpts)
    fv = interp_f(f, shifted)
    val = np.sum(K * WV * fv)
    ref = op_ref.values[ix, iy, isx]
    say(f"C dual path at {np.round(wsnap, 2)} rel",
        abs(val - ref) / max(abs(ref), 1e-12))

# symbol recovery: sigma(lam,xi,eta) = int K(v) e^{-i lam s_v - 2 i xi y_v
# + 2 i eta x_v} dv
probe = [(0.8, 0.3, -0.2), (1.7, -0.5, 0.4), (-1.2, 0.2, 0.6), (2.4, 0.0, 0.9)]
errs = []
for lam, xi, eta in probe:
    ph = np.exp(-1j * lam * VS - 2j * xi * VY + 2j * eta * VX)
    got = np.sum(K * WV * ph)
    want = sigma_a(lam, xi, eta)
    errs.append(abs(got - want))
say("C sigma recovery abs errs (sup |sigma|=1)", np.round(errs, 6))

# Lemma-type kernel identity: K_g(v) = i s_v K_a(v) with
# g = -d_lam a + (rho^2/(2 lam)) ... for a = chi e^{-rho^2/2}:
# g = -chi' e^{-rho^2/2} - (rho^2/(2 lam)) chi e^{-rho^2/2}
def chi_prime(lam, h=1e-5):
    return (chi(lam - 2 * h) - 8 * chi(lam - h) + 8 * chi(lam + h)
            - chi(lam + 2 * h)) / (12 * h)


def sigma_g(lam, xi, eta):
    rho2 = (xi ** 2 + eta ** 2) / np.abs(lam)
    e = np.exp(-rho2 / 2.0)
    # sigma of g evaluated directly: sigma(g) = -d_lam sigma(a)
    return -(chi_prime(lam) * e + chi(lam) * e * (xi ** 2 + eta ** 2)
             / (2.0 * lam * np.abs(lam)))


Kg = kernel_on_vgrid(sigma_g, xv, yv, sv, lam_ax, xi_ax, zt_ax)
ref_g = 1j * VS * K
say("C s-mult kernel identity rel sup",
    np.max(np.abs(Kg - ref_g)) / np.max(np.abs(ref_g)))

say("C elapsed (s)", round(time.time() - t0, 1))

# --------------------------------- D: p symbol for generic a = xi_1
# p = -xi/(2 lam) - sgn(lam) x / sqrt|lam|   (derived; verify operator-side)
A_a = [weyl_poly_matrix({(1, 0): 1.0}, N_MAX) for _ in grid.lam]
op_a_f = op_fast(A_a, F, f)
op_a_isf = op_fast(A_a, gft(f.with_values(1j * S3 * f.values), grid, N_MAX), f)
lhs = op_a_f.with_values(1j * S3 * op_a_f.values - op_a_isf.values)
A_p1 = [weyl_poly_matrix({(1, 0): -1.0 / (2.0 * lam)}, N_MAX)
        for lam in grid.lam]
term1 = op_fast(A_p1, F, f)
A_p2 = [-math.copysign(1.0, lam) / math.sqrt(abs(lam)) * eye
        for lam in grid.lam]
term2 = op_fast(A_p2, F, f)
rhs = f.with_values(term1.values + X3 * term2.values)
say("D [is,Op(xi)] vs Op(p) rel err", rel_err(lhs, rhs, margin=8))

# --------------------------------- E: Ps = sP + i Op(p) for a = rho^2
A_r = [weyl_poly_matrix({(2, 0): 1.0, (0, 2): 1.0}, N_MAX) for _ in grid.lam]
P_sf = op_fast(A_r, gft(f.with_values(S3 * f.values), grid, N_MAX), f)
sPf = op_fast(A_r, F, f)
A_q1 = [weyl_poly_matrix({(2, 0): -1.0 / lam, (0, 2): -1.0 / lam}, N_MAX)
        for lam in grid.lam]
q1 = op_fast(A_q1, F, f)
A_q2 = [weyl_poly_matrix({(0, 1): -2.0 / math.sqrt(abs(lam))}, N_MAX)
        for lam in grid.lam]
q2 = op_fast(A_q2, F, f)
A_q3 = [weyl_poly_matrix(
    {(1, 0): -2.0 * math.copysign(1.0, lam) / math.sqrt(abs(lam))}, N_MAX)
    for lam in grid.lam]
q3 = op_fast(A_q3, F, f)
rhs = f.with_values(S3 * sPf.values
                    + 1j * (q1.values + Y3 * q2.values + X3 * q3.values))
say("E Op(rho^2)(s f) vs s Op f + i Op(p) rel err", rel_err(P_sf, rhs, margin=8))

say("DE elapsed (s)", round(time.time() - t0, 1))

# --------------------------------- F: Leibniz term accuracy (pointwise FD)
def fd4_c(fn, t, h):
    return (fn(t - 2 * h) - 8 * fn(t - h) + 8 * fn(t + h)
            - fn(t + 2 * h)) / (12 * h)


def z_field_fd(bf, w, h=1e-3):
    dx = fd4_c(lambda t: bf(w[0] + t, w[1], w[2]), 0.0, h)
    dy = fd4_c(lambda t: bf(w[0], w[1] + t, w[2]), 0.0, h)
    ds = fd4_c(lambda t: bf(w[0], w[1], w[2] + t), 0.0, h)
    return 0.5 * (dx - 1j * dy) + (1j * w[0] + w[1]) * ds


wpt = np.array([0.4, -0.7, 0.3])
zb = z_field_fd(bfun, wpt)
# exact Z1 b for the Gaussian-type b
def zb_exact(x, y, s):
    g = bfun(x, y, s)
    gx = -0.6 * x * g + 0.2 * np.exp(-0.3 * (x * x + y * y + s * s))
    gy = -0.6 * y * g
    gs = -0.6 * s * g
    return 0.5 * (gx - 1j * gy) + (1j * x + y) * gs


say("F Z1 b FD (h=1e-3) vs exact", abs(zb - zb_exact(*wpt)))

# --------------------------------- G: budget symbol growth
r_grow = np.exp(xq / 4.0)
diag_grow = ((-1.0) ** np.arange(N_MAX + 1)) * (wq[:, None] * Lt
                                                * r_grow[:, None]).sum(axis=0)
say("G |diag| of op^w(e^{rho^2/4}) at n=32", abs(diag_grow[-1]))

# --------------------------------- H: (1.4.8)-style surrogate per builtin
def bound_148(Amats, mu):
    worst = 0.0
    for k, lam in enumerate(grid.lam):
        dinv = (1.0 + 4.0 * abs(lam)
                * (2 * np.arange(N_MAX + 1) + 1)) ** (-mu / 2.0)
        worst = max(worst, np.linalg.norm(dinv[:, None] * Amats[k], 2))
    return worst


def zc(lam):
    r = math.sqrt(abs(lam)); sg = math.copysign(1.0, lam)
    return {(0, 1): r, (1, 0): 1j * sg * r}


say("H Z1 surrogate", bound_148([weyl_poly_matrix(zc(l), N_MAX)
                                 for l in grid.lam], 1.0))
say("H S surrogate", bound_148([-1j * l * eye for l in grid.lam], 2.0))
say("H mLap surrogate", bound_148(
    [weyl_poly_matrix({(2, 0): 4 * abs(l), (0, 2): 4 * abs(l)}, N_MAX)
     for l in grid.lam], 2.0))
nvec = 2 * np.arange(N_MAX + 1) + 1
say("H bessel(-2) surrogate (exact diag)", bound_148(
    [np.diag((1.0 + 4 * abs(l) * nvec) ** (-1.0)) for l in grid.lam], -2.0))
say("H hom(1) surrogate", bound_148(
    [np.diag((4 * abs(l) * nvec) ** 0.5) for l in grid.lam], 1.0))

say("GH elapsed (s)", round(time.time() - t0, 1))
