"""Dev part 6: kernel quadratures with lambda=0-safe evaluators, adjoint
duality level, sigma-side s-derivative identity, and N-stability numbers."""

import math
import time

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.special import roots_laguerre

from hgcalc import backend
from hgcalc.group import GridFunction, group_mul, inner_l2, norm_l2
from hgcalc.gft import LambdaGrid, SpectralFunction, gft, inverse_gft
from hgcalc.weyl import smooth_step

N_MAX = 32
t0 = time.time()


def say(tag, val):
    print(f"{tag:58s} {val}")


grid = LambdaGrid.geometric()
f = GridFunction.from_callable(
    lambda x, y, s: np.exp(-(x - 0.2) ** 2 - y * y - 0.8 * s * s), n=64)
F = gft(f, grid, N_MAX)
X3, Y3, S3 = np.meshgrid(f.xg, f.yg, f.sg, indexing="ij")


def op_fast(Amats, FF, target):
    data = np.stack([FF.data[k] @ Amats[k] for k in range(len(FF.grid.lam))])
    return inverse_gft(SpectralFunction(FF.grid, FF.N_max, data), target)


# ---------------------------------------------------------------- kernels
def chi(lam):
    al = np.abs(lam)
    return smooth_step(al, 0.5, 1.0) * (1.0 - smooth_step(al, 3.0, 4.0))


def sigma_a(lam, xi, eta):
    c = chi(lam)
    al = np.maximum(np.abs(lam), 1e-12)
    with np.errstate(under="ignore"):
        e = np.exp(-(xi ** 2 + eta ** 2) / (2.0 * al))
    return np.where(c > 0.0, c * e, 0.0)


def chi_prime(lam, h=1e-5):
    return (chi(lam - 2 * h) - 8 * chi(lam - h) + 8 * chi(lam + h)
            - chi(lam + 2 * h)) / (12.0 * h)


def sigma_g(lam, xi, eta):
    # sigma(g) = -d/dlam sigma(a) for sigma(a) = chi e^{-(xi^2+eta^2)/2|lam|}
    c = chi(lam)
    al = np.maximum(np.abs(lam), 1e-12)
    with np.errstate(under="ignore"):
        e = np.exp(-(xi ** 2 + eta ** 2) / (2.0 * al))
        kin = c * e * (xi ** 2 + eta ** 2) / (2.0 * lam * al)
        out = -(chi_prime(lam) * e + kin)
    return np.where(c + np.abs(chi_prime(lam)) > 0.0, out, 0.0)


def simpson_w(n, h):
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def kernel_on_vgrid(sigma_fn, xv, yv, sv, lam_ax, xi_ax, zt_ax):
    wl = simpson_w(len(lam_ax), lam_ax[1] - lam_ax[0])
    wx = simpson_w(len(xi_ax), xi_ax[1] - xi_ax[0])
    wz = simpson_w(len(zt_ax), zt_ax[1] - zt_ax[0])
    L, XI, ZT = np.meshgrid(lam_ax, xi_ax, zt_ax, indexing="ij")
    sig = sigma_fn(L, XI, ZT) * (wl[:, None, None] * wx[None, :, None]
                                 * wz[None, None, :])
    E_y = np.exp(2j * np.outer(xi_ax, yv))
    T1 = np.einsum("lxz,xy->lzy", sig, E_y, optimize=True)
    E_x = np.exp(-2j * np.outer(zt_ax, xv))
    T2 = np.einsum("lzy,zx->lxy", T1, E_x, optimize=True)
    E_s = np.exp(1j * np.outer(lam_ax, sv))
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
say("kernel nan count", int(np.isnan(K).sum()))
say("kernel edge/peak (x,y,s)",
    (float(np.max(np.abs(K[0])) / np.max(np.abs(K))),
     float(np.max(np.abs(K[:, 0])) / np.max(np.abs(K))),
     float(np.max(np.abs(K[:, :, 0])) / np.max(np.abs(K)))))

wvx = simpson_w(nv, xv[1] - xv[0])
wvs = simpson_w(len(sv), sv[1] - sv[0])
WV = wvx[:, None, None] * wvx[None, :, None] * wvs[None, None, :]


def interp_f(g, pts):
    cx = np.interp(pts[..., 0], g.xg, np.arange(len(g.xg)))
    cy = np.interp(pts[..., 1], g.yg, np.arange(len(g.yg)))
    cs = np.interp(pts[..., 2], g.sg, np.arange(len(g.sg)))
    out = map_coordinates(g.values.real, [cx, cy, cs], order=3,
                          mode="constant")
    if np.iscomplexobj(g.values):
        out = out + 1j * map_coordinates(g.values.imag, [cx, cy, cs],
                                         order=3, mode="constant")
    return out


VX, VY, VS = np.meshgrid(xv, yv, sv, indexing="ij")
Vpts = np.stack([VX, VY, VS], axis=-1)

# reference values via the diagonal fast route
ns = np.arange(N_MAX + 1)
diag_half = (2.0 / 3.0) * (1.0 / 3.0) ** ns
A_chi = [np.diag(chi(lam) * diag_half) for lam in grid.lam]
op_ref = op_fast(A_chi, F, f)

for w in [np.array([0.3, -0.4, 0.5]), np.array([-0.9, 0.1, -1.3]),
          np.array([0.2, 0.2, 0.0])]:
    ix = int(np.argmin(np.abs(f.xg - w[0])))
    iy = int(np.argmin(np.abs(f.yg - w[1])))
    isx = int(np.argmin(np.abs(f.sg - w[2])))
    wsnap = np.array([f.xg[ix], f.yg[iy], f.sg[isx]])
    shifted = group_mul(wsnap[None, None, None, :], Vpts)
    val = np.sum(K * WV * interp_f(f, shifted))
    ref = op_ref.values[ix, iy, isx]
    say(f"dual path at {np.round(wsnap, 2)} rel",
        abs(val - ref) / max(abs(ref), 1e-12))

probe = [(0.8, 0.3, -0.2), (1.7, -0.5, 0.4), (-1.2, 0.2, 0.6),
         (2.4, 0.0, 0.9)]
errs = []
for lam, xi, eta in probe:
    ph = np.exp(-1j * lam * VS - 2j * xi * VY + 2j * eta * VX)
    got = np.sum(K * WV * ph)
    errs.append(abs(got - sigma_a(np.array(lam), xi, eta)))
say("sigma recovery abs errs", np.round(errs, 6))

Kg = kernel_on_vgrid(sigma_g, xv, yv, sv, lam_ax, xi_ax, zt_ax)
ref_g = 1j * VS * K
say("s-mult kernel identity rel sup",
    float(np.max(np.abs(Kg - ref_g)) / np.max(np.abs(ref_g))))

# sigma-side identity for g = -d_lam a + (1/2lam)(eta d_eta + xi d_xi) a:
# a = chi(lam) e^{-rho^2/2}  ->  g = -chi' e^{-rho^2/2} + (chi rho^2 /(2 lam)) e^{-rho^2/2}... wait
# d_eta a = -eta a etc: (1/2lam)(eta d_eta + xi d_xi)a = -(rho^2/(2 lam)) a
rngl = np.random.default_rng(3)
lam_s = np.concatenate([rngl.uniform(0.6, 3.8, 40),
                        -rngl.uniform(0.6, 3.8, 40)])
xi_s = rngl.uniform(-2.0, 2.0, 80)
eta_s = rngl.uniform(-2.0, 2.0, 80)


def a_fn(lam, xi, eta):
    return chi(lam) * np.exp(-(xi ** 2 + eta ** 2) / 2.0)


def g_fn(lam, xi, eta):
    rho2 = xi ** 2 + eta ** 2
    return (-chi_prime(lam) - chi(lam) * rho2 / (2.0 * lam)) * np.exp(-rho2 / 2.0)


def sig_of(fn, lam, xis, etas):
    al = np.abs(lam)
    return fn(lam, xis / (np.sign(lam) * np.sqrt(al)), etas / np.sqrt(al))


h = 1e-4
fd = (sig_of(a_fn, lam_s - 2 * h, xi_s, eta_s)
      - 8 * sig_of(a_fn, lam_s - h, xi_s, eta_s)
      + 8 * sig_of(a_fn, lam_s + h, xi_s, eta_s)
      - sig_of(a_fn, lam_s + 2 * h, xi_s, eta_s)) / (12.0 * h)
say("sigma(g) vs -d_lam sigma(a) max abs",
    float(np.max(np.abs(sig_of(g_fn, lam_s, xi_s, eta_s) + fd))))

# ------------------------------------------------------- adjoint duality
g2 = GridFunction.from_callable(
    lambda x, y, s: (x + 0.3) * np.exp(-x * x - (y - 0.4) ** 2 - s * s),
    n=64)
G2 = gft(g2, grid, N_MAX)
eye = np.eye(N_MAX + 1)
A_s = [1j * lam * eye for lam in grid.lam]
A_sc = [-1j * lam * eye for lam in grid.lam]
lhs = inner_l2(op_fast(A_s, F, f), g2)
rhs = inner_l2(f, op_fast(A_sc, G2, g2))
say("duality |<Op(il)f,g>-<f,Op(-il)g>|/(|f||g|)",
    abs(lhs - rhs) / (norm_l2(f) * norm_l2(g2)))

A_s2 = [(1j * lam) ** 2 * eye for lam in grid.lam]
two_step = op_fast(A_s, gft(op_fast(A_s, F, f), grid, N_MAX), f)
one_step = op_fast(A_s2, F, f)
say("Op(il)^2 vs Op(-l^2) rel",
    norm_l2(two_step.with_values(two_step.values - one_step.values))
    / norm_l2(one_step))

# --------------------------------------- N-stability of order-0 builtins
xq, wq = roots_laguerre(2 * 64 + 48)


def radial_diag(rvals_at_xq, nmax):
    Lt = backend.laguerre_table(2.0 * xq, nmax, 0)
    return ((-1.0) ** np.arange(nmax + 1)) * (wq[:, None] * Lt
                                              * rvals_at_xq[:, None]).sum(axis=0)


for nm in (16, 32):
    sup = 0.0
    for lam in grid.lam[::8]:
        d = radial_diag(1.0 / (1.0 + 4.0 * abs(lam) * xq), nm)
        sup = max(sup, float(np.max(np.abs(d))))
    say(f"sup diag |op((1+4|l|rho^2)^-1)| at N={nm}", sup)

say("elapsed (s)", round(time.time() - t0, 1))
