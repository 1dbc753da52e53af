"""Dev part 6b: kernel quadratures with a Gaussian lambda envelope."""

import math
import time

import numpy as np
from scipy.ndimage import map_coordinates

from hgcalc.group import GridFunction, group_mul, norm_l2
from hgcalc.gft import LambdaGrid, SpectralFunction, gft, inverse_gft

N_MAX = 32
t0 = time.time()


def say(tag, val):
    print(f"{tag:58s} {val}")


grid = LambdaGrid.geometric()
f = GridFunction.from_callable(
    lambda x, y, s: np.exp(-(x - 0.2) ** 2 - y * y - 0.8 * s * s), n=64)
F = gft(f, grid, N_MAX)


def op_fast(Amats, FF, target):
    data = np.stack([FF.data[k] @ Amats[k] for k in range(len(FF.grid.lam))])
    return inverse_gft(SpectralFunction(FF.grid, FF.N_max, data), target)


def chi(lam):
    return np.exp(-2.0 * (np.abs(lam) - 2.0) ** 2)


def chi_prime(lam, h=1e-5):
    return (chi(lam - 2 * h) - 8 * chi(lam - h) + 8 * chi(lam + h)
            - chi(lam + 2 * h)) / (12.0 * h)


def sigma_a(lam, xi, eta):
    c = chi(lam)
    al = np.maximum(np.abs(lam), 1e-12)
    with np.errstate(under="ignore"):
        e = np.exp(-(xi ** 2 + eta ** 2) / (2.0 * al))
    return c * e


def sigma_g(lam, xi, eta):
    al = np.maximum(np.abs(lam), 1e-12)
    sl = np.where(np.abs(lam) > 1e-12, lam, 1.0)
    with np.errstate(under="ignore"):
        e = np.exp(-(xi ** 2 + eta ** 2) / (2.0 * al))
        kin = chi(lam) * e * (xi ** 2 + eta ** 2) / (2.0 * sl * al)
    return -(chi_prime(lam) * e + kin)


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
lam_ax = np.linspace(-4.6, 4.6, 301)
xi_ax = np.linspace(-9.0, 9.0, 121)
zt_ax = np.linspace(-9.0, 9.0, 121)
K = kernel_on_vgrid(sigma_a, xv, yv, sv, lam_ax, xi_ax, zt_ax)
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

ns = np.arange(N_MAX + 1)
diag_half = (2.0 / 3.0) * (1.0 / 3.0) ** ns
A_chi = [np.diag(chi(lam) * diag_half) for lam in grid.lam]
op_ref = op_fast(A_chi, F, f)

for w in [np.array([0.3, -0.4, 0.5]), np.array([-0.9, 0.1, -1.3]),
          np.array([0.2, 0.2, 0.0]), np.array([0.0, -0.6, 2.1])]:
    ix = int(np.argmin(np.abs(f.xg - w[0])))
    iy = int(np.argmin(np.abs(f.yg - w[1])))
    isx = int(np.argmin(np.abs(f.sg - w[2])))
    wsnap = np.array([f.xg[ix], f.yg[iy], f.sg[isx]])
    shifted = group_mul(wsnap[None, None, None, :], Vpts)
    val = np.sum(K * WV * interp_f(f, shifted))
    ref = op_ref.values[ix, iy, isx]
    say(f"dual path at {np.round(wsnap, 2)} rel",
        abs(val - ref) / max(abs(ref), 1e-12))

probe = [(1.4, 0.3, -0.2), (2.0, -0.5, 0.4), (-1.7, 0.2, 0.6),
         (2.6, 0.0, 0.9)]
errs = []
for lam, xi, eta in probe:
    ph = np.exp(-1j * lam * VS - 2j * xi * VY + 2j * eta * VX)
    got = np.sum(K * WV * ph)
    errs.append(abs(got - sigma_a(np.array(lam), xi, eta)))
say("sigma recovery abs errs", np.round(errs, 8))

Kg = kernel_on_vgrid(sigma_g, xv, yv, sv, lam_ax, xi_ax, zt_ax)
ref_g = 1j * VS * K
say("s-mult kernel identity rel sup",
    float(np.max(np.abs(Kg - ref_g)) / np.max(np.abs(ref_g))))

# spectral-side composition exactness
eye = np.eye(N_MAX + 1)
A_s = [1j * lam * eye for lam in grid.lam]
A_s2 = [(1j * lam) ** 2 * eye for lam in grid.lam]
d_two = np.stack([(F.data[k] @ A_s[k]) @ A_s[k] for k in range(len(grid.lam))])
d_one = np.stack([F.data[k] @ A_s2[k] for k in range(len(grid.lam))])
say("spectral-side Op(il)^2 vs Op(-l^2)",
    np.linalg.norm(d_two - d_one) / np.linalg.norm(d_one))

say("elapsed (s)", round(time.time() - t0, 1))
