"""Dev part 7: partition numbers, Bernstein slope, Mehler ring profiles,
reduced-symbol coefficients, growth demo, and the ring-projection compare."""

import math
import time

import numpy as np

from hgcalc.gft import LambdaGrid
from hgcalc.weyl import mehler_symbol, oscillator_functional, smooth_step
from hgcalc import backend, fock
from scipy.special import roots_laguerre

t0 = time.time()


def say(tag, val):
    print(f"{tag:58s} {val}", flush=True)


def theta(tau):
    return 1.0 - smooth_step(np.abs(tau), 1.0, 2.0)


def ring(tau):
    return theta(tau / 4.0) - theta(tau)


# ------------------------------------------------------- partition numbers
P = 8
tau = np.concatenate([np.linspace(0.0, 10.0, 20001),
                      np.geomspace(10.0, 4.0 ** P, 20001)])
total = theta(tau) + sum(ring(tau / 4.0 ** p) for p in range(P + 1))
say("partition sup|1-sum| on [0,4^8]", float(np.max(np.abs(total - 1.0))))
sq = theta(tau) ** 2 + sum(ring(tau / 4.0 ** p) ** 2 for p in range(P + 1))
say("square-sum min, max", (float(sq.min()), float(sq.max())))
olap = 0.0
for p in range(P - 1):
    for q in range(p + 2, P + 1):
        olap = max(olap, float(np.max(np.abs(ring(tau / 4.0 ** p)
                                              * ring(tau / 4.0 ** q)))))
say("|p-q|>=2 ring product sup", olap)
say("adjacent ring product sup",
    float(np.max(ring(tau / 4.0) * ring(tau / 16.0))))

# lambda partition: same profiles in one signed variable
lam = np.linspace(-300.0, 300.0, 400001)
ltot = theta(lam) + sum(ring(lam / 4.0 ** r) for r in range(6))
say("lambda partition sup|1-sum| on |l|<=256",
    float(np.max(np.abs(ltot[np.abs(lam) <= 256.0] - 1.0))))
lsq = theta(lam) ** 2 + sum(ring(lam / 4.0 ** r) for r in range(6)) ** 2
# (4.4.4)-style constants from the square sum of the blocks alone
lsq2 = theta(lam) ** 2 + sum(ring(lam / 4.0 ** r) ** 2 for r in range(6))
m = np.abs(lam) <= 256.0
say("lambda square-sum min,max", (float(lsq2[m].min()), float(lsq2[m].max())))

# ------------------------------------------------------ Bernstein exponent
wide = LambdaGrid.geometric(n_per_sign=160, lam_min=1e-3, lam_max=40.0)
N_MAX = 32
rng = np.random.default_rng(11)
G = rng.standard_normal((len(wide.lam), N_MAX + 1, N_MAX + 1)) \
    + 1j * rng.standard_normal((len(wide.lam), N_MAX + 1, N_MAX + 1))
ns = np.arange(N_MAX + 1)
D = 4.0 * np.abs(wide.lam)[:, None] * (2.0 * ns[None, :] + 1.0)
Q1 = np.stack([fock.ladder_matrices(
    fock.TruncatedBasis(1, N_MAX, lv))[0][0].mat for lv in wide.lam])
cw = wide.c_d * wide.weight


def pnorm2(data):
    return float(np.sqrt(np.sum(cw * np.sum(np.abs(data) ** 2, axis=(1, 2)))))


slopes = []
vals = []
for p in range(1, 6):
    mask_p = ring(D / 4.0 ** p)
    up = G * mask_p[:, :, None]              # column scaling: F R*(D)
    zn = pnorm2(np.einsum("kij,kjl->kil", up, Q1))
    un = pnorm2(up)
    vals.append(zn / un)
say("bernstein ratios p=1..5", np.round(vals, 3))
fit = np.polyfit(np.arange(1, 6), np.log2(vals), 1)
say("bernstein fitted exponent (want 1.0 +- 0.15)", round(float(fit[0]), 4))

# --------------------------------------------- Mehler ring symbol anchors
for lp in (0.4, 0.1, 0.025):
    Rfun = lambda y, c=4.0 * lp: ring(c * np.asarray(y, dtype=float))
    prof = mehler_symbol(Rfun, y_half=600.0, n_y=2 ** 16)
    xs = prof.x
    lead = ring(4.0 * lp * xs)
    dev = float(np.max(np.abs(prof.values - lead)))
    nlist = np.arange(0, N_MAX + 1)
    diag = np.array([oscillator_functional(prof, int(n)) for n in nlist])
    want = ring(4.0 * lp * (2 * nlist + 1))
    say(f"ring profile lam'={lp}: sup|r - R*(4l'x)|, diag err",
        (round(dev, 5), round(float(np.max(np.abs(diag - want))), 6)))

# ------------------------------------------------------- reduced symbols
def a_tilde(T1, T2):
    r2 = T1 ** 2 + T2 ** 2
    return 1.0 / np.sqrt(1.0 + r2) * T1 + 2.0 / (1.0 + r2 / 9.0)


n_fft = 256
tg = -math.pi + 2 * math.pi * np.arange(n_fft) / n_fft
TG1, TG2 = np.meshgrid(tg, tg, indexing="ij")
RING_G = ring(TG1 ** 2 + TG2 ** 2)
PSI_G = theta(TG1 ** 2 + TG2 ** 2)
kk = np.fft.fftfreq(n_fft, 1.0 / n_fft).astype(int)


def fourier_coeffs(vals):
    c = np.fft.fft2(vals) / n_fft ** 2
    # grid starts at -pi: e^{-ik(-pi)} phase
    ph = ((-1.0) ** np.abs(kk))[:, None] * ((-1.0) ** np.abs(kk))[None, :]
    return c * ph


P_MAX = 6
coeffs = {}
for p in range(-1, P_MAX + 1):
    sc = 1.0 if p <= 0 else 2.0 ** p
    win = PSI_G if p == -1 else RING_G
    coeffs[p] = fourier_coeffs(a_tilde(sc * TG1, sc * TG2) * win)

# decay: sup_p of shell max |b_p^k| vs |k|
sup_shell = {}
for K in range(1, 41):
    best = 0.0
    for p, c in coeffs.items():
        i1 = np.abs(kk)[:, None] * np.ones_like(kk)[None, :]
        i2 = np.ones_like(kk)[:, None] * np.abs(kk)[None, :]
        shell = np.maximum(i1, i2) == K
        best = max(best, float(np.max(np.abs(c[shell]))))
    sup_shell[K] = best
ks = np.arange(3, 21)
dv = np.array([sup_shell[k] for k in ks])
fit2 = np.polyfit(np.log(1.0 + ks), np.log(dv), 1)
say("reduced coeff decay exponent (want <= -4)", round(float(fit2[0]), 2))
say("shell sup at k=2, 8, 16",
    (f"{sup_shell[2]:.2e}", f"{sup_shell[8]:.2e}", f"{sup_shell[16]:.2e}"))

# reconstruction at sample points with |k| <= 8; each ring piece's series
# is only used on its own fundamental box (the piece vanishes outside it)
rng2 = np.random.default_rng(5)
pts = rng2.uniform(-12.0, 12.0, size=(400, 2))
vals_true = a_tilde(pts[:, 0], pts[:, 1])
recon = np.zeros(len(pts), dtype=complex)
kmask = (np.abs(kk)[:, None] <= 8) & (np.abs(kk)[None, :] <= 8)
kidx = np.argwhere(kmask)
for p in range(-1, P_MAX + 1):
    sc = 1.0 if p <= 0 else 2.0 ** p
    th = pts / sc
    inside = np.max(np.abs(th), axis=1) <= math.pi
    c = coeffs[p]
    phase = np.exp(1j * (np.outer(th[:, 0], kk[kidx[:, 0]])
                         + np.outer(th[:, 1], kk[kidx[:, 1]])))
    recon += inside * (phase @ c[kidx[:, 0], kidx[:, 1]])
say("reconstruction max err at k_max=8",
    float(np.max(np.abs(recon - vals_true))))

# single mode: dominant coefficient location
def a_mode(T1, T2):
    return np.exp(1j * (2.0 * T1 + 1.0 * T2))


cm = fourier_coeffs(a_mode(TG1, TG2) * RING_G)
cr = fourier_coeffs(RING_G + 0j)
peak = np.unravel_index(np.argmax(np.abs(cm)), cm.shape)
say("single-mode argmax (want k=(2,1))", (int(kk[peak[0]]), int(kk[peak[1]])))
say("mode leakage: |c[(2,1)]|, next largest off",
    (round(float(np.abs(cm[peak])), 4),
     round(float(np.sort(np.abs(cm).ravel())[-2]), 4)))

# ------------------------------------------------------ growth demo (k=0)
lam_q = np.linspace(-2.0, 2.0, 16001)


def simpson_w(n, h):
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * h / 3.0


def osc_rows(s_axis, x_axis, vec, sign=-1.0):
    out = np.empty(len(s_axis), dtype=complex)
    for i0 in range(0, len(s_axis), 64):
        blk = s_axis[i0:i0 + 64]
        out[i0:i0 + 64] = np.exp(sign * 1j * np.outer(blk, x_axis)) @ vec
    return out


wq_l = simpson_w(len(lam_q), lam_q[1] - lam_q[0])
phi_l = theta(np.abs(lam_q))
c1 = 1.0 / math.pi ** 2
k_ce = 0
amp = phi_l * np.abs(lam_q) ** (k_ce + 1.5)
s_ax = np.arange(0.0, 40.0 + 1e-9, 0.05)
u = np.abs(osc_rows(s_ax, lam_q, wq_l * amp)) * c1
for N in (0, 2 * k_ce + 4):
    sups = [float(np.max(np.abs(s_ax[s_ax <= S] ** N)
                         * u[s_ax <= S])) for S in (5, 10, 20, 40)]
    say(f"growth sup table N={N}", np.round(sups, 5))

# sigma-smoothness flag: one-sided FD of |l|^{k+1/2} vs a smooth control
def fd_forward(fn, order, h):
    c = np.array([math.comb(order, i) * (-1.0) ** (order - i)
                  for i in range(order + 1)])
    return sum(c[i] * fn(i * h) for i in range(order + 1)) / h ** order


for name, fn in (("kink", lambda l: np.abs(l) ** 0.5),
                 ("smooth", lambda l: 1.0 / (1.0 + l ** 2))):
    r1 = fd_forward(fn, 1, 1e-2)
    r2 = fd_forward(fn, 1, 1e-2 / 4)
    say(f"sigma flag FD ratio ({name})", round(abs(r2 / r1), 3))

# ------------------------------------- ring projection compare + decay
xq, wq = roots_laguerre(192)
Lt = backend.laguerre_table(2.0 * xq, N_MAX, 0)
sgn_n = (-1.0) ** np.arange(N_MAX + 1)


def radial_diag(rvals):
    return sgn_n * (wq[:, None] * Lt * rvals[:, None]).sum(axis=0)


# Phi-hat by quadrature over the ring support [1, 8]
ug = np.linspace(0.5, 9.0, 4001)
wu = simpson_w(len(ug), ug[1] - ug[0])
pv = ring(ug)
tau_g = np.linspace(-80.0, 80.0, 48001)
wt = simpson_w(len(tau_g), tau_g[1] - tau_g[0])
phat = np.exp(-1j * np.outer(tau_g, ug)) @ (wu * pv)
say("Phi-hat edge/peak", float(np.abs(phat[-1]) / np.abs(phat).max()))


def ip_value(alpha, lam_v, p):
    c = 4.0 ** (-p) * lam_v * tau_g
    integ = phat * np.exp(1j * (2 * alpha + 1) * np.arctan(c)) \
        / np.sqrt(1.0 + c * c)
    return float(np.real(np.sum(wt * integ))) / (2.0 * math.pi)


lam_v = 1.0
for alpha in (0, 1, 2):
    errs = []
    for p in range(1, 7):
        want = ring(lam_v * 4.0 ** (-p) * (2 * alpha + 1))
        errs.append(abs(ip_value(alpha, lam_v, p) - want))
    rats = [errs[i] / errs[i + 1] for i in range(len(errs) - 1)
            if errs[i + 1] > 1e-14]
    say(f"I_p compare errs alpha={alpha}",
        [f"{e:.2e}" for e in errs])
    say(f"I_p error shrink ratios alpha={alpha}", np.round(rats, 2))

# cross-check I_p against the Laguerre-route diagonal at one point
p0, lam0 = 2, 1.3
dq = radial_diag(ring(4.0 ** (-p0) * lam0 * xq))
say("I_p vs Laguerre diag (alpha=0..3 max diff)",
    float(np.max(np.abs([ip_value(a, lam0, p0) - dq[a] for a in range(4)]))))

# truncation decay: ||Delta_q Op(a_p)|| over |p-q| = 0..4 at p = 4.
# a_p is the symbol R*(4^{-p} 4|lam| x): profile in x varies with lam.
lam_samp = np.geomspace(0.05, 8.0, 61)
p_fix = 4
ns_full = np.arange(N_MAX + 1)
norms = []
for q in range(4, -1, -1):
    best = 0.0
    for lv in lam_samp:
        dp = radial_diag(ring(4.0 ** (-p_fix) * 4.0 * lv * xq))
        dqv = ring(4.0 ** (-q) * 4.0 * lv * (2 * ns_full + 1.0))
        best = max(best, float(np.max(np.abs(dp * dqv))))
    norms.append(best)
say("||Delta_q Op(a_p)|| q=4..0 at p=4", [f"{v:.3e}" for v in norms])
say("log2 norms", np.round(np.log2(norms), 2))

say("elapsed (s)", round(time.time() - t0, 1))
