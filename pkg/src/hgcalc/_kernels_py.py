"""Pure-numpy implementations of the hot kernels.

These are the fallback twins of the Cython module ``hgcalc._kernels``; the
active implementation is chosen in hgcalc.backend. Keep signatures in sync.
"""

import numpy as np

COMPILED = False


def hermite_table(t, nmax):
    """Orthonormal Hermite functions h_0..h_nmax at the points t.

    h_n(t) = (2^n n! sqrt(pi))^{-1/2} H_n(t) e^{-t^2/2}, evaluated with the
    normalized three-term recurrence
        h_{n+1} = sqrt(2/(n+1)) t h_n - sqrt(n/(n+1)) h_{n-1},
    which is stable because the functions stay O(1). The Gaussian factor is
    folded into h_0, so extreme |t| just underflows to 0 harmlessly.

    Returns an array of shape t.shape + (nmax+1,).
    """
    t = np.asarray(t, dtype=np.float64)
    H = np.zeros(t.shape + (nmax + 1,))
    H[..., 0] = np.pi ** -0.25 * np.exp(-0.5 * t * t)
    if nmax >= 1:
        H[..., 1] = np.sqrt(2.0) * t * H[..., 0]
    for n in range(1, nmax):
        H[..., n + 1] = np.sqrt(2.0 / (n + 1)) * t * H[..., n] \
            - np.sqrt(n / (n + 1.0)) * H[..., n - 1]
    return H


def laguerre_table(t, mmax, alpha):
    """Generalized Laguerre polynomials L_m^{(alpha)}(t), m = 0..mmax.

    Standard recurrence (m+1) L_{m+1} = (2m+1+alpha-t) L_m - (m+alpha) L_{m-1}.
    Returns shape t.shape + (mmax+1,).
    """
    t = np.asarray(t, dtype=np.float64)
    L = np.zeros(t.shape + (mmax + 1,))
    L[..., 0] = 1.0
    if mmax >= 1:
        L[..., 1] = 1.0 + alpha - t
    for m in range(1, mmax):
        L[..., m + 1] = ((2 * m + 1 + alpha - t) * L[..., m]
                         - (m + alpha) * L[..., m - 1]) / (m + 1.0)
    return L


def twisted_convolve(fv, gv, xg, yg, sg, wx, wy, ws, out_pts):
    """Group convolution f*g(w) = int f(w . v^{-1}) g(v) dv by direct quadrature.

    fv, gv: complex samples on the (xg, yg, sg) product grid.
    wx, wy, ws: per-axis quadrature weights.
    out_pts: (n, 3) array of output points w = (x, y, s).

    The shifted argument w . v^{-1} = (x - vx, y - vy, s - vs + 2 x vy - 2 y vx)
    lands off-grid in s, so f is interpolated trilinearly; points outside the
    box contribute 0.
    """
    fv = np.asarray(fv)
    gv = np.asarray(gv)
    nx, ny, ns = fv.shape
    x0, hx = xg[0], xg[1] - xg[0]
    y0, hy = yg[0], yg[1] - yg[0]
    s0, hs = sg[0], sg[1] - sg[0]
    gw = gv * (wx[:, None, None] * wy[None, :, None] * ws[None, None, :])
    out = np.empty(len(out_pts), dtype=np.complex128)

    for n, (x, y, s) in enumerate(out_pts):
        # per-axis coordinates of w . v^{-1}
        X = x - xg                              # (nx,)
        Y = y - yg                              # (ny,)
        S = (s - sg)[None, None, :] + 2.0 * x * yg[None, :, None] \
            - 2.0 * y * xg[:, None, None]       # (nx, ny, ns)

        fx = (X - x0) / hx
        fy = (Y - y0) / hy
        fs = (S - s0) / hs
        ix = np.floor(fx).astype(np.intp)
        iy = np.floor(fy).astype(np.intp)
        is_ = np.floor(fs).astype(np.intp)
        tx = fx - ix
        ty = fy - iy
        ts = fs - is_
        okx = (ix >= 0) & (ix < nx - 1)
        oky = (iy >= 0) & (iy < ny - 1)
        oks = (is_ >= 0) & (is_ < ns - 1)
        ix = np.clip(ix, 0, nx - 2)
        iy = np.clip(iy, 0, ny - 2)
        is_ = np.clip(is_, 0, ns - 2)

        mask = okx[:, None, None] & oky[None, :, None] & oks
        IX = ix[:, None, None]
        IY = iy[None, :, None]
        TX = tx[:, None, None]
        TY = ty[None, :, None]

        acc = np.zeros(fv.shape, dtype=np.complex128)
        for a in (0, 1):
            wxa = TX if a else (1.0 - TX)
            for b in (0, 1):
                wyb = TY if b else (1.0 - TY)
                for c in (0, 1):
                    wsc = ts if c else (1.0 - ts)
                    acc += (wxa * wyb * wsc) * fv[IX + a, IY + b, is_ + c]
        acc[~mask] = 0.0
        out[n] = np.sum(acc * gw)
    return out
