# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: Hermite/Laguerre recurrence tables and the twisted
group convolution. Mirror of hgcalc._kernels_py; keep signatures in sync."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp, floor, pi

cnp.import_array()

COMPILED = True


def hermite_table(t, int nmax):
    """Orthonormal Hermite functions h_0..h_nmax at points t (any shape)."""
    t_arr = np.ascontiguousarray(np.asarray(t, dtype=np.float64).ravel())
    cdef double[::1] tv = t_arr
    cdef Py_ssize_t npts = tv.shape[0]
    out = np.zeros((npts, nmax + 1))
    cdef double[:, ::1] H = out
    cdef Py_ssize_t i
    cdef int n
    cdef double c0 = pi ** -0.25
    cdef double ti
    for i in range(npts):
        ti = tv[i]
        H[i, 0] = c0 * exp(-0.5 * ti * ti)
        if nmax >= 1:
            H[i, 1] = sqrt(2.0) * ti * H[i, 0]
        for n in range(1, nmax):
            H[i, n + 1] = sqrt(2.0 / (n + 1)) * ti * H[i, n] \
                - sqrt(n / (n + 1.0)) * H[i, n - 1]
    return out.reshape(np.shape(t) + (nmax + 1,))


def laguerre_table(t, int mmax, double alpha):
    """Generalized Laguerre L_m^{(alpha)}(t) for m = 0..mmax."""
    t_arr = np.ascontiguousarray(np.asarray(t, dtype=np.float64).ravel())
    cdef double[::1] tv = t_arr
    cdef Py_ssize_t npts = tv.shape[0]
    out = np.zeros((npts, mmax + 1))
    cdef double[:, ::1] L = out
    cdef Py_ssize_t i
    cdef int m
    cdef double ti
    for i in range(npts):
        ti = tv[i]
        L[i, 0] = 1.0
        if mmax >= 1:
            L[i, 1] = 1.0 + alpha - ti
        for m in range(1, mmax):
            L[i, m + 1] = ((2 * m + 1 + alpha - ti) * L[i, m]
                           - (m + alpha) * L[i, m - 1]) / (m + 1.0)
    return out.reshape(np.shape(t) + (mmax + 1,))


def twisted_convolve(fv, gv, xg, yg, sg, wx, wy, ws, out_pts):
    """f*g(w) = int f(w . v^{-1}) g(v) dv, trilinear interpolation off-grid."""
    cdef cnp.complex128_t[:, :, ::1] f = np.ascontiguousarray(fv, dtype=np.complex128)
    gw_arr = np.ascontiguousarray(
        np.asarray(gv, dtype=np.complex128)
        * np.asarray(wx)[:, None, None]
        * np.asarray(wy)[None, :, None]
        * np.asarray(ws)[None, None, :])
    cdef cnp.complex128_t[:, :, ::1] gw = gw_arr
    cdef double[::1] xgv = np.ascontiguousarray(xg, dtype=np.float64)
    cdef double[::1] ygv = np.ascontiguousarray(yg, dtype=np.float64)
    cdef double[::1] sgv = np.ascontiguousarray(sg, dtype=np.float64)
    pts = np.ascontiguousarray(out_pts, dtype=np.float64)
    cdef double[:, ::1] P = pts
    cdef Py_ssize_t nout = P.shape[0]
    out_arr = np.zeros(nout, dtype=np.complex128)
    cdef cnp.complex128_t[::1] out = out_arr

    cdef Py_ssize_t nx = f.shape[0], ny = f.shape[1], ns = f.shape[2]
    cdef double x0 = xgv[0], hx = xgv[1] - xgv[0]
    cdef double y0 = ygv[0], hy = ygv[1] - ygv[0]
    cdef double s0 = sgv[0], hs = sgv[1] - sgv[0]

    cdef Py_ssize_t n, i, j, k, ix, iy, isx
    cdef double x, y, s, X, Y, S, fx, fy, fs, tx, ty, ts
    cdef double w00, w01, w10, w11
    cdef cnp.complex128_t acc, fval

    for n in range(nout):
        x = P[n, 0]; y = P[n, 1]; s = P[n, 2]
        acc = 0
        for i in range(nx):
            X = x - xgv[i]
            fx = (X - x0) / hx
            ix = <Py_ssize_t>floor(fx)
            if ix < 0 or ix >= nx - 1:
                continue
            tx = fx - ix
            for j in range(ny):
                Y = y - ygv[j]
                fy = (Y - y0) / hy
                iy = <Py_ssize_t>floor(fy)
                if iy < 0 or iy >= ny - 1:
                    continue
                ty = fy - iy
                w00 = (1 - tx) * (1 - ty)
                w01 = (1 - tx) * ty
                w10 = tx * (1 - ty)
                w11 = tx * ty
                for k in range(ns):
                    S = s - sgv[k] + 2.0 * x * ygv[j] - 2.0 * y * xgv[i]
                    fs = (S - s0) / hs
                    isx = <Py_ssize_t>floor(fs)
                    if isx < 0 or isx >= ns - 1:
                        continue
                    ts = fs - isx
                    fval = (1 - ts) * (w00 * f[ix, iy, isx]
                                       + w01 * f[ix, iy + 1, isx]
                                       + w10 * f[ix + 1, iy, isx]
                                       + w11 * f[ix + 1, iy + 1, isx]) \
                        + ts * (w00 * f[ix, iy, isx + 1]
                                + w01 * f[ix, iy + 1, isx + 1]
                                + w10 * f[ix + 1, iy, isx + 1]
                                + w11 * f[ix + 1, iy + 1, isx + 1])
                    acc = acc + fval * gw[i, j, k]
        out[n] = acc
    return out_arr
