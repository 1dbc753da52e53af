"""Weyl quantization, the Moyal product, and Mehler functional calculus.

Everything here lives on the phase plane (xi, eta) of the d = 1 Schrodinger
realization. The quantization rule is the symmetric one,

    op^w(a) u(xi) = (2 pi)^{-d} int e^{i(xi-xi')eta} a((xi+xi')/2, eta)
                    u(xi') dxi' deta,

realized concretely through its Schwartz kernel

    k(xi, xi') = (2 pi)^{-d} int e^{i(xi-xi')eta} a((xi+xi')/2, eta) deta,

which on a uniform xi grid is computed on the half-step lattice of midpoints
(xi+xi')/2 and differences xi-xi' so one quadrature in eta serves the whole
matrix. The inverse map is

    a(xi, eta) = int e^{-i xi' eta} k(xi + xi'/2, xi - xi'/2) dxi'.

The Moyal product a # b, defined so that op^w(a) op^w(b) = op^w(a # b), has
two backends. For polynomials the bidifferential expansion

    (a # b)_k = 1/(k! (2i)^k) sum_j C(k,j) (-1)^j
                (d_eta^{k-j} d_xi^j a) (d_xi^{k-j} d_eta^j b)

terminates and is evaluated in exact rational arithmetic, reproducing for
instance xi # eta = xi eta + i/2 and H # H = H^2 - 1 for the oscillator
symbol H = xi^2 + eta^2. For decaying symbols the product is computed in
Fourier variables, where it becomes a twisted convolution

    (a # b)^(theta) = (2 pi)^{-2} int a^(S) b^(theta - S)
                      e^{(i/2)(S_eta W_xi - S_xi W_eta)} dS,   W = theta - S,

with b^ held on a doubled frequency grid so the shifted argument stays on
lattice. The sign of the twist phase is tied to the kernel convention above;
it is pinned by checking op^w(a) op^w(b) = op^w(a # b) on non-radial pairs.

Functions of the harmonic oscillator are handled through the Mehler formula
e^{-t(xi^2 - d^2/dxi^2)} = (cosh t)^{-d} op^w(e^{-(xi^2+eta^2) tanh t}): an
operator R(xi^2 - d^2/dxi^2) given by a spectral profile R has Weyl symbol
r(xi^2 + eta^2) with

    r(x) = sum_k r_k(x),
    r_k(x) = (2 pi)^{-1} (-1)^{kd} int e^{ixu} R^(k pi + arctan u)
             (1 + u^2)^{d/2 - 1} du,

where R^ is the Fourier transform of R. Each branch integral is evaluated by
a tapered FFT; the eigenvalue functional comes back out of r through

    E_n = (2 pi)^{-1} int r^(tau) e^{i(2n+d) arctan tau}
          (1 + tau^2)^{-d/2} dtau,

which must reproduce R(2n + d) exactly in exact arithmetic (folding the
branches of arctan turns the tau integral back into the inverse transform of
R^ at the spectrum points).
"""

import csv
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial

import numpy as np
from scipy.interpolate import CubicSpline, RectBivariateSpline

from hgcalc import backend

# Twist sign of the Fourier-side Moyal phase for the e^{i(xi-xi')eta} kernel
# convention; flipping it composes the operators in the wrong order.
_MOYAL_TWIST_SIGN = +1.0


def smooth_step(y, lo, hi):
    """C-infinity ramp: 0 for y <= lo, 1 for y >= hi, monotone between.

    Built from the classical e^{-1/s} glue, so all derivatives vanish at
    both ends; products of these make the compactly supported spectral
    windows used by the Mehler machinery.
    """
    arr = np.atleast_1d(np.asarray(y, dtype=float))
    s = np.clip((arr - lo) / (hi - lo), 0.0, 1.0)
    out = np.where(s >= 1.0, 1.0, 0.0)
    mid = (s > 0.0) & (s < 1.0)
    sm = s[mid]
    e1 = np.exp(-1.0 / sm)
    e2 = np.exp(-1.0 / (1.0 - sm))
    out[mid] = e1 / (e1 + e2)
    return out.reshape(np.shape(y)) if np.shape(y) else float(out[0])


def _trapezoid_weights(nodes):
    w = np.empty(len(nodes))
    w[1:-1] = 0.5 * (nodes[2:] - nodes[:-2])
    w[0] = 0.5 * (nodes[1] - nodes[0])
    w[-1] = 0.5 * (nodes[-1] - nodes[-2])
    return w


def _broadcast_eval(fr, fi, x, y, box):
    """Evaluate a real/imag spline pair with numpy broadcasting, clipping
    queries to the table box (symbols built on a grid decay there anyway)."""
    shape = np.broadcast_shapes(np.shape(x), np.shape(y))
    xb = np.clip(np.broadcast_to(np.asarray(x, float), shape).ravel(),
                 box[0], box[1])
    yb = np.clip(np.broadcast_to(np.asarray(y, float), shape).ravel(),
                 box[2], box[3])
    out = fr(xb, yb, grid=False) + 1j * fi(xb, yb, grid=False)
    return out.reshape(shape) if shape else complex(out[0])


def _normalize_poly(coeffs):
    out = {}
    for key, c in coeffs.items():
        m, n = key
        if m < 0 or n < 0 or m != int(m) or n != int(n):
            raise ValueError(f"bad monomial key {key!r}")
        c = complex(c)
        if c != 0:
            out[(int(m), int(n))] = c
    return out


@dataclass(frozen=True, eq=False)
class PhaseSymbol:
    """A symbol a(xi, eta) on the phase plane, tagged by how it quantizes.

    kind is one of "general" (plain callable), "table" (grid samples with a
    spline evaluator), "polynomial" (monomial dict, exact calculus),
    "multiplication" (a depends on xi only) or "fourier_multiplier" (eta
    only). The structured kinds quantize exactly, bypassing quadrature; they
    also have distributional kernels, so weyl_quantize refuses them.
    """
    func: object
    kind: str = "general"
    order: float | None = None
    poly: dict | None = None
    axis_func: object = None
    table: tuple | None = field(default=None, repr=False)

    def __call__(self, xi, eta):
        return self.func(xi, eta)

    @property
    def is_polynomial(self):
        return self.kind == "polynomial"

    @classmethod
    def from_function(cls, f, order=None):
        return cls(func=f, kind="general", order=order)

    @classmethod
    def from_polynomial(cls, coeffs, order=None):
        """coeffs maps (m, n) to the coefficient of xi^m eta^n."""
        poly = _normalize_poly(coeffs)
        if order is None and poly:
            order = float(max(m + n for m, n in poly))

        def f(xi, eta, _poly=poly):
            out = np.zeros(np.broadcast_shapes(np.shape(xi), np.shape(eta)),
                           dtype=complex)
            xi = np.asarray(xi, float)
            eta = np.asarray(eta, float)
            for (m, n), c in _poly.items():
                out = out + c * xi ** m * eta ** n
            return out

        return cls(func=f, kind="polynomial", order=order, poly=poly)

    @classmethod
    def multiplication(cls, g, order=None):
        """a(xi, eta) = g(xi); op^w(a) is multiplication by g."""
        return cls(func=lambda xi, eta: g(np.asarray(xi, float))
                   + np.zeros_like(np.asarray(eta, float)),
                   kind="multiplication", order=order, axis_func=g)

    @classmethod
    def fourier_multiplier(cls, g, order=None):
        """a(xi, eta) = g(eta); op^w(a) = g((1/i) d/dxi)."""
        return cls(func=lambda xi, eta: g(np.asarray(eta, float))
                   + np.zeros_like(np.asarray(xi, float)),
                   kind="fourier_multiplier", order=order, axis_func=g)

    @classmethod
    def from_table(cls, xi, eta, values, order=None):
        xi = np.asarray(xi, float)
        eta = np.asarray(eta, float)
        values = np.asarray(values, complex)
        if values.shape != (xi.size, eta.size):
            raise ValueError("table shape does not match the grids")
        fr = RectBivariateSpline(xi, eta, values.real)
        fi = RectBivariateSpline(xi, eta, values.imag)
        box = (xi[0], xi[-1], eta[0], eta[-1])
        return cls(func=lambda x, e: _broadcast_eval(fr, fi, x, e, box),
                   kind="table", order=order, table=(xi, eta, values))

    def conjugate(self):
        """The symbol of the adjoint: op^w(a)* = op^w(conj a)."""
        if self.kind == "polynomial":
            return PhaseSymbol.from_polynomial(
                {k: np.conj(c) for k, c in self.poly.items()}, self.order)
        if self.kind == "table":
            xi, eta, values = self.table
            return PhaseSymbol.from_table(xi, eta, np.conj(values), self.order)
        if self.kind in ("multiplication", "fourier_multiplier"):
            g = self.axis_func
            make = (PhaseSymbol.multiplication if self.kind == "multiplication"
                    else PhaseSymbol.fourier_multiplier)
            return make(lambda t: np.conj(g(t)), self.order)
        f = self.func
        return PhaseSymbol(func=lambda x, e: np.conj(f(x, e)),
                           kind="general", order=self.order)


@dataclass(frozen=True, eq=False)
class WeylKernel:
    """Schwartz kernel of op^w(a) sampled on a uniform square grid."""
    xi: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xi = np.asarray(self.xi, float)
        values = np.asarray(self.values, complex)
        if values.shape != (xi.size, xi.size):
            raise ValueError("kernel must be square on the xi grid")
        steps = np.diff(xi)
        if not np.allclose(steps, steps[0], rtol=1e-12, atol=0.0):
            raise ValueError("xi grid must be uniform")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "values", values)

    @property
    def step(self):
        return float(self.xi[1] - self.xi[0])

    @property
    def weights(self):
        return _trapezoid_weights(self.xi)

    def apply(self, u):
        """op^w(a) u by quadrature in xi'."""
        u = np.asarray(u)
        if u.shape != self.xi.shape:
            raise ValueError("u must be sampled on the kernel grid")
        return self.values @ (u * self.weights)

    def compose(self, other):
        """Kernel of op^w(a) op^w(b) from the two kernels."""
        if other.xi.size != self.xi.size or not np.allclose(other.xi, self.xi):
            raise ValueError("kernels live on different grids")
        return WeylKernel(self.xi, self.values @ (self.weights[:, None]
                                                  * other.values))

    def adjoint(self):
        """Kernel of the adjoint operator, conj(k)(xi', xi)."""
        return WeylKernel(self.xi, np.conj(self.values).T)

    def hermite_matrix(self, nmax):
        """Matrix elements <h_m, op^w(a) h_n> for m, n <= nmax."""
        ht = backend.hermite_table(self.xi, nmax) * self.weights[:, None]
        return np.einsum("im,ij,jn->mn", ht, self.values, ht, optimize=True)

    def hermite_diagonal(self, nmax):
        ht = backend.hermite_table(self.xi, nmax) * self.weights[:, None]
        return np.einsum("im,ij,jm->m", ht, self.values, ht, optimize=True)


def weyl_quantize(a, xi, eta_half_width=32.0, n_eta=1024, tail_tol=1e-10):
    """Kernel of op^w(a) on the grid xi, for a decaying in eta.

    The eta integral runs over [-eta_half_width, eta_half_width] by
    trapezoid; if |a| at the eta edge exceeds tail_tol relative to its
    overall maximum the box is too small and a ValueError is raised.
    Polynomial and multiplication/multiplier symbols have distributional
    kernels and are refused; quantize those through apply_weyl or
    weyl_poly_matrix instead.
    """
    if isinstance(a, PhaseSymbol) and a.kind in (
            "polynomial", "multiplication", "fourier_multiplier"):
        raise TypeError(f"{a.kind} symbols do not have an integrable kernel; "
                        "use apply_weyl or weyl_poly_matrix")
    xi = np.asarray(xi, float)
    n = xi.size
    h = xi[1] - xi[0]
    eta = np.linspace(-eta_half_width, eta_half_width, n_eta)
    we = _trapezoid_weights(eta)
    mids = xi[0] + 0.5 * h * np.arange(2 * n - 1)
    deltas = h * np.arange(-(n - 1), n)
    A = np.asarray(a(mids[:, None], eta[None, :]), dtype=complex)
    amax = np.abs(A).max()
    edge = max(np.abs(A[:, 0]).max(), np.abs(A[:, -1]).max())
    if amax > 0 and edge > tail_tol * amax:
        raise ValueError(
            f"symbol tail at eta = +-{eta_half_width} is {edge / amax:.2e} "
            f"of its peak (tol {tail_tol}); enlarge eta_half_width")
    E = np.exp(1j * np.outer(deltas, eta))
    Kmd = ((A * we[None, :]) @ E.T) / (2 * np.pi)
    i = np.arange(n)
    K = Kmd[i[:, None] + i[None, :], i[:, None] - i[None, :] + n - 1]
    return WeylKernel(xi, K)


def symbol_from_kernel(kern, eta=None, margin=None, decay_tol=1e-6):
    """Invert the kernel map: a(xi, eta) = int e^{-i xi' eta} k(...) dxi'.

    Works on the 2h lattice of symmetric differences around each grid node.
    Nodes within `margin` of the grid edge are dropped (their difference
    range is truncated); the default margin is n // 8. The integral is only
    meaningful if the kernel decays off the diagonal before the lattice
    runs out; if its magnitude at the ends of any used difference range
    exceeds decay_tol of the kernel peak, a ValueError is raised. Returns
    a table symbol on (xi[margin:-margin], eta).
    """
    n = kern.xi.size
    h = kern.step
    if margin is None:
        margin = max(4, n // 8)
    if eta is None:
        eta = np.linspace(-np.pi / (2 * h), np.pi / (2 * h), min(n, 257))
    eta = np.asarray(eta, float)
    keep = np.arange(margin, n - margin)
    peak = np.abs(kern.values).max()
    table = np.empty((keep.size, eta.size), dtype=complex)
    worst = 0.0
    for row, i in enumerate(keep):
        jmax = min(i, n - 1 - i)
        js = np.arange(-jmax, jmax + 1)
        kv = kern.values[i + js, i - js]
        worst = max(worst, abs(kv[0]), abs(kv[-1]))
        w = np.full(js.size, 2.0 * h)
        w[0] = w[-1] = h
        table[row] = np.exp(-1j * np.outer(eta, 2 * h * js)) @ (kv * w)
    if peak > 0 and worst > decay_tol * peak:
        raise ValueError(
            f"kernel has not decayed at the edge of the difference lattice "
            f"({worst / peak:.2e} of its peak, tol {decay_tol}); the symbol "
            "integral is truncated")
    return PhaseSymbol.from_table(kern.xi[keep], eta, table)


def weyl_poly_matrix(coeffs, nmax, margin=None):
    """Hermite-basis matrix of op^w(p) for a polynomial symbol p.

    Uses the symmetrization op^w(xi^m eta^n) = 2^{-m} sum_r C(m,r)
    X^r P^n X^{m-r} with the tridiagonal position and momentum matrices;
    computed on an enlarged basis and cropped so the returned block is
    exact (the enlargement defaults to the total degree).
    """
    poly = coeffs.poly if isinstance(coeffs, PhaseSymbol) else \
        _normalize_poly(coeffs)
    if isinstance(coeffs, PhaseSymbol) and coeffs.poly is None:
        raise TypeError("weyl_poly_matrix needs a polynomial symbol")
    deg = max((m + n for m, n in poly), default=0)
    if margin is None:
        margin = deg
    big = nmax + 1 + margin
    X = np.zeros((big, big), dtype=complex)
    P = np.zeros((big, big), dtype=complex)
    for k in range(big - 1):
        c = math.sqrt((k + 1) / 2.0)
        X[k, k + 1] = X[k + 1, k] = c
        P[k, k + 1] = -1j * c
        P[k + 1, k] = 1j * c
    M = np.zeros((big, big), dtype=complex)
    for (m, n), c in poly.items():
        Pn = np.linalg.matrix_power(P, n)
        acc = np.zeros((big, big), dtype=complex)
        for r in range(m + 1):
            acc += comb(m, r) * np.linalg.matrix_power(X, r) @ Pn \
                @ np.linalg.matrix_power(X, m - r)
        M += (c / 2 ** m) * acc
    return M[:nmax + 1, :nmax + 1]


def apply_weyl(a, u, xi, **quad):
    """Apply op^w(a) to samples u on the grid xi.

    Polynomials go through the symmetrized product rule with spectral
    derivatives (exact up to FFT roundoff for u decaying inside the box);
    multiplication and Fourier-multiplier symbols use their closed forms;
    anything else is routed through the quadrature kernel, with **quad
    forwarded to weyl_quantize.
    """
    xi = np.asarray(xi, float)
    u = np.asarray(u)
    if isinstance(a, PhaseSymbol) and a.kind == "multiplication":
        return a.axis_func(xi) * u
    freqs = 2 * np.pi * np.fft.fftfreq(xi.size, xi[1] - xi[0])
    if isinstance(a, PhaseSymbol) and a.kind == "fourier_multiplier":
        return np.fft.ifft(a.axis_func(freqs) * np.fft.fft(u))
    if isinstance(a, PhaseSymbol) and a.kind == "polynomial":
        out = np.zeros(xi.size, dtype=complex)
        for (m, n), c in a.poly.items():
            acc = np.zeros(xi.size, dtype=complex)
            for r in range(m + 1):
                v = xi ** (m - r) * u
                if n:
                    v = np.fft.ifft(freqs ** n * np.fft.fft(v))
                acc += comb(m, r) * xi ** r * v
            out += (c / 2 ** m) * acc
        return out
    return weyl_quantize(a, xi, **quad).apply(u)


def _poly_derivative(p, dxi, deta):
    out = {}
    for (m, n), (re, im) in p.items():
        if m < dxi or n < deta:
            continue
        f = 1
        for i in range(dxi):
            f *= m - i
        for i in range(deta):
            f *= n - i
        key = (m - dxi, n - deta)
        ore, oim = out.get(key, (Fraction(0), Fraction(0)))
        out[key] = (ore + re * f, oim + im * f)
    return out


def _poly_multiply(p, q):
    out = {}
    for (m1, n1), (a, b) in p.items():
        for (m2, n2), (c, d) in q.items():
            key = (m1 + m2, n1 + n2)
            ore, oim = out.get(key, (Fraction(0), Fraction(0)))
            out[key] = (ore + a * c - b * d, oim + a * d + b * c)
    return out


def _to_fraction_poly(coeffs):
    out = {}
    for key, c in coeffs.items():
        if isinstance(c, tuple):
            out[key] = (Fraction(c[0]), Fraction(c[1]))
        else:
            c = complex(c)
            out[key] = (Fraction(c.real), Fraction(c.imag))
    return out


def moyal_poly_exact(pa, pb):
    """Moyal product of two monomial dicts in exact rational arithmetic.

    Coefficients may be complex (converted exactly from their binary
    representation) or already (Fraction, Fraction) pairs, so products can
    be chained; the result maps (m, n) to such a pair. The bidifferential
    series terminates at the smaller total degree, so the result is
    literally exact and associativity can be asserted with ==.
    """
    fa = _to_fraction_poly(pa)
    fb = _to_fraction_poly(pb)
    dega = max((m + n for m, n in fa), default=0)
    degb = max((m + n for m, n in fb), default=0)
    out = {}
    for k in range(min(dega, degb) + 1):
        mag = Fraction(1, factorial(k) * 2 ** k)
        # (1/(2i))^k = (-i/2)^k cycles through the four axes
        axis = k % 4
        for j in range(k + 1):
            q = mag * comb(k, j) * (-1) ** j
            term = _poly_multiply(_poly_derivative(fa, j, k - j),
                                  _poly_derivative(fb, k - j, j))
            for key, (re, im) in term.items():
                if axis == 0:
                    dre, dim = q * re, q * im
                elif axis == 1:
                    dre, dim = q * im, -q * re
                elif axis == 2:
                    dre, dim = -q * re, -q * im
                else:
                    dre, dim = -q * im, q * re
                ore, oim = out.get(key, (Fraction(0), Fraction(0)))
                out[key] = (ore + dre, oim + dim)
    return {k: v for k, v in out.items() if v != (0, 0)}


def _moyal_fft(fa, fb, half_width, n):
    """Twisted convolution in Fourier variables on an n x n grid.

    b^ is sampled on a doubled grid with the same frequency step so that
    the shifted argument theta - S lands exactly on lattice points.
    """
    L = float(half_width)
    x = np.arange(n) * (2 * L / n) - L
    dx = x[1] - x[0]
    xb = np.arange(2 * n) * (2 * L / (2 * n)) - L
    dxb = xb[1] - xb[0]
    A = np.asarray(fa(x[:, None], x[None, :]), dtype=complex)
    B = np.asarray(fb(xb[:, None], xb[None, :]), dtype=complex)
    sx = np.fft.fftshift(2 * np.pi * np.fft.fftfreq(n, dx))
    Ah = np.fft.fftshift(np.fft.fft2(A)) * dx * dx
    Ah *= np.exp(-1j * sx[:, None] * x[0]) * np.exp(-1j * sx[None, :] * x[0])
    sxb = np.fft.fftshift(2 * np.pi * np.fft.fftfreq(2 * n, dxb))
    Bh = np.fft.fftshift(np.fft.fft2(B)) * dxb * dxb
    Bh *= np.exp(-1j * sxb[:, None] * xb[0]) \
        * np.exp(-1j * sxb[None, :] * xb[0])
    ds = sx[1] - sx[0]
    off = int(round(-sxb[0] / ds))            # index of frequency 0 in b^
    idx = np.arange(n)
    dmap = idx[:, None] - idx[None, :] + off  # b^ index of sx[p] - sx[r]
    W = sxb[dmap]                             # the shifted frequency values
    sgn = _MOYAL_TWIST_SIGN
    Ch = np.empty((n, n), dtype=complex)
    for p in range(n):
        Bsub = Bh[dmap[p]][:, dmap]                            # (r, q, s)
        T1 = np.exp(sgn * 0.5j * np.outer(W[p], sx))           # (r, s)
        T2 = np.exp(-sgn * 0.5j * sx[:, None, None] * W[None, :, :])
        Ch[p] = np.einsum("rs,rqs,rqs->q", Ah * T1, Bsub, T2, optimize=True)
    Ch *= (ds * ds) / (2 * np.pi) ** 2
    Chu = np.fft.ifftshift(Ch)
    sxu = np.fft.ifftshift(sx)
    Chu = Chu * np.exp(1j * sxu[:, None] * x[0]) \
        * np.exp(1j * sxu[None, :] * x[0])
    return x, np.fft.ifft2(Chu) / (dx * dx)


def moyal(a, b, backend="auto", half_width=16.0, n=96):
    """Moyal product a # b, so that op^w(a) op^w(b) = op^w(a # b).

    backend "polynomial" requires two polynomial symbols and is exact;
    "fft" requires two decaying symbols (general or table kind) and returns
    a table symbol on [-half_width, half_width)^2; "auto" picks by kind.
    The two backends are checked against each other on symbols that both
    can represent (Gaussians against the closed product formula, and
    operator composition in the Hermite basis).
    """
    pa = a.poly if isinstance(a, PhaseSymbol) else None
    pb = b.poly if isinstance(b, PhaseSymbol) else None
    if backend == "auto":
        backend = "polynomial" if (pa is not None and pb is not None) \
            else "fft"
    if backend == "polynomial":
        if pa is None or pb is None:
            raise TypeError("polynomial backend needs polynomial symbols")
        exact = moyal_poly_exact(pa, pb)
        out = {k: complex(float(re), float(im)) for k, (re, im)
               in exact.items()}
        order = None
        if a.order is not None and b.order is not None:
            order = a.order + b.order
        return PhaseSymbol.from_polynomial(out, order)
    if backend == "fft":
        for s in (a, b):
            if isinstance(s, PhaseSymbol) and s.kind not in ("general",
                                                             "table"):
                raise TypeError(f"fft backend cannot integrate a {s.kind} "
                                "symbol; it does not decay")
        x, table = _moyal_fft(a, b, half_width, n)
        order = None
        if getattr(a, "order", None) is not None \
                and getattr(b, "order", None) is not None:
            order = a.order + b.order
        return PhaseSymbol.from_table(x, x, table, order)
    raise ValueError(f"unknown backend {backend!r}")


@dataclass(frozen=True, eq=False)
class SpectralProfileR:
    """A spectral profile R(y), applied to the oscillator at y = 2n + d.

    order is the growth exponent mu in the symbol estimates
    |R^(k)(y)| <~ (1 + |y|)^{mu/2 - k}; it is carried along for the
    symbol classes and checkable through symbol_estimate_sup, but not
    enforced at construction.
    """
    func: object
    order: float = 0.0

    def __call__(self, y):
        return self.func(np.asarray(y, dtype=float))

    def symbol_estimate_sup(self, k_max=2, y_range=(-20.0, 350.0),
                            n_pts=4001):
        """Sup over sampled y of (1+|y|)^{k - mu/2} |R^(k)(y)|, k <= k_max,
        with finite-difference derivatives: bounded for profiles that obey
        the symbol estimates of their declared order, growing with the
        range when they do not."""
        y = np.linspace(y_range[0], y_range[1], n_pts)
        T = np.asarray(self(y), dtype=complex)
        best = 0.0
        for k in range(k_max + 1):
            if k:
                T = np.gradient(T, y, edge_order=2)
            w = (1.0 + np.abs(y)) ** (k - self.order / 2.0)
            best = max(best, float((w * np.abs(T)).max()))
        return best


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """The radial symbol profile r(x), so the full symbol is r(xi^2+eta^2).

    x and values hold the positive part used for symbols and reports;
    x_full and values_full keep the whole uniform grid (including x < 0,
    where the branch series puts genuine mass) because the eigenvalue
    functional needs the Fourier transform of r over the full line.
    shell_peaks records max|r_k| per branch index, tail_bound a geometric
    estimate of the dropped branches.
    """
    x: np.ndarray
    values: np.ndarray
    x_full: np.ndarray = field(repr=False)
    values_full: np.ndarray = field(repr=False)
    shell_peaks: tuple = ()
    tail_bound: float = 0.0
    d: int = 1
    source: SpectralProfileR | None = None
    _cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_samples(cls, x, values, d=1, x_max=None):
        """Wrap r sampled on a uniform grid (ideally spanning x < 0 too,
        since the eigenvalue route transforms over the whole grid)."""
        x = np.asarray(x, float)
        values = np.asarray(values, complex)
        pos = x > 0
        if x_max is not None:
            pos &= x <= x_max
        return cls(x=x[pos], values=values[pos], x_full=x,
                   values_full=values, d=d)

    def __call__(self, x):
        """Spline evaluation; queries are clipped to the stored grid."""
        if "spline" not in self._cache:
            self._cache["spline"] = (
                CubicSpline(self.x_full, self.values_full.real),
                CubicSpline(self.x_full, self.values_full.imag))
        sr, si = self._cache["spline"]
        xq = np.clip(np.asarray(x, float), self.x_full[0], self.x_full[-1])
        out = sr(xq) + 1j * si(xq)
        return out if np.shape(x) else complex(out)

    def symbol(self):
        """The phase-plane symbol a(xi, eta) = r(xi^2 + eta^2)."""
        order = self.source.order if self.source is not None else None
        return PhaseSymbol.from_function(
            lambda xi, eta: self(np.asarray(xi) ** 2 + np.asarray(eta) ** 2),
            order=order)

    def to_csv(self, path):
        """Dump the positive part as CSV with columns x, re, im."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "re", "im"])
            for xv, rv in zip(self.x, self.values):
                w.writerow([repr(float(xv)), repr(float(rv.real)),
                            repr(float(rv.imag))])


def mehler_symbol(R, d=1, k_max=8, k_cap=24, shell_tol=1e-12,
                  y_half=400.0, n_y=2 ** 16, pad=4, y_tail_tol=1e-6,
                  u_half=2000.0, n_u=2 ** 20, taper=(0.5, 0.98),
                  x_max=150.0):
    """Weyl symbol profile r of the operator R(xi^2 - d^2/dxi^2).

    R^ is computed by a zero-padded FFT on [-y_half, y_half] and splined;
    R must have decayed there (relative y_tail_tol at the edge, else the
    transform is unresolved and a ValueError is raised; profiles growing
    to the left, like e^{-ty}, need a smooth cutoff below the spectrum).
    Each branch r_k is then a tapered FFT of R^(k pi + arctan u)
    (1+u^2)^{d/2-1} over u in [-u_half, u_half]. Branches are added for
    |k| <= k_max and extended in steps of 4 (up to k_cap) while the last
    branch still exceeds shell_tol relative to the running sum; the
    geometric tail of the dropped branches is reported as tail_bound.

    The taper suppresses the slowly decaying 1/|u| part of the integrand.
    For profiles with a sizable R^ at odd multiples of pi/2 this biases
    r near x = 0 at the 1e-3 level and shows up as a matching plateau in
    reconstructed eigenvalues; widening u_half pushes it down. Profiles
    whose R^ is negligible there are reproduced to 1e-6 or better.
    """
    Rfun = R if callable(R) else None
    if Rfun is None:
        raise TypeError("R must be callable (a SpectralProfileR works)")
    source = R if isinstance(R, SpectralProfileR) else SpectralProfileR(R)

    yv = np.linspace(-y_half, y_half, n_y, endpoint=False)
    dy = yv[1] - yv[0]
    Rv = np.asarray(source(yv), dtype=complex)
    rmax = np.abs(Rv).max()
    redge = max(abs(Rv[0]), abs(Rv[-1]))
    if rmax > 0 and redge > y_tail_tol * rmax:
        raise ValueError(
            f"spectral profile has not decayed at y = +-{y_half} "
            f"({redge / rmax:.2e} of its peak, tol {y_tail_tol}); its "
            "transform is unresolved, enlarge y_half or cut off R")
    nfull = pad * n_y
    tau = 2 * np.pi * np.fft.fftfreq(nfull, dy)
    Rh = np.fft.fft(Rv, n=nfull) * dy * np.exp(-1j * tau * yv[0])
    tau_s = np.fft.fftshift(tau)
    Rh_s = np.fft.fftshift(Rh)
    spl_r = CubicSpline(tau_s, Rh_s.real)
    spl_i = CubicSpline(tau_s, Rh_s.imag)

    u = np.linspace(-u_half, u_half, n_u, endpoint=False)
    du = u[1] - u[0]
    at = np.arctan(u)
    wgt = (1 + u * u) ** (d / 2.0 - 1.0)
    tp = 1.0 - smooth_step(np.abs(u), taper[0] * u_half, taper[1] * u_half)
    base = wgt * tp
    phase = np.exp(1j * np.fft.fftfreq(n_u, du) * 2 * np.pi * u[0])
    xs = np.fft.fftshift(2 * np.pi * np.fft.fftfreq(n_u, du))

    total = np.zeros(n_u, dtype=complex)
    peaks = {}

    def add_branch(k):
        g = (spl_r(k * np.pi + at) + 1j * spl_i(k * np.pi + at)) * base
        # int e^{ixu} g du = conj(FT[conj g]) on the fft frequency grid
        G = np.conj(np.fft.fft(np.conj(g))) * du * phase
        rk = np.fft.fftshift(G) / (2 * np.pi) * (-1) ** (k * d)
        peaks[abs(k)] = max(peaks.get(abs(k), 0.0), float(np.abs(rk).max()))
        return rk

    K = 0
    total += add_branch(0)
    target = k_max
    while True:
        for k in range(K + 1, target + 1):
            total += add_branch(k)
            total += add_branch(-k)
        K = target
        scale = float(np.abs(total).max())
        if scale == 0.0 or peaks[K] <= shell_tol * scale or K >= k_cap:
            break
        target = min(K + 4, k_cap)
    scale = float(np.abs(total).max())
    if scale > 0.0 and peaks[K] > shell_tol * scale and K >= k_cap:
        warnings.warn("branch series not converged at k_cap; "
                      "tail_bound is only an extrapolation")
    if max(peaks.values()) == 0.0:
        tail = 0.0
    else:
        ratio = peaks[K] / peaks[K - 1] if K >= 1 and peaks[K - 1] > 0 \
            else 0.5
        ratio = min(max(ratio, 1e-6), 0.9)
        tail = peaks[K] * ratio / (1.0 - ratio)

    pos = (xs > 0) & (xs <= x_max)
    return RadialProfile(x=xs[pos], values=total[pos], x_full=xs,
                         values_full=total,
                         shell_peaks=tuple(peaks[k] for k in range(K + 1)),
                         tail_bound=tail, d=d, source=source)


def oscillator_functional(profile, n, d=1, tail_tol=1e-6):
    """Eigenvalues E_n of R(xi^2 - d^2/dxi^2) on the oscillator ladder.

    Given the spectral profile R itself this is exact evaluation at the
    spectrum, E_n = R(2n + d). Given a RadialProfile r it runs the tau
    integral E_n = (2 pi)^{-1} int r^(tau) e^{i(2n+d) arctan tau}
    (1+tau^2)^{-d/2} dtau over the profile's full grid; if the transform
    has not decayed at the grid edge (relative tail above tail_tol) the
    truncation is unsound and a RuntimeError is raised.
    """
    narr = np.atleast_1d(np.asarray(n))
    if np.any(narr < 0) or not np.issubdtype(narr.dtype, np.integer):
        raise ValueError("n must be nonnegative integers")
    if isinstance(profile, RadialProfile):
        d = profile.d
        xg = profile.x_full
        dx = xg[1] - xg[0]
        rv = profile.values_full
        tau = 2 * np.pi * np.fft.fftfreq(xg.size, dx)
        rhat = np.fft.fft(rv) * dx * np.exp(-1j * tau * xg[0])
        tau_s = np.fft.fftshift(tau)
        rhat_s = np.fft.fftshift(rhat)
        nedge = max(4, xg.size // 100)
        edge = max(np.abs(rhat_s[:nedge]).max(),
                   np.abs(rhat_s[-nedge:]).max())
        scale = np.abs(rhat_s).max()
        if scale > 0 and edge > tail_tol * scale:
            raise RuntimeError(
                f"tau integral truncated before r^ decays (edge/peak "
                f"{edge / scale:.2e}, tol {tail_tol}); the profile grid "
                "is too coarse or too short for this spectral profile")
        at = np.arctan(tau_s)
        wgt = (1 + tau_s ** 2) ** (-d / 2.0)
        dtau = tau_s[1] - tau_s[0]
        out = np.array([
            np.sum(rhat_s * np.exp(1j * (2 * int(nv) + d) * at) * wgt)
            * dtau / (2 * np.pi) for nv in narr])
        return out if np.ndim(n) else complex(out[0])
    if callable(profile):
        vals = np.asarray(profile(2 * narr + d))
        return vals if np.ndim(n) else complex(vals[0])
    raise TypeError("profile must be a RadialProfile or a spectral profile")


def _windowed_power_profile(mu, shifted, spectral_window):
    lo, hi = spectral_window
    if shifted:
        def R(y):
            y = np.asarray(y, dtype=float)
            core = 2.0 ** mu * (1.0 + np.clip(y, -0.85, None)) ** (mu / 2.0)
            return (core * smooth_step(y, -0.8, 0.9)
                    * (1.0 - smooth_step(y, lo, hi)))
    else:
        def R(y):
            y = np.asarray(y, dtype=float)
            core = 2.0 ** mu * np.clip(y, 0.0, None) ** (mu / 2.0)
            return (core * smooth_step(y, 0.1, 0.9)
                    * (1.0 - smooth_step(y, lo, hi)))
    return SpectralProfileR(R, order=float(mu))


def make_m_mu(mu, d=1, k_max=16, spectral_window=(120.0, 260.0), **opts):
    """Radial profile of the weight m^mu, m^2 = 4(1 + xi^2 + eta^2) + ...

    Realized through the spectral profile R(y) = 2^mu (1 + y)^{mu/2}, which
    takes the value (2(1 + 2n + d))^{mu/2} on the oscillator spectrum; a
    smooth window cuts R below y = -0.8 (keeping the branch integrals
    finite for mu < 0) and above the spectral_window, so the profile
    represents the weight on the finitely many levels below the window.
    For mu = 2 the symbol is exactly 4(1 + xi^2 + eta^2) there.

    The branch cutoff is relative 1e-5 rather than the tighter default:
    these wide windows have O(1) transform mass at odd multiples of pi/2,
    so the taper bias (about 1e-4 here) dominates long before a branch
    tail at that level could matter; the branches only decay by about
    0.7 per index here, so chasing 1e-12 would triple the work for
    nothing.
    """
    opts.setdefault("shell_tol", 1e-5)
    opts.setdefault("k_cap", 32)
    prof = _windowed_power_profile(float(mu), True, spectral_window)
    return mehler_symbol(prof, d=d, k_max=k_max, **opts)


def make_m_tilde_mu(mu, d=1, k_max=16, spectral_window=(120.0, 260.0),
                    **opts):
    """Homogeneous variant, R(y) = 2^mu y^{mu/2} cut smoothly near y = 0.

    Takes the value 2^mu (2n + d)^{mu/2} on the spectrum above the cut.
    Negative mu is refused: the homogeneous power is singular at y = 0 and
    the low cut would dominate the profile rather than regularize it.
    """
    if mu < 0:
        raise ValueError("homogeneous weight needs mu >= 0")
    opts.setdefault("shell_tol", 1e-5)
    opts.setdefault("k_cap", 32)
    prof = _windowed_power_profile(float(mu), False, spectral_window)
    return mehler_symbol(prof, d=d, k_max=k_max, **opts)


def symbol_seminorm(a, n_derivs, mu, half_width=12.0, n_pts=481):
    """Weighted sup seminorm sup_{|b| <= n} L^{(|b|-mu)/2} |d^b a| with
    L = 1 + xi^2 + eta^2, estimated on a square grid by finite differences.

    The sup runs over the grid minus a small margin (one-sided stencils at
    the edge are unreliable). If it is attained in the outer tenth of the
    box the reported value is probably still growing; that is reported as
    a warning, not an error, since for symbols of order mu the seminorm is
    finite but the approach can be slow.
    """
    g = np.linspace(-half_width, half_width, n_pts)
    f = a if callable(a) else None
    if f is None:
        raise TypeError("a must be callable (a PhaseSymbol works)")
    A = np.asarray(f(g[:, None], g[None, :]), dtype=complex)
    lam = 1.0 + g[:, None] ** 2 + g[None, :] ** 2
    tables = {(0, 0): A}
    for total in range(1, n_derivs + 1):
        for b1 in range(total + 1):
            b2 = total - b1
            if b1 > 0:
                tables[(b1, b2)] = np.gradient(tables[(b1 - 1, b2)], g,
                                               axis=0, edge_order=2)
            else:
                tables[(b1, b2)] = np.gradient(tables[(b1, b2 - 1)], g,
                                               axis=1, edge_order=2)
    m = 2 * n_derivs + 2
    sl = slice(m, n_pts - m)
    gs = g[sl]
    inner = np.abs(gs) <= 0.5 * half_width
    best = 0.0
    best_inner = 0.0
    best_pos = (0.0, 0.0)
    for (b1, b2), T in tables.items():
        W = (lam ** ((b1 + b2 - mu) / 2.0) * np.abs(T))[sl, sl]
        i, j = np.unravel_index(int(np.argmax(W)), W.shape)
        if W[i, j] > best:
            best = float(W[i, j])
            best_pos = (gs[i], gs[j])
        best_inner = max(best_inner, float(W[np.ix_(inner, inner)].max()))
    # only flag a sup that is both near the edge and still above anything
    # seen well inside the box; a flat weighted symbol attains it anywhere
    if max(abs(best_pos[0]), abs(best_pos[1])) > 0.9 * half_width \
            and best > best_inner * (1.0 + 1e-9):
        warnings.warn(
            f"seminorm sup attained near the box edge at {best_pos}; "
            "enlarge half_width to confirm it has saturated")
    return best
