"""Heisenberg group layer: points, the twisted product, grid functions on a
box, Haar quadrature, group convolution, and the left-invariant vector fields.

Points w = (x, y, s) in R^{2d+1} are plain float arrays with the coordinate
layout (x_1..x_d, y_1..y_d, s) along the last axis; the complex view
z = x + iy is derived, never stored. Most of the package runs at d = 1 where
a point is just (x, y, s).
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import ndimage

from hgcalc import backend


# ---------------------------------------------------------------------------
# point algebra


def split_coords(w, d=1):
    """Return (x, y, s) views of a point array w of shape (..., 2d+1)."""
    w = np.asarray(w, dtype=np.float64)
    return w[..., :d], w[..., d:2 * d], w[..., 2 * d]


def zcoord(w, d=1):
    """Complex coordinates z = x + iy (derived accessor)."""
    x, y, _ = split_coords(w, d)
    return x + 1j * y


def group_mul(w, w2, d=1):
    """Product w . w2 = (x+x', y+y', s+s' - 2x.y' + 2y.x')."""
    x, y, s = split_coords(w, d)
    x2, y2, s2 = split_coords(w2, d)
    out = np.empty(np.broadcast(np.asarray(w), np.asarray(w2)).shape,
                   dtype=np.float64)
    out[..., :d] = x + x2
    out[..., d:2 * d] = y + y2
    out[..., 2 * d] = s + s2 - 2.0 * np.sum(x * y2, axis=-1) \
        + 2.0 * np.sum(y * x2, axis=-1)
    return out


def group_inv(w, d=1):
    """Inverse w^{-1} = (-x, -y, -s)."""
    return -np.asarray(w, dtype=np.float64)


def identity(d=1):
    return np.zeros(2 * d + 1)


def dilate(a, w, d=1):
    """Anisotropic dilation delta_a(z, s) = (a z, a^2 s)."""
    w = np.asarray(w, dtype=np.float64)
    out = a * w.copy()
    out[..., 2 * d] = a * a * w[..., 2 * d]
    return out


def homogeneous_norm(w, d=1):
    """rho(z, s) = (|z|^4 + s^2)^{1/4}, homogeneous of degree 1 under dilate."""
    x, y, s = split_coords(w, d)
    z2 = np.sum(x * x + y * y, axis=-1)
    return (z2 * z2 + s * s) ** 0.25


def heisenberg_distance(w, w2, d=1):
    """Left-invariant quasi-distance d(w, w') = rho(w^{-1} . w')."""
    return homogeneous_norm(group_mul(group_inv(w, d), w2, d), d)


# ---------------------------------------------------------------------------
# quadrature weights and FD operators


def simpson_weights(n, h):
    """Composite Simpson weights for n uniformly spaced points.

    For an even point count the last three intervals use the 3/8 rule so the
    scheme stays 4th order throughout (the spec grid of 64 points per axis has
    an odd interval count).
    """
    if n < 2:
        raise ValueError("need at least 2 points")
    w = np.zeros(n)
    if n == 2:
        return np.array([0.5, 0.5]) * h
    if n % 2 == 1:
        w[0] = w[-1] = 1.0
        w[1:-1:2] = 4.0
        w[2:-2:2] = 2.0
        return w * (h / 3.0)
    if n == 4:
        return np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    # Simpson on points 0..n-4, then 3/8 on the last four points
    m = n - 3
    w[0] = w[m - 1] = 1.0
    w[1:m - 1:2] = 4.0
    w[2:m - 2:2] = 2.0
    w *= h / 3.0
    w[m - 1:] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    return w


@lru_cache(maxsize=32)
def _diff_matrix(n, h):
    """Dense 4th-order differentiation matrix with one-sided edge stencils."""
    D = np.zeros((n, n))
    c = 1.0 / (12.0 * h)
    for i in range(2, n - 2):
        D[i, i - 2:i + 3] = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) * c
    D[0, :5] = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) * c
    D[1, :5] = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) * c
    # right edge: reversed and negated left stencils
    D[n - 2, -5:] = -np.array([-3.0, -10.0, 18.0, -6.0, 1.0])[::-1] * c
    D[n - 1, -5:] = -np.array([-25.0, 48.0, -36.0, 16.0, -3.0])[::-1] * c
    return D


def _ddx(vals, h, axis):
    D = _diff_matrix(vals.shape[axis], h)
    return np.moveaxis(np.tensordot(D, np.moveaxis(vals, axis, 0), axes=1),
                       0, axis)


# ---------------------------------------------------------------------------
# grid functions


@dataclass(frozen=True)
class GridFunction:
    """Complex samples on a uniform tensor grid over a centered box (d = 1).

    values has shape (nx, ny, ns) over the axes (x, y, s). `boundary` flags
    cells contaminated by one-sided FD stencils; it is None for clean data.
    """
    xg: np.ndarray
    yg: np.ndarray
    sg: np.ndarray
    values: np.ndarray
    boundary: np.ndarray | None = field(default=None, compare=False)

    @classmethod
    def from_callable(cls, func, half_widths=(6.0, 6.0, 6.0), n=64):
        if np.isscalar(n):
            n = (n, n, n)
        xg = np.linspace(-half_widths[0], half_widths[0], n[0])
        yg = np.linspace(-half_widths[1], half_widths[1], n[1])
        sg = np.linspace(-half_widths[2], half_widths[2], n[2])
        X, Y, S = np.meshgrid(xg, yg, sg, indexing="ij")
        return cls(xg, yg, sg, np.asarray(func(X, Y, S), dtype=np.complex128))

    @property
    def d(self):
        return 1

    @property
    def half_widths(self):
        return (abs(self.xg[0]), abs(self.yg[0]), abs(self.sg[0]))

    @property
    def points_per_axis(self):
        return self.values.shape

    @property
    def steps(self):
        return (self.xg[1] - self.xg[0], self.yg[1] - self.yg[0],
                self.sg[1] - self.sg[0])

    def axis_weights(self):
        hx, hy, hs = self.steps
        return (simpson_weights(len(self.xg), hx),
                simpson_weights(len(self.yg), hy),
                simpson_weights(len(self.sg), hs))

    def with_values(self, vals, boundary=None):
        return GridFunction(self.xg, self.yg, self.sg,
                            np.asarray(vals, dtype=np.complex128), boundary)

    def interior_mask(self, cells=2):
        """True on cells at least `cells` layers away from every box face."""
        mask = np.ones(self.values.shape, dtype=bool)
        for ax in range(3):
            sl = [slice(None)] * 3
            sl[ax] = slice(0, cells)
            mask[tuple(sl)] = False
            sl[ax] = slice(-cells, None)
            mask[tuple(sl)] = False
        return mask

    def same_grid(self, other):
        return (self.values.shape == other.values.shape
                and np.array_equal(self.xg, other.xg)
                and np.array_equal(self.yg, other.yg)
                and np.array_equal(self.sg, other.sg))


def haar_integral(f: GridFunction):
    """int f(w) dw over the box; Haar measure is Lebesgue measure."""
    wx, wy, ws = f.axis_weights()
    return np.einsum("i,j,k,ijk->", wx, wy, ws, f.values)


def norm_l2(f: GridFunction):
    wx, wy, ws = f.axis_weights()
    return float(np.sqrt(np.einsum("i,j,k,ijk->", wx, wy, ws,
                                   np.abs(f.values) ** 2).real))


def inner_l2(f: GridFunction, g: GridFunction):
    """<f, g> = int conj(f) g dw."""
    wx, wy, ws = f.axis_weights()
    return complex(np.einsum("i,j,k,ijk->", wx, wy, ws,
                             np.conj(f.values) * g.values))


def convolve(f: GridFunction, g: GridFunction, stride=1):
    """Group convolution f*g(w) = int f(w . v^{-1}) g(v) dv.

    Direct quadrature over the grid of g, with f interpolated trilinearly at
    the twisted shifts w . v^{-1} (the group law couples s with x, y, so a
    plain FFT convolution does not apply in s). With stride > 1 the output is
    evaluated on the decimated sub-lattice only.
    """
    if not f.same_grid(g):
        raise ValueError("convolve needs matching grids")
    xo, yo, so = f.xg[::stride], f.yg[::stride], f.sg[::stride]
    X, Y, S = np.meshgrid(xo, yo, so, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel(), S.ravel()], axis=1)
    wx, wy, ws = f.axis_weights()
    out = backend.twisted_convolve(f.values, g.values, f.xg, f.yg, f.sg,
                                   wx, wy, ws, pts)
    return GridFunction(xo, yo, so, out.reshape(len(xo), len(yo), len(so)))


_FIELDS = ("X", "Y", "S", "Z", "Zbar")


def apply_vector_field(field_name, f: GridFunction):
    """Left-invariant field applied by 4th-order finite differences.

    X = d_x + 2y d_s, Y = d_y - 2x d_s, S = d_s,
    Z = (d_x - i d_y)/2 + (ix + y) d_s, Zbar = (d_x + i d_y)/2 + (y - ix) d_s.
    Cells within two cells of the box boundary are flagged in the output.
    """
    if field_name not in _FIELDS:
        raise ValueError(f"unknown field {field_name!r}; use one of {_FIELDS}")
    hx, hy, hs = f.steps
    v = f.values
    x = f.xg[:, None, None]
    y = f.yg[None, :, None]
    if field_name == "S":
        out = _ddx(v, hs, 2)
    else:
        ds = _ddx(v, hs, 2)
        if field_name == "X":
            out = _ddx(v, hx, 0) + 2.0 * y * ds
        elif field_name == "Y":
            out = _ddx(v, hy, 1) - 2.0 * x * ds
        elif field_name == "Z":
            out = 0.5 * (_ddx(v, hx, 0) - 1j * _ddx(v, hy, 1)) \
                + (1j * x + y) * ds
        else:  # Zbar
            out = 0.5 * (_ddx(v, hx, 0) + 1j * _ddx(v, hy, 1)) \
                + (y - 1j * x) * ds
    mask = ~f.interior_mask(2)
    if f.boundary is not None:
        # repeated application spreads one-sided contamination 2 more cells
        mask |= ndimage.binary_dilation(f.boundary, iterations=2)
    return f.with_values(out, boundary=mask)


def kohn_laplacian(f: GridFunction):
    """The sub-Laplacian X^2 + Y^2 (d = 1), by repeated FD application."""
    xf = apply_vector_field("X", apply_vector_field("X", f))
    yf = apply_vector_field("Y", apply_vector_field("Y", f))
    return f.with_values(xf.values + yf.values, boundary=xf.boundary)


def sobolev_norm_int(f: GridFunction, k):
    """Integer Sobolev norm (sum over words in {X, Y} of length <= k)."""
    if k < 0:
        raise ValueError("k must be a nonnegative integer")
    total = norm_l2(f) ** 2
    layer = [f]
    for _ in range(k):
        nxt = []
        for g in layer:
            for name in ("X", "Y"):
                h = apply_vector_field(name, g)
                total += norm_l2(h) ** 2
                nxt.append(h)
        layer = nxt
    return float(np.sqrt(total))
