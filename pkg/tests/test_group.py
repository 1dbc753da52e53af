"""Group layer: law, dilations, Haar integration, invariant fields."""
import numpy as np

from hgcalc.group import (GridFunction, apply_vector_field, convolve,
                          dilate, group_inv, group_mul, haar_integral,
                          heisenberg_distance, homogeneous_norm, identity,
                          inner_l2, kohn_laplacian, norm_l2, simpson_weights,
                          sobolev_norm_int)

RNG = np.random.default_rng(101)


def test_group_law_axioms():
    w = RNG.uniform(-3, 3, (1000, 3))
    v = RNG.uniform(-3, 3, (1000, 3))
    u = RNG.uniform(-3, 3, (1000, 3))
    lhs = group_mul(group_mul(w, v), u)
    rhs = group_mul(w, group_mul(v, u))
    assert np.max(np.abs(lhs - rhs)) <= 1e-12
    e = identity()
    assert np.max(np.abs(group_mul(w, e) - w)) == 0.0
    assert np.max(np.abs(group_mul(e, w) - w)) == 0.0
    assert np.max(np.abs(group_mul(w, group_inv(w)))) == 0.0


def test_inverse_is_negation():
    w = RNG.uniform(-2, 2, (50, 3))
    assert np.array_equal(group_inv(w), -w)


def test_dilation_automorphism_and_norm_homogeneity():
    for a in (0.5, 2.0, 3.7):
        w = RNG.uniform(-2, 2, (200, 3))
        v = RNG.uniform(-2, 2, (200, 3))
        left = dilate(a, group_mul(w, v))
        right = group_mul(dilate(a, w), dilate(a, v))
        assert np.max(np.abs(left - right)) <= 1e-12
        err = homogeneous_norm(dilate(a, w)) - a * homogeneous_norm(w)
        assert np.max(np.abs(err)) <= 1e-12


def test_distance_left_invariant_and_symmetric():
    w = RNG.uniform(-2, 2, (100, 3))
    v = RNG.uniform(-2, 2, (100, 3))
    u = RNG.uniform(-2, 2, 3)
    d1 = heisenberg_distance(w, v)
    d2 = heisenberg_distance(group_mul(u, w), group_mul(u, v))
    assert np.max(np.abs(d1 - d2)) <= 1e-10
    # rho(w^{-1}) = rho(w), so d is symmetric
    assert np.max(np.abs(d1 - heisenberg_distance(v, w))) <= 1e-12


def test_simpson_weights_polynomial_exact():
    # cubic is integrated exactly by both the pure-Simpson (odd count) and
    # the 3/8-patched (even count) rules
    for n in (9, 64, 65, 10, 4):
        t = np.linspace(0.0, 2.0, n)
        wts = simpson_weights(n, t[1] - t[0])
        val = float(wts @ (t ** 3 - 2 * t))
        assert abs(val - (4.0 - 4.0)) <= 1e-13


def test_haar_integral_gaussian():
    f = GridFunction.from_callable(
        lambda x, y, s: np.exp(-(x * x + y * y + s * s)),
        half_widths=(8.0, 8.0, 8.0), n=65)
    exact = np.pi ** 1.5
    assert abs(haar_integral(f) - exact) / exact <= 1e-6


def test_haar_left_invariance():
    # integral of f(w0 . w) dw equals integral of f; w0 small so that the
    # translated Gaussian still lives well inside the box
    w0 = np.array([0.3, -0.2, 0.4])

    def f(x, y, s):
        return np.exp(-2.0 * (x * x + y * y + s * s))

    g = GridFunction.from_callable(f, (8.0, 8.0, 8.0), 65)

    def f_translated(x, y, s):
        pts = np.stack(np.broadcast_arrays(x, y, s), axis=-1)
        tw = group_mul(w0, pts.reshape(-1, 3)).reshape(pts.shape)
        return f(tw[..., 0], tw[..., 1], tw[..., 2])

    gt = GridFunction.from_callable(f_translated, (8.0, 8.0, 8.0), 65)
    ia, ib = haar_integral(g), haar_integral(gt)
    assert abs(ia - ib) / abs(ia) <= 1e-6


def test_vector_field_closed_forms():
    f = GridFunction.from_callable(lambda x, y, s: s + 0.0 * x,
                                   (4.0, 4.0, 4.0), 33)
    X, Y, S = (apply_vector_field(n, f) for n in ("X", "Y", "S"))
    xg, yg = np.meshgrid(f.xg, f.yg, indexing="ij")
    two_y = np.broadcast_to(2.0 * yg[:, :, None], f.values.shape)
    m = f.interior_mask(2)
    assert np.max(np.abs((X.values - two_y)[m])) <= 1e-10
    assert np.max(np.abs((Y.values + 2.0 * np.broadcast_to(
        xg[:, :, None], f.values.shape))[m])) <= 1e-10
    assert np.max(np.abs((S.values - 1.0)[m])) <= 1e-10


def test_complex_fields_combine_to_real_ones():
    f = GridFunction.from_callable(
        lambda x, y, s: np.exp(-(x * x + y * y + s * s)) * (1 + x * y),
        (5.0, 5.0, 5.0), 41)
    Z = apply_vector_field("Z", f)
    Zb = apply_vector_field("Zbar", f)
    X = apply_vector_field("X", f)
    Y = apply_vector_field("Y", f)
    m = f.interior_mask(2)
    assert np.max(np.abs((Z.values + Zb.values - X.values)[m])) <= 1e-10
    assert np.max(np.abs((1j * (Z.values - Zb.values) - Y.values)[m])) <= 1e-10


def test_kohn_laplacian_polynomial_values():
    # X^2 + Y^2 applied to x^2 + y^2 gives 4; applied to s gives 0
    f = GridFunction.from_callable(lambda x, y, s: x * x + y * y + 0.0 * s,
                                   (3.0, 3.0, 3.0), 25)
    g = GridFunction.from_callable(lambda x, y, s: s + 0.0 * x,
                                   (3.0, 3.0, 3.0), 25)
    m = f.interior_mask(4)
    assert np.max(np.abs(kohn_laplacian(f).values[m] - 4.0)) <= 1e-8
    assert np.max(np.abs(kohn_laplacian(g).values[m])) <= 1e-8


def test_convolution_bilinear():
    grids = dict(half_widths=(2.0, 2.0, 2.0), n=13)
    f = GridFunction.from_callable(
        lambda x, y, s: np.exp(-3 * (x * x + y * y + s * s)), **grids)
    g1 = GridFunction.from_callable(
        lambda x, y, s: np.exp(-4 * (x * x + y * y + s * s)) * x, **grids)
    g2 = GridFunction.from_callable(
        lambda x, y, s: np.exp(-4 * (x * x + y * y + s * s)) * (y + s), **grids)
    both = convolve(f, g1.with_values(2.0 * g1.values + g2.values))
    sep = 2.0 * convolve(f, g1).values + convolve(f, g2).values
    scale = max(np.max(np.abs(sep)), 1e-30)
    assert np.max(np.abs(both.values - sep)) / scale <= 1e-12


def test_l2_inner_and_sobolev():
    f = GridFunction.from_callable(
        lambda x, y, s: np.exp(-(x * x + y * y + s * s)),
        (6.0, 6.0, 6.0), 49)
    n2 = norm_l2(f)
    assert abs(n2 ** 2 - inner_l2(f, f).real) <= 1e-12 * n2 ** 2
    s0 = sobolev_norm_int(f, 0)
    s1 = sobolev_norm_int(f, 1)
    s2 = sobolev_norm_int(f, 2)
    assert abs(s0 - n2) <= 1e-12 * n2
    assert s0 < s1 < s2
