import numpy as np
import pytest

import oracles
from mcpdeblur.core import KernelLargerThanImage, ShapeMismatch
from mcpdeblur import transforms as tr


def test_dft_roundtrip(rng):
    for shape in ((16, 16), (17, 23), (32, 8)):
        x = rng.standard_normal(shape)
        assert np.max(np.abs(tr.idft2(tr.dft2(x)) - x)) < 1e-12


def test_dft_parseval(rng):
    x = rng.standard_normal((24, 24))
    energy_space = np.sum(x ** 2)
    energy_freq = np.sum(np.abs(tr.dft2(x)) ** 2) / x.size
    assert abs(energy_space - energy_freq) < 1e-9 * energy_space


def test_dft_delta_and_constant():
    delta = np.zeros((8, 8))
    delta[0, 0] = 1.0
    assert np.max(np.abs(tr.dft2(delta) - 1.0)) < 1e-14
    const = np.full((8, 8), 0.25)
    spec = tr.dft2(const)
    assert abs(spec[0, 0] - 0.25 * 64) < 1e-12
    spec[0, 0] = 0.0
    assert np.max(np.abs(spec)) < 1e-12


def test_gradient_small_example():
    x = np.array([[1.0, 2.0], [3.0, 4.0]])
    g = tr.gradient(x)
    assert np.array_equal(g[0], np.array([[1.0, -1.0], [1.0, -1.0]]))
    assert np.array_equal(g[1], np.array([[2.0, 2.0], [-2.0, -2.0]]))


def test_gradient_of_constant_is_zero():
    assert np.max(np.abs(tr.gradient(np.full((9, 7), 3.3)))) == 0.0


def test_gradient_divergence_adjoint(rng):
    for _ in range(20):
        x = rng.standard_normal((13, 17))
        g = rng.standard_normal((2, 13, 17))
        lhs = np.sum(tr.gradient(x) * g)
        rhs = -np.sum(x * tr.divergence(g))
        assert abs(lhs - rhs) < 1e-10
    with pytest.raises(ShapeMismatch):
        tr.divergence(rng.standard_normal((13, 17)))


def test_gradient_matches_roll_oracle(rng):
    x = rng.standard_normal((11, 19))
    g = tr.gradient(x)
    assert np.array_equal(g[0], oracles.grad_h(x))
    assert np.array_equal(g[1], oracles.grad_v(x))


def test_framelet_filter_sums():
    filters = tr.framelet_filters()
    assert len(filters) == 9
    assert abs(filters[0].sum() - 1.0) < 1e-15
    for f in filters[1:]:
        assert abs(f.sum()) < 1e-15


def test_framelet_tight_frame(rng):
    for shape in ((16, 16), (15, 21), (32, 17)):
        x = rng.standard_normal(shape)
        back = tr.framelet_synthesis(tr.framelet_analysis(x))
        assert np.max(np.abs(back - x)) < 1e-12


def test_framelet_matches_roll_oracle(rng):
    x = rng.standard_normal((12, 14))
    coeffs = tr.framelet_analysis(x)
    assert np.max(np.abs(coeffs - oracles.frame_analysis(x))) < 1e-13
    c = rng.standard_normal((9, 12, 14))
    assert np.max(np.abs(tr.framelet_synthesis(c)
                         - oracles.frame_synthesis(c))) < 1e-13


def test_framelet_analysis_synthesis_adjoint(rng):
    x = rng.standard_normal((10, 13))
    c = rng.standard_normal((9, 10, 13))
    lhs = np.sum(tr.framelet_analysis(x) * c)
    rhs = np.sum(x * tr.framelet_synthesis(c))
    assert abs(lhs - rhs) < 1e-10


def test_framelet_constant_image():
    c = np.full((16, 16), 0.37)
    coeffs = tr.framelet_analysis(c)
    assert np.max(np.abs(coeffs[0] - 0.37)) < 1e-14
    assert np.max(np.abs(coeffs[1:])) < 1e-14


def test_framelet_symbol_identity():
    for shape in ((16, 16), (17, 23)):
        syms = tr.framelet_symbols(shape)
        total = np.sum(np.abs(syms) ** 2, axis=0)
        assert np.max(np.abs(total - 1.0)) < 1e-12


def test_pad_center_delta_kernel():
    delta = np.zeros((5, 5))
    delta[2, 2] = 1.0
    field = tr.pad_center_kernel(delta, (12, 12))
    expected = np.zeros((12, 12))
    expected[0, 0] = 1.0
    assert np.array_equal(field, expected)


def test_pad_center_kernel_too_large():
    with pytest.raises(KernelLargerThanImage):
        tr.pad_center_kernel(np.ones((5, 5)) / 25.0, (4, 8))


def test_crop_inverts_pad(rng):
    k = rng.random((5, 3))
    field = tr.pad_center_kernel(k, (16, 16))
    assert np.array_equal(tr.crop_center_kernel(field, (5, 3)), k)


def test_blur_matches_spatial_oracle(rng):
    x = rng.random((16, 20))
    k = rng.random((5, 3))
    k /= k.sum()
    assert np.max(np.abs(tr.blur(x, k) - oracles.spatial_convolve(x, k))) < 1e-12


def test_difference_symbols_match_gradient(rng):
    x = rng.standard_normal((14, 18))
    dh, dv = tr.difference_symbols(x.shape)
    gh = tr.idft2(dh * tr.dft2(x))
    gv = tr.idft2(dv * tr.dft2(x))
    g = tr.gradient(x)
    assert np.max(np.abs(gh - g[0])) < 1e-12
    assert np.max(np.abs(gv - g[1])) < 1e-12


def test_freq_cache_consistency(rng):
    k = rng.random((3, 5))
    k /= k.sum()
    cache = tr.freq_cache(k, (16, 16))
    assert cache.shape == (16, 16)
    assert np.max(np.abs(cache.k_abs2 - np.abs(cache.k_hat) ** 2)) < 1e-14
    assert np.max(np.abs(cache.laplacian_sym
                         - (np.abs(cache.dh_hat) ** 2
                            + np.abs(cache.dv_hat) ** 2))) < 1e-14
    assert cache.frame_syms.shape == (9, 16, 16)


def test_blur_linearity(rng):
    x1 = rng.random((12, 12))
    x2 = rng.random((12, 12))
    k = rng.random((3, 3))
    k /= k.sum()
    combined = tr.blur(2.0 * x1 - 0.5 * x2, k)
    split = 2.0 * tr.blur(x1, k) - 0.5 * tr.blur(x2, k)
    assert np.max(np.abs(combined - split)) < 1e-12
