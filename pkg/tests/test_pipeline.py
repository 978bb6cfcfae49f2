import numpy as np
import pytest

from mcpdeblur.core import (EvenKernelDimension, ImageTooSmall,
                            ShrinkNotAllowed, SolverConfig, validate_config)
from mcpdeblur.pipeline import (bilinear_resize, blind_deblur, build_pyramid,
                                edge_taper, run_level, upsample_kernel)
from mcpdeblur.synth import box_kernel, delta_kernel, motion_kernel
from mcpdeblur.transforms import blur
from conftest import cartoon_image


def test_bilinear_resize_identity(rng):
    x = rng.random((12, 15))
    assert np.array_equal(bilinear_resize(x, (12, 15)), x)


def test_bilinear_resize_constant(rng):
    x = np.full((20, 20), 0.6)
    for shape in ((10, 10), (14, 14), (27, 31)):
        out = bilinear_resize(x, shape)
        assert np.max(np.abs(out - 0.6)) < 1e-12


def test_bilinear_resize_delta_profile():
    # half-pixel-centered upsample of a 1-D delta: [0, 0.4, 1, 0.4, 0]
    src = np.zeros((3, 3))
    src[1, 1] = 1.0
    out = bilinear_resize(src, (5, 5))
    profile = np.array([0.0, 0.4, 1.0, 0.4, 0.0])
    assert np.max(np.abs(out[:, 2] - profile * out[2, 2])) < 1e-12
    assert abs(out[2, 2] - 1.0) < 1e-12


def test_build_pyramid_ladder_17():
    y = cartoon_image(256)
    levels = build_pyramid(y, (17, 17), 0.7071067811865476)
    sizes = [lv.kernel_size for lv in levels]
    assert sizes == [(3, 3), (5, 5), (7, 7), (9, 9), (13, 13), (17, 17)]
    assert levels[-1].y.shape == (256, 256)
    assert levels[-1].scale == 1.0
    for lv in levels:
        assert lv.y.shape[0] % 2 == 0 and lv.y.shape[1] % 2 == 0
        assert min(lv.y.shape) >= 16
    scales = [lv.scale for lv in levels]
    assert scales == sorted(scales)


def test_build_pyramid_non_square_kernel():
    y = cartoon_image(128)
    levels = build_pyramid(y, (9, 7), 0.7071067811865476)
    assert levels[0].kernel_size == (3, 3)
    for lv in levels:
        assert lv.kernel_size[0] % 2 == 1 and lv.kernel_size[1] % 2 == 1


def test_build_pyramid_small_kernel_single_level():
    y = cartoon_image(64)
    levels = build_pyramid(y, (3, 3), 0.7071067811865476)
    assert len(levels) == 1
    assert levels[0].kernel_size == (3, 3)
    assert np.array_equal(levels[0].y, y)


def test_build_pyramid_small_image_rejected():
    with pytest.raises(ImageTooSmall):
        build_pyramid(np.zeros((12, 200)), (9, 9), 0.7)


def test_build_pyramid_stops_at_min_image():
    # 20px input: no level below 16px may be created
    levels = build_pyramid(cartoon_image(20), (17, 17), 0.7071067811865476)
    for lv in levels:
        assert min(lv.y.shape) >= 16


def test_build_pyramid_level_cap():
    levels = build_pyramid(cartoon_image(64), (17, 17), 0.9999)
    assert len(levels) <= 12


def test_upsample_kernel_delta():
    k = upsample_kernel(delta_kernel(3), (5, 5))
    assert k.shape == (5, 5)
    assert np.argmax(k) == 12  # center stays the peak
    assert abs(k.sum() - 1.0) <= 1e-12
    assert np.all(k >= 0.0)


def test_upsample_kernel_same_size_passthrough():
    k = box_kernel(5)
    out = upsample_kernel(k, (5, 5))
    assert np.array_equal(out, k)


def test_upsample_kernel_rejects_shrink_and_even():
    with pytest.raises(ShrinkNotAllowed):
        upsample_kernel(box_kernel(5), (3, 3))
    with pytest.raises(EvenKernelDimension):
        upsample_kernel(box_kernel(3), (4, 5))


def test_edge_taper_delta_kernel_is_identity(rng):
    y = rng.random((32, 32))
    out = edge_taper(y, delta_kernel(3))
    assert np.max(np.abs(out - y)) < 1e-12


def test_edge_taper_keeps_interior(rng):
    y = cartoon_image(64)
    k = box_kernel(5)
    out = edge_taper(y, k)
    assert out.shape == y.shape
    assert np.array_equal(out[10:-10, 10:-10], y[10:-10, 10:-10])
    assert not np.array_equal(out, y)


def test_run_level_decay_arithmetic():
    y = cartoon_image(32)
    cfg = validate_config(SolverConfig(kernel_size=(3, 3)))
    records = []
    run_level(y, box_kernel(3), cfg, trace=records.append)
    assert len(records) == cfg.outer_iters == 5

    gamma, lam = cfg.gamma, cfg.lam
    expected = []
    for _ in range(5):
        gamma = max(gamma / 1.1, 1e-4)
        lam = max(lam / 1.1, 1e-4)
        expected.append((gamma, lam))
    assert [(r["gamma"], r["lam"]) for r in records] == expected


def test_run_level_decay_floor():
    y = cartoon_image(32)
    cfg = validate_config(SolverConfig(kernel_size=(3, 3), gamma=1.2e-4,
                                       lam=1.1e-4))
    records = []
    run_level(y, box_kernel(3), cfg, trace=records.append)
    assert records[-1]["gamma"] == 1e-4
    assert records[-1]["lam"] == 1e-4


def test_blind_deblur_returns_feasible(cartoon32, rng):
    y = np.clip(blur(cartoon32, box_kernel(3))
                + rng.normal(0.0, 0.005, cartoon32.shape), 0.0, 1.0)
    cfg = SolverConfig(kernel_size=(3, 3))
    res = blind_deblur(y, cfg)
    assert res.x.shape == y.shape
    assert np.all(np.isfinite(res.x))
    assert res.kernel.shape == (3, 3)
    assert np.all(res.kernel >= 0.0)
    assert abs(res.kernel.sum() - 1.0) <= 1e-12
    assert len(res.traces) > 0


def test_blind_deblur_deterministic(cartoon32, rng):
    y = np.clip(blur(cartoon32, motion_kernel(3, 45, 3))
                + rng.normal(0.0, 0.005, cartoon32.shape), 0.0, 1.0)
    cfg = SolverConfig(kernel_size=(3, 3), gamma=4e-3, lam=2e-3)
    a = blind_deblur(y, cfg)
    b = blind_deblur(y, cfg)
    assert np.array_equal(a.x, b.x)
    assert np.array_equal(a.kernel, b.kernel)


def test_blind_deblur_collects_levels(cartoon64, rng):
    y = np.clip(blur(cartoon64, box_kernel(5))
                + rng.normal(0.0, 0.003, cartoon64.shape), 0.0, 1.0)
    cfg = SolverConfig(kernel_size=(5, 5))
    res = blind_deblur(y, cfg, collect_levels=True)
    depth = len(build_pyramid(y, (5, 5), cfg.pyramid_scale))
    assert len(res.levels) == depth
    for snap in res.levels:
        assert abs(snap["kernel"].sum() - 1.0) <= 1e-12


def test_blind_deblur_color(rng):
    gray = cartoon_image(32)
    y = np.stack([np.clip(blur(gray, box_kernel(3)), 0, 1)] * 3, axis=-1)
    y[..., 0] *= 0.9  # unequal channels
    cfg = SolverConfig(kernel_size=(3, 3))
    res = blind_deblur(y, cfg)
    assert res.x.shape == y.shape
    assert res.kernel.shape == (3, 3)
