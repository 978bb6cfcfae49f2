"""Coarse-to-fine blind deblurring.

Builds an image/kernel pyramid, alternates latent and kernel estimation a
fixed number of times per level with a mild decay of the prior weights,
propagates the kernel upward by bilinear upsampling, and finishes with one
non-blind latent solve at full resolution against an edge-tapered copy of
the observation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .core import (EvenKernelDimension, ImageTooSmall, ShrinkNotAllowed,
                   SolverConfig, project_kernel, validate_config)
from .kernel import prune_small_taps, solve_kernel
from .latent import solve_latent
from .transforms import blur

MIN_LEVEL_DIM = 16
MAX_LEVELS = 12
DECAY = 1.1
DECAY_FLOOR = 1e-4


def bilinear_resize(src: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Resample with half-pixel-centered bilinear interpolation.

    Output pixel centers map to src coordinates (i + 0.5)*scale - 0.5,
    clamped at the borders. When shrinking by 2x or more a 3x3 binomial
    prefilter suppresses aliasing.
    """
    h_in, w_in = src.shape
    h_out, w_out = shape
    if (h_out, w_out) == (h_in, w_in):
        return src.copy()
    if h_out <= h_in // 2 or w_out <= w_in // 2:
        binom = np.array([1.0, 2.0, 1.0]) / 4.0
        src = ndimage.correlate1d(src, binom, axis=0, mode="reflect")
        src = ndimage.correlate1d(src, binom, axis=1, mode="reflect")
    rows = np.clip((np.arange(h_out) + 0.5) * (h_in / h_out) - 0.5, 0, h_in - 1)
    cols = np.clip((np.arange(w_out) + 0.5) * (w_in / w_out) - 0.5, 0, w_in - 1)
    r0 = np.floor(rows).astype(int)
    c0 = np.floor(cols).astype(int)
    r1 = np.minimum(r0 + 1, h_in - 1)
    c1 = np.minimum(c0 + 1, w_in - 1)
    fr = (rows - r0)[:, None]
    fc = (cols - c0)[None, :]
    top = src[np.ix_(r0, c0)] * (1 - fc) + src[np.ix_(r0, c1)] * fc
    bot = src[np.ix_(r1, c0)] * (1 - fc) + src[np.ix_(r1, c1)] * fc
    return top * (1 - fr) + bot * fr


def _round_odd(value: float) -> int:
    return max(3, 2 * int(round((value - 1.0) / 2.0)) + 1)


def _round_even(value: float) -> int:
    return max(2, 2 * int(round(value / 2.0)))


@dataclass(frozen=True)
class PyramidLevel:
    y: np.ndarray
    kernel_size: tuple[int, int]
    scale: float


def build_pyramid(y: np.ndarray, kernel_size: tuple[int, int],
                  scale: float) -> list[PyramidLevel]:
    """Plan the level ladder, coarsest first.

    Kernel dimensions shrink by `scale` per level, rounded to the nearest
    odd integer with a floor of 3; the ladder ends once both reach 3 (or
    at the level cap). Image dimensions shrink by the same factor, rounded
    even; levels that would push either image dimension below 16 are
    dropped, so very small inputs may keep a coarsest kernel above 3.
    """
    h, w = y.shape
    if min(h, w) < MIN_LEVEL_DIM:
        raise ImageTooSmall(f"image {y.shape} is below {MIN_LEVEL_DIM} pixels")
    kh, kw = kernel_size
    sizes = [(kh, kw)]
    factors = [1.0]
    fh, fw = float(kh), float(kw)
    spins = 0
    while max(sizes[-1]) > 3 and len(sizes) < MAX_LEVELS and spins < 10 ** 6:
        spins += 1
        fh *= scale
        fw *= scale
        nh = min(_round_odd(fh), sizes[-1][0])
        nw = min(_round_odd(fw), sizes[-1][1])
        if (nh, nw) == sizes[-1]:
            continue
        # image follows the kernel's cumulative shrink so the two stay
        # proportional even when a scale step does not change the kernel
        factor = fh / kh
        img_h = _round_even(h * factor)
        img_w = _round_even(w * factor)
        if min(img_h, img_w) < MIN_LEVEL_DIM:
            break
        sizes.append((nh, nw))
        factors.append(factor)
    levels = []
    for idx, (ks, factor) in enumerate(zip(sizes, factors)):
        img_shape = (h, w) if idx == 0 else (_round_even(h * factor),
                                             _round_even(w * factor))
        levels.append(PyramidLevel(y=bilinear_resize(y, img_shape),
                                   kernel_size=ks, scale=factor))
    levels.reverse()
    return levels


def upsample_kernel(kernel: np.ndarray, size: tuple[int, int]) -> np.ndarray:
    """Resize a kernel to a larger odd support and reproject it feasible."""
    nh, nw = size
    kh, kw = kernel.shape
    if nh % 2 == 0 or nw % 2 == 0:
        raise EvenKernelDimension(f"target size {size} must be odd")
    if nh < kh or nw < kw:
        raise ShrinkNotAllowed(f"cannot shrink kernel {kernel.shape} to {size}")
    if (nh, nw) == (kh, kw):
        return project_kernel(kernel.copy())
    return project_kernel(bilinear_resize(kernel, (nh, nw)))


def edge_taper(y: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Blend borders toward the reblurred image to soften wrap seams.

    A raised-cosine window, one kernel extent wide on each side, keeps the
    interior untouched and replaces the outermost pixels by their blurred
    values, which damps the periodic-boundary ringing of the final solve.
    """
    def ramp(n: int, border: int) -> np.ndarray:
        wnd = np.ones(n)
        b = min(border, n // 2)
        if b > 0:
            t = 0.5 * (1.0 - np.cos(np.pi * (np.arange(b) + 0.5) / b))
            wnd[:b] = t
            wnd[n - b:] = t[::-1]
        return wnd

    window = np.outer(ramp(y.shape[0], kernel.shape[0]),
                      ramp(y.shape[1], kernel.shape[1]))
    return window * y + (1.0 - window) * blur(y, kernel)


def run_level(y_level: np.ndarray, k_init: np.ndarray, cfg: SolverConfig,
              trace=None) -> tuple[np.ndarray, np.ndarray]:
    """Alternate latent and kernel estimation `outer_iters` times.

    Each alternation decays gamma and lam by max(value/1.1, 1e-4); the
    ratio gamma/lam is preserved until a floor engages, so the envelope
    scale stays valid, and the config is revalidated on every change.
    """
    gamma, lam = cfg.gamma, cfg.lam
    k = project_kernel(np.asarray(k_init, dtype=np.float64))
    x = y_level
    for i in range(cfg.outer_iters):
        cfg_i = validate_config(cfg.with_params(gamma=gamma, lam=lam,
                                                kernel_size=k.shape))
        x = solve_latent(y_level, k, cfg_i)
        k = solve_kernel(x, y_level, cfg_i, k)
        gamma = max(gamma / DECAY, DECAY_FLOOR)
        lam = max(lam / DECAY, DECAY_FLOOR)
        if trace is not None:
            trace({"stage": "level", "iteration": i, "gamma": gamma,
                   "lam": lam, "shape": y_level.shape,
                   "kernel_size": k.shape})
    return x, k


@dataclass
class RestorationResult:
    x: np.ndarray
    kernel: np.ndarray
    levels: list[dict] = field(default_factory=list)
    traces: list[dict] = field(default_factory=list)


LUMA = (0.299, 0.587, 0.114)


def blind_deblur(y: np.ndarray, cfg: SolverConfig,
                 collect_levels: bool = False) -> RestorationResult:
    """Full blind pipeline: pyramid, per-level alternation, final solve.

    Color input is reduced to its luma channel for kernel estimation; the
    final non-blind solve then runs once per channel with the shared
    kernel. The prior weights reset to their configured values at the
    start of every level; the decay only acts within a level.
    """
    cfg = validate_config(cfg)
    y = np.asarray(y, dtype=np.float64)
    color = y.ndim == 3
    y_gray = (sum(c * y[..., i] for i, c in enumerate(LUMA))
              if color else y)
    result = RestorationResult(x=y_gray, kernel=np.ones((1, 1)))
    sink = result.traces.append
    levels = build_pyramid(y_gray, cfg.kernel_size, cfg.pyramid_scale)
    k = np.full(levels[0].kernel_size,
                1.0 / (levels[0].kernel_size[0] * levels[0].kernel_size[1]))
    for level in levels:
        if k.shape != level.kernel_size:
            k = upsample_kernel(k, level.kernel_size)
        x, k = run_level(level.y, k, cfg, trace=sink)
        if cfg.prune_kernel:
            k = prune_small_taps(k)
        if collect_levels:
            result.levels.append({"scale": level.scale, "x": x, "kernel": k,
                                  "shape": level.y.shape})
    y_taper = edge_taper(y_gray, k)
    if color:
        channels = [solve_latent(edge_taper(y[..., i], k), k, cfg)
                    for i in range(y.shape[2])]
        result.x = np.stack(channels, axis=-1)
    else:
        result.x = solve_latent(y_taper, k, cfg)
    result.kernel = k
    return result
