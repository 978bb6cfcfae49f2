"""Restoration quality metrics for unit-range images.

Scores are shift-tolerant: blind deblurring recovers the image and kernel
only up to a joint translation, so the reference is scanned over a small
window of integer offsets and the best score kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .core import ShapeMismatch, TooSmall

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = 0.01 ** 2
SSIM_C2 = 0.03 ** 2


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB against a unit peak.

    Identical inputs return +inf.
    """
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    mse = float(np.mean((np.asarray(a, float) - np.asarray(b, float)) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(1.0 / mse)


def _gaussian_window() -> np.ndarray:
    half = SSIM_WINDOW // 2
    coords = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(coords ** 2) / (2.0 * SSIM_SIGMA ** 2))
    window = np.outer(g, g)
    return window / window.sum()


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean structural similarity with an 11x11 Gaussian window (sigma 1.5).

    Local statistics use 'valid' windowing, so inputs must be at least
    11 pixels on each side. Constants assume a unit dynamic range.
    """
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    if min(a.shape) < SSIM_WINDOW:
        raise TooSmall(f"images must be at least {SSIM_WINDOW} pixels per side")
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    w = _gaussian_window()
    mu_a = fftconvolve(a, w, mode="valid")
    mu_b = fftconvolve(b, w, mode="valid")
    var_a = fftconvolve(a * a, w, mode="valid") - mu_a ** 2
    var_b = fftconvolve(b * b, w, mode="valid") - mu_b ** 2
    cov = fftconvolve(a * b, w, mode="valid") - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + SSIM_C1) * (2.0 * cov + SSIM_C2)
    den = (mu_a ** 2 + mu_b ** 2 + SSIM_C1) * (var_a + var_b + SSIM_C2)
    return float(np.mean(num / den))


@dataclass(frozen=True)
class ScoreReport:
    value: float
    best_shift: tuple[int, int]
    metric: str


def shift_aligned_score(restored: np.ndarray, reference: np.ndarray,
                        max_shift: int, metric=psnr) -> ScoreReport:
    """Best metric value over reference translations (dx, dy).

    Every integer offset in [-max_shift, max_shift]^2 rolls the reference
    periodically; both images are then cropped by max_shift on each side
    before scoring, so wrapped-in pixels never count. Ties keep the
    lexicographically smallest (dx, dy).
    """
    if restored.shape != reference.shape:
        raise ShapeMismatch(
            f"shapes differ: {restored.shape} vs {reference.shape}")
    s = int(max_shift)
    if s < 0:
        raise TooSmall(f"max_shift must be nonnegative, got {max_shift!r}")
    h, w = restored.shape
    if h - 2 * s < 1 or w - 2 * s < 1:
        raise TooSmall(f"max_shift {s} leaves no pixels of {restored.shape}")
    crop = (slice(s, h - s), slice(s, w - s))
    restored_c = restored[crop]
    best_value = -math.inf
    best_shift = (0, 0)
    for dx in range(-s, s + 1):
        for dy in range(-s, s + 1):
            candidate = np.roll(reference, (dy, dx), axis=(0, 1))[crop]
            value = metric(restored_c, candidate)
            if value > best_value:
                best_value = value
                best_shift = (dx, dy)
    return ScoreReport(value=best_value, best_shift=best_shift,
                       metric=getattr(metric, "__name__", "metric"))
