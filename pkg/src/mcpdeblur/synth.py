"""Synthetic degradation fixtures: named kernel generators and the
forward model. Used by the CLI's synthesize command and by the tests.
"""

from __future__ import annotations

import numpy as np

from .core import DeblurError, EvenKernelDimension, project_kernel
from .transforms import blur


def delta_kernel(size: int = 1) -> np.ndarray:
    if size % 2 == 0:
        raise EvenKernelDimension(f"delta size must be odd, got {size}")
    k = np.zeros((size, size))
    k[size // 2, size // 2] = 1.0
    return k


def box_kernel(n: int) -> np.ndarray:
    if n % 2 == 0:
        raise EvenKernelDimension(f"box size must be odd, got {n}")
    return np.full((n, n), 1.0 / (n * n))


def gaussian_kernel(sigma: float, size: int | None = None) -> np.ndarray:
    if sigma <= 0:
        raise DeblurError(f"gaussian sigma must be positive, got {sigma}")
    if size is None:
        size = 2 * int(np.ceil(3.0 * sigma)) + 1
    if size % 2 == 0:
        raise EvenKernelDimension(f"gaussian size must be odd, got {size}")
    half = size // 2
    coords = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(coords ** 2) / (2.0 * sigma ** 2))
    return project_kernel(np.outer(g, g))


def motion_kernel(length: float, angle_deg: float,
                  size: int | None = None) -> np.ndarray:
    """Linear motion blur: a line of the given length and angle through
    the center, rasterized by dense bilinear splatting."""
    if length < 1:
        raise DeblurError(f"motion length must be at least 1, got {length}")
    if size is None:
        size = 2 * int(np.ceil(length / 2.0)) + 1
    if size % 2 == 0:
        raise EvenKernelDimension(f"motion size must be odd, got {size}")
    half = size // 2
    theta = np.deg2rad(angle_deg)
    steps = max(64, int(32 * length))
    t = np.linspace(-(length - 1) / 2.0, (length - 1) / 2.0, steps)
    rows = half + t * np.sin(theta)
    cols = half + t * np.cos(theta)
    k = np.zeros((size, size))
    r0 = np.floor(rows).astype(int)
    c0 = np.floor(cols).astype(int)
    fr = rows - r0
    fc = cols - c0
    for dr, dc, wgt in ((0, 0, (1 - fr) * (1 - fc)), (0, 1, (1 - fr) * fc),
                        (1, 0, fr * (1 - fc)), (1, 1, fr * fc)):
        rr = np.clip(r0 + dr, 0, size - 1)
        cc = np.clip(c0 + dc, 0, size - 1)
        np.add.at(k, (rr, cc), wgt)
    return project_kernel(k)


def make_named_kernel(spec: str, size: int | None = None) -> np.ndarray:
    """Build a kernel from a spec string.

    Grammar: "delta" | "box:N" | "gaussian:SIGMA" | "motion:LENGTH,ANGLE".
    An explicit `size` overrides the generator's default support.
    """
    name, _, argstr = spec.partition(":")
    name = name.strip().lower()
    args = [a for a in argstr.split(",") if a.strip()]
    try:
        if name == "delta":
            return delta_kernel(size or 1)
        if name == "box":
            return box_kernel(int(args[0]))
        if name == "gaussian":
            return gaussian_kernel(float(args[0]), size)
        if name == "motion":
            return motion_kernel(float(args[0]), float(args[1]), size)
    except (IndexError, ValueError) as exc:
        raise DeblurError(f"bad kernel spec {spec!r}: {exc}") from exc
    raise DeblurError(f"unknown kernel generator {name!r}")


def synthesize(sharp: np.ndarray, kernel: np.ndarray, noise_sigma: float,
               seed: int = 0) -> np.ndarray:
    """Forward model y = k * x + n with periodic convolution and
    additive Gaussian noise of the given standard deviation."""
    if noise_sigma < 0:
        raise DeblurError(f"noise sigma must be nonnegative, got {noise_sigma}")
    if sharp.ndim == 3:
        y = np.stack([blur(sharp[..., i], kernel)
                      for i in range(sharp.shape[2])], axis=-1)
    else:
        y = blur(sharp, kernel)
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        y = y + rng.normal(0.0, noise_sigma, size=y.shape)
    return y
