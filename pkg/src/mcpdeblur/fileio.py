"""Image and kernel file I/O.

Images load as float64 in [0, 1] (8- and 16-bit PNG/PGM via OpenCV) and
save as 16-bit PNG. Kernels use a plain text format that round-trips
float64 exactly: a "rows cols" header line, then one row of %.17g decimals
per line.
"""

from __future__ import annotations

import os

import cv2
import numpy as np

from .core import DeblurError, clamp01


def load_image(path: str) -> np.ndarray:
    raw = cv2.imread(path, cv2.IMREAD_UNCHANGED)
    if raw is None:
        raise OSError(f"cannot read image {path!r}")
    if raw.dtype == np.uint8:
        img = raw.astype(np.float64) / 255.0
    elif raw.dtype == np.uint16:
        img = raw.astype(np.float64) / 65535.0
    else:
        img = raw.astype(np.float64)
    if img.ndim == 3:
        if img.shape[2] == 4:
            img = img[..., :3]
        img = img[..., ::-1].copy()  # BGR to RGB
    return clamp01(img)


def save_image(path: str, img: np.ndarray) -> None:
    data = np.round(clamp01(img) * 65535.0).astype(np.uint16)
    if data.ndim == 3:
        data = data[..., ::-1].copy()  # RGB to BGR
    if not cv2.imwrite(path, data):
        raise OSError(f"cannot write image {path!r}")


def save_kernel_txt(path: str, kernel: np.ndarray) -> None:
    rows, cols = kernel.shape
    lines = [f"{rows} {cols}"]
    lines += [" ".join(f"{v:.17g}" for v in row) for row in kernel]
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def load_kernel_txt(path: str) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise DeblurError(f"bad kernel header in {path!r}")
        rows, cols = int(header[0]), int(header[1])
        data = np.loadtxt(fh, dtype=np.float64, ndmin=2)
    if data.shape != (rows, cols):
        raise DeblurError(
            f"kernel body {data.shape} does not match header ({rows}, {cols})")
    return data


def save_kernel_png(path: str, kernel: np.ndarray) -> None:
    """Max-normalized 8-bit thumbnail for quick inspection."""
    peak = kernel.max()
    scaled = kernel / peak if peak > 0 else kernel
    data = np.round(np.clip(scaled, 0.0, 1.0) * 255.0).astype(np.uint8)
    if not cv2.imwrite(path, data):
        raise OSError(f"cannot write image {path!r}")


def ensure_dir(path: str) -> str:
    os.makedirs(path, exist_ok=True)
    return path
