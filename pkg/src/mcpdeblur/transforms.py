"""Linear transforms: DFT, periodic differences, tight framelet pair.

All operators assume periodic boundary conditions so that convolution
diagonalizes under the 2-D DFT; that is what makes the quadratic
subproblem solves closed-form. The framelet here is the single-level
undecimated piecewise-linear B-spline system built from three 1-D taps;
the nine separable subband filters form a tight frame, so analysis
followed by synthesis is the identity up to float roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .core import KernelLargerThanImage, ShapeMismatch

_SQRT2 = float(np.sqrt(2.0))

FILTERS_1D = (
    np.array([1.0, 2.0, 1.0]) / 4.0,
    np.array([1.0, 0.0, -1.0]) * (_SQRT2 / 4.0),
    np.array([-1.0, 2.0, -1.0]) / 4.0,
)


def dft2(field: np.ndarray) -> np.ndarray:
    """Unnormalized forward 2-D DFT."""
    return np.fft.fft2(field)


def idft2(spectrum: np.ndarray) -> np.ndarray:
    """Inverse 2-D DFT (1/N normalization), real part."""
    return np.real(np.fft.ifft2(spectrum))


def gradient(img: np.ndarray) -> np.ndarray:
    """Forward differences with periodic wrap, stacked (2, H, W).

    Channel 0 is the horizontal difference x[i, j+1] - x[i, j], channel 1
    the vertical difference x[i+1, j] - x[i, j].
    """
    return np.stack((np.roll(img, -1, axis=1) - img,
                     np.roll(img, -1, axis=0) - img))


def divergence(g: np.ndarray) -> np.ndarray:
    """Negative adjoint of `gradient`: <grad(x), g> == -<x, divergence(g)>."""
    if g.ndim != 3 or g.shape[0] != 2:
        raise ShapeMismatch(f"expected a (2, H, W) gradient field, got {g.shape}")
    gh, gv = g
    return (gh - np.roll(gh, 1, axis=1)) + (gv - np.roll(gv, 1, axis=0))


def framelet_filters() -> list[np.ndarray]:
    """The nine separable 3x3 subband filters, row filter index major."""
    return [np.outer(hi, hj) for hi in FILTERS_1D for hj in FILTERS_1D]


def framelet_analysis(img: np.ndarray) -> np.ndarray:
    """Decompose into 9 undecimated subbands, shape (9, H, W).

    Subband 3*i + j is the periodic correlation with the separable filter
    built from row tap i and column tap j. Subband 0 is the lowpass.
    """
    coeffs = np.empty((9,) + img.shape, dtype=np.float64)
    for idx, f in enumerate(framelet_filters()):
        ndimage.correlate(img, f, output=coeffs[idx], mode="wrap")
    return coeffs


def framelet_synthesis(coeffs: np.ndarray) -> np.ndarray:
    """Adjoint of `framelet_analysis`; inverts it exactly on its range."""
    if coeffs.ndim != 3 or coeffs.shape[0] != 9:
        raise ShapeMismatch(f"expected (9, H, W) coefficients, got {coeffs.shape}")
    out = np.zeros(coeffs.shape[1:], dtype=np.float64)
    for idx, f in enumerate(framelet_filters()):
        out += ndimage.convolve(coeffs[idx], f, mode="wrap")
    return out


def pad_center_kernel(kernel: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Embed a small kernel in a `shape` field with its center tap at (0, 0).

    This is the standard circular-shift embedding that makes the field's
    DFT the transfer function of centered periodic convolution.
    """
    kh, kw = kernel.shape
    if kh > shape[0] or kw > shape[1]:
        raise KernelLargerThanImage(
            f"kernel {kernel.shape} does not fit in field {shape}")
    padded = np.zeros(shape, dtype=np.float64)
    padded[:kh, :kw] = kernel
    return np.roll(padded, (-(kh // 2), -(kw // 2)), axis=(0, 1))


def crop_center_kernel(field: np.ndarray, size: tuple[int, int]) -> np.ndarray:
    """Inverse of the embedding: read `size` taps back out around (0, 0)."""
    kh, kw = size
    if kh > field.shape[0] or kw > field.shape[1]:
        raise KernelLargerThanImage(
            f"requested size {size} exceeds field {field.shape}")
    return np.roll(field, (kh // 2, kw // 2), axis=(0, 1))[:kh, :kw].copy()


def difference_symbols(shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Transfer functions of the periodic forward-difference stencils."""
    dh = np.zeros(shape, dtype=np.float64)
    dh[0, 0] = -1.0
    dh[0, shape[1] - 1] = 1.0
    dv = np.zeros(shape, dtype=np.float64)
    dv[0, 0] = -1.0
    dv[shape[0] - 1, 0] = 1.0
    return np.fft.fft2(dh), np.fft.fft2(dv)


def framelet_symbols(shape: tuple[int, int]) -> np.ndarray:
    """Transfer functions of the nine subband filters, shape (9, H, W).

    Squared magnitudes sum to one at every frequency; that identity is the
    tight-frame property in the Fourier domain.
    """
    out = np.empty((9,) + shape, dtype=np.complex128)
    for idx, f in enumerate(framelet_filters()):
        # conj: analysis is correlation, not convolution
        out[idx] = np.conj(np.fft.fft2(pad_center_kernel(f, shape)))
    return out


@dataclass(frozen=True)
class FreqCache:
    """Per-(kernel, shape) spectra reused across quadratic solves."""

    shape: tuple[int, int]
    k_hat: np.ndarray
    k_abs2: np.ndarray
    dh_hat: np.ndarray
    dv_hat: np.ndarray
    laplacian_sym: np.ndarray
    frame_syms: np.ndarray = field(repr=False)


def freq_cache(kernel: np.ndarray, shape: tuple[int, int]) -> FreqCache:
    k_hat = np.fft.fft2(pad_center_kernel(kernel, shape))
    dh_hat, dv_hat = difference_symbols(shape)
    return FreqCache(
        shape=tuple(shape),
        k_hat=k_hat,
        k_abs2=np.abs(k_hat) ** 2,
        dh_hat=dh_hat,
        dv_hat=dv_hat,
        laplacian_sym=np.abs(dh_hat) ** 2 + np.abs(dv_hat) ** 2,
        frame_syms=framelet_symbols(shape),
    )


def blur(img: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Centered periodic convolution of an image with a small kernel."""
    k_hat = np.fft.fft2(pad_center_kernel(kernel, img.shape))
    return idft2(k_hat * np.fft.fft2(img))
