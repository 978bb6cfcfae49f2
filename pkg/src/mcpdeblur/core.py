"""Shared value types, parameter validation and kernel feasibility.

Images are plain 2-D float64 arrays with intensities nominally in [0, 1];
values are only clamped at I/O boundaries, intermediate iterates may leave
the range. Blur kernels are small 2-D float64 arrays with odd dimensions,
nonnegative entries and unit sum. Observed images are treated as a periodic
convolution of the latent image with the kernel plus additive noise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


class DeblurError(ValueError):
    """Base class for all validation failures raised by this package."""


class NonPositiveParameter(DeblurError):
    pass


class AlphaNonPositive(DeblurError):
    pass


class EvenKernelDimension(DeblurError):
    pass


class DegenerateKernel(DeblurError):
    pass


class KernelLargerThanImage(DeblurError):
    pass


class ShapeMismatch(DeblurError):
    pass


class NegativeThreshold(DeblurError):
    pass


class AlphaNotPositive(DeblurError):
    pass


class StepSizeOutOfRange(DeblurError):
    pass


class PreconditionAlphaTooLarge(DeblurError):
    pass


class ShrinkNotAllowed(DeblurError):
    pass


class ImageTooSmall(DeblurError):
    pass


class TooSmall(DeblurError):
    pass


def as_image(arr) -> np.ndarray:
    """Coerce to a 2-D float64 image array, rejecting anything else."""
    img = np.asarray(arr, dtype=np.float64)
    if img.ndim != 2 or img.shape[0] < 1 or img.shape[1] < 1:
        raise ShapeMismatch(f"expected a 2-D image, got shape {img.shape}")
    if not np.all(np.isfinite(img)):
        raise DeblurError("image contains non-finite values")
    return img


def clamp01(img: np.ndarray) -> np.ndarray:
    """Clamp intensities into [0, 1]. Only call at I/O boundaries."""
    return np.clip(img, 0.0, 1.0)


def project_kernel(raw) -> np.ndarray:
    """Project an arbitrary grid onto the feasible kernel set.

    Negative entries are clipped to zero and the result is normalized to
    unit sum. A grid whose positive part sums to zero has no feasible
    projection and raises DegenerateKernel. Already-feasible input is
    returned unchanged, which makes the projection exactly idempotent.
    """
    k = np.asarray(raw, dtype=np.float64)
    if not np.all(np.isfinite(k)):
        raise DegenerateKernel("kernel contains non-finite values")
    if np.all(k >= 0.0):
        s = k.sum()
        if abs(s - 1.0) <= 1e-12:
            return k
        if s <= 0.0:
            raise DegenerateKernel("kernel has no positive mass")
        return k / s
    clipped = np.maximum(k, 0.0)
    s = clipped.sum()
    if s <= 0.0:
        raise DegenerateKernel("kernel has no positive mass after clipping")
    return clipped / s


def _require_positive(name: str, value: float) -> None:
    if not (value > 0.0) or not np.isfinite(value):
        raise NonPositiveParameter(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class SolverConfig:
    """Solver parameters shared by the latent, kernel and pyramid stages.

    gamma          ridge weight on the latent image
    lam            overall prior weight
    sigma          balance between the framelet term and the gradient term
    nu             ridge weight on the kernel
    eta            kernel gradient sparsity weight
    kappa          continuation growth factor, must exceed 1
    mu_max         cap for the gradient-split penalty continuation
    beta_max       cap for the framelet-split penalty continuation
    xi_max         cap for the kernel-split penalty continuation
    epsilon        relaxation used when deriving the envelope scale and the
                   FBS step from their upper bounds
    weight_epsilon stabilizer added to gradient magnitudes when reweighting
    kernel_size    (rows, cols) of the estimated kernel, both odd
    outer_iters    image/kernel alternations per pyramid level
    pyramid_scale  per-level shrink factor, in (0, 1)
    prune_kernel   zero kernel entries below 5% of the max at each level end
    """

    kernel_size: tuple[int, int] = (7, 7)
    gamma: float = 1e-1
    lam: float = 4e-3
    sigma: float = 1.0
    nu: float = 1e-3
    eta: float = 5e-3
    kappa: float = 2.0
    mu_max: float = 1e5
    beta_max: float = 1e5
    xi_max: float = 1.0
    epsilon: float = 1e-6
    weight_epsilon: float = 1e-4
    outer_iters: int = 5
    pyramid_scale: float = 0.7071067811865476
    prune_kernel: bool = True

    @property
    def alpha(self) -> float:
        """Envelope scale 2*gamma/(lam*sigma) - epsilon.

        Keeping the scale at or below 2*gamma/(lam*sigma) is exactly the
        condition under which the ridge term convexifies the concave part
        of the prior (for blur operators with nonnegative spectrum).
        """
        return 2.0 * self.gamma / (self.lam * self.sigma) - self.epsilon

    def with_params(self, **kwargs) -> "SolverConfig":
        return validate_config(replace(self, **kwargs))


def validate_config(cfg: SolverConfig) -> SolverConfig:
    """Check positivity, oddness and the envelope-scale constraint.

    Returns the config unchanged on success so call sites can chain it.
    """
    for name in ("gamma", "lam", "sigma", "nu", "eta", "mu_max",
                 "beta_max", "xi_max", "epsilon", "weight_epsilon"):
        _require_positive(name, getattr(cfg, name))
    if not (cfg.kappa > 1.0):
        raise NonPositiveParameter(f"kappa must exceed 1, got {cfg.kappa!r}")
    if not (0.0 < cfg.pyramid_scale < 1.0):
        raise NonPositiveParameter(
            f"pyramid_scale must lie in (0, 1), got {cfg.pyramid_scale!r}")
    if cfg.outer_iters < 1:
        raise NonPositiveParameter(
            f"outer_iters must be at least 1, got {cfg.outer_iters!r}")
    rows, cols = cfg.kernel_size
    if rows < 1 or cols < 1:
        raise NonPositiveParameter(f"kernel_size must be positive, got {cfg.kernel_size!r}")
    if rows % 2 == 0 or cols % 2 == 0:
        raise EvenKernelDimension(
            f"kernel dimensions must be odd, got {cfg.kernel_size!r}")
    if not (cfg.alpha > 0.0):
        raise AlphaNonPositive(
            f"derived envelope scale {cfg.alpha!r} is not positive; "
            f"decrease epsilon or increase gamma/(lam*sigma)")
    return cfg
