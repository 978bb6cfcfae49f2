"""Blur kernel estimation from a fixed latent image.

Works in the gradient domain, which suppresses the flat-region bias of
intensity-domain fitting:

    ||grad(x) * k - grad(y)||^2 + nu*||k||^2 + eta * sum_i v_i |grad(k)_i|

The sparsity term is split off with a quadratic penalty xi*||grad(k)-q||^2
grown geometrically; q is soft thresholding, and k is a Fourier division
carried out on an image-sized field with the kernel's center tap at the
origin. After every solve the field is cropped back to the kernel support
and projected onto the feasible set (nonnegative, unit sum).
"""

from __future__ import annotations

import numpy as np

from .core import ShapeMismatch, SolverConfig, project_kernel
from .prox import soft_threshold
from .transforms import (crop_center_kernel, difference_symbols, dft2,
                         gradient, idft2, pad_center_kernel)


def update_weights_k(grad_k: np.ndarray, eps: float) -> np.ndarray:
    """Reweighting rule v_i = 1 / (|grad(k)_i| + eps)."""
    return 1.0 / (np.abs(grad_k) + eps)


def update_q(grad_k: np.ndarray, weights: np.ndarray, eta: float,
             xi: float) -> np.ndarray:
    """Exact minimizer of xi*||grad(k) - q||^2 + eta * sum_i v_i |q_i|."""
    if weights.shape != grad_k.shape:
        raise ShapeMismatch(f"weights {weights.shape} vs gradient {grad_k.shape}")
    return soft_threshold(grad_k, eta * weights / (2.0 * xi))


def solve_k_field(grad_x: np.ndarray, grad_y: np.ndarray, q: np.ndarray,
                  nu: float, xi: float) -> np.ndarray:
    """Exact solution of the kernel normal equations on the full field.

    Solves the gradient-domain least squares plus ridge plus split penalty,
    summing the data term over both gradient channels, with the kernel's
    center tap at the origin. Returned uncropped and unprojected so the
    stationarity of the linear solve itself can be checked.
    """
    if grad_x.shape != grad_y.shape or q.shape != grad_x.shape:
        raise ShapeMismatch(
            f"gradient fields disagree: {grad_x.shape}, {grad_y.shape}, {q.shape}")
    shape = grad_x.shape[1:]
    dh_hat, dv_hat = difference_symbols(shape)
    numer = np.zeros(shape, dtype=np.complex128)
    denom = np.full(shape, nu, dtype=np.float64)
    for c in range(2):
        gx_hat = dft2(grad_x[c])
        numer += np.conj(gx_hat) * dft2(grad_y[c])
        denom += np.abs(gx_hat) ** 2
    numer += xi * (np.conj(dh_hat) * dft2(q[0]) + np.conj(dv_hat) * dft2(q[1]))
    denom += xi * (np.abs(dh_hat) ** 2 + np.abs(dv_hat) ** 2)
    return idft2(numer / denom)


def update_k(grad_x: np.ndarray, grad_y: np.ndarray, q: np.ndarray,
             nu: float, xi: float, kernel_size: tuple[int, int]) -> np.ndarray:
    """Closed-form kernel update: solve the field, crop to the support
    around the origin tap, project feasible."""
    field = solve_k_field(grad_x, grad_y, q, nu, xi)
    return project_kernel(crop_center_kernel(field, kernel_size))


def data_term(grad_x: np.ndarray, grad_y: np.ndarray,
              kernel: np.ndarray) -> float:
    """||grad(x) * k - grad(y)||^2 summed over both channels."""
    shape = grad_x.shape[1:]
    k_hat = dft2(pad_center_kernel(kernel, shape))
    total = 0.0
    for c in range(2):
        residual = idft2(k_hat * dft2(grad_x[c])) - grad_y[c]
        total += float(np.sum(residual ** 2))
    return total


def solve_kernel(x: np.ndarray, y: np.ndarray, cfg: SolverConfig,
                 k_init: np.ndarray, trace=None) -> np.ndarray:
    """Estimate the kernel by continuation on the split penalty xi.

    xi starts at kappa*eta and grows by kappa until xi_max; each stage
    recomputes the reweighting from the current kernel's gradient, shrinks
    it into q, and re-solves for k. If kappa*eta already exceeds xi_max
    the loop body never runs and the projected initializer is returned.
    """
    if x.shape != y.shape:
        raise ShapeMismatch(f"latent {x.shape} vs observed {y.shape}")
    grad_x = gradient(x)
    grad_y = gradient(y)
    k = project_kernel(np.asarray(k_init, dtype=np.float64))
    size = k.shape
    xi = cfg.kappa * cfg.eta
    while xi <= cfg.xi_max * (1.0 + 1e-12):
        field = pad_center_kernel(k, x.shape)
        grad_k = gradient(field)
        weights = update_weights_k(grad_k, cfg.weight_epsilon)
        q = update_q(grad_k, weights, cfg.eta, xi)
        k = update_k(grad_x, grad_y, q, cfg.nu, xi, size)
        if trace is not None:
            trace({"stage": "kernel", "xi": xi,
                   "data_term": data_term(grad_x, grad_y, k)})
        xi *= cfg.kappa
    return k


def prune_small_taps(kernel: np.ndarray, fraction: float = 0.05) -> np.ndarray:
    """Zero taps below `fraction` of the max, then renormalize."""
    cleaned = np.where(kernel >= fraction * kernel.max(), kernel, 0.0)
    return project_kernel(cleaned)
