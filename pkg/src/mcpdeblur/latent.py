"""Latent image estimation for a fixed blur kernel.

The model couples a data term and ridge with a concave framelet penalty
and reweighted gradient sparsity:

    ||k * x - y||^2 + gamma*||x||^2
        + lam * (sigma*MCP(Wx) + sum_i w_i |grad(x)_i|)

Both nonquadratic pieces are split off with quadratic penalties whose
weights beta (framelet side) and mu (gradient side) grow geometrically.
For fixed splits the x update is a single Fourier division; the gradient
split is soft thresholding; the framelet split is a small forward-backward
iteration on a difference-of-convex objective.
"""

from __future__ import annotations

import numpy as np

from .core import (PreconditionAlphaTooLarge, ShapeMismatch, SolverConfig,
                   StepSizeOutOfRange)
from .prox import grad_moreau_env_l1, mcp_value, soft_threshold
from .transforms import (FreqCache, dft2, framelet_analysis,
                         framelet_synthesis, freq_cache, gradient, idft2)

FBS_MAX_ITERS = 50
FBS_TOL = 1e-6


def update_weights_x(grad_x: np.ndarray, eps: float) -> np.ndarray:
    """Reweighting rule w_i = 1 / (|grad(x)_i| + eps)."""
    return 1.0 / (np.abs(grad_x) + eps)


def update_g(grad_x: np.ndarray, weights: np.ndarray, lam: float,
             mu: float) -> np.ndarray:
    """Exact minimizer of mu*||grad(x) - g||^2 + lam * sum_i w_i |g_i|."""
    if weights.shape != grad_x.shape:
        raise ShapeMismatch(f"weights {weights.shape} vs gradient {grad_x.shape}")
    return soft_threshold(grad_x, lam * weights / (2.0 * mu))


def update_x(y: np.ndarray, g: np.ndarray, u: np.ndarray, gamma: float,
             mu: float, beta: float, cache: FreqCache,
             wtu_hat: np.ndarray | None = None) -> np.ndarray:
    """Closed-form x update in the Fourier domain.

    Solves (K^T K + gamma + mu*D^T D + beta*W^T W) x = K^T y + mu*D^T g
    + beta*W^T u, using that the framelet system is tight (W^T W = I) so
    its penalty contributes the scalar beta to the denominator. `wtu_hat`
    may carry a precomputed dft2(framelet_synthesis(u)); it is constant
    while u is fixed, so callers iterating over mu cache it.
    """
    if y.shape != cache.shape:
        raise ShapeMismatch(f"image {y.shape} vs cache {cache.shape}")
    if g.shape != (2,) + y.shape:
        raise ShapeMismatch(f"gradient split has shape {g.shape}")
    if wtu_hat is None:
        if u.shape != (9,) + y.shape:
            raise ShapeMismatch(f"framelet split has shape {u.shape}")
        wtu_hat = dft2(framelet_synthesis(u))
    numer = (np.conj(cache.k_hat) * dft2(y)
             + mu * (np.conj(cache.dh_hat) * dft2(g[0])
                     + np.conj(cache.dv_hat) * dft2(g[1]))
             + beta * wtu_hat)
    denom = cache.k_abs2 + mu * cache.laplacian_sym + beta + gamma
    return idft2(numer / denom)


def update_u_fbs(wx: np.ndarray, u0: np.ndarray, beta: float, lam: float,
                 sigma: float, alpha: float, tau: float,
                 max_iters: int = FBS_MAX_ITERS,
                 tol: float = FBS_TOL) -> np.ndarray:
    """Forward-backward iteration for the framelet split.

    Minimizes lam*sigma*MCP_alpha(u) + beta*||wx - u||^2, rescaled so the
    smooth part is f1(u) = (beta/(lam*sigma))*||wx - u||^2 - env_alpha(u)
    and the nonsmooth part is ||u||_1. f1 is convex precisely when
    alpha <= 2*beta/(lam*sigma), and its gradient is rho-Lipschitz with
    rho = 2*beta/(lam*sigma) + alpha, so any step 0 < tau < 2/rho
    converges. Stops when the iterate moves less than `tol` in sup norm.
    """
    ratio = 2.0 * beta / (lam * sigma)
    if alpha > ratio * (1.0 + 1e-12):
        raise PreconditionAlphaTooLarge(
            f"alpha={alpha!r} exceeds 2*beta/(lam*sigma)={ratio!r}")
    rho = ratio + alpha
    if not (0.0 < tau < 2.0 / rho):
        raise StepSizeOutOfRange(f"tau={tau!r} outside (0, {2.0 / rho!r})")
    u = np.asarray(u0, dtype=np.float64).copy()
    for _ in range(max_iters):
        z = u - tau * (ratio * (u - wx) - grad_moreau_env_l1(u, alpha))
        u_next = soft_threshold(z, tau)
        delta = float(np.max(np.abs(u_next - u)))
        u = u_next
        if delta < tol:
            break
    return u


def split_objective(u: np.ndarray, wx: np.ndarray, beta: float, lam: float,
                    sigma: float, alpha: float) -> float:
    """Value of lam*sigma*MCP_alpha(u) + beta*||wx - u||^2."""
    return (lam * sigma * mcp_value(u, alpha)
            + beta * float(np.sum((wx - u) ** 2)))


def model_objective(y: np.ndarray, kernel: np.ndarray, x: np.ndarray,
                    gamma: float, lam: float, sigma: float, alpha: float,
                    weights: np.ndarray | None = None) -> float:
    """Full model energy at x; `weights` defaults to all ones."""
    from .transforms import blur

    residual = blur(x, kernel) - y
    grad_x = gradient(x)
    if weights is None:
        tv = float(np.sum(np.abs(grad_x)))
    else:
        tv = float(np.sum(weights * np.abs(grad_x)))
    prior = sigma * mcp_value(framelet_analysis(x), alpha) + tv
    return (float(np.sum(residual ** 2))
            + gamma * float(np.sum(x ** 2)) + lam * prior)


def solve_latent(y: np.ndarray, kernel: np.ndarray, cfg: SolverConfig,
                 trace=None) -> np.ndarray:
    """Estimate the latent image under a fixed kernel.

    Outer loop grows beta from kappa*lam*sigma to beta_max; each stage
    refreshes the framelet split u by FBS against the current x, then
    runs the inner mu continuation (weights, gradient shrinkage, Fourier
    x update). The envelope scale is capped at 2*beta/(lam*sigma) per
    stage so the u subproblem stays convex; the cap is inactive once
    beta has grown past gamma. The FBS step is (1 - epsilon)/rho, kept
    relative so it stays positive for every stage.
    """
    y = np.asarray(y, dtype=np.float64)
    cache = freq_cache(kernel, y.shape)
    lam, sigma, kappa = cfg.lam, cfg.sigma, cfg.kappa
    alpha_full = cfg.alpha
    x = y.copy()
    u = framelet_analysis(x)
    beta = kappa * lam * sigma
    while beta <= cfg.beta_max * (1.0 + 1e-12):
        ratio = 2.0 * beta / (lam * sigma)
        alpha = min(alpha_full, ratio)
        rho = ratio + alpha
        tau = (1.0 - cfg.epsilon) / rho
        wx = framelet_analysis(x)
        u = update_u_fbs(wx, u, beta, lam, sigma, alpha, tau)
        wtu_hat = dft2(framelet_synthesis(u))
        mu = kappa * lam
        while mu <= cfg.mu_max * (1.0 + 1e-12):
            grad_x = gradient(x)
            weights = update_weights_x(grad_x, cfg.weight_epsilon)
            g = update_g(grad_x, weights, lam, mu)
            x = update_x(y, g, u, cfg.gamma, mu, beta, cache, wtu_hat=wtu_hat)
            mu *= kappa
        if trace is not None:
            trace({"stage": "latent", "beta": beta, "mu_final": mu / kappa,
                   "alpha": alpha,
                   "split_objective": split_objective(u, wx, beta, lam,
                                                      sigma, alpha)})
        beta *= kappa
    return x
