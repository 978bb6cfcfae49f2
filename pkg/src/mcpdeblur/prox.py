"""Componentwise proximal operators, the smoothed-l1 envelope and the
minimax concave penalty. Everything here is separable, so inputs may be
scalars or arrays of any shape.
"""

from __future__ import annotations

import numpy as np

from .core import AlphaNotPositive, NegativeThreshold


def soft_threshold(v, thresh):
    """sign(v) * max(|v| - thresh, 0); thresh may be a matching array."""
    t = np.asarray(thresh, dtype=np.float64)
    if np.any(t < 0.0):
        raise NegativeThreshold("soft threshold must be nonnegative")
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def prox_l1_scaled(v, weight):
    """Proximal map of weight * ||.||_1, i.e. soft thresholding at weight."""
    return soft_threshold(v, weight)


def moreau_env_l1(v, alpha: float):
    """Moreau envelope of the l1 norm at scale alpha.

    Componentwise: alpha*t^2/2 on |t| <= 1/alpha, |t| - 1/(2*alpha) outside.
    alpha = 0 gives the zero function; the envelope never exceeds ||v||_1
    and is convex and continuously differentiable for alpha > 0.
    """
    if alpha < 0.0:
        raise AlphaNotPositive(f"alpha must be nonnegative, got {alpha!r}")
    v = np.asarray(v, dtype=np.float64)
    if alpha == 0.0:
        return 0.0
    a = np.abs(v)
    vals = np.where(a <= 1.0 / alpha, 0.5 * alpha * v * v, a - 0.5 / alpha)
    return float(np.sum(vals))


def grad_moreau_env_l1(v, alpha: float):
    """Gradient of the envelope: alpha * (v - prox_{(1/alpha)*l1}(v))."""
    if not (alpha > 0.0):
        raise AlphaNotPositive(f"alpha must be positive, got {alpha!r}")
    v = np.asarray(v, dtype=np.float64)
    return alpha * (v - soft_threshold(v, 1.0 / alpha))


def mcp_value(v, alpha: float):
    """Minimax concave penalty ||v||_1 - envelope(v, alpha).

    Componentwise it grows like |t| - alpha*t^2/2 and saturates at
    1/(2*alpha); alpha = 0 recovers the plain l1 norm.
    """
    v = np.asarray(v, dtype=np.float64)
    return float(np.sum(np.abs(v))) - moreau_env_l1(v, alpha)


def mcp_prox_oracle_1d(c: float, weight: float, quad: float, alpha: float,
                       step: float = 1e-4) -> float:
    """Brute-force minimizer of weight*mcp(u) + quad*(u - c)^2 over a grid.

    Reference oracle only: scans u in [-2|c|-2, 2|c|+2] at the given step
    and returns the best grid point. Accuracy is limited by the step.
    """
    if not (quad > 0.0) or not (weight >= 0.0):
        raise NegativeThreshold("oracle needs quad > 0 and weight >= 0")
    lo = -2.0 * abs(c) - 2.0
    grid = np.arange(lo, -lo + step, step)
    a = np.abs(grid)
    if alpha > 0.0:
        env = np.where(a <= 1.0 / alpha, 0.5 * alpha * grid * grid,
                       a - 0.5 / alpha)
    else:
        env = 0.0
    objective = weight * (a - env) + quad * (grid - c) ** 2
    return float(grid[np.argmin(objective)])
