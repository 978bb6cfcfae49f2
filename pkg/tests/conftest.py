import numpy as np
import pytest


def cartoon_image(n=64):
    """Piecewise-constant shapes over a ramp; strong edges for deblurring."""
    img = np.zeros((n, n))
    yy, xx = np.mgrid[0:n, 0:n]
    img += 0.35 * (xx / n)
    img[(yy > n * 0.12) & (yy < n * 0.42) & (xx > n * 0.15) & (xx < n * 0.45)] = 0.95
    img[(yy > n * 0.55) & (yy < n * 0.8) & (xx > n * 0.2) & (xx < n * 0.85)] = 0.1
    disc = (yy - n * 0.3) ** 2 + (xx - n * 0.72) ** 2 < (n * 0.14) ** 2
    img[disc] = 0.7
    return np.clip(img, 0.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def cartoon64():
    return cartoon_image(64)


@pytest.fixture
def cartoon32():
    return cartoon_image(32)
