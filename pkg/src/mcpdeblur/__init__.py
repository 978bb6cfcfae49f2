"""Blind image deblurring with a minimax concave framelet prior and
reweighted gradient sparsity, solved by penalty continuation with
closed-form Fourier updates inside a coarse-to-fine pyramid.
"""

from .core import (DeblurError, SolverConfig, project_kernel,
                   validate_config)
from .kernel import solve_kernel
from .latent import solve_latent
from .metrics import ScoreReport, psnr, shift_aligned_score, ssim
from .pipeline import RestorationResult, blind_deblur, build_pyramid
from .transforms import (blur, framelet_analysis, framelet_synthesis,
                         gradient)

__all__ = [
    "DeblurError", "SolverConfig", "project_kernel", "validate_config",
    "solve_kernel", "solve_latent", "psnr", "ssim", "shift_aligned_score",
    "ScoreReport", "blind_deblur", "build_pyramid", "RestorationResult",
    "blur", "framelet_analysis", "framelet_synthesis", "gradient",
]

__version__ = "0.1.0"
