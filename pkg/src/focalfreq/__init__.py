"""Focal frequency loss with analytic gradients, spectral metrics and
desk-scale optimization experiments."""

from .kernels import BACKEND
from .loss import (
    BatchReduction,
    Distance,
    LossConfig,
    Transform,
    batch_ffl,
    ffl_backward,
    ffl_forward,
    ffl_value_and_grad,
    freq_distance,
    freq_distance_map,
    weight_matrix,
)
from .metrics import MetricReport, lfd, psnr, ssim
from .spectral import Spectrum, amplitude, dct2, dft2, fftshift, idct2, idft2, ifftshift, phase

__version__ = "0.1.0"
