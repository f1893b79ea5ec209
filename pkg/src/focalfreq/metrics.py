"""Full-reference quality metrics: log frequency distance, PSNR and SSIM.

All three expect pixel values on the 0-255 scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .spectral import as_image, dft2

PEAK = 255.0
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5


def _pair(real, fake):
    r = as_image(real, "real")
    f = as_image(fake, "fake")
    if r.shape != f.shape:
        raise ValueError(f"shape mismatch: {r.shape} vs {f.shape}")
    return r, f


def lfd_per_channel(real, fake) -> np.ndarray:
    r, f = _pair(real, fake)
    diff = dft2(r, orthonormalize=False).values - dft2(f, orthonormalize=False).values
    power = np.mean(diff.real**2 + diff.imag**2, axis=(0, 1))
    return np.log(power + 1.0)


def lfd(real, fake) -> float:
    """Log frequency distance on raw (unnormalized) DFT values, channel mean."""
    return float(np.mean(lfd_per_channel(real, fake)))


def _psnr_from_mse(mse, peak):
    if mse == 0:
        return float("inf")
    return float(10.0 * np.log10(peak**2 / mse))


def psnr(real, fake, peak: float = PEAK) -> float:
    """PSNR in dB from the MSE pooled over pixels and channels; ``inf`` if equal."""
    r, f = _pair(real, fake)
    return _psnr_from_mse(float(np.mean((r - f) ** 2)), peak)


def psnr_per_channel(real, fake, peak: float = PEAK) -> list[float]:
    r, f = _pair(real, fake)
    return [_psnr_from_mse(float(m), peak) for m in np.mean((r - f) ** 2, axis=(0, 1))]


@lru_cache(maxsize=4)
def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2
    g = np.exp(-(x**2) / (2 * sigma**2))
    g /= g.sum()
    g.setflags(write=False)
    return g


def _filter_valid(x, g):
    # separable 'valid' correlation over the first two axes
    rows = sliding_window_view(x, len(g), axis=0) @ g
    return sliding_window_view(rows, len(g), axis=1) @ g


def ssim_per_channel(real, fake, peak: float = PEAK) -> np.ndarray:
    r, f = _pair(real, fake)
    if min(r.shape[:2]) < SSIM_WINDOW:
        raise ValueError(f"SSIM needs images of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {r.shape[0]}x{r.shape[1]}")
    g = gaussian_window()
    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    mu_r = _filter_valid(r, g)
    mu_f = _filter_valid(f, g)
    var_r = _filter_valid(r * r, g) - mu_r**2
    var_f = _filter_valid(f * f, g) - mu_f**2
    cov = _filter_valid(r * f, g) - mu_r * mu_f
    num = (2 * mu_r * mu_f + c1) * (2 * cov + c2)
    den = (mu_r**2 + mu_f**2 + c1) * (var_r + var_f + c2)
    return np.mean(num / den, axis=(0, 1))


def ssim(real, fake, peak: float = PEAK) -> float:
    """Mean SSIM over 11x11 Gaussian windows (sigma 1.5), channel mean."""
    return float(np.mean(ssim_per_channel(real, fake, peak)))


@dataclass
class MetricReport:
    lfd: float
    psnr: float
    ssim: float
    per_channel: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "lfd": self.lfd,
            "psnr": _json_float(self.psnr),
            "ssim": self.ssim,
            "per_channel": {k: [_json_float(v) for v in vals] for k, vals in self.per_channel.items()},
        }


def _json_float(value):
    # JSON has no infinity; identical images report the string "inf"
    return "inf" if value == float("inf") else float(value)


def evaluate_pair(real, fake, peak: float = PEAK) -> MetricReport:
    """All metrics for one image pair.

    SSIM is reported as NaN for images smaller than the SSIM window.
    """
    r, f = _pair(real, fake)
    if min(r.shape[:2]) >= SSIM_WINDOW:
        ssim_c = ssim_per_channel(r, f, peak)
    else:
        ssim_c = np.full(r.shape[2], np.nan)
    lfd_c = lfd_per_channel(r, f)
    return MetricReport(
        lfd=float(np.mean(lfd_c)),
        psnr=psnr(r, f, peak),
        ssim=float(np.mean(ssim_c)),
        per_channel={
            "lfd": [float(v) for v in lfd_c],
            "psnr": psnr_per_channel(r, f, peak),
            "ssim": [float(v) for v in ssim_c],
        },
    )


def mean_report(reports: list[MetricReport]) -> MetricReport:
    """Arithmetic mean of several reports, field by field."""
    if not reports:
        raise ValueError("no reports to average")
    per_channel = {
        key: [float(v) for v in np.mean([rep.per_channel[key] for rep in reports], axis=0)]
        for key in reports[0].per_channel
    }
    return MetricReport(
        lfd=float(np.mean([rep.lfd for rep in reports])),
        psnr=float(np.mean([rep.psnr for rep in reports])),
        ssim=float(np.mean([rep.ssim for rep in reports])),
        per_channel=per_channel,
    )
