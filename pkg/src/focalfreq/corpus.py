"""Seeded procedural image corpora with controlled frequency content.

All generators return float64 images in ``[-1, 1]`` shaped ``(size, size, C)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .filters import center_distance
from .spectral import dft2, fftshift, idft2, ifftshift, Spectrum

KINDS = ("gratings", "checkerboards", "filtered_noise", "blobs")


@dataclass(frozen=True)
class CorpusSpec:
    kind: str = "gratings"
    count: int = 200
    size: int = 32
    seed: int = 0
    channels: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown corpus kind {self.kind!r}; expected one of {KINDS}")
        for name in ("count", "size", "channels"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


def grating(height: int, width: int, u: float, v: float, phase: float = 0.0) -> np.ndarray:
    """``cos(2*pi*(u*x/W + v*y/H) + phase)`` as an ``(H, W)`` array."""
    y, x = np.mgrid[0:height, 0:width]
    return np.cos(2 * np.pi * (u * x / width + v * y / height) + phase)


def _gratings(rng, size, channels):
    img = np.zeros((size, size, channels))
    top = max(size // 4, 1)
    for c in range(channels):
        for _ in range(rng.integers(1, 4)):
            u, v = rng.integers(-top, top + 1, size=2)
            img[:, :, c] += rng.uniform(0.3, 1.0) * grating(size, size, u, v, rng.uniform(0, 2 * np.pi))
    return img


def _checkerboards(rng, size, channels):
    cell = int(rng.integers(2, max(size // 4, 2) + 1))
    oy, ox = rng.integers(0, cell, size=2)
    y, x = np.mgrid[0:size, 0:size]
    board = np.where(((y + oy) // cell + (x + ox) // cell) % 2 == 0, 1.0, -1.0)
    gains = rng.uniform(0.4, 1.0, size=channels)
    return board[:, :, None] * gains


def _filtered_noise(rng, size, channels):
    noise = rng.normal(size=(size, size, channels))
    cutoff = rng.uniform(size / 16, size / 4)
    mask = (center_distance(size, size) <= cutoff)[:, :, None]
    spec = fftshift(dft2(noise))
    smooth = idft2(ifftshift(Spectrum(spec.values * mask)), real_source=False)
    return smooth


def _blobs(rng, size, channels):
    y, x = np.mgrid[0:size, 0:size]
    img = np.zeros((size, size, channels))
    for _ in range(rng.integers(2, 6)):
        cy, cx = rng.uniform(0, size, size=2)
        sigma = rng.uniform(size / 16, size / 5)
        bump = np.exp(-((y - cy) ** 2 + (x - cx) ** 2) / (2 * sigma**2))
        img += bump[:, :, None] * rng.uniform(-1, 1, size=channels)
    return img


_GENERATORS = {
    "gratings": _gratings,
    "checkerboards": _checkerboards,
    "filtered_noise": _filtered_noise,
    "blobs": _blobs,
}


def _fit_range(img):
    peak = np.max(np.abs(img))
    return img / peak if peak > 1.0 else img


def generate_corpus(spec: CorpusSpec) -> np.ndarray:
    """``(count, size, size, channels)`` stack, reproducible from ``spec.seed``."""
    rng = np.random.default_rng(spec.seed)
    gen = _GENERATORS[spec.kind]
    return np.stack([_fit_range(gen(rng, spec.size, spec.channels)) for _ in range(spec.count)])


def texture_fixture(size: int = 64, seed: int = 7) -> np.ndarray:
    """RGB test texture in ``[-1, 1]``: gratings over smooth blobs."""
    rng = np.random.default_rng(seed)
    img = 0.6 * _blobs(rng, size, 3) + 0.5 * _gratings(rng, size, 3)
    img = img - img.mean(axis=(0, 1))
    # contrast near full range: std ~0.45 per channel, clipped into [-0.95, 0.95]
    return np.clip(0.45 * img / img.std(axis=(0, 1)), -0.95, 0.95)
