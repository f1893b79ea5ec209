"""Hard band-limiting masks applied in the centered spectrum."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import Spectrum, as_image, dft2, fftshift, idft2, ifftshift

KINDS = ("lowpass", "highpass", "bandstop", "notch")


@dataclass(frozen=True)
class MaskSpec:
    """Parameters of a band-limiting mask.

    ``radius`` serves lowpass/highpass, ``inner``/``outer`` the bandstop
    annulus, and ``points`` lists ``(row, col)`` positions in the centered
    frame for notch.
    """

    kind: str
    radius: float | None = None
    inner: float | None = None
    outer: float | None = None
    points: tuple = field(default_factory=tuple)


def default_spec(kind: str, height: int, width: int) -> MaskSpec:
    """Mask parameters used when the caller gives no radii."""
    short = min(height, width)
    if kind in ("lowpass", "highpass"):
        return MaskSpec(kind, radius=short / 8)
    if kind == "bandstop":
        return MaskSpec(kind, inner=short / 8, outer=short / 4)
    if kind == "notch":
        return MaskSpec(kind, points=((height // 2, width // 2),))
    raise ValueError(f"unknown mask kind {kind!r}; expected one of {KINDS}")


def center_distance(height: int, width: int) -> np.ndarray:
    """Euclidean distance of every centered-frame position from the DC slot."""
    y = np.arange(height) - height // 2
    x = np.arange(width) - width // 2
    return np.hypot(y[:, None], x[None, :])


def make_mask(spec: MaskSpec, height: int, width: int) -> np.ndarray:
    """Binary ``(H, W)`` mask in the fftshifted frame."""
    if height < 1 or width < 1:
        raise ValueError(f"mask size must be positive, got {height}x{width}")
    dist = center_distance(height, width)
    if spec.kind == "lowpass":
        _check_radius(spec.radius)
        return (dist <= spec.radius).astype(np.float64)
    if spec.kind == "highpass":
        _check_radius(spec.radius)
        return (dist >= spec.radius).astype(np.float64)
    if spec.kind == "bandstop":
        _check_radius(spec.inner, "inner")
        _check_radius(spec.outer, "outer")
        if not spec.inner < spec.outer:
            raise ValueError(f"bandstop needs inner < outer, got {spec.inner} >= {spec.outer}")
        return 1.0 - ((dist >= spec.inner) & (dist <= spec.outer))
    if spec.kind == "notch":
        mask = np.ones((height, width))
        for row, col in spec.points:
            if not (0 <= row < height and 0 <= col < width):
                raise ValueError(f"notch point ({row}, {col}) outside {height}x{width}")
            mask[row, col] = 0.0
        return mask
    raise ValueError(f"unknown mask kind {spec.kind!r}; expected one of {KINDS}")


def _check_radius(value, name="radius"):
    if value is None or not np.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be a non-negative number, got {value}")


def apply_filter(image, mask, value_range=None) -> np.ndarray:
    """Filter every channel through ``mask`` and return the spatial result.

    The output is the real part of the inverse transform; it is clipped to
    ``value_range`` only when one is given (export paths pass the pixel
    range, analysis paths leave it unclipped).
    """
    img = as_image(image)
    mask = np.asarray(mask, dtype=np.float64)
    if mask.shape != img.shape[:2]:
        raise ValueError(f"mask shape {mask.shape} does not match image {img.shape[:2]}")
    centered = fftshift(dft2(img))
    filtered = ifftshift(Spectrum(centered.values * mask[:, :, None], centered.orthonormalized))
    out = idft2(filtered, real_source=False)
    if value_range is not None:
        out = np.clip(out, *value_range)
    return out
