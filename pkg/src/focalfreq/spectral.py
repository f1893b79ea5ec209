"""2D Fourier and cosine transforms of multi-channel images.

Images are float arrays shaped ``(height, width, channels)``; a 2D array is
taken as a single channel. Every channel is transformed independently along
the two spatial axes. Array index ``[v, u, c]`` of a spectrum holds the
coefficient ``F(u, v)`` where ``u`` pairs with the column (x) coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .kernels import dft_axis

# Imaginary residue tolerated by idft2, relative to the output value scale.
IMAG_TOL = 1e-6


def _first_bad_index(arr):
    bad = np.argwhere(~np.isfinite(arr))
    return tuple(int(i) for i in bad[0])


def as_image(image, name: str = "image") -> np.ndarray:
    """Validate and return ``image`` as a float64 ``(H, W, C)`` array.

    Raises:
        ValueError: wrong rank, empty axis, or a non-finite value (the message
            names the first offending index).
    """
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValueError(f"{name} must be 2D or (H, W, C), got shape {arr.shape}")
    if min(arr.shape) < 1:
        raise ValueError(f"{name} has an empty axis: shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has a non-finite value at index {_first_bad_index(arr)}")
    return arr


@dataclass(frozen=True)
class Spectrum:
    """Complex ``(H, W, C)`` frequency representation of an image."""

    values: np.ndarray
    orthonormalized: bool = True

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128)
        if vals.ndim == 2:
            vals = vals[:, :, None]
        if vals.ndim != 3:
            raise ValueError(f"spectrum must be (H, W, C), got shape {vals.shape}")
        if not (np.all(np.isfinite(vals.real)) and np.all(np.isfinite(vals.imag))):
            raise ValueError(f"spectrum has a non-finite value at index {_first_bad_index(vals)}")
        object.__setattr__(self, "values", vals)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return self.values.shape[2]

    @property
    def shape(self):
        return self.values.shape


def fft2_raw(x: np.ndarray, inverse: bool = False, axes=(0, 1)) -> np.ndarray:
    """Unnormalized 2D DFT over ``axes`` of an arbitrary-rank array."""
    out = dft_axis(x, axes[0], inverse)
    return dft_axis(out, axes[1], inverse)


def dft2(image, orthonormalize: bool = True) -> Spectrum:
    """Per-channel 2D DFT, optionally divided by ``sqrt(H*W)``.

    The DC coefficient lands at index ``(0, 0)``.
    """
    img = as_image(image)
    values = fft2_raw(img)
    if orthonormalize:
        values = values / np.sqrt(img.shape[0] * img.shape[1])
    return Spectrum(values, orthonormalized=orthonormalize)


def idft2(spectrum: Spectrum, real_source: bool = True) -> np.ndarray:
    """Inverse of :func:`dft2` under the spectrum's own normalization.

    Returns the real part. When ``real_source`` is set, an imaginary residue
    above ``IMAG_TOL`` of the value scale raises ``ValueError``.
    """
    if not isinstance(spectrum, Spectrum):
        spectrum = Spectrum(spectrum)
    h, w = spectrum.height, spectrum.width
    out = fft2_raw(spectrum.values, inverse=True)
    out = out / np.sqrt(h * w) if spectrum.orthonormalized else out / (h * w)
    if real_source:
        scale = max(float(np.max(np.abs(out))), 1.0)
        residue = float(np.max(np.abs(out.imag)))
        if residue > IMAG_TOL * scale:
            raise ValueError(
                f"inverse transform has imaginary residue {residue:.3g}; "
                "spectrum is not conjugate-symmetric"
            )
    return np.ascontiguousarray(out.real)


@lru_cache(maxsize=32)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II basis; row ``k`` is the ``k``-th cosine."""
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    mat = np.cos(np.pi * (2 * j + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
    mat[0] /= np.sqrt(2.0)
    mat.setflags(write=False)
    return mat


def dct2_raw(x: np.ndarray, inverse: bool = False, axes=(0, 1)) -> np.ndarray:
    """Orthonormal 2D DCT-II (or its inverse) over ``axes``."""
    out = np.asarray(x, dtype=np.float64)
    for axis in axes:
        mat = dct_matrix(out.shape[axis])
        if inverse:
            mat = mat.T
        out = np.moveaxis(np.tensordot(mat, out, axes=([1], [axis])), 0, axis)
    return out


def dct2(image) -> np.ndarray:
    """Orthonormal type-II 2D DCT of each channel."""
    return dct2_raw(as_image(image))


def idct2(coeffs) -> np.ndarray:
    """Inverse of :func:`dct2`."""
    return dct2_raw(as_image(coeffs, "coefficients"), inverse=True)


def fftshift(spectrum: Spectrum) -> Spectrum:
    """Move the DC term to ``(H // 2, W // 2)``."""
    vals = np.roll(spectrum.values, (spectrum.height // 2, spectrum.width // 2), axis=(0, 1))
    return Spectrum(vals, spectrum.orthonormalized)


def ifftshift(spectrum: Spectrum) -> Spectrum:
    vals = np.roll(spectrum.values, (-(spectrum.height // 2), -(spectrum.width // 2)), axis=(0, 1))
    return Spectrum(vals, spectrum.orthonormalized)


def _values(spectrum):
    return spectrum.values if isinstance(spectrum, Spectrum) else np.asarray(spectrum, dtype=np.complex128)


def amplitude(spectrum) -> np.ndarray:
    return np.abs(_values(spectrum))


def phase(spectrum) -> np.ndarray:
    """Quadrant-correct phase in ``(-pi, pi]``; zero where the value is 0."""
    vals = _values(spectrum)
    out = np.arctan2(vals.imag, vals.real)
    # atan2(-0.0, x<0) gives -pi; fold onto +pi
    out[out == -np.pi] = np.pi
    out[(vals.real == 0) & (vals.imag == 0)] = 0.0
    return out


def log_amplitude_view(spectrum: Spectrum) -> np.ndarray:
    """Centered ``log(1 + |F|)`` rescaled to ``[0, 1]`` per channel."""
    view = np.log1p(amplitude(fftshift(spectrum)))
    lo = view.min(axis=(0, 1), keepdims=True)
    hi = view.max(axis=(0, 1), keepdims=True)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    return np.where(span > 0, (view - lo) / safe, 0.0)
