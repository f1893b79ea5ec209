"""Backend selection and size dispatch for 1D transforms along an axis.

The compiled extension is used when it imports; set ``FOCALFREQ_PURE_PYTHON=1``
to force the numpy fallback. Power-of-two lengths use radix-2, short odd
lengths the direct sum, and long non-power-of-two lengths Bluestein's chirp-z
on top of radix-2.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from . import _pykernels

if os.environ.get("FOCALFREQ_PURE_PYTHON", "") not in ("", "0"):
    _native = None
else:
    try:
        from . import _ckernels as _native
    except ImportError:  # pragma: no cover - depends on build environment
        _native = None

BACKEND = "cython" if _native is not None else "python"

# Above this, non-power-of-two rows go through Bluestein instead of O(n^2).
DIRECT_MAX = 64

# The dense BLAS product beats the compiled direct loop at every n <= DIRECT_MAX
# (benchmarks/bench_kernels.py), so both backends use it for that path.
DIRECT_BACKEND = "python"


def _impl(name, backend=None):
    backend = backend or BACKEND
    if backend == "cython":
        if _native is None:
            raise RuntimeError("compiled kernels are not available")
        return getattr(_native, name)
    if backend == "python":
        return getattr(_pykernels, name)
    raise ValueError(f"unknown backend {backend!r}")


@lru_cache(maxsize=64)
def _roots(n):
    # exp(-2j*pi*m/n) evaluated from exact integer m
    roots = np.exp(-2j * np.pi * np.arange(n) / n)
    roots.setflags(write=False)
    return roots


@lru_cache(maxsize=64)
def _twiddles(n):
    tw = np.ascontiguousarray(_roots(n)[: max(n // 2, 1)])
    tw.setflags(write=False)
    return tw


@lru_cache(maxsize=32)
def _chirp(n):
    m = np.arange(n, dtype=np.int64)
    # m^2 mod 2n keeps the angle small; the chirp has period 2n in m^2
    chirp = np.exp(-1j * np.pi * ((m * m) % (2 * n)) / n)
    length = 1 << (2 * n - 2).bit_length()
    kernel = np.zeros(length, dtype=np.complex128)
    kernel[:n] = np.conj(chirp)
    kernel[length - n + 1 :] = np.conj(chirp[1:][::-1])
    chirp.setflags(write=False)
    kernel.setflags(write=False)
    return chirp, kernel, length


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def _radix2(rows, inverse, backend):
    out = np.ascontiguousarray(rows, dtype=np.complex128).copy()
    _impl("fft_radix2", backend)(out, _twiddles(out.shape[1]), bool(inverse))
    return out


def _bluestein(rows, inverse, backend):
    n = rows.shape[1]
    chirp, kernel, length = _chirp(n)
    if inverse:
        chirp, kernel = np.conj(chirp), np.conj(kernel)
    padded = np.zeros((rows.shape[0], length), dtype=np.complex128)
    padded[:, :n] = rows * chirp
    spec_a = _radix2(padded, False, backend)
    spec_b = _radix2(kernel[None, :], False, backend)
    conv = _radix2(spec_a * spec_b, True, backend) / length
    return conv[:, :n] * chirp


def dft_rows(rows: np.ndarray, inverse: bool = False, backend: str | None = None) -> np.ndarray:
    """Unnormalized DFT of every row of a 2D complex array.

    Forward uses the ``exp(-2j*pi*k*j/n)`` kernel, inverse the conjugate one;
    neither divides by ``n``.
    """
    rows = np.ascontiguousarray(rows, dtype=np.complex128)
    n = rows.shape[1]
    if n == 1:
        return rows.copy()
    if is_power_of_two(n):
        return _radix2(rows, inverse, backend)
    if n <= DIRECT_MAX:
        return _impl("dft_direct", DIRECT_BACKEND)(rows, _roots(n), bool(inverse))
    return _bluestein(rows, inverse, backend)


def dft_axis(x: np.ndarray, axis: int, inverse: bool = False, backend: str | None = None) -> np.ndarray:
    """Apply :func:`dft_rows` along one axis of an N-d array."""
    moved = np.moveaxis(np.asarray(x), axis, -1)
    shape = moved.shape
    out = dft_rows(moved.reshape(-1, shape[-1]), inverse, backend)
    return np.moveaxis(out.reshape(shape), -1, axis)
