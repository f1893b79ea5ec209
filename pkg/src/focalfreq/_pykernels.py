"""Pure numpy fallback for the compiled row-wise DFT kernels.

Signatures and semantics mirror ``_ckernels`` exactly so the dispatcher can
swap one for the other.
"""

import numpy as np


def _bit_reverse_indices(n):
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def fft_radix2(data, twiddles, inverse):
    """In-place radix-2 FFT of each row, vectorized over rows and butterflies."""
    rows, n = data.shape
    if n <= 1:
        return
    tw = np.conj(twiddles) if inverse else twiddles
    work = data[:, _bit_reverse_indices(n)]
    size = 2
    while size <= n:
        half = size // 2
        w = tw[:: n // size][:half]
        blocks = work.reshape(rows, n // size, size)
        top = blocks[:, :, :half]
        bottom = blocks[:, :, half:] * w
        work = np.concatenate((top + bottom, top - bottom), axis=2).reshape(rows, n)
        size *= 2
    data[...] = work


def dft_direct(data, roots, inverse):
    """Direct O(n^2) DFT of each row via a dense twiddle matrix."""
    n = data.shape[1]
    k = np.arange(n)
    mat = roots[np.outer(k, k) % n]
    if inverse:
        mat = np.conj(mat)
    return data @ mat.T
