# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled row-wise DFT kernels.

Both kernels work on C-contiguous complex128 arrays of shape (rows, n) and
compute the unnormalized transform of every row. Twiddle tables are built by
the caller so the compiled and pure-Python paths share identical constants.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def fft_radix2(double complex[:, ::1] data, const double complex[::1] twiddles, bint inverse):
    """In-place iterative radix-2 FFT of each row.

    ``twiddles[k] = exp(-2j*pi*k/n)`` for ``k < n/2``; conjugated on the fly
    when ``inverse`` is set.
    """
    cdef Py_ssize_t rows = data.shape[0]
    cdef Py_ssize_t n = data.shape[1]
    cdef Py_ssize_t r, i, j, bit, size, half, step, start, k, a, b
    cdef double complex t
    cdef double wr, wi, ur, ui, vr, vi, tr, ti
    cdef double sign = -1.0 if inverse else 1.0

    if n <= 1:
        return
    for r in range(rows):
        j = 0
        for i in range(1, n):
            bit = n >> 1
            while j & bit:
                j ^= bit
                bit >>= 1
            j |= bit
            if i < j:
                t = data[r, i]
                data[r, i] = data[r, j]
                data[r, j] = t

        size = 2
        while size <= n:
            half = size >> 1
            step = n // size
            start = 0
            while start < n:
                for k in range(half):
                    # real arithmetic avoids the NaN-recovery path of C complex multiply
                    wr = twiddles[k * step].real
                    wi = sign * twiddles[k * step].imag
                    a = start + k
                    b = a + half
                    vr = data[r, b].real
                    vi = data[r, b].imag
                    tr = wr * vr - wi * vi
                    ti = wr * vi + wi * vr
                    ur = data[r, a].real
                    ui = data[r, a].imag
                    data[r, a] = ur + tr + 1j * (ui + ti)
                    data[r, b] = ur - tr + 1j * (ui - ti)
                start += size
            size <<= 1


def dft_direct(const double complex[:, ::1] data, const double complex[::1] roots, bint inverse):
    """Direct O(n^2) DFT of each row; returns a new array.

    ``roots[m] = exp(-2j*pi*m/n)`` for ``m < n``; exponents are reduced mod n
    so no accuracy is lost to large angles.
    """
    cdef Py_ssize_t rows = data.shape[0]
    cdef Py_ssize_t n = data.shape[1]
    cdef Py_ssize_t r, k, j, m
    cdef double accr, acci, xr, xi
    cdef double sign = -1.0 if inverse else 1.0
    out = np.empty((rows, n), dtype=np.complex128)
    cdef double complex[:, ::1] res = out
    wre_arr = np.empty(n)
    wim_arr = np.empty(n)
    cdef double[::1] wre = wre_arr
    cdef double[::1] wim = wim_arr

    for k in range(n):
        m = 0
        for j in range(n):
            wre[j] = roots[m].real
            wim[j] = sign * roots[m].imag
            m += k
            if m >= n:
                m -= n
        for r in range(rows):
            accr = 0.0
            acci = 0.0
            for j in range(n):
                xr = data[r, j].real
                xi = data[r, j].imag
                accr += xr * wre[j] - xi * wim[j]
                acci += xr * wim[j] + xi * wre[j]
            res[r, k] = accr + 1j * acci
    return out
