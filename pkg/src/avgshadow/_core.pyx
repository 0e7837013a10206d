# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: compensated Cesaro accumulation and window scans."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def running_averages(double[::1] values):
    """Running averages (1/n) * sum(values[:n]) for n = 1..len(values).

    Accumulation is Kahan-compensated so long horizons do not lose digits.
    """
    cdef Py_ssize_t L = values.shape[0]
    out_arr = np.empty(L, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double s = 0.0, c = 0.0, y, t
    cdef Py_ssize_t i
    for i in range(L):
        y = values[i] - c
        t = s + y
        c = (t - s) - y
        s = t
        out[i] = s / <double?>(i + 1)
    return out_arr


def window_max_sums(double[::1] values):
    """Maximal window sums: out[n] = max_k sum(values[k:k+n]) for n = 1..L.

    out has length L+1 with out[0] = 0.  Prefix sums are compensated; the
    window sums themselves are plain differences of prefixes.
    """
    cdef Py_ssize_t L = values.shape[0]
    prefix_arr = np.empty(L + 1, dtype=np.float64)
    cdef double[::1] p = prefix_arr
    cdef double s = 0.0, c = 0.0, y, t
    cdef Py_ssize_t i, n, k
    p[0] = 0.0
    for i in range(L):
        y = values[i] - c
        t = s + y
        c = (t - s) - y
        s = t
        p[i + 1] = s
    out_arr = np.zeros(L + 1, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double m0, m1, m2, m3, d
    cdef Py_ssize_t kmax
    for n in range(1, L + 1):
        # four independent max chains keep the reduction out of the
        # loop-carried dependency path
        m0 = p[n] - p[0]
        m1 = m0
        m2 = m0
        m3 = m0
        kmax = L - n + 1
        k = 1
        while k + 3 < kmax:
            d = p[k + n] - p[k]
            if d > m0:
                m0 = d
            d = p[k + 1 + n] - p[k + 1]
            if d > m1:
                m1 = d
            d = p[k + 2 + n] - p[k + 2]
            if d > m2:
                m2 = d
            d = p[k + 3 + n] - p[k + 3]
            if d > m3:
                m3 = d
            k += 4
        while k < kmax:
            d = p[k + n] - p[k]
            if d > m0:
                m0 = d
            k += 1
        if m1 > m0:
            m0 = m1
        if m2 > m0:
            m0 = m2
        if m3 > m0:
            m0 = m3
        out[n] = m0
    return out_arr
