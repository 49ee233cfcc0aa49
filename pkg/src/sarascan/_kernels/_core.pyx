# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: sequential window-contrast recursion and maximizer sweep."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def equal_weight_profile(const double[::1] y, Py_ssize_t h):
    """Mean over (x-h, x] minus mean over (x, x+h], for x = h .. n-h."""
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t m = n - 2 * h + 1
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double left = 0.0
    cdef double right = 0.0
    cdef Py_ssize_t k, p
    for k in range(h):
        left += y[k]
    for k in range(h, 2 * h):
        right += y[k]
    out[0] = (left - right) / h
    for p in range(1, m):
        out[p] = out[p - 1] + (2.0 * y[h + p - 1] - y[p - 1] - y[2 * h + p - 1]) / h
    return out_arr


def local_max_keep(const double[::1] absd, Py_ssize_t h):
    """Offsets dominating their open radius-(h-1) window, leftmost among ties.

    Monotonic-deque sweep; the deque front is the earliest offset attaining
    the maximum of the current window.
    """
    cdef Py_ssize_t m = absd.shape[0]
    cdef Py_ssize_t r = h - 1
    dq_arr = np.empty(m, dtype=np.intp)
    keep_arr = np.empty(m, dtype=np.intp)
    cdef Py_ssize_t[::1] dq = dq_arr
    cdef Py_ssize_t[::1] keep = keep_arr
    cdef Py_ssize_t head = 0
    cdef Py_ssize_t tail = 0
    cdef Py_ssize_t kept = 0
    cdef Py_ssize_t q, d
    cdef double v
    for q in range(m + r):
        if q < m:
            v = absd[q]
            while tail > head and absd[dq[tail - 1]] < v:
                tail -= 1
            dq[tail] = q
            tail += 1
        d = q - r
        if d < 0:
            continue
        while dq[head] < d - r:
            head += 1
        if dq[head] == d:
            keep[kept] = d
            kept += 1
    return keep_arr[:kept].copy()
