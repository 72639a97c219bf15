# cython: boundscheck=False, wraparound=False
"""Compiled hot loops for mask run-length coding and overlap counting."""

import numpy as np

cimport numpy as cnp


def rle_counts(const cnp.uint8_t[::1] flat):
    """Row-major run lengths of a flat 0/1 array; first run counts zeros."""
    cdef Py_ssize_t n = flat.shape[0]
    cdef Py_ssize_t i, run = 0, nruns = 0
    cdef cnp.uint8_t cur = 0
    out = np.empty(n + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] buf = out
    for i in range(n):
        if flat[i] == cur:
            run += 1
        else:
            buf[nruns] = run
            nruns += 1
            cur = flat[i]
            run = 1
    buf[nruns] = run
    return out[:nruns + 1].copy()


def rle_fill(const cnp.int64_t[::1] counts, Py_ssize_t n):
    """Expand run lengths back into a flat uint8 0/1 array of size n."""
    result = np.zeros(n, dtype=np.uint8)
    cdef cnp.uint8_t[::1] buf = result
    cdef Py_ssize_t pos = 0, k, j
    cdef cnp.uint8_t val = 0
    for k in range(counts.shape[0]):
        if val:
            for j in range(pos, pos + counts[k]):
                buf[j] = 1
        pos += counts[k]
        val = 1 - val
    return result


def mask_overlap(const cnp.uint8_t[::1] a, const cnp.uint8_t[::1] b):
    """Return (intersection, union) pixel counts of two flat 0/1 arrays."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i
    cdef long long inter = 0, uni = 0
    for i in range(n):
        inter += a[i] & b[i]
        uni += a[i] | b[i]
    return inter, uni
