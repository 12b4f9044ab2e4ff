# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched slope-matching decoder (see _pykernel for the contract)."""

import numpy as np

from libc.math cimport fabs


cdef inline bint _before(double ma, Py_ssize_t a, double mb, Py_ssize_t b) noexcept nogil:
    return ma < mb or (ma == mb and a < b)


def decode_batch(gain, lam, ids1, ids2, double vds_min, double vds_max, double tol, bint correct):
    cdef const double[::1] g = np.ascontiguousarray(gain, dtype=np.float64)
    cdef const double[::1] l = np.ascontiguousarray(lam, dtype=np.float64)
    cdef const double[::1] a = np.ascontiguousarray(ids1, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(ids2, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], nc = g.shape[0]

    choice_arr = np.zeros(n, dtype=np.int64)
    rank_arr = np.zeros(n, dtype=np.int64)
    vds1_arr = np.empty(n, dtype=np.float64)
    vds2_arr = np.empty(n, dtype=np.float64)
    passed_arr = np.zeros(n, dtype=np.uint8)
    cdef long long[::1] choice = choice_arr
    cdef long long[::1] rank = rank_arr
    cdef double[::1] vds1 = vds1_arr
    cdef double[::1] vds2 = vds2_arr
    cdef unsigned char[::1] passed = passed_arr

    cdef double[::1] mm = np.empty(nc, dtype=np.float64)
    cdef unsigned char[::1] used = np.zeros(nc, dtype=np.uint8)
    cdef Py_ssize_t i, c, k, best
    cdef double s, lo = vds_min - tol, hi = vds_max + tol, v1, v2

    with nogil:
        for i in range(n):
            s = a[i] + b[i]
            best = 0
            for c in range(nc):
                mm[c] = fabs(l[c] * g[c] - l[c] * s / 2.0)
                if _before(mm[c], c, mm[best], best):
                    best = c
            choice[i] = best
            rank[i] = 0
            if correct:
                # pull candidates in (mismatch, index) order until one passes;
                # most pairs stop at rank 0 or 1, so no full sort
                for c in range(nc):
                    used[c] = 0
                for k in range(nc):
                    best = -1
                    for c in range(nc):
                        if not used[c] and (best < 0 or _before(mm[c], c, mm[best], best)):
                            best = c
                    used[best] = 1
                    v1 = (a[i] / g[best] - 1.0) / l[best]
                    v2 = (b[i] / g[best] - 1.0) / l[best]
                    if v1 >= lo and v1 <= hi and v2 >= lo and v2 <= hi:
                        choice[i] = best
                        rank[i] = k
                        passed[i] = 1
                        break
            c = choice[i]
            vds1[i] = (a[i] / g[c] - 1.0) / l[c]
            vds2[i] = (b[i] / g[c] - 1.0) / l[c]

    return choice_arr, rank_arr, vds1_arr, vds2_arr, passed_arr
