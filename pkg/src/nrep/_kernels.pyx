# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot kernels."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

NAME = "cython"


def rdm_batch(const cnp.complex128_t[:, ::1] amps,
              const cnp.int64_t[::1] src, const cnp.int64_t[::1] dst,
              const cnp.float64_t[::1] sign, const cnp.int64_t[::1] flat,
              const cnp.int64_t[::1] group_starts, const cnp.int64_t[::1] group_flat,
              int r):
    cdef Py_ssize_t m = amps.shape[0]
    cdef Py_ssize_t nrow = src.shape[0]
    cdef Py_ssize_t s, t
    out = np.zeros((m, r * r), dtype=np.complex128)
    cdef cnp.complex128_t[:, ::1] o = out
    for s in range(m):
        for t in range(nrow):
            o[s, flat[t]] = o[s, flat[t]] + sign[t] * amps[s, dst[t]].conjugate() * amps[s, src[t]]
    return out.reshape(m, r, r)


def compound_matrix(const cnp.complex128_t[:, ::1] u, const cnp.int64_t[:, ::1] dets):
    cdef Py_ssize_t dim = dets.shape[0]
    cdef Py_ssize_t n = dets.shape[1]
    cdef Py_ssize_t p, q, a, b, col, piv, k
    cdef double best, mag
    cdef cnp.complex128_t factor, det, tmp
    out = np.empty((dim, dim), dtype=np.complex128)
    cdef cnp.complex128_t[:, ::1] o = out
    work_arr = np.empty((n, n), dtype=np.complex128)
    cdef cnp.complex128_t[:, ::1] w = work_arr
    for p in range(dim):
        for q in range(dim):
            for a in range(n):
                for b in range(n):
                    w[a, b] = u[dets[p, a], dets[q, b]]
            # LU with partial pivoting on the n x n minor
            det = 1.0 + 0.0j
            for col in range(n):
                piv = col
                best = w[col, col].real * w[col, col].real + w[col, col].imag * w[col, col].imag
                for k in range(col + 1, n):
                    mag = w[k, col].real * w[k, col].real + w[k, col].imag * w[k, col].imag
                    if mag > best:
                        best = mag
                        piv = k
                if best == 0.0:
                    det = 0.0 + 0.0j
                    break
                if piv != col:
                    for b in range(col, n):
                        tmp = w[col, b]
                        w[col, b] = w[piv, b]
                        w[piv, b] = tmp
                    det = -det
                det = det * w[col, col]
                for k in range(col + 1, n):
                    factor = w[k, col] / w[col, col]
                    for b in range(col + 1, n):
                        w[k, b] = w[k, b] - factor * w[col, b]
            o[p, q] = det
    return out
