# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Mirrors ``_kernels_py`` exactly; see that module for semantics."""

from libc.math cimport INFINITY
from libc.stdlib cimport malloc, free, qsort

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef int _cmp_double(const void* a, const void* b) noexcept nogil:
    cdef double x = (<double*>a)[0]
    cdef double y = (<double*>b)[0]
    if x < y:
        return -1
    if x > y:
        return 1
    return 0


cdef void _pivot(double[:, ::1] T, Py_ssize_t r, Py_ssize_t c) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef Py_ssize_t nrows = T.shape[0]
    cdef Py_ssize_t ncols = T.shape[1]
    cdef double p = T[r, c]
    cdef double f
    for j in range(ncols):
        T[r, j] /= p
    for i in range(nrows):
        if i == r:
            continue
        f = T[i, c]
        if f != 0.0:
            for j in range(ncols):
                T[i, j] -= f * T[r, j]
            T[i, c] = 0.0


def pivot(double[:, ::1] T, Py_ssize_t r, Py_ssize_t c):
    _pivot(T, r, c)


def simplex_iterate(double[:, ::1] T, cnp.intp_t[::1] basis, Py_ssize_t ncols,
                    double tol, Py_ssize_t max_iter):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t rhs = T.shape[1] - 1
    cdef Py_ssize_t it = 0
    cdef Py_ssize_t i, j, enter, leave
    cdef int status = 2
    cdef double best, ratio, a
    with nogil:
        while it < max_iter:
            enter = -1
            for j in range(ncols):
                if T[m, j] < -tol:
                    enter = j
                    break
            if enter < 0:
                status = 0
                break
            leave = -1
            best = INFINITY
            for i in range(m):
                a = T[i, enter]
                if a > tol:
                    ratio = T[i, rhs] / a
                    if ratio < best - tol:
                        best = ratio
                        leave = i
                    elif ratio <= best + tol and basis[i] < basis[leave]:
                        leave = i
            if leave < 0:
                status = 1
                break
            _pivot(T, leave, enter)
            basis[leave] = enter
            it += 1
    return status, it


def min_conversion_gap(double[::1] freqs):
    cdef Py_ssize_t n = freqs.shape[0]
    cdef Py_ssize_t m = n * (n - 1) // 2
    cdef Py_ssize_t i, j, k
    cdef double gap = INFINITY
    cdef double* buf
    if m < 2:
        return INFINITY
    buf = <double*>malloc(m * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            buf[k] = freqs[j] - freqs[i]
            k += 1
    qsort(buf, m, sizeof(double), _cmp_double)
    for k in range(m - 1):
        if buf[k + 1] - buf[k] < gap:
            gap = buf[k + 1] - buf[k]
    free(buf)
    return gap
