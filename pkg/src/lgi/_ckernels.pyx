# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled float64 kernels; same contracts as ``_kernels_py``."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def cauchy_mul_flat(const double[:, ::1] a, const double[:, ::1] b, Py_ssize_t order):
    cdef Py_ssize_t n = a.shape[1]
    cdef Py_ssize_t p, q, i
    out = np.zeros((order + 1, n))
    cdef double[:, ::1] o = out
    for p in range(order + 1):
        for q in range(order + 1 - p):
            for i in range(n):
                o[p + q, i] += a[p, i] * b[q, i]
    return out


def cauchy_matmul3(const double[:, :, ::1] a, const double[:, :, ::1] b, Py_ssize_t order):
    cdef Py_ssize_t r = a.shape[1], kk = a.shape[2], c = b.shape[2]
    cdef Py_ssize_t p, q, i, j, l
    cdef double s
    out = np.zeros((order + 1, r, c))
    cdef double[:, :, ::1] o = out
    for p in range(order + 1):
        for q in range(order + 1 - p):
            for i in range(r):
                for j in range(c):
                    s = 0.0
                    for l in range(kk):
                        s += a[p, i, l] * b[q, l, j]
                    o[p + q, i, j] += s
    return out


def cauchy_mul2(const double[:, ::1] a, const double[:, ::1] b, Py_ssize_t order_a, Py_ssize_t order_b):
    cdef Py_ssize_t i, j, k, l
    cdef double aij
    out = np.zeros((order_a + 1, order_b + 1))
    cdef double[:, ::1] o = out
    for i in range(order_a + 1):
        for j in range(order_b + 1):
            aij = a[i, j]
            if aij == 0.0:
                continue
            for k in range(order_a + 1 - i):
                for l in range(order_b + 1 - j):
                    o[i + k, j + l] += aij * b[k, l]
    return out


def taylor_linear(const double[:, ::1] x0, const double[:, :, ::1] c, Py_ssize_t order):
    cdef Py_ssize_t n = x0.shape[0], m = x0.shape[1]
    cdef Py_ssize_t k, p, i, j, l
    cdef double s
    out = np.zeros((order + 1, n, m))
    cdef double[:, :, ::1] o = out
    o[0, :, :] = x0
    for k in range(order):
        for p in range(k + 1):
            for i in range(n):
                for j in range(m):
                    s = 0.0
                    for l in range(m):
                        s += o[k - p, i, l] * c[p, l, j]
                    o[k + 1, i, j] += s
        for i in range(n):
            for j in range(m):
                o[k + 1, i, j] /= (k + 1)
    return out
