# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled lag-shift contractions. Mirrors ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def superdiag_sums(const double[:, ::1] g, lags):
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t[::1] lag = np.asarray(lags, dtype=np.intp)
    cdef Py_ssize_t k = lag.shape[0]
    cdef double[::1] out = np.zeros(k)
    cdef Py_ssize_t a, i, t
    cdef double acc
    with nogil:
        for a in range(k):
            t = lag[a]
            acc = 0.0
            for i in range(n - t):
                acc = acc + g[i, i + t]
            out[a] = acc
    return np.asarray(out)


def shifted_column_products(const double[:, ::1] m, lags):
    cdef Py_ssize_t n = m.shape[0]
    cdef Py_ssize_t c = m.shape[1]
    cdef Py_ssize_t[::1] lag = np.asarray(lags, dtype=np.intp)
    cdef Py_ssize_t k = lag.shape[0]
    cdef double[:, ::1] out = np.zeros((k, c))
    cdef Py_ssize_t a, i, j, t
    with nogil:
        # one sweep over rows; rows i - t are still cached for small lags
        for i in range(n):
            for a in range(k):
                t = lag[a]
                if t > i:
                    continue
                for j in range(c):
                    out[a, j] += m[i, j] * m[i - t, j]
    return np.asarray(out)


def shifted_pair_traces(const double[:, ::1] g, lags):
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t[::1] lag = np.asarray(lags, dtype=np.intp)
    cdef Py_ssize_t k = lag.shape[0]
    cdef double[:, ::1] s = np.zeros((k, k))
    cdef double[:, ::1] s2 = np.zeros((k, k))
    cdef Py_ssize_t a, b, i, j, t1, t2
    cdef double acc, acc2
    cdef const double* top
    cdef const double* low
    with nogil:
        # row pair (i, i + t1) stays hot in cache while every t2 is swept
        for a in range(k):
            t1 = lag[a]
            for i in range(n - t1):
                top = &g[i, 0]
                low = &g[i + t1, 0]
                for b in range(a, k):
                    t2 = lag[b]
                    acc = 0.0
                    acc2 = 0.0
                    for j in range(n - t2):
                        acc = acc + top[j + t2] * low[j]
                        acc2 = acc2 + top[j] * low[j + t2]
                    s[a, b] += acc
                    s2[a, b] += acc2
        for a in range(k):
            for b in range(a + 1, k):
                s[b, a] = s[a, b]
                s2[b, a] = s2[a, b]
    return np.asarray(s), np.asarray(s2)


def autocovariances(const double[::1] e, Py_ssize_t q):
    cdef Py_ssize_t n = e.shape[0]
    cdef double[::1] out = np.zeros(q + 1)
    cdef Py_ssize_t t, i
    cdef double acc
    with nogil:
        for t in range(q + 1):
            acc = 0.0
            for i in range(t, n):
                acc = acc + e[i] * e[i - t]
            out[t] = acc
    return np.asarray(out)


def quartic_sum(const double[:, ::1] a):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t c = a.shape[1]
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    cdef double x
    with nogil:
        for i in range(n):
            for j in range(c):
                x = a[i, j] * a[i, j]
                acc = acc + x * x
    return acc
