# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gibbs-family kernels (same contract as ``_kernels_py``)."""
from libc.math cimport exp, log, isinf

import numpy as np

cdef int MAX_BISECTIONS = 200


cdef void _stats(const double[::1] lv, double T, double* E, double* S, double* C) noexcept nogil:
    cdef Py_ssize_t i, n = lv.shape[0]
    cdef double e0 = lv[0], beta, z = 0.0, ew = 0.0, w, shift, var = 0.0, d, tot = 0.0
    if isinf(T):
        for i in range(n):
            tot += lv[i]
        E[0] = tot / n
        S[0] = log(<double>n)
        C[0] = 0.0
        return
    beta = 1.0 / T
    for i in range(n):
        w = exp(-(lv[i] - e0) * beta)
        z += w
        ew += (lv[i] - e0) * w
    shift = ew / z
    for i in range(n):
        w = exp(-(lv[i] - e0) * beta)
        d = lv[i] - e0 - shift
        var += d * d * w
    var /= z
    E[0] = e0 + shift
    S[0] = log(z) + shift * beta
    C[0] = var * beta * beta


cdef double _entropy(const double[::1] lv, double T) noexcept nogil:
    cdef double E, S, C
    _stats(lv, T, &E, &S, &C)
    return S


def _as_levels(levels):
    return np.ascontiguousarray(levels, dtype=np.float64)


def gibbs_stats(levels, double T):
    cdef const double[::1] lv = _as_levels(levels)
    cdef double E, S, C
    _stats(lv, T, &E, &S, &C)
    return E, S, C


def gibbs_entropy(levels, double T):
    cdef const double[::1] lv = _as_levels(levels)
    return _entropy(lv, T)


cdef double _bisect(const double[::1] lv, double s, double lo, double hi) noexcept nogil:
    cdef double mid
    cdef int k
    if _entropy(lv, exp(lo)) >= s:
        return lo
    if _entropy(lv, exp(hi)) <= s:
        return hi
    for k in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _entropy(lv, exp(mid)) < s:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def log_temperature_of_entropy(levels, double s, double lo, double hi):
    cdef const double[::1] lv = _as_levels(levels)
    cdef double u
    with nogil:
        u = _bisect(lv, s, lo, hi)
    return u
