# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the sequential spectrum recursions.

Mirrors ``_pykernels`` function for function; see that module for the
contracts.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

cdef int RATIO = 0, CARRY = 1, NUM_ZERO = 2, DEN_ZERO = 3


def horner(coeffs, x):
    cdef const double[::1] c = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef const double[::1] xs = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0], d = c.shape[0] - 1, i, k
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double ck
    # coefficient-major order keeps the inner loop free of a dependency chain
    for i in range(n):
        o[i] = c[d]
    for k in range(d - 1, -1, -1):
        ck = c[k]
        for i in range(n):
            o[i] = o[i] * xs[i] + ck
    return out


def product_recursion(factors, double start, double tol, double blowup=np.inf):
    cdef const double[::1] f = np.ascontiguousarray(factors, dtype=np.float64)
    cdef Py_ssize_t n = f.shape[0], k
    out = np.empty(n + 1, dtype=np.float64)
    cdef double[::1] o = out
    cdef double acc = start, phi
    o[0] = start
    for k in range(n):
        phi = f[k]
        if fabs(phi) <= tol:
            o[k + 1] = 0.0
            return out[: k + 2], k + 1
        acc = acc * phi
        o[k + 1] = acc
        if fabs(acc) > blowup:
            return out[: k + 2], -2
    return out, -1


def ratio_recursion(num, den, double start, double tol):
    cdef const double[::1] a = np.ascontiguousarray(num, dtype=np.float64)
    cdef const double[::1] b = np.ascontiguousarray(den, dtype=np.float64)
    cdef Py_ssize_t n = a.shape[0], k, j
    out = np.empty(n + 1, dtype=np.float64)
    cases = np.empty(n, dtype=np.int8)
    cdef double[::1] o = out
    cdef signed char[::1] cs = cases
    cdef bint za, zb
    cdef Py_ssize_t obstruction = -1
    o[0] = start
    for k in range(n):
        za = fabs(a[k]) <= tol
        zb = fabs(b[k]) <= tol
        if not za and not zb:
            o[k + 1] = o[k] * a[k] / b[k]
            cs[k] = RATIO
        elif za and zb:
            o[k + 1] = o[k]
            cs[k] = CARRY
        elif za:
            o[k + 1] = 0.0
            cs[k] = NUM_ZERO
            if obstruction < 0:
                obstruction = k + 1
        else:
            for j in range(k + 1):
                o[j] = 0.0
            o[k + 1] = 1.0
            cs[k] = DEN_ZERO
            if obstruction < 0:
                obstruction = k + 1
    return out, cases, obstruction


def q_integral_sums(values, double limit, double q2):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0], k
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double acc = limit / (1.0 - q2)
    for k in range(n - 1, -1, -1):
        acc = v[k] + q2 * acc
        o[k] = acc
    return out
