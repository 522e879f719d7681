# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled versions of the hot loops in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def triad_apply(const cnp.int64_t[::1] q, const cnp.int64_t[::1] i,
                const cnp.int64_t[::1] j, const double[::1] coef,
                const double[::1] u, Py_ssize_t m):
    cdef Py_ssize_t n = coef.shape[0], k
    out = np.zeros(m)
    cdef double[::1] o = out
    with nogil:
        for k in range(n):
            o[q[k]] += coef[k] * u[i[k]] * u[j[k]]
    return out


def triad_apply_batch(const cnp.int64_t[::1] q, const cnp.int64_t[::1] i,
                      const cnp.int64_t[::1] j, const double[::1] coef,
                      const double[:, ::1] states, Py_ssize_t m):
    cdef Py_ssize_t n = coef.shape[0], k, r, nr = states.shape[0]
    out = np.zeros((nr, m))
    cdef double[:, ::1] o = out
    with nogil:
        for r in range(nr):
            for k in range(n):
                o[r, q[k]] += coef[k] * states[r, i[k]] * states[r, j[k]]
    return out


def triad_jacobian(const cnp.int64_t[::1] q, const cnp.int64_t[::1] i,
                   const cnp.int64_t[::1] j, const double[::1] coef,
                   const double[::1] u, Py_ssize_t m):
    cdef Py_ssize_t n = coef.shape[0], k
    out = np.zeros((m, m))
    cdef double[:, ::1] o = out
    with nogil:
        for k in range(n):
            o[q[k], i[k]] += coef[k] * u[j[k]]
            o[q[k], j[k]] += coef[k] * u[i[k]]
    return out


def kahan_cumsum(x):
    cdef const double[::1] v = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0], k
    out = np.empty(n)
    cdef double[::1] o = out
    cdef double total = 0.0, comp = 0.0, t
    with nogil:
        for k in range(n):
            t = total + v[k]
            if fabs(total) >= fabs(v[k]):
                comp += (total - t) + v[k]
            else:
                comp += (v[k] - t) + total
            total = t
            o[k] = total + comp
    return out
