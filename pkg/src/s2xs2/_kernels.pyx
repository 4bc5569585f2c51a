# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batched kernels.

Same signatures and conventions as :mod:`s2xs2._fallback`; inputs must be
C-contiguous float64 with the batch on the first axis.
"""

import numpy as np
from libc.math cimport sqrt


def qmul(const double[:, ::1] p, const double[:, ::1] q):
    cdef Py_ssize_t n = p.shape[0], r
    out = np.empty((n, 4))
    cdef double[:, ::1] o = out
    cdef double a1, b1, c1, d1, a2, b2, c2, d2
    with nogil:
        for r in range(n):
            a1 = p[r, 0]; b1 = p[r, 1]; c1 = p[r, 2]; d1 = p[r, 3]
            a2 = q[r, 0]; b2 = q[r, 1]; c2 = q[r, 2]; d2 = q[r, 3]
            o[r, 0] = a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2
            o[r, 1] = a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2
            o[r, 2] = a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2
            o[r, 3] = a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2
    return out


cdef inline void _std_matrix(double a, double b, double c, double d,
                             double* R) noexcept nogil:
    R[0] = a * a + b * b - c * c - d * d
    R[1] = 2.0 * (b * c - a * d)
    R[2] = 2.0 * (b * d + a * c)
    R[3] = 2.0 * (b * c + a * d)
    R[4] = a * a - b * b + c * c - d * d
    R[5] = 2.0 * (c * d - a * b)
    R[6] = 2.0 * (b * d - a * c)
    R[7] = 2.0 * (c * d + a * b)
    R[8] = a * a - b * b - c * c + d * d


def qrotate(const double[:, ::1] w, const double[:, ::1] x):
    cdef Py_ssize_t n = w.shape[0], r, i
    out = np.empty((n, 3))
    cdef double[:, ::1] o = out
    cdef double R[9]
    with nogil:
        for r in range(n):
            _std_matrix(w[r, 0], w[r, 1], w[r, 2], w[r, 3], R)
            for i in range(3):
                o[r, i] = R[i] * x[r, 0] + R[3 + i] * x[r, 1] + R[6 + i] * x[r, 2]
    return out


cdef inline Py_ssize_t _perm(Py_ssize_t i) noexcept nogil:
    # (j, i, k) <-> (i, j, k)
    return 1 - i if i < 2 else 2


def spin_cover(const double[:, ::1] w):
    cdef Py_ssize_t n = w.shape[0], r, i, k
    out = np.empty((n, 3, 3))
    cdef double[:, :, ::1] o = out
    cdef double R[9]
    with nogil:
        for r in range(n):
            _std_matrix(w[r, 0], w[r, 1], w[r, 2], w[r, 3], R)
            for i in range(3):
                for k in range(3):
                    o[r, i, k] = R[3 * _perm(k) + _perm(i)]
    return out


def lift(const double[:, :, ::1] rho):
    cdef Py_ssize_t n = rho.shape[0], r, i, k
    out = np.empty((n, 4))
    cdef double[:, ::1] o = out
    cdef double R[9]
    cdef double tr, s, a, b, c, d, nrm
    with nogil:
        for r in range(n):
            for i in range(3):
                for k in range(3):
                    R[3 * i + k] = rho[r, _perm(k), _perm(i)]
            tr = R[0] + R[4] + R[8]
            if tr >= R[0] and tr >= R[4] and tr >= R[8]:
                s = sqrt(1.0 + tr) * 2.0
                a = 0.25 * s
                b = (R[7] - R[5]) / s
                c = (R[2] - R[6]) / s
                d = (R[3] - R[1]) / s
            elif R[0] >= R[4] and R[0] >= R[8]:
                s = sqrt(1.0 + R[0] - R[4] - R[8]) * 2.0
                a = (R[7] - R[5]) / s
                b = 0.25 * s
                c = (R[1] + R[3]) / s
                d = (R[2] + R[6]) / s
            elif R[4] >= R[8]:
                s = sqrt(1.0 - R[0] + R[4] - R[8]) * 2.0
                a = (R[2] - R[6]) / s
                b = (R[1] + R[3]) / s
                c = 0.25 * s
                d = (R[5] + R[7]) / s
            else:
                s = sqrt(1.0 - R[0] - R[4] + R[8]) * 2.0
                a = (R[3] - R[1]) / s
                b = (R[2] + R[6]) / s
                c = (R[5] + R[7]) / s
                d = 0.25 * s
            nrm = sqrt(a * a + b * b + c * c + d * d)
            o[r, 0] = a / nrm
            o[r, 1] = b / nrm
            o[r, 2] = c / nrm
            o[r, 3] = d / nrm
    return out


def fa_apply(const double[:, :, ::1] A, const double[:, ::1] u,
             const double[:, ::1] v):
    cdef Py_ssize_t n = u.shape[0], r, i
    nu_arr = np.empty((n, 3))
    nv_arr = np.empty((n, 3))
    cdef double[:, ::1] nu = nu_arr
    cdef double[:, ::1] nv = nv_arr
    with nogil:
        for r in range(n):
            for i in range(3):
                nu[r, i] = -(A[r, i, 0] * v[r, 0] + A[r, i, 1] * v[r, 1]
                             + A[r, i, 2] * v[r, 2])
                nv[r, i] = (A[r, 0, i] * u[r, 0] + A[r, 1, i] * u[r, 1]
                            + A[r, 2, i] * u[r, 2])
    return nu_arr, nv_arr
