# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: pair-quotient scans and a CSR conjugate-gradient loop."""

import numpy as np

from libc.math cimport fabs, pow, sqrt


def pair_quotient_max(double[::1] x, double[::1] y, double[::1] v, double alpha):
    """Max over unordered pairs of |v_i - v_j| / dist(i, j)^alpha."""
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i, j
    cdef double best = 0.0, dx, dy, dv, r2, q
    cdef bint unit = alpha == 1.0
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                dv = fabs(v[i] - v[j])
                if dv == 0.0:
                    continue
                dx = x[i] - x[j]
                dy = y[i] - y[j]
                r2 = dx * dx + dy * dy
                if r2 > 0.0:
                    if unit:
                        q = dv / sqrt(r2)
                    else:
                        q = dv / pow(r2, 0.5 * alpha)
                    if q > best:
                        best = q
    return best


def pair_quotient_max_cross(double[::1] x1, double[::1] y1, double[::1] v1,
                            double[::1] x2, double[::1] y2, double[::1] v2,
                            double alpha):
    """Max quotient over pairs taking one point from each set."""
    cdef Py_ssize_t n = x1.shape[0], m = x2.shape[0]
    cdef Py_ssize_t i, j
    cdef double best = 0.0, dx, dy, dv, r2, q
    cdef bint unit = alpha == 1.0
    with nogil:
        for i in range(n):
            for j in range(m):
                dv = fabs(v1[i] - v2[j])
                if dv == 0.0:
                    continue
                dx = x1[i] - x2[j]
                dy = y1[i] - y2[j]
                r2 = dx * dx + dy * dy
                if r2 > 0.0:
                    if unit:
                        q = dv / sqrt(r2)
                    else:
                        q = dv / pow(r2, 0.5 * alpha)
                    if q > best:
                        best = q
    return best


def pair_quotient_max_indexed(double[::1] x, double[::1] y, double[::1] v,
                              long long[::1] ii, long long[::1] jj, double alpha):
    """Max quotient over the explicit index pairs (ii[k], jj[k])."""
    cdef Py_ssize_t npairs = ii.shape[0]
    cdef Py_ssize_t k
    cdef long long i, j
    cdef double best = 0.0, dx, dy, dv, r2, q
    cdef bint unit = alpha == 1.0
    with nogil:
        for k in range(npairs):
            i = ii[k]
            j = jj[k]
            dv = fabs(v[i] - v[j])
            if dv == 0.0:
                continue
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            r2 = dx * dx + dy * dy
            if r2 > 0.0:
                if unit:
                    q = dv / sqrt(r2)
                else:
                    q = dv / pow(r2, 0.5 * alpha)
                if q > best:
                    best = q
    return best


cdef void _csr_matvec(long long[::1] indptr, long long[::1] indices,
                      double[::1] data, double[::1] x, double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = indptr.shape[0] - 1
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * x[indices[k]]
        out[i] = acc


def pcg_solve(long long[::1] indptr, long long[::1] indices, double[::1] data,
              double[::1] b, double[::1] inv_diag, double[::1] x0,
              double rtol, long long maxiter):
    """Jacobi-preconditioned conjugate gradients on a CSR SPD matrix.

    Returns (x, iterations, history of relative residuals).
    """
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t i
    x_arr = np.array(x0, dtype=np.float64, copy=True)
    r_arr = np.empty(n, dtype=np.float64)
    z_arr = np.empty(n, dtype=np.float64)
    p_arr = np.empty(n, dtype=np.float64)
    Ap_arr = np.empty(n, dtype=np.float64)
    hist = []
    cdef double[::1] x = x_arr
    cdef double[::1] r = r_arr
    cdef double[::1] z = z_arr
    cdef double[::1] p = p_arr
    cdef double[::1] Ap = Ap_arr
    cdef double bnorm = 0.0, rn, rz, rz_new, pAp, a, beta, scale
    cdef long long k, it = 0

    _csr_matvec(indptr, indices, data, x, Ap)
    with nogil:
        for i in range(n):
            r[i] = b[i] - Ap[i]
            bnorm += b[i] * b[i]
    bnorm = sqrt(bnorm)
    scale = bnorm if bnorm > 0.0 else 1.0
    rn = 0.0
    for i in range(n):
        rn += r[i] * r[i]
    rn = sqrt(rn)
    hist.append(rn / scale)
    if rn / scale <= rtol:
        return x_arr, 0, np.asarray(hist)
    rz = 0.0
    with nogil:
        for i in range(n):
            z[i] = inv_diag[i] * r[i]
            p[i] = z[i]
    for i in range(n):
        rz += r[i] * z[i]
    for k in range(1, maxiter + 1):
        _csr_matvec(indptr, indices, data, p, Ap)
        pAp = 0.0
        for i in range(n):
            pAp += p[i] * Ap[i]
        if pAp <= 0.0:
            break
        a = rz / pAp
        rn = 0.0
        with nogil:
            for i in range(n):
                x[i] += a * p[i]
                r[i] -= a * Ap[i]
                rn += r[i] * r[i]
        rn = sqrt(rn)
        it = k
        hist.append(rn / scale)
        if rn / scale <= rtol:
            return x_arr, it, np.asarray(hist)
        rz_new = 0.0
        with nogil:
            for i in range(n):
                z[i] = inv_diag[i] * r[i]
        for i in range(n):
            rz_new += r[i] * z[i]
        beta = rz_new / rz
        rz = rz_new
        with nogil:
            for i in range(n):
                p[i] = z[i] + beta * p[i]
    return x_arr, it, np.asarray(hist)
