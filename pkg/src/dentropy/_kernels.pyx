# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Hot loops only: the dense symmetric eigensolver (Householder reduction to
tridiagonal form followed by implicit-shift QL with accumulated rotations)
and the quench survival/entropy evaluation over long time grids.  The
numpy fallback in `_kernels_py` implements the same algorithms; `backends`
selects whichever imports.
"""

from libc.math cimport sqrt, fabs, hypot, fmod, cos, sin, log, copysign

import numpy as np

cimport numpy as cnp

cnp.import_array()

from .errors import EigenConvergenceError

cdef double DBL_EPS = 2.220446049250313e-16
cdef double TWO_PI = 6.283185307179586
cdef double ENTROPY_FLOOR = 1e-300


cdef void _tred2(double* a, double* d, double* e, double* w, Py_ssize_t n) noexcept nogil:
    # Householder reduction of the full symmetric matrix `a` (row-major,
    # kept symmetric throughout so every inner loop runs on contiguous
    # rows).  On exit `a` holds the accumulated orthogonal transform Q
    # with A = Q T Q^T, `d` the tridiagonal diagonal and `e` the
    # subdiagonal (e[0] = 0, e[i] couples i-1 and i).
    cdef Py_ssize_t i, j, k, l
    cdef double scale, h, f, g, hh, uk

    for i in range(n - 1, 0, -1):
        l = i - 1
        h = 0.0
        if l > 0:
            scale = 0.0
            for k in range(l + 1):
                scale += fabs(a[i * n + k])
            if scale == 0.0:
                e[i] = a[i * n + l]
            else:
                for k in range(l + 1):
                    a[i * n + k] /= scale
                    h += a[i * n + k] * a[i * n + k]
                f = a[i * n + l]
                g = -copysign(sqrt(h), f)
                e[i] = scale * g
                h -= f * g
                a[i * n + l] = f - g
                # w = A u / h over the leading block; u is row i
                for j in range(l + 1):
                    a[j * n + i] = a[i * n + j] / h
                    g = 0.0
                    for k in range(l + 1):
                        g += a[j * n + k] * a[i * n + k]
                    w[j] = g / h
                f = 0.0
                for j in range(l + 1):
                    f += w[j] * a[i * n + j]
                hh = f / (h + h)
                for j in range(l + 1):
                    w[j] -= hh * a[i * n + j]
                # rank-2 update A -= q u^T + u q^T on the full block
                for j in range(l + 1):
                    f = a[i * n + j]
                    g = w[j]
                    for k in range(l + 1):
                        a[j * n + k] -= f * w[k] + g * a[i * n + k]
        else:
            e[i] = a[i * n + l]
        d[i] = h
    d[0] = 0.0
    e[0] = 0.0

    # accumulate the transformations into Q (stored back in `a`)
    for i in range(n):
        l = i - 1
        if d[i] != 0.0:
            for j in range(l + 1):
                w[j] = 0.0
            for k in range(l + 1):
                uk = a[i * n + k]
                for j in range(l + 1):
                    w[j] += uk * a[k * n + j]
            for k in range(l + 1):
                uk = a[k * n + i]
                for j in range(l + 1):
                    a[k * n + j] -= w[j] * uk
        d[i] = a[i * n + i]
        a[i * n + i] = 1.0
        for j in range(l + 1):
            a[j * n + i] = 0.0
            a[i * n + j] = 0.0


cdef int _tqli(double* d, double* e, double* zt, Py_ssize_t n, int max_iter,
               double* rot_c, double* rot_s, Py_ssize_t* rot_i) noexcept nogil:
    # Implicit-shift QL on the tridiagonal (d, e); e[k] couples k and k+1
    # with e[n-1] a zero sentinel.  Eigenvector slot i lives in row i of
    # `zt` (row-major), so each plane rotation streams two contiguous
    # rows.  Rotations are buffered per sweep and applied in order.
    # Returns the number of QL iterations, or -1 on non-convergence.
    cdef Py_ssize_t l, m, i, k, nrot, r
    cdef int iteration, early
    cdef double dd, g, rr, s, c, p, f, b
    cdef double* zi
    cdef double* zi1

    if n == 1:
        return 0
    for l in range(n):
        iteration = 0
        while True:
            m = n - 1
            for i in range(l, n - 1):
                dd = fabs(d[i]) + fabs(d[i + 1])
                if fabs(e[i]) <= DBL_EPS * dd:
                    m = i
                    break
            if m == l:
                break
            iteration += 1
            if iteration > max_iter:
                return -1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            rr = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(rr, g))
            s = 1.0
            c = 1.0
            p = 0.0
            nrot = 0
            early = 0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                rr = hypot(f, g)
                e[i + 1] = rr
                if rr == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    early = 1
                    break
                s = f / rr
                c = g / rr
                g = d[i + 1] - p
                rr = (d[i] - g) * s + 2.0 * c * b
                p = s * rr
                d[i + 1] = g + p
                g = c * rr - b
                rot_i[nrot] = i
                rot_c[nrot] = c
                rot_s[nrot] = s
                nrot += 1
            for r in range(nrot):
                i = rot_i[r]
                zi = zt + i * n
                zi1 = zt + (i + 1) * n
                c = rot_c[r]
                s = rot_s[r]
                for k in range(n):
                    f = zi1[k]
                    zi1[k] = s * zi[k] + c * f
                    zi[k] = c * zi[k] - s * f
            if early:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def sym_eigh(cnp.ndarray[double, ndim=2, mode="c"] a not None, int max_iter=50):
    """Eigendecomposition of the symmetric matrix `a` (destroyed in place).

    Returns (eigenvalues, zt) unsorted, where row i of `zt` is the
    eigenvector paired with eigenvalue i.
    """
    cdef Py_ssize_t n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("matrix must be square")
    cdef cnp.ndarray[double, ndim=1] d = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] e = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] w = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2] zt
    cdef cnp.ndarray[double, ndim=1] ew = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] rc = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] rs = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[Py_ssize_t, ndim=1] ri = np.zeros(n, dtype=np.intp)
    cdef int status

    with nogil:
        _tred2(&a[0, 0], &d[0], &e[0], &w[0], n)
    zt = np.ascontiguousarray(a.T)
    ew[: n - 1] = e[1:]
    ew[n - 1] = 0.0
    with nogil:
        status = _tqli(&d[0], &ew[0], &zt[0, 0], n, max_iter, &rc[0], &rs[0],
                       <Py_ssize_t*> &ri[0])
    if status < 0:
        raise EigenConvergenceError(n, max_iter)
    return d, zt


cdef void _survival_block(const double* o, const double* ep, const double* a0,
                          const double* taus, Py_ssize_t nt, double* wre,
                          double* wim, double* acc_re, double* acc_im,
                          Py_ssize_t n) noexcept nogil:
    # acc[t] = sum_m O[m, :] * exp(-i E'_m tau_t) * a0[m] for a small
    # block of nt times per pass over O (cuts memory traffic); phases
    # reduced mod 2*pi before the trig calls to bound error at tau ~ 1e7.
    # Per-time accumulation order over m is independent of nt.
    cdef Py_ssize_t m, k, t
    cdef double phi, wr, wi
    cdef const double* row
    cdef double* are
    cdef double* aim
    for t in range(nt):
        for m in range(n):
            phi = fmod(ep[m] * taus[t], TWO_PI)
            wre[t * n + m] = cos(phi) * a0[m]
            wim[t * n + m] = -sin(phi) * a0[m]
        for k in range(n):
            acc_re[t * n + k] = 0.0
            acc_im[t * n + k] = 0.0
    for m in range(n):
        row = o + m * n
        for t in range(nt):
            wr = wre[t * n + m]
            wi = wim[t * n + m]
            are = acc_re + t * n
            aim = acc_im + t * n
            for k in range(n):
                are[k] += row[k] * wr
                aim[k] += row[k] * wi


# times evaluated per pass over the overlap matrix
DEF TAU_BLOCK = 4


def survival_distribution(cnp.ndarray[double, ndim=2, mode="c"] o not None,
                          cnp.ndarray[double, ndim=1] eprime not None,
                          cnp.ndarray[double, ndim=1] a0 not None,
                          double tau):
    """|<n| exp(-i H' tau) |n0>|^2 over the unperturbed basis."""
    cdef Py_ssize_t n = o.shape[0]
    cdef cnp.ndarray[double, ndim=1] wre = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] wim = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] acc_re = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] acc_im = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] c = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t k
    with nogil:
        _survival_block(&o[0, 0], &eprime[0], &a0[0], &tau, 1, &wre[0],
                        &wim[0], &acc_re[0], &acc_im[0], n)
        for k in range(n):
            c[k] = acc_re[k] * acc_re[k] + acc_im[k] * acc_im[k]
    return c


def entropy_trace(cnp.ndarray[double, ndim=2, mode="c"] o not None,
                  cnp.ndarray[double, ndim=1] eprime not None,
                  cnp.ndarray[double, ndim=1] a0 not None,
                  cnp.ndarray[double, ndim=1] taus not None):
    """Diagonal entropy of the survival distribution at each sample time.

    Returns (entropies, max_norm_dev) where max_norm_dev is the largest
    |sum_n C_n - 1| met along the trace.
    """
    cdef Py_ssize_t n = o.shape[0]
    cdef Py_ssize_t nt = taus.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(nt, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] wre = np.empty(TAU_BLOCK * n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] wim = np.empty(TAU_BLOCK * n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] acc_re = np.empty(TAU_BLOCK * n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] acc_im = np.empty(TAU_BLOCK * n, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] taus_c = np.ascontiguousarray(taus)
    cdef Py_ssize_t t0, t, k, nb
    cdef double cv, tot, entropy, dev, max_dev
    max_dev = 0.0
    with nogil:
        t0 = 0
        while t0 < nt:
            nb = nt - t0
            if nb > TAU_BLOCK:
                nb = TAU_BLOCK
            _survival_block(&o[0, 0], &eprime[0], &a0[0], &taus_c[t0], nb,
                            &wre[0], &wim[0], &acc_re[0], &acc_im[0], n)
            for t in range(nb):
                tot = 0.0
                entropy = 0.0
                for k in range(n):
                    cv = (acc_re[t * n + k] * acc_re[t * n + k]
                          + acc_im[t * n + k] * acc_im[t * n + k])
                    tot += cv
                    if cv >= ENTROPY_FLOOR:
                        entropy -= cv * log(cv)
                out[t0 + t] = entropy
                dev = fabs(tot - 1.0)
                if dev > max_dev:
                    max_dev = dev
            t0 += nb
    return out, max_dev
