"""Pure-numpy fallbacks for the compiled kernels.

Same algorithms as `_kernels.pyx` (Householder + implicit-shift QL,
phase-reduced survival amplitudes), vectorized with numpy instead of C
loops.  Results agree with the compiled backend to rounding order; they
are not guaranteed bit-identical across backends.
"""

import math

import numpy as np

from .errors import EigenConvergenceError

_EPS = 2.220446049250313e-16
_TWO_PI = 6.283185307179586
_ENTROPY_FLOOR = 1e-300


def _tred2(a, d, e):
    n = a.shape[0]
    for i in range(n - 1, 0, -1):
        l = i - 1
        h = 0.0
        if l > 0:
            u = a[i, : l + 1]
            scale = float(np.abs(u).sum())
            if scale == 0.0:
                e[i] = a[i, l]
            else:
                u /= scale
                h = float(u @ u)
                f = float(u[l])
                g = -math.copysign(math.sqrt(h), f)
                e[i] = scale * g
                h -= f * g
                u[l] = f - g
                a[: l + 1, i] = u / h
                w = (a[: l + 1, : l + 1] @ u) / h
                hh = float(w @ u) / (h + h)
                w -= hh * u
                a[: l + 1, : l + 1] -= np.outer(w, u) + np.outer(u, w)
        else:
            e[i] = a[i, l]
        d[i] = h
    d[0] = 0.0
    e[0] = 0.0
    for i in range(n):
        l = i - 1
        if d[i] != 0.0:
            w = a[i, : l + 1] @ a[: l + 1, : l + 1]
            a[: l + 1, : l + 1] -= np.outer(a[: l + 1, i], w)
        d[i] = a[i, i]
        a[i, i] = 1.0
        if l >= 0:
            a[i, : l + 1] = 0.0
            a[: l + 1, i] = 0.0


def _tqli(d, e, zt, max_iter):
    n = d.shape[0]
    if n == 1:
        return
    fbuf = np.empty(n, dtype=np.float64)
    for l in range(n):
        iteration = 0
        while True:
            m = n - 1
            for i in range(l, n - 1):
                dd = abs(d[i]) + abs(d[i + 1])
                if abs(e[i]) <= _EPS * dd:
                    m = i
                    break
            if m == l:
                break
            iteration += 1
            if iteration > max_iter:
                raise EigenConvergenceError(n, max_iter)
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            early = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    early = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = zt[i]
                zi1 = zt[i + 1]
                np.copyto(fbuf, zi1)
                np.multiply(zi, s, out=zi1)
                zi1 += c * fbuf
                zi *= c
                zi -= s * fbuf
            if early:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0


def sym_eigh(a, max_iter=50):
    """Eigendecomposition of the symmetric matrix `a` (destroyed in place).

    Returns (eigenvalues, zt) unsorted, where row i of `zt` is the
    eigenvector paired with eigenvalue i.
    """
    n = a.shape[0]
    if a.shape[1] != n:
        raise ValueError("matrix must be square")
    d = np.zeros(n, dtype=np.float64)
    e = np.zeros(n, dtype=np.float64)
    _tred2(a, d, e)
    zt = np.ascontiguousarray(a.T)
    ew = np.zeros(n, dtype=np.float64)
    ew[: n - 1] = e[1:]
    _tqli(d, ew, zt, max_iter)
    return d, zt


def survival_distribution(o, eprime, a0, tau):
    """|<n| exp(-i H' tau) |n0>|^2 over the unperturbed basis."""
    phi = np.fmod(eprime * tau, _TWO_PI)
    wre = np.cos(phi) * a0
    wim = -np.sin(phi) * a0
    acc_re = wre @ o
    acc_im = wim @ o
    return acc_re * acc_re + acc_im * acc_im


def entropy_trace(o, eprime, a0, taus, chunk=128):
    """Diagonal entropy of the survival distribution at each sample time.

    Returns (entropies, max_norm_dev) where max_norm_dev is the largest
    |sum_n C_n - 1| met along the trace.
    """
    nt = taus.shape[0]
    out = np.empty(nt, dtype=np.float64)
    max_dev = 0.0
    for start in range(0, nt, chunk):
        tc = taus[start : start + chunk]
        phi = np.fmod(np.outer(tc, eprime), _TWO_PI)
        wre = np.cos(phi) * a0
        wim = -np.sin(phi) * a0
        acc_re = wre @ o
        acc_im = wim @ o
        c = acc_re * acc_re + acc_im * acc_im
        dev = float(np.max(np.abs(c.sum(axis=1) - 1.0)))
        if dev > max_dev:
            max_dev = dev
        contrib = np.zeros_like(c)
        mask = c >= _ENTROPY_FLOOR
        contrib[mask] = c[mask] * np.log(c[mask])
        out[start : start + chunk] = -contrib.sum(axis=1)
    return out, max_dev
