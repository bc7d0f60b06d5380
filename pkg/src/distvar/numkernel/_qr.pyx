# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled complex Schur kernel (Hessenberg reduction + implicit QR)."""
import numpy as np
from libc.math cimport sqrt, hypot, fabs

cdef double _EPS = 2.220446049250313e-16


cdef inline double cabs(double complex z) nogil:
    return hypot(z.real, z.imag)


cdef inline double complex conj(double complex z) nogil:
    return z.real - 1j * z.imag


cdef inline double complex csqrt(double complex z) nogil:
    cdef double r = cabs(z)
    cdef double re, im
    if r == 0.0:
        return 0.0
    re = sqrt(0.5 * (r + z.real))
    im = sqrt(0.5 * (r - z.real))
    if z.imag < 0.0:
        im = -im
    return re + 1j * im


cdef void _hessenberg(double complex[:, ::1] h, double complex[:, ::1] q,
                      double complex[::1] v) nogil:
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t k, i, j, m
    cdef double alpha, vn, ax0
    cdef double complex phase, acc
    for k in range(n - 2):
        alpha = 0.0
        for i in range(k + 1, n):
            alpha += h[i, k].real * h[i, k].real + h[i, k].imag * h[i, k].imag
        alpha = sqrt(alpha)
        if alpha == 0.0:
            continue
        m = n - k - 1
        for i in range(m):
            v[i] = h[k + 1 + i, k]
        ax0 = cabs(v[0])
        phase = v[0] / ax0 if ax0 != 0.0 else 1.0
        v[0] = v[0] + phase * alpha
        vn = 0.0
        for i in range(m):
            vn += v[i].real * v[i].real + v[i].imag * v[i].imag
        vn = sqrt(vn)
        for i in range(m):
            v[i] = v[i] / vn
        # h[k+1:, :] -= 2 v (v^H h[k+1:, :])
        for j in range(n):
            acc = 0.0
            for i in range(m):
                acc = acc + conj(v[i]) * h[k + 1 + i, j]
            acc = 2.0 * acc
            for i in range(m):
                h[k + 1 + i, j] = h[k + 1 + i, j] - v[i] * acc
        # h[:, k+1:] -= 2 (h[:, k+1:] v) v^H ; same for q
        for i in range(n):
            acc = 0.0
            for j in range(m):
                acc = acc + h[i, k + 1 + j] * v[j]
            acc = 2.0 * acc
            for j in range(m):
                h[i, k + 1 + j] = h[i, k + 1 + j] - acc * conj(v[j])
            acc = 0.0
            for j in range(m):
                acc = acc + q[i, k + 1 + j] * v[j]
            acc = 2.0 * acc
            for j in range(m):
                q[i, k + 1 + j] = q[i, k + 1 + j] - acc * conj(v[j])
        for i in range(k + 2, n):
            h[i, k] = 0.0


cdef inline void _givens(double complex a, double complex b,
                         double *c, double complex *s) nogil:
    cdef double abs_a, r
    if b == 0.0:
        c[0] = 1.0
        s[0] = 0.0
        return
    abs_a = cabs(a)
    if abs_a == 0.0:
        c[0] = 0.0
        s[0] = 1.0
        return
    r = hypot(abs_a, cabs(b))
    c[0] = abs_a / r
    s[0] = (a / abs_a) * conj(b) / r


cdef void _rotate(double complex[:, ::1] h, double complex[:, ::1] q,
                  Py_ssize_t k, double c, double complex s,
                  Py_ssize_t col_lo, Py_ssize_t row_hi) nogil:
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t j
    cdef double complex x, y, sc = conj(s)
    for j in range(col_lo, n):
        x = h[k, j]
        y = h[k + 1, j]
        h[k, j] = c * x + s * y
        h[k + 1, j] = -sc * x + c * y
    for j in range(row_hi + 1):
        x = h[j, k]
        y = h[j, k + 1]
        h[j, k] = c * x + sc * y
        h[j, k + 1] = -s * x + c * y
    for j in range(n):
        x = q[j, k]
        y = q[j, k + 1]
        q[j, k] = c * x + sc * y
        q[j, k + 1] = -s * x + c * y


cdef double complex _wilkinson(double complex a, double complex b,
                               double complex c, double complex d) nogil:
    cdef double complex half = 0.5 * (a - d)
    cdef double complex disc = csqrt(half * half + b * c)
    cdef double complex mu1 = d, mu2 = d
    if half + disc != 0.0:
        mu1 = d - b * c / (half + disc)
    if half - disc != 0.0:
        mu2 = d - b * c / (half - disc)
    if cabs(mu1 - d) <= cabs(mu2 - d):
        return mu1
    return mu2


def schur_inplace(double complex[:, ::1] h, double complex[:, ::1] q, int max_iter):
    """Overwrite ``h`` with its triangular Schur factor and accumulate into ``q``.

    Returns the number of QR sweeps, or -1 if ``max_iter`` was exceeded.
    """
    cdef Py_ssize_t n = h.shape[0]
    cdef Py_ssize_t hi, lo, k, i, j, a0, a1
    cdef int total = 0, since_deflation = 0
    cdef double sub, scale, c
    cdef double complex mu, x, y, s
    if n == 0:
        return 0
    cdef double complex[::1] v = _work(n)
    with nogil:
        _hessenberg(h, q, v)
        hi = n - 1
        while hi > 0:
            lo = hi
            while lo > 0:
                sub = cabs(h[lo, lo - 1])
                scale = cabs(h[lo - 1, lo - 1]) + cabs(h[lo, lo])
                if scale == 0.0:
                    a0 = lo - 1
                    for i in range(a0, hi + 1):
                        for j in range(a0, hi + 1):
                            scale += cabs(h[i, j])
                if sub <= _EPS * scale:
                    h[lo, lo - 1] = 0.0
                    break
                lo -= 1
            if lo == hi:
                hi -= 1
                since_deflation = 0
                continue
            if total >= max_iter:
                total = -1
                break
            total += 1
            since_deflation += 1
            if since_deflation % 10 == 0:
                mu = h[hi, hi] + 0.75 * fabs(h[hi, hi - 1].real) + 0.5j * cabs(h[hi, hi - 1])
            else:
                mu = _wilkinson(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
            x = h[lo, lo] - mu
            y = h[lo + 1, lo]
            for k in range(lo, hi):
                _givens(x, y, &c, &s)
                a0 = k - 1 if k > 0 else 0
                a1 = k + 2 if k + 2 < hi else hi
                _rotate(h, q, k, c, s, a0, a1)
                if k > lo:
                    h[k + 1, k - 1] = 0.0
                if k < hi - 1:
                    x = h[k + 1, k]
                    y = h[k + 2, k]
        for j in range(n - 1):
            for i in range(j + 1, n):
                h[i, j] = 0.0
    return total


def _work(Py_ssize_t n):
    return np.zeros(max(n, 1), dtype=np.complex128)
