"""Pure-Python complex Schur kernel.

Same algorithm and in-place contract as the compiled ``_qr`` extension:
Householder reduction to upper Hessenberg form followed by single-shift
implicit QR with Wilkinson shifts and deflation.  Used when the extension
is unavailable or when ``DISTVAR_PURE_PYTHON=1``.
"""
from __future__ import annotations

import numpy as np

_EPS = np.finfo(float).eps


def hessenberg_inplace(h: np.ndarray, q: np.ndarray) -> None:
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1:, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        x0 = x[0]
        phase = x0 / abs(x0) if x0 != 0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1:, :] -= 2.0 * np.outer(v, v.conj() @ h[k + 1:, :])
        h[:, k + 1:] -= 2.0 * np.outer(h[:, k + 1:] @ v, v.conj())
        q[:, k + 1:] -= 2.0 * np.outer(q[:, k + 1:] @ v, v.conj())
        h[k + 2:, k] = 0.0


def _givens(a: complex, b: complex) -> tuple[float, complex]:
    """Return (c, s) with [[c, s], [-conj(s), c]] @ [a, b] = [r, 0]."""
    if b == 0:
        return 1.0, 0j
    abs_a = abs(a)
    if abs_a == 0.0:
        return 0.0, 1 + 0j
    r = np.hypot(abs_a, abs(b))
    return abs_a / r, (a / abs_a) * b.conjugate() / r


def _rotate(h: np.ndarray, q: np.ndarray, k: int, c: float, s: complex,
            col_lo: int, row_hi: int) -> None:
    # left: rows k, k+1 over columns col_lo..n-1
    rk = h[k, col_lo:].copy()
    rk1 = h[k + 1, col_lo:]
    h[k, col_lo:] = c * rk + s * rk1
    h[k + 1, col_lo:] = -s.conjugate() * rk + c * rk1
    # right: columns k, k+1 over rows 0..row_hi
    ck = h[:row_hi + 1, k].copy()
    ck1 = h[:row_hi + 1, k + 1]
    h[:row_hi + 1, k] = c * ck + s.conjugate() * ck1
    h[:row_hi + 1, k + 1] = -s * ck + c * ck1
    qk = q[:, k].copy()
    qk1 = q[:, k + 1]
    q[:, k] = c * qk + s.conjugate() * qk1
    q[:, k + 1] = -s * qk + c * qk1


def _wilkinson(a: complex, b: complex, c: complex, d: complex) -> complex:
    half = 0.5 * (a - d)
    disc = np.sqrt(half * half + b * c)
    mu1 = d - b * c / (half + disc) if (half + disc) != 0 else d
    mu2 = d - b * c / (half - disc) if (half - disc) != 0 else d
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def schur_inplace(h: np.ndarray, q: np.ndarray, max_iter: int) -> int:
    """Overwrite ``h`` with its triangular Schur factor and accumulate into ``q``.

    Returns the number of QR sweeps, or -1 if ``max_iter`` was exceeded.
    """
    n = h.shape[0]
    hessenberg_inplace(h, q)
    total = 0
    since_deflation = 0
    hi = n - 1
    while hi > 0:
        lo = hi
        while lo > 0:
            sub = abs(h[lo, lo - 1])
            scale = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if scale == 0.0:
                scale = np.abs(h[max(lo - 1, 0):hi + 1, max(lo - 1, 0):hi + 1]).sum()
            if sub <= _EPS * scale:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            since_deflation = 0
            continue
        if total >= max_iter:
            return -1
        total += 1
        since_deflation += 1
        if since_deflation % 10 == 0:
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1].real) + 0.5j * abs(h[hi, hi - 1])
        else:
            mu = _wilkinson(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        x = h[lo, lo] - mu
        y = h[lo + 1, lo]
        for k in range(lo, hi):
            c, s = _givens(x, y)
            _rotate(h, q, k, c, s, max(k - 1, 0), min(k + 2, hi))
            if k > lo:
                h[k + 1, k - 1] = 0.0
            if k < hi - 1:
                x = h[k + 1, k]
                y = h[k + 2, k]
    for j in range(n - 1):
        h[j + 1:, j] = 0.0
    return total
