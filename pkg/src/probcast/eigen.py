"""Dense eigenvalues of real nonsymmetric matrices.

Balancing, Householder reduction to upper Hessenberg form, then the
Francis implicit double-shift QR iteration down to real Schur form.
Complex conjugate pairs come out of the trailing 2x2 blocks.  The
kernels are compiled with numba; the spectral-radius objective is
evaluated thousands of times during probability optimization.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

from .errors import EigenConvergenceError

__all__ = ["eigenvalues", "spectral_radius", "balance", "hessenberg"]

_RADIX = 2.0


@njit(cache=True)
def _balance(a):
    n = a.shape[0]
    sqrdx = _RADIX * _RADIX
    done = False
    while not done:
        done = True
        for i in range(n):
            c = 0.0
            r = 0.0
            for j in range(n):
                if j != i:
                    c += abs(a[j, i])
                    r += abs(a[i, j])
            if c != 0.0 and r != 0.0:
                g = r / _RADIX
                f = 1.0
                s = c + r
                while c < g:
                    f *= _RADIX
                    c *= sqrdx
                g = r * _RADIX
                while c > g:
                    f /= _RADIX
                    c /= sqrdx
                if (c + r) / f < 0.95 * s:
                    done = False
                    g = 1.0 / f
                    for j in range(n):
                        a[i, j] *= g
                    for j in range(n):
                        a[j, i] *= f


@njit(cache=True)
def _hessenberg(a):
    n = a.shape[0]
    v = np.empty(n)
    w = np.empty(n)
    for k in range(n - 2):
        scale = 0.0
        for i in range(k + 1, n):
            scale += abs(a[i, k])
        if scale == 0.0:
            continue
        h = 0.0
        for i in range(k + 1, n):
            v[i] = a[i, k] / scale
            h += v[i] * v[i]
        norm = math.sqrt(h)
        alpha = -norm if v[k + 1] >= 0.0 else norm
        h -= v[k + 1] * alpha
        v[k + 1] -= alpha
        # H = I - v v^T / h, with h = v^T v / 2
        for j in range(k, n):
            s = 0.0
            for i in range(k + 1, n):
                s += v[i] * a[i, j]
            w[j] = s / h
        for i in range(k + 1, n):
            for j in range(k, n):
                a[i, j] -= v[i] * w[j]
        for i in range(n):
            s = 0.0
            for j in range(k + 1, n):
                s += a[i, j] * v[j]
            s /= h
            for j in range(k + 1, n):
                a[i, j] -= s * v[j]
        a[k + 1, k] = alpha * scale
        for i in range(k + 2, n):
            a[i, k] = 0.0


@njit(cache=True)
def _hqr(a, wr, wi, max_its):
    """Eigenvalues of upper Hessenberg ``a`` (destroyed).

    Returns -1 on success, otherwise the iteration count at which the
    active block failed to deflate.
    """
    n = a.shape[0]
    anorm = 0.0
    for i in range(n):
        for j in range(max(i - 1, 0), n):
            anorm += abs(a[i, j])
    nn = n - 1
    t = 0.0
    p = q = r = s = w = x = y = z = 0.0
    while nn >= 0:
        its = 0
        while True:
            l = nn
            while l >= 1:
                s = abs(a[l - 1, l - 1]) + abs(a[l, l])
                if s == 0.0:
                    s = anorm
                if abs(a[l, l - 1]) + s == s:
                    a[l, l - 1] = 0.0
                    break
                l -= 1
            x = a[nn, nn]
            if l == nn:
                wr[nn] = x + t
                wi[nn] = 0.0
                nn -= 1
                break
            y = a[nn - 1, nn - 1]
            w = a[nn, nn - 1] * a[nn - 1, nn]
            if l == nn - 1:
                p = 0.5 * (y - x)
                q = p * p + w
                z = math.sqrt(abs(q))
                x += t
                if q >= 0.0:
                    z = p + (z if p >= 0.0 else -z)
                    wr[nn - 1] = x + z
                    wr[nn] = x + z
                    if z != 0.0:
                        wr[nn] = x - w / z
                    wi[nn - 1] = 0.0
                    wi[nn] = 0.0
                else:
                    wr[nn - 1] = x + p
                    wr[nn] = x + p
                    wi[nn - 1] = -z
                    wi[nn] = z
                nn -= 2
                break
            if its >= max_its:
                return its
            if its > 0 and its % 10 == 0:
                # exceptional shift
                t += x
                for i in range(nn + 1):
                    a[i, i] -= x
                s = abs(a[nn, nn - 1]) + abs(a[nn - 1, nn - 2])
                x = 0.75 * s
                y = x
                w = -0.4375 * s * s
            its += 1
            m = nn - 2
            while m >= l:
                z = a[m, m]
                r = x - z
                s = y - z
                p = (r * s - w) / a[m + 1, m] + a[m, m + 1]
                q = a[m + 1, m + 1] - z - r - s
                r = a[m + 2, m + 1]
                s = abs(p) + abs(q) + abs(r)
                p /= s
                q /= s
                r /= s
                if m == l:
                    break
                u = abs(a[m, m - 1]) * (abs(q) + abs(r))
                v = abs(p) * (abs(a[m - 1, m - 1]) + abs(z) + abs(a[m + 1, m + 1]))
                if u + v == v:
                    break
                m -= 1
            for i in range(m + 2, nn + 1):
                a[i, i - 2] = 0.0
                if i != m + 2:
                    a[i, i - 3] = 0.0
            k = m
            while k <= nn - 1:
                if k != m:
                    p = a[k, k - 1]
                    q = a[k + 1, k - 1]
                    r = 0.0
                    if k != nn - 1:
                        r = a[k + 2, k - 1]
                    x = abs(p) + abs(q) + abs(r)
                    if x != 0.0:
                        p /= x
                        q /= x
                        r /= x
                s = math.sqrt(p * p + q * q + r * r)
                if p < 0.0:
                    s = -s
                if s != 0.0:
                    if k == m:
                        if l != m:
                            a[k, k - 1] = -a[k, k - 1]
                    else:
                        a[k, k - 1] = -s * x
                    p += s
                    x = p / s
                    y = q / s
                    z = r / s
                    q /= p
                    r /= p
                    for j in range(k, nn + 1):
                        p = a[k, j] + q * a[k + 1, j]
                        if k != nn - 1:
                            p += r * a[k + 2, j]
                            a[k + 2, j] -= p * z
                        a[k + 1, j] -= p * y
                        a[k, j] -= p * x
                    mmin = nn if nn < k + 3 else k + 3
                    for i in range(l, mmin + 1):
                        p = x * a[i, k] + y * a[i, k + 1]
                        if k != nn - 1:
                            p += z * a[i, k + 2]
                            a[i, k + 2] -= p * r
                        a[i, k + 1] -= p * q
                        a[i, k] -= p
                k += 1
    return -1


def balance(a: np.ndarray) -> np.ndarray:
    """Diagonally similar copy of ``a`` with rows and columns of comparable norm."""
    out = np.array(a, dtype=np.float64, order="C", copy=True)
    _balance(out)
    return out


def hessenberg(a: np.ndarray) -> np.ndarray:
    """Upper Hessenberg matrix orthogonally similar to ``a``."""
    out = np.array(a, dtype=np.float64, order="C", copy=True)
    if out.shape[0] > 2:
        _hessenberg(out)
    return out


def eigenvalues(a: np.ndarray, max_its: int = 60) -> np.ndarray:
    """All eigenvalues of a real square matrix, as a complex array."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    n = a.shape[0]
    if n == 0:
        return np.empty(0, dtype=complex)
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    h = balance(a)
    if n > 2:
        _hessenberg(h)
    wr = np.zeros(n)
    wi = np.zeros(n)
    status = _hqr(h, wr, wi, max_its)
    if status >= 0:
        raise EigenConvergenceError(f"QR iteration failed to deflate after {status} iterations", status)
    return wr + 1j * wi


def spectral_radius(a: np.ndarray) -> float:
    return float(np.max(np.abs(eigenvalues(a)))) if len(a) else 0.0
