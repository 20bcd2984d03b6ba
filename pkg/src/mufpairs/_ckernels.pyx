# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled search objectives; same contract as ``_pykernels``."""

import numpy as np

from libc.math cimport sqrt

from .weyl import context


cdef inline double abs2(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double complex conj(double complex z) noexcept nogil:
    return z.real - z.imag * 1j


cdef int normalize(const double[::1] params, double complex[:, ::1] u, double[::1] norms) noexcept nogil:
    cdef Py_ssize_t m = u.shape[0], d = u.shape[1], k, a, off
    cdef double s
    for k in range(m):
        s = 0.0
        off = 2 * k * d
        for a in range(2 * d):
            s += params[off + a] * params[off + a]
        if s == 0.0:
            return <int>k
        norms[k] = sqrt(s)
        for a in range(d):
            u[k, a] = (params[off + 2 * a] + params[off + 2 * a + 1] * 1j) / norms[k]
    return -1


cdef void pull_back(double complex[:, ::1] u, double[::1] norms,
                    double complex[:, ::1] gu, double[::1] g) noexcept nogil:
    cdef Py_ssize_t m = u.shape[0], d = u.shape[1], k, a
    cdef double radial
    cdef double complex v
    for k in range(m):
        radial = 0.0
        for a in range(d):
            radial += (conj(u[k, a]) * gu[k, a]).real
        for a in range(d):
            v = (gu[k, a] - u[k, a] * radial) / norms[k]
            g[2 * (k * d + a)] = v.real
            g[2 * (k * d + a) + 1] = v.imag


def general_loss_grad(const double[::1] params, int d, double t):
    cdef Py_ssize_t n = d * d, m = 2 * n
    if params.shape[0] != 2 * m * d:
        raise ValueError(f"expected {2 * m * d} parameters, got {params.shape[0]}")
    U = np.empty((m, d), dtype=complex)
    norms_arr = np.empty(m)
    grad = np.empty(2 * m * d)
    Z_arr = np.empty((n, n), dtype=complex)
    R_arr = np.empty((n, n), dtype=complex)
    GU = np.empty((m, d), dtype=complex)
    cdef double complex[:, ::1] u = U, z = Z_arr, R = R_arr, gu = GU
    cdef double[::1] norms = norms_arr, g = grad
    cdef Py_ssize_t i, a, b, r, c
    cdef double loss = 0.0, inv_n = 1.0 / n
    cdef double complex acc, s
    cdef int bad
    with nogil:
        bad = normalize(params, u, norms)
    if bad >= 0:
        raise ZeroDivisionError(f"parameter vector {bad} has zero norm")
    with nogil:
        for i in range(n):
            for a in range(d):
                for b in range(d):
                    z[i, a * d + b] = u[i, a] * u[n + i, b]
        for r in range(n):
            for c in range(r, n):
                acc = 0.0
                for i in range(n):
                    acc = acc + z[i, r] * conj(z[i, c])
                R[r, c] = acc * inv_n
        for r in range(n):
            R[r, r] = R[r, r].real - (1.0 - t) * inv_n
        for a in range(d):
            for b in range(d):
                r = a * d + b
                c = b * d + a
                if r <= c:
                    R[r, c] = R[r, c] - t / d
        for r in range(n):
            for c in range(r):
                R[r, c] = conj(R[c, r])
        for r in range(n):
            for c in range(n):
                loss += abs2(R[r, c])
        for i in range(m):
            for a in range(d):
                gu[i, a] = 0.0
        for i in range(n):
            for a in range(d):
                for b in range(d):
                    r = a * d + b
                    acc = 0.0
                    for c in range(n):
                        acc = acc + R[r, c] * z[i, c]
                    # factor 2 from R z, 2 from the real gradient
                    acc = acc * (4.0 * inv_n)
                    gu[i, a] = gu[i, a] + acc * conj(u[n + i, b])
                    gu[n + i, b] = gu[n + i, b] + acc * conj(u[i, a])
        pull_back(u, norms, gu, g)
    return loss, grad


def _phase_table(int d):
    ctx = context(d)
    ph = np.empty((d * d, d), dtype=complex)
    for a1 in range(d):
        for a2 in range(d):
            ph[a1 * d + a2] = ctx.operator((a1, a2))[(np.arange(d) + a1) % d, np.arange(d)]
    return ph


_PHASES = {}


def covariant_loss_grad(const double[::1] params, int d, double t):
    if params.shape[0] != 4 * d:
        raise ValueError(f"expected {4 * d} parameters, got {params.shape[0]}")
    if d not in _PHASES:
        _PHASES[d] = _phase_table(d)
    cdef const double complex[:, ::1] ph = _PHASES[d]
    U = np.empty((2, d), dtype=complex)
    norms_arr = np.empty(2)
    grad = np.empty(4 * d)
    GU = np.zeros((2, d), dtype=complex)
    cdef double complex[:, ::1] u = U, gu = GU
    cdef double[::1] norms = norms_arr, g = grad
    cdef Py_ssize_t a1, a2, k, src, n = d * d
    cdef double complex p, q, e, w, ce_q, e_cq, ce_p, e_cp
    cdef double loss = 0.0, scale = 1.0 / (d * d)
    cdef int bad
    with nogil:
        bad = normalize(params, u, norms)
    if bad >= 0:
        raise ZeroDivisionError(f"parameter vector {bad} has zero norm")
    with nogil:
        for a1 in range(d):
            for a2 in range(d):
                if a1 == 0 and a2 == 0:
                    continue
                # (W_a v)[(k + a1) % d] = ph[a, k] v[k]
                p = 0.0
                q = 0.0
                for k in range(d):
                    src = (k + a1) % d
                    w = ph[a1 * d + a2, k]
                    p = p + u[0, src] * conj(w) * conj(u[0, k])
                    q = q + conj(u[1, src]) * w * u[1, k]
                e = p * q - t
                loss += abs2(e)
                ce_q = conj(e) * q * (2.0 * scale)
                e_cq = e * conj(q) * (2.0 * scale)
                ce_p = conj(e) * p * (2.0 * scale)
                e_cp = e * conj(p) * (2.0 * scale)
                for k in range(d):
                    src = (k + a1) % d
                    w = ph[a1 * d + a2, k]
                    # W_a^dag v at k and W_a v at src
                    gu[0, k] = gu[0, k] + ce_q * conj(w) * u[0, src]
                    gu[0, src] = gu[0, src] + e_cq * w * u[0, k]
                    gu[1, src] = gu[1, src] + ce_p * w * u[1, k]
                    gu[1, k] = gu[1, k] + e_cp * conj(w) * u[1, src]
        loss *= scale
        pull_back(u, norms, gu, g)
    return loss, grad
