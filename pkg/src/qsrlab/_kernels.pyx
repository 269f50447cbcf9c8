# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; same contract as ``qsrlab._fallback``."""

import numpy as np

from libc.math cimport sqrt, fabs, copysign, hypot
from libc.stdint cimport int64_t, uint64_t

BACKEND = "cython"


cdef inline int _parity(uint64_t v) nogil:
    v ^= v >> 32
    v ^= v >> 16
    v ^= v >> 8
    v ^= v >> 4
    v ^= v >> 2
    v ^= v >> 1
    return <int>(v & 1)


cdef inline int _insert(uint64_t* basis, uint64_t v, int nbits) nogil:
    cdef int b
    for b in range(nbits - 1, -1, -1):
        if not ((v >> b) & 1):
            continue
        if basis[b]:
            v ^= basis[b]
        else:
            basis[b] = v
            return 1
    return 0


def rank_packed(vectors, int nbits):
    cdef uint64_t basis[64]
    cdef int b, rank = 0
    if nbits > 64:
        raise ValueError("vectors wider than 64 bits")
    for b in range(64):
        basis[b] = 0
    for v in vectors:
        rank += _insert(basis, <uint64_t>int(v), nbits)
    return rank


def rank_counts(int n, int t):
    cdef int64_t[::1] counts
    cdef uint64_t basis[64]
    cdef uint64_t total, tup, mask
    cdef int i, b, rank
    out = np.zeros(t + 1, dtype=np.int64)
    counts = out
    if t == 0:
        counts[0] = 1
        return out
    total = (<uint64_t>1) << (n * t)
    mask = ((<uint64_t>1) << n) - 1
    with nogil:
        for tup in range(total):
            for b in range(n):
                basis[b] = 0
            rank = 0
            for i in range(t):
                rank += _insert(basis, (tup >> ((t - 1 - i) * n)) & mask, n)
            counts[rank] += 1
    return out


def gamma_counts(int m, int n, int t, s):
    cdef int width = m + n
    cdef uint64_t nkeys = (<uint64_t>1) << (m * n)
    cdef uint64_t ntup, a_int, tup, row, z, nmask, xi
    cdef int i, x
    cdef int64_t[::1] counts
    cdef int64_t[::1] ax
    cdef int64_t[::1] sv
    if len(s) != t:
        raise ValueError("message tuple length must equal t")
    out = np.zeros((<uint64_t>1) << (t * width), dtype=np.int64)
    counts = out
    if t == 0:
        counts[0] = nkeys
        return out
    sv = np.asarray([int(v) for v in s], dtype=np.int64)
    ax = np.zeros(1 << n, dtype=np.int64)
    ntup = (<uint64_t>1) << (t * n)
    nmask = ((<uint64_t>1) << n) - 1
    with nogil:
        for a_int in range(nkeys):
            for x in range(1 << n):
                ax[x] = 0
                for i in range(m):
                    row = (a_int >> ((m - 1 - i) * n)) & nmask
                    ax[x] |= (<int64_t>_parity(row & <uint64_t>x)) << (m - 1 - i)
            for tup in range(ntup):
                z = 0
                for i in range(t):
                    xi = (tup >> ((t - 1 - i) * n)) & nmask
                    z = (z << width) | ((<uint64_t>(ax[xi] ^ sv[i])) << n) | xi
                counts[z] += 1
    return out


def jacobi_eigvalsh(h, double tol=1e-13, int max_sweeps=100):
    arr = np.array(h, dtype=np.complex128, copy=True, order="C")
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("expected a square matrix")
    cdef double complex[:, ::1] a = arr
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double fro = 0.0, off, thresh, r, app, aqq, theta, tt, c, sn
    cdef double complex apq, ph, cph, xp, xq
    for p in range(n):
        for q in range(n):
            fro += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
    thresh = tol * (sqrt(fro) if fro > 1.0 else 1.0)
    with nogil:
        for sweep in range(max_sweeps):
            off = 0.0
            for p in range(n):
                for q in range(n):
                    if p != q:
                        off += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
            if sqrt(off) < thresh:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    r = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                    if r == 0.0:
                        continue
                    app = a[p, p].real
                    aqq = a[q, q].real
                    theta = (aqq - app) / (2.0 * r)
                    tt = copysign(1.0, theta) / (fabs(theta) + hypot(theta, 1.0))
                    c = 1.0 / sqrt(1.0 + tt * tt)
                    sn = tt * c
                    ph = apq.conjugate() / r
                    cph = ph.conjugate()
                    for k in range(n):
                        xp = a[k, p]
                        xq = a[k, q]
                        a[k, p] = c * xp - sn * ph * xq
                        a[k, q] = sn * xp + c * ph * xq
                    for k in range(n):
                        xp = a[p, k]
                        xq = a[q, k]
                        a[p, k] = c * xp - sn * cph * xq
                        a[q, k] = sn * xp + c * cph * xq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    a[p, p] = a[p, p].real
                    a[q, q] = a[q, q].real
    return np.sort(np.diag(arr).real.copy())
