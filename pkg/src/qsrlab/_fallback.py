"""Pure Python / numpy implementations of the hot kernels.

Same signatures and results as the compiled ``_kernels`` module; selected by
``qsrlab.kernels`` when the extension is missing or ``QSRLAB_PURE_PYTHON`` is set.

Packing conventions (shared with the Cython module):
  * a matrix over GF(2) is one integer, row 0 in the most significant bits,
    each row ``ncols`` bits wide with column 0 as its top bit;
  * a t-tuple of n-bit vectors is one integer, vector 0 most significant;
  * a cipher string is ``(y_1 || x_1 || ... || y_t || x_t)``, register 1 most significant.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

_PARITY8 = np.array([bin(i).count("1") & 1 for i in range(256)], dtype=np.int64)
_CHUNK = 1 << 20


def rank_packed(vectors, nbits):
    """GF(2) rank of a sequence of ``nbits``-wide integers."""
    basis = [0] * nbits
    rank = 0
    for v in vectors:
        v = int(v)
        for b in range(nbits - 1, -1, -1):
            if not (v >> b) & 1:
                continue
            if basis[b]:
                v ^= basis[b]
            else:
                basis[b] = v
                rank += 1
                break
    return rank


def rank_counts(n, t):
    """Number of t-tuples in ({0,1}^n)^t of each rank 0..t (exhaustive)."""
    counts = np.zeros(t + 1, dtype=np.int64)
    if t == 0:
        counts[0] = 1
        return counts
    total = 1 << (n * t)
    mask = (1 << n) - 1
    for start in range(0, total, _CHUNK):
        tup = np.arange(start, min(total, start + _CHUNK), dtype=np.int64)
        basis = np.zeros((tup.size, n), dtype=np.int64)
        rank = np.zeros(tup.size, dtype=np.int64)
        for i in range(t):
            v = (tup >> ((t - 1 - i) * n)) & mask
            for b in range(n - 1, -1, -1):
                has = ((v >> b) & 1).astype(bool)
                piv = basis[:, b]
                free = piv == 0
                v = np.where(has & ~free, v ^ piv, v)
                ins = has & free
                basis[ins, b] = v[ins]
                rank += ins
                v = np.where(ins, 0, v)
        counts += np.bincount(rank, minlength=t + 1)
    return counts


def _matvec_table(a_int, m, n):
    """Ax for every x in {0,1}^n, as an int64 array indexed by x."""
    xs = np.arange(1 << n, dtype=np.int64)
    nmask = (1 << n) - 1
    out = np.zeros(1 << n, dtype=np.int64)
    for i in range(m):
        row = (a_int >> ((m - 1 - i) * n)) & nmask
        anded = xs & row
        par = np.zeros_like(anded)
        while np.any(anded):
            par ^= _PARITY8[anded & 0xFF]
            anded >>= 8
        out |= par << (m - 1 - i)
    return out


def gamma_counts(m, n, t, s):
    """Unnormalised key-averaged cipher of the message tuple ``s``.

    Returns an int64 array of length 2^{t(m+n)}; entry z counts the pairs
    (A, x_1..x_t) whose cipher string is z. Dividing by 2^{mn+tn} gives weights.
    """
    s = [int(v) for v in s]
    if len(s) != t:
        raise ValueError("message tuple length must equal t")
    width = m + n
    counts = np.zeros(1 << (t * width), dtype=np.int64)
    nkeys = 1 << (m * n)
    if t == 0:
        counts[0] = nkeys
        return counts
    nmask = (1 << n) - 1
    tup = np.arange(1 << (t * n), dtype=np.int64)
    xs = [(tup >> ((t - 1 - i) * n)) & nmask for i in range(t)]
    base = np.zeros_like(tup)
    for i in range(t):
        base |= xs[i] << ((t - 1 - i) * width)
    for a_int in range(nkeys):
        ax = _matvec_table(a_int, m, n)
        z = base.copy()
        for i in range(t):
            z |= (ax[xs[i]] ^ s[i]) << ((t - 1 - i) * width + n)
        # distinct x-tuples give distinct z, so plain fancy increment is safe
        counts[z] += 1
    return counts


def jacobi_eigvalsh(h, tol=1e-13, max_sweeps=100):
    """Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.

    Stops once the off-diagonal Frobenius norm drops below ``tol`` times
    max(1, ||h||_F). Returns the eigenvalues in ascending order.
    """
    a = np.array(h, dtype=np.complex128, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    n = a.shape[0]
    scale = max(1.0, math.sqrt(float(np.sum(a.real**2 + a.imag**2))))
    thresh = tol * scale
    for _ in range(max_sweeps):
        absq = a.real**2 + a.imag**2
        off = math.sqrt(max(0.0, float(absq.sum() - np.trace(absq))))
        if off < thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * r)
                tt = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(1.0 + tt * tt)
                sn = tt * c
                ph = apq.conjugate() / r
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - sn * ph * colq
                a[:, q] = sn * colp + c * ph * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                cph = ph.conjugate()
                a[p, :] = c * rowp - sn * cph * rowq
                a[q, :] = sn * rowp + c * cph * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
    return np.sort(np.diag(a).real.copy())
