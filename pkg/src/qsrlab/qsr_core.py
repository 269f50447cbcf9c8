"""The matrix-key randomization scheme for classical messages.

Decryption key: a uniform m x n matrix A over GF(2). Encryption key: the
uniform mixture over basis strings (Ax || x). Encrypting s XORs s into the
first register, giving the uniform mixture over (Ax + s || x). The unitary that
does this is only ever applied as that string rewrite.
"""

from __future__ import annotations

import functools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import kernels
from .errors import GuardError
from .gf2 import BitMatrix, BitVector, matvec_int
from .qstate import DiagonalState, tensor_diag, tensor_power

MAX_M = 8
MAX_N = 8
MAX_STATE_BITS = 24
MAX_KEY_BITS = 24


@dataclass(frozen=True)
class SchemeParams:
    """Scheme instance: message bits m, security parameter n, copies t."""

    m: int
    n: int
    t: int
    delta: Fraction | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.m < 1 or self.n < 1 or self.t < 0:
            raise ValueError("need m >= 1, n >= 1, t >= 0")

    @classmethod
    def from_delta(cls, m: int, n: int, delta) -> "SchemeParams":
        """t = floor((1 - delta) n) with 0 < delta < 1."""
        d = Fraction(str(delta)) if isinstance(delta, float) else Fraction(delta)
        if not 0 < d < 1:
            raise ValueError("delta must lie in (0, 1)")
        return cls(m, n, math.floor((1 - d) * n), d)

    @property
    def effective_delta(self) -> Fraction:
        return Fraction(self.n - self.t, self.n)

    @property
    def cipher_bits(self) -> int:
        return self.m + self.n

    def check_keys(self) -> None:
        if self.m > MAX_M:
            raise GuardError(f"exact enumeration requires m <= {MAX_M} (got m={self.m})")
        if self.n > MAX_N:
            raise GuardError(f"exact enumeration requires n <= {MAX_N} (got n={self.n})")
        if self.m * self.n > MAX_KEY_BITS:
            raise GuardError(f"exact enumeration requires mn <= {MAX_KEY_BITS} (got {self.m * self.n})")

    def check_exact(self) -> None:
        self.check_keys()
        if self.t * (self.m + self.n) > MAX_STATE_BITS:
            raise GuardError(
                f"exact enumeration requires t(m+n) <= {MAX_STATE_BITS} (got {self.t * (self.m + self.n)})"
            )


@dataclass(frozen=True)
class KeyInstance:
    """One basis term (Ax, x) drawn from an encryption-key state."""

    a_x: BitVector
    x: BitVector


@dataclass(frozen=True)
class CipherInstance:
    """One basis term (Ax + s, x) of a cipher state."""

    y: BitVector
    x: BitVector

    def dumps(self) -> str:
        m, n = self.y.length, self.x.length
        return f"{self.y.value:x} {self.x.value:x} {m} {n}\n"

    @classmethod
    def loads(cls, text: str) -> "CipherInstance":
        parts = text.split()
        if len(parts) != 4:
            raise ValueError(f"cipher line must be 'y_hex x_hex m n', got {text.strip()!r}")
        y, x, m, n = int(parts[0], 16), int(parts[1], 16), int(parts[2]), int(parts[3])
        return cls(BitVector(m, y), BitVector(n, x))


def keygen(m: int, n: int, rng) -> BitMatrix:
    """Uniformly random m x n decryption key; ``rng`` needs ``getrandbits``."""
    SchemeParams(m, n, 0).check_keys()
    return BitMatrix.from_int(rng.getrandbits(m * n), m, n)


def _require_key_size(a: BitMatrix) -> None:
    SchemeParams(a.nrows, a.ncols, 0).check_keys()


def encryption_key_state(a: BitMatrix) -> DiagonalState:
    """rho_A: weight 2^-n on each string (Ax || x)."""
    _require_key_size(a)
    n = a.ncols
    idx = [(matvec_int(a, x) << n) | x for x in range(1 << n)]
    return DiagonalState(a.nrows + n, idx, np.ones(1 << n, dtype=np.int64), n)


def cipher_state(a: BitMatrix, s: BitVector) -> DiagonalState:
    """rho_{A,s}: weight 2^-n on each string (Ax + s || x)."""
    _require_key_size(a)
    if s.length != a.nrows:
        raise ValueError(f"message length {s.length} != m = {a.nrows}")
    n = a.ncols
    idx = [((matvec_int(a, x) ^ s.value) << n) | x for x in range(1 << n)]
    return DiagonalState(a.nrows + n, idx, np.ones(1 << n, dtype=np.int64), n)


def sample_key_instance(a: BitMatrix, rng) -> KeyInstance:
    """Measure one copy of rho_A in the computational basis."""
    x = rng.getrandbits(a.ncols)
    return KeyInstance(BitVector(a.nrows, matvec_int(a, x)), BitVector(a.ncols, x))


def encrypt_instance(k: KeyInstance, s: BitVector) -> CipherInstance:
    if s.length != k.a_x.length:
        raise ValueError(f"message length {s.length} != m = {k.a_x.length}")
    return CipherInstance(k.a_x ^ s, k.x)


def decrypt(a: BitMatrix, c: CipherInstance) -> BitVector:
    """s = y + Ax. Every (y, x) decodes to some message."""
    if c.y.length != a.nrows or c.x.length != a.ncols:
        raise ValueError("cipher does not match key dimensions")
    return BitVector(a.nrows, c.y.value ^ matvec_int(a, c.x.value))


def _message_ints(params: SchemeParams, s_tuple: Sequence, length: int) -> list[int]:
    if len(s_tuple) != length:
        raise ValueError(f"expected {length} messages, got {len(s_tuple)}")
    out = []
    for s in s_tuple:
        if isinstance(s, BitVector):
            if s.length != params.m:
                raise ValueError(f"message length {s.length} != m = {params.m}")
            out.append(s.value)
        else:
            v = int(s)
            if v < 0 or v >> params.m:
                raise ValueError(f"message {v} does not fit in m = {params.m} bits")
            out.append(v)
    return out


@functools.lru_cache(maxsize=64)
def _gamma_counts_cached(m: int, n: int, t: int, s: tuple[int, ...]) -> np.ndarray:
    counts = kernels.gamma_counts(m, n, t, list(s))
    counts.setflags(write=False)
    return counts


def averaged_cipher_counts(params: SchemeParams, s_tuple: Sequence) -> tuple[np.ndarray, int]:
    """Dense numerators of gamma_s over all 2^{t(m+n)} strings, and the exponent mn+tn."""
    params.check_exact()
    s = tuple(_message_ints(params, s_tuple, params.t))
    return _gamma_counts_cached(params.m, params.n, params.t, s), params.m * params.n + params.t * params.n


def averaged_cipher(params: SchemeParams, s_tuple: Sequence) -> DiagonalState:
    """gamma_s: t ciphers under one key, averaged over all 2^{mn} keys (exact)."""
    counts, k = averaged_cipher_counts(params, s_tuple)
    return DiagonalState.from_counts(params.t * params.cipher_bits, counts, k)


def y_mask(params: SchemeParams, s_tuple: Sequence) -> int:
    """Bit-flip mask that XORs message i into register i's y-part."""
    s = _message_ints(params, s_tuple, len(s_tuple))
    width = params.cipher_bits
    mask = 0
    for i, v in enumerate(s):
        mask |= v << ((params.t - 1 - i) * width + params.n)
    return mask


def adversary_state(params: SchemeParams, t1: int, s_tuple: Sequence) -> DiagonalState:
    """Ciphers of s_1..s_t1 plus t - t1 unused key copies, averaged over keys.

    Built by summing explicit tensor products key by key, independently of the
    enumeration kernel behind :func:`averaged_cipher`.
    """
    params.check_exact()
    if not 0 <= t1 <= params.t:
        raise ValueError(f"t1 must lie in [0, t={params.t}]")
    s = _message_ints(params, s_tuple, t1)
    m, n, t = params.m, params.n, params.t
    acc = np.zeros(1 << (t * (m + n)), dtype=np.int64)
    for a_int in range(1 << (m * n)):
        a = BitMatrix.from_int(a_int, m, n)
        state = DiagonalState(0, [0], [1], 0)
        for v in s:
            state = tensor_diag(state, cipher_state(a, BitVector(m, v)))
        state = tensor_diag(state, tensor_power(encryption_key_state(a), t - t1))
        # every per-key state has uniform weight 2^{-tn}
        acc[state.indices] += state.numerators << (t * n - state.log2_denom)
    return DiagonalState.from_counts(t * (m + n), acc, m * n + t * n)


def sample_averaged_cipher(params: SchemeParams, s_tuple: Sequence, samples: int, rng) -> Counter:
    """Monte Carlo ESTIMATE of gamma_s for sizes beyond exact enumeration.

    Each sample draws a fresh key and t key instances; returns string counts.
    """
    params.check_keys()
    s = _message_ints(params, s_tuple, params.t)
    m, n = params.m, params.n
    counts: Counter = Counter()
    for _ in range(samples):
        a = BitMatrix.from_int(rng.getrandbits(m * n), m, n)
        z = 0
        for v in s:
            x = rng.getrandbits(n)
            z = (z << (m + n)) | ((matvec_int(a, x) ^ v) << n) | x
        counts[z] += 1
    return counts
