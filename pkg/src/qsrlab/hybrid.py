"""Quantum messages: Pauli-pad the message with a fresh classical key s, then
encrypt s under the matrix scheme. Also the key-size accounting of the
combined construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce
from itertools import product
from typing import Sequence

import numpy as np

from .errors import GuardError
from .gf2 import BitMatrix, BitVector, matvec_int
from .pauli_otp import PauliKey, SubsampledScheme, apply_pauli
from .qsr_core import CipherInstance, SchemeParams, decrypt, encrypt_instance, sample_key_instance
from .qstate import DensityOperator, trace_norm

MAX_QUANTUM_DIM = 64
MAX_KEY_TUPLES = 4096


@dataclass(frozen=True)
class HybridCipher:
    classical: CipherInstance
    quantum: DensityOperator

    def dumps(self) -> str:
        return self.classical.dumps() + self.quantum.dumps()

    @classmethod
    def loads(cls, text: str) -> "HybridCipher":
        first, _, rest = text.lstrip().partition("\n")
        return cls(CipherInstance.loads(first), DensityOperator.loads(rest, validate=False))


def _qubits_for(a: BitMatrix, dim: int) -> int:
    q = dim.bit_length() - 1
    if dim != 1 << q or a.nrows != 2 * q:
        raise ValueError(f"hybrid scheme needs m = 2q: key has m={a.nrows}, message has dim {dim}")
    return q


def hybrid_encrypt(a: BitMatrix, sigma: DensityOperator, rng, inner: SubsampledScheme | None = None) -> HybridCipher:
    """Pad sigma with a random Pauli key s and encrypt s with one key copy of A."""
    q = _qubits_for(a, sigma.dim)
    if inner is None:
        s = BitVector(2 * q, rng.getrandbits(2 * q))
    else:
        s = inner.keys[rng.randbelow(len(inner.keys))].to_message()
    classical = encrypt_instance(sample_key_instance(a, rng), s)
    return HybridCipher(classical, apply_pauli(PauliKey.from_message(s, q), sigma))


def hybrid_decrypt(a: BitMatrix, cipher: HybridCipher) -> DensityOperator:
    q = _qubits_for(a, cipher.quantum.dim)
    s = decrypt(a, cipher.classical)
    return apply_pauli(PauliKey.from_message(s, q), cipher.quantum)


@dataclass
class BlockState:
    """Classical-quantum state: one d x d block per classical basis string.

    Strings absent from ``blocks`` carry the zero block.
    """

    num_bits: int
    dim: int
    blocks: dict[int, np.ndarray]

    def trace(self) -> float:
        return float(sum(np.trace(b).real for b in self.blocks.values()))

    def classical_marginal(self) -> dict[int, float]:
        return {z: float(np.trace(b).real) for z, b in self.blocks.items()}

    def quantum_marginal(self) -> np.ndarray:
        return sum(self.blocks.values(), np.zeros((self.dim, self.dim), dtype=np.complex128))


def hybrid_cipher_state(a: BitMatrix | None, sigma: DensityOperator, m: int | None = None, n: int | None = None,
                        inner: SubsampledScheme | None = None) -> BlockState:
    """Exact output of one hybrid encryption, averaged over the inner key s and the
    key instance x; with ``a=None`` also averaged over all decryption keys
    (then ``m`` and ``n`` are required)."""
    if a is None:
        if m is None or n is None:
            raise ValueError("averaged mode needs m and n")
        SchemeParams(m, n, 1).check_exact()
        keys = [BitMatrix.from_int(v, m, n) for v in range(1 << (m * n))]
    else:
        keys = [a]
        m, n = a.nrows, a.ncols
    q = _qubits_for(keys[0], sigma.dim)
    pads = list(inner.keys) if inner is not None else [PauliKey.from_message(s, q) for s in range(1 << m)]
    padded = {k: apply_pauli(k, sigma.matrix) for k in pads}
    w = 1.0 / (len(keys) * len(pads) * (1 << n))
    blocks: dict[int, np.ndarray] = {}
    for key in keys:
        for x in range(1 << n):
            ax = matvec_int(key, x)
            for k in pads:
                z = ((ax ^ k.to_message().value) << n) | x
                if z in blocks:
                    blocks[z] = blocks[z] + w * padded[k]
                else:
                    blocks[z] = w * padded[k]
    return BlockState(m + n, sigma.dim, blocks)


@dataclass(frozen=True)
class HybridReport:
    distance: float
    eps1: float
    eps2: float
    t1: int
    bound: float
    holds: bool


def _relation_patterns(n: int, t: int) -> dict[frozenset, int]:
    """Count x-tuples in ({0,1}^n)^t by their set of vanishing XOR combinations."""
    nmask = (1 << n) - 1
    out: dict[frozenset, int] = {}
    for tup in range(1 << (t * n)):
        xs = [(tup >> ((t - 1 - i) * n)) & nmask for i in range(t)]
        rel = []
        for c in range(1, 1 << t):
            acc = 0
            for i in range(t):
                if (c >> (t - 1 - i)) & 1:
                    acc ^= xs[i]
            if acc == 0:
                rel.append(c)
        key = frozenset(rel)
        out[key] = out.get(key, 0) + 1
    return out


def _in_span_mask(rel: frozenset, m: int, t: int) -> np.ndarray:
    """Boolean over y-tuples in ({0,1}^m)^t: does y satisfy every relation in ``rel``?"""
    ys = np.arange(1 << (t * m), dtype=np.int64)
    mmask = (1 << m) - 1
    parts = [(ys >> ((t - 1 - i) * m)) & mmask for i in range(t)]
    ok = np.ones(ys.size, dtype=bool)
    for c in rel:
        acc = np.zeros_like(ys)
        for i in range(t):
            if (c >> (t - 1 - i)) & 1:
                acc ^= parts[i]
        ok &= acc == 0
    return ok


def hybrid_distance_exact(params: SchemeParams, sigmas: Sequence[DensityOperator], t1: int,
                          inner: SubsampledScheme | None = None) -> float:
    """||rho^E - tau_1 (x) tau_2^{(x) t1}||_tr for the hybrid adversary state.

    rho^E holds t1 hybrid ciphers of ``sigmas`` and t - t1 raw key copies;
    tau_1 is fully mixed on the classical registers and tau_2 = I/2^q. The
    classical registers are diagonal, so the trace norm is the sum of block
    trace norms. Averaged over keys, the weight of string (y, x) is
    2^{-tn - m rank(x)} when y satisfies every linear relation among the x_i and
    0 otherwise, so blocks only depend on that relation pattern.
    """
    params.check_exact()
    m, n, t = params.m, params.n, params.t
    if not 0 <= t1 <= t:
        raise ValueError(f"t1 must lie in [0, t={t}]")
    if len(sigmas) != t1:
        raise ValueError(f"expected {t1} message states, got {len(sigmas)}")
    q = m // 2
    if m != 2 * q:
        raise ValueError("hybrid scheme needs even m = 2q")
    pads = list(inner.keys) if inner is not None else [PauliKey.from_message(s, q) for s in range(1 << m)]
    dim = (1 << q) ** t1
    if dim > MAX_QUANTUM_DIM:
        raise GuardError(f"quantum register too large: 2^(q t1) <= {MAX_QUANTUM_DIM} required")
    if len(pads) ** t1 > MAX_KEY_TUPLES:
        raise GuardError(f"too many inner key tuples: K^t1 <= {MAX_KEY_TUPLES} required")
    for sg in sigmas:
        if sg.dim != 1 << q:
            raise ValueError(f"message states must have dim 2^q = {1 << q}")

    padded = [[apply_pauli(k, sg.matrix) for k in pads] for sg in sigmas]
    tuples = list(product(range(len(pads)), repeat=t1))
    ops = np.array([reduce(np.kron, [padded[i][j] for i, j in enumerate(tup)], np.eye(1)) for tup in tuples])
    emb = np.array(
        [sum(pads[j].to_message().value << ((t - 1 - i) * m) for i, j in enumerate(tup)) for tup in tuples],
        dtype=np.int64,
    )
    p_tuple = 1.0 / len(tuples)
    u = 2.0 ** (-t * (m + n)) / dim
    ident = np.eye(dim)
    ys = np.arange(1 << (t * m), dtype=np.int64)

    total = 0.0
    for rel, count in _relation_patterns(n, t).items():
        rank = t - (len(rel) + 1).bit_length() + 1
        w = 2.0 ** (-t * n - m * rank)
        in_span = _in_span_mask(rel, m, t)
        rows = in_span[ys[:, None] ^ emb[None, :]]
        uniq, mult = np.unique(rows, axis=0, return_counts=True)
        acc = 0.0
        for row, k in zip(uniq, mult):
            block = w * p_tuple * np.tensordot(row.astype(np.float64), ops, axes=1)
            acc += k * trace_norm(block - u * ident)
        total += count * acc
    return float(total)


def hybrid_randomization_distance(params: SchemeParams, sigmas: Sequence[DensityOperator], t1: int,
                                  inner: SubsampledScheme | None = None, eps2: float | None = None) -> HybridReport:
    """Hybrid distance next to the composition bound eps1 + t1 eps2.

    eps1 is the exact classical-scheme distance. When ``eps2`` is not given it
    is measured on the supplied message states (exact per state, max over them).
    """
    from .analysis import epsilon_closed_form

    dist = hybrid_distance_exact(params, sigmas, t1, inner)
    eps1 = float(epsilon_closed_form(params))
    sch = inner if inner is not None else SubsampledScheme.full(params.m // 2)
    measured = max((sch.distance_to_mixed(sg) for sg in sigmas), default=0.0)
    e2 = measured if eps2 is None else max(float(eps2), measured)
    bound = eps1 + t1 * e2
    return HybridReport(float(dist), eps1, float(e2), t1, float(bound), bool(dist <= bound + 1e-9))


@dataclass(frozen=True)
class KeyBudget:
    t: int
    d: int
    eps1: float
    eps2: float
    entropy_bits: float
    lower_bound_bits: float
    ratio: float
    pauli_entropy_bits: float


def keysize_accounting(t: int, d: int, eps1: float, eps2: float) -> KeyBudget:
    """Decryption-key entropy of the combined scheme.

    entropy_bits = (t + log 1/eps1 + 1)(log d + log 1/eps2 + 4), with the
    approximate pad of key length log d + log 1/eps2 + 4. pauli_entropy_bits
    swaps in the perfect Pauli pad (key length 2 log d). lower_bound_bits is the
    necessary entropy (1 - 8 eps) t log d - 2 at eps = eps1 + t eps2.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if d < 2:
        raise ValueError("d must be >= 2")
    if not (0 < eps1 <= 1 and 0 < eps2 <= 1):
        raise ValueError("eps1 and eps2 must lie in (0, 1]")
    log_d = math.log2(d)
    classical = t + math.log2(1 / eps1) + 1
    entropy = classical * (log_d + math.log2(1 / eps2) + 4)
    eps = eps1 + t * eps2
    lower = (1 - 8 * eps) * t * log_d - 2
    return KeyBudget(t, d, eps1, eps2, entropy, lower, entropy / (t * log_d), classical * 2 * log_d)


def asymptotic_ratio(t: int, log_d: float, delta1: float, delta2: float) -> tuple[float, float]:
    """(entropy / (t log d), (1 + delta1)(1 + delta2)) at eps1 = 2^{-delta1 t}, eps2 = d^{-delta2}.

    Works in log space so huge d never has to be materialised.
    """
    classical = t + delta1 * t + 1
    inner = log_d + delta2 * log_d + 4
    return classical * inner / (t * log_d), (1 + delta1) * (1 + delta2)
