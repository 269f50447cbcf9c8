"""Pauli one-time pad on q qubits and subsampled variants of it.

Key (a, b) acts as rho -> X^a Z^b rho Z^b X^a. Qubit 0 is the most significant
bit of a basis index; the classical message encoding of a key is s = (a || b).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import BitVector
from .qstate import DensityOperator, random_pure_state, trace_distance
from .rng import as_generator

MAX_QUBITS = 3


def _popcount_parity(v: np.ndarray) -> np.ndarray:
    p = np.zeros_like(v)
    while np.any(v):
        p ^= v & 1
        v = v >> 1
    return p


@dataclass(frozen=True)
class PauliKey:
    q: int
    a: int  # X mask
    b: int  # Z mask

    def __post_init__(self):
        if not 1 <= self.q <= MAX_QUBITS:
            raise ValueError(f"q must lie in [1, {MAX_QUBITS}]")
        if self.a >> self.q or self.b >> self.q or self.a < 0 or self.b < 0:
            raise ValueError("mask wider than q bits")

    @classmethod
    def from_message(cls, s, q: int) -> "PauliKey":
        """Split a 2q-bit message s = (a || b)."""
        v = s.value if isinstance(s, BitVector) else int(s)
        if isinstance(s, BitVector) and s.length != 2 * q:
            raise ValueError(f"message length {s.length} != 2q = {2 * q}")
        return cls(q, v >> q, v & ((1 << q) - 1))

    def to_message(self) -> BitVector:
        return BitVector(2 * self.q, (self.a << self.q) | self.b)

    def dumps(self) -> str:
        return f"{self.a:x} {self.b:x} {self.q}\n"

    @classmethod
    def loads(cls, text: str) -> "PauliKey":
        a, b, q = text.split()
        return cls(int(q), int(a, 16), int(b, 16))


def all_keys(q: int) -> list[PauliKey]:
    """All 4^q keys, ordered by their message encoding."""
    return [PauliKey.from_message(s, q) for s in range(1 << (2 * q))]


def _apply(k: PauliKey, mat: np.ndarray) -> np.ndarray:
    dim = 1 << k.q
    idx = np.arange(dim)
    sign = 1 - 2 * _popcount_parity(idx & k.b)
    out = mat * np.outer(sign, sign)
    perm = idx ^ k.a
    return out[np.ix_(perm, perm)]


def apply_pauli(k: PauliKey, rho):
    """X^a Z^b rho Z^b X^a; an involution. Accepts DensityOperator or ndarray."""
    mat = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=np.complex128)
    if mat.shape != (1 << k.q, 1 << k.q):
        raise ValueError(f"dimension mismatch: key acts on dim {1 << k.q}, state has dim {mat.shape[0]}")
    out = _apply(k, mat)
    return DensityOperator(out, validate=False) if isinstance(rho, DensityOperator) else out


def randomize_full(rho, q: int) -> DensityOperator:
    """Average of apply_pauli over all 4^q keys (equals I/2^q)."""
    mat = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=np.complex128)
    if mat.shape != (1 << q, 1 << q):
        raise ValueError(f"dimension mismatch: expected dim {1 << q}")
    acc = np.zeros_like(mat)
    keys = all_keys(q)
    for k in keys:
        acc += _apply(k, mat)
    return DensityOperator(acc / len(keys), validate=False)


@dataclass(frozen=True)
class SubsampledScheme:
    """Pauli pad restricted to K distinct keys, each used with probability 1/K."""

    q: int
    keys: tuple[PauliKey, ...]

    def __post_init__(self):
        if not self.keys:
            raise ValueError("need at least one key")
        if len(set(self.keys)) != len(self.keys):
            raise ValueError("keys must be distinct")
        if any(k.q != self.q for k in self.keys):
            raise ValueError("all keys must act on q qubits")

    @classmethod
    def full(cls, q: int) -> "SubsampledScheme":
        return cls(q, tuple(all_keys(q)))

    @classmethod
    def random(cls, q: int, size: int, rng) -> "SubsampledScheme":
        g = as_generator(rng)
        chosen = g.choice(1 << (2 * q), size=size, replace=False)
        return cls(q, tuple(PauliKey.from_message(int(s), q) for s in sorted(chosen)))

    @property
    def key_probs(self) -> tuple[float, ...]:
        return (1.0 / len(self.keys),) * len(self.keys)

    def average(self, rho) -> DensityOperator:
        mat = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho, dtype=np.complex128)
        acc = np.zeros_like(mat)
        for k in self.keys:
            acc += apply_pauli(k, mat)
        return DensityOperator(acc / len(self.keys), validate=False)

    def distance_to_mixed(self, rho) -> float:
        """||average(rho) - I/2^q||_tr for one message state."""
        return trace_distance(self.average(rho), np.eye(1 << self.q) / (1 << self.q))


def epsilon_estimate(sch: SubsampledScheme, trials: int, rng=None) -> float:
    """Largest distance to I/2^q seen over ``trials`` Haar-random pure states.

    This is an empirical LOWER estimate of the scheme's epsilon (a supremum over
    all states), never a certified bound.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    g = as_generator(rng)
    dim = 1 << sch.q
    return max(sch.distance_to_mixed(random_pure_state(dim, g)) for _ in range(trials))
