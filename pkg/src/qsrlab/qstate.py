"""Classical (diagonal) and dense quantum states, distances and entropies.

Diagonal states carry exact dyadic weights: one shared exponent ``k`` and
positive int64 numerators, so ``weight(z) = numerator / 2**k``. Basis strings
are integers whose most significant bit is the first register's first bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

from . import kernels
from .errors import GuardError
from .rng import as_generator

MAX_LOG2_DENOM = 62


def _trailing_zeros(v: int) -> int:
    return (v & -v).bit_length() - 1


class DiagonalState:
    """Probability distribution over ``num_bits``-bit basis strings, exact."""

    __slots__ = ("num_bits", "indices", "numerators", "log2_denom")

    def __init__(self, num_bits: int, indices, numerators, log2_denom: int):
        idx = np.asarray(indices, dtype=np.int64)
        num = np.asarray(numerators, dtype=np.int64)
        if idx.shape != num.shape or idx.ndim != 1:
            raise ValueError("indices and numerators must be matching 1-d arrays")
        keep = num != 0
        idx, num = idx[keep], num[keep]
        if np.any(num < 0):
            raise ValueError("weights must be non-negative")
        if idx.size and (idx.min() < 0 or int(idx.max()) >> num_bits):
            raise ValueError(f"basis index out of range for {num_bits} bits")
        order = np.argsort(idx, kind="stable")
        idx, num = idx[order], num[order]
        if idx.size > 1 and np.any(idx[1:] == idx[:-1]):
            raise ValueError("duplicate basis strings")
        total = int(num.sum(dtype=object)) if num.size else 0
        if total != 1 << log2_denom:
            raise ValueError(f"weights sum to {total}/2^{log2_denom}, not 1")
        # canonical form: strip common factors of two so equality is structural
        acc = int(np.bitwise_or.reduce(num))
        shift = min(_trailing_zeros(acc), log2_denom)
        if shift:
            num = num >> shift
            log2_denom -= shift
        idx.setflags(write=False)
        num.setflags(write=False)
        self.num_bits = num_bits
        self.indices = idx
        self.numerators = num
        self.log2_denom = log2_denom

    @classmethod
    def from_weights(cls, weights: Mapping[str, Union[Fraction, int]]) -> "DiagonalState":
        """Build from {bitstring: probability}; probabilities must be dyadic."""
        if not weights:
            raise ValueError("empty distribution")
        lengths = {len(b) for b in weights}
        if len(lengths) != 1:
            raise ValueError("bit strings of mixed length")
        num_bits = lengths.pop()
        fr = {b: Fraction(w) for b, w in weights.items()}
        k = 0
        for w in fr.values():
            den = w.denominator
            if den & (den - 1):
                raise ValueError(f"weight {w} is not dyadic")
            k = max(k, den.bit_length() - 1)
        idx = [int(b, 2) if b else 0 for b in fr]
        num = [int(w * (1 << k)) for w in fr.values()]
        return cls(num_bits, idx, num, k)

    @classmethod
    def from_counts(cls, num_bits: int, counts: np.ndarray, log2_denom: int) -> "DiagonalState":
        counts = np.asarray(counts, dtype=np.int64)
        idx = np.flatnonzero(counts)
        return cls(num_bits, idx, counts[idx], log2_denom)

    @classmethod
    def point(cls, bits: str) -> "DiagonalState":
        return cls(len(bits), [int(bits, 2) if bits else 0], [1], 0)

    @property
    def support_size(self) -> int:
        return int(self.indices.size)

    @property
    def weights(self) -> dict[str, Fraction]:
        den = 1 << self.log2_denom
        return {self.bitstring(int(i)): Fraction(int(n), den) for i, n in zip(self.indices, self.numerators)}

    def bitstring(self, index: int) -> str:
        return format(index, f"0{self.num_bits}b") if self.num_bits else ""

    def weight(self, z) -> Fraction:
        if isinstance(z, str):
            z = int(z, 2) if z else 0
        pos = np.searchsorted(self.indices, z)
        if pos < self.indices.size and self.indices[pos] == z:
            return Fraction(int(self.numerators[pos]), 1 << self.log2_denom)
        return Fraction(0)

    def spectrum(self) -> dict[Fraction, int]:
        """Nonzero weights with their multiplicities."""
        vals, mult = np.unique(self.numerators, return_counts=True)
        den = 1 << self.log2_denom
        return {Fraction(int(v), den): int(c) for v, c in zip(vals, mult)}

    def dense(self, log2_denom: int | None = None) -> np.ndarray:
        """Numerators over all 2^num_bits strings at denominator 2^log2_denom."""
        k = self.log2_denom if log2_denom is None else log2_denom
        if k < self.log2_denom:
            raise ValueError("cannot lower the denominator exactly")
        out = np.zeros(1 << self.num_bits, dtype=np.int64)
        out[self.indices] = self.numerators << (k - self.log2_denom)
        return out

    def flip(self, mask: int) -> "DiagonalState":
        """Apply the bit-flip permutation z -> z XOR mask."""
        return DiagonalState(self.num_bits, self.indices ^ mask, self.numerators, self.log2_denom)

    def to_operator(self) -> "DensityOperator":
        if self.num_bits > 12:
            raise GuardError("dense embedding requires num_bits <= 12")
        diag = self.dense().astype(np.float64) / float(1 << self.log2_denom)
        return DensityOperator(np.diag(diag).astype(np.complex128), validate=False)

    def __eq__(self, other):
        if not isinstance(other, DiagonalState):
            return NotImplemented
        return (
            self.num_bits == other.num_bits
            and self.log2_denom == other.log2_denom
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.numerators, other.numerators)
        )

    __hash__ = None

    def __repr__(self):
        if self.support_size <= 8:
            body = ", ".join(f"{b}: {w}" for b, w in self.weights.items())
            return f"DiagonalState({{{body}}})"
        return f"DiagonalState(num_bits={self.num_bits}, support={self.support_size}, denom=2^{self.log2_denom})"

    # serialization: one "bitstring numerator/2^k" line per support point
    def dumps(self) -> str:
        k = self.log2_denom
        return "".join(f"{self.bitstring(int(i))} {int(n)}/2^{k}\n" for i, n in zip(self.indices, self.numerators))

    @classmethod
    def loads(cls, text: str) -> "DiagonalState":
        weights = {}
        for ln in text.splitlines():
            parts = ln.split()
            if not parts:
                continue
            bits, frac = (parts if len(parts) == 2 else ("", parts[0]))
            num, _, den = frac.partition("/")
            if den.startswith("2^"):
                den_val = 1 << int(den[2:])
            else:
                den_val = int(den or 1)
            weights[bits] = Fraction(int(num), den_val)
        return cls.from_weights(weights)


def tensor_diag(a: DiagonalState, b: DiagonalState) -> DiagonalState:
    """a (x) b with a's register in the high bits."""
    k = a.log2_denom + b.log2_denom
    if k > MAX_LOG2_DENOM:
        raise GuardError(f"combined denominator 2^{k} exceeds 2^{MAX_LOG2_DENOM}")
    idx = ((a.indices[:, None] << b.num_bits) | b.indices[None, :]).ravel()
    num = (a.numerators[:, None] * b.numerators[None, :]).ravel()
    return DiagonalState(a.num_bits + b.num_bits, idx, num, k)


def tensor_power(a: DiagonalState, copies: int) -> DiagonalState:
    out = DiagonalState(0, [0], [1], 0)
    for _ in range(copies):
        out = tensor_diag(out, a)
    return out


def l1_distance(a: DiagonalState, b: DiagonalState) -> Fraction:
    """Sum over basis strings of |a(z) - b(z)|, exact.

    For commuting (diagonal) states this is their trace-norm distance.
    """
    if a.num_bits != b.num_bits:
        raise ValueError(f"size mismatch: {a.num_bits} vs {b.num_bits} bits")
    k = max(a.log2_denom, b.log2_denom)
    idx = np.concatenate([a.indices, b.indices])
    val = np.concatenate([a.numerators << (k - a.log2_denom), -(b.numerators << (k - b.log2_denom))])
    uniq, inv = np.unique(idx, return_inverse=True)
    acc = np.zeros(uniq.size, dtype=np.int64)
    np.add.at(acc, inv, val)
    return Fraction(int(np.abs(acc).sum(dtype=object)), 1 << k)


def fully_mixed(num_bits: int) -> DiagonalState:
    """Uniform distribution over all 2^num_bits strings."""
    if num_bits < 0:
        raise ValueError("num_bits must be >= 0")
    return DiagonalState(num_bits, np.arange(1 << num_bits), np.ones(1 << num_bits, dtype=np.int64), num_bits)


# ---------------------------------------------------------------- dense states

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10


class DensityOperator:
    """Dense density matrix (complex128)."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, validate: bool = True):
        mat = np.array(matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("density operator must be a square matrix")
        if validate:
            if np.max(np.abs(mat - mat.conj().T), initial=0.0) > HERMITIAN_TOL:
                raise ValueError("matrix is not Hermitian")
            if abs(np.trace(mat) - 1.0) > TRACE_TOL:
                raise ValueError(f"trace is {np.trace(mat).real:.3g}, not 1")
            if kernels.jacobi_eigvalsh(mat)[0] < -PSD_TOL:
                raise ValueError("matrix has a negative eigenvalue")
        mat.setflags(write=False)
        self.matrix = mat

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return kernels.jacobi_eigvalsh(self.matrix)

    def __repr__(self):
        return f"DensityOperator(dim={self.dim})"

    # serialization: dim header, then one "re im" line per entry, row-major
    def dumps(self) -> str:
        lines = [str(self.dim)]
        for v in self.matrix.ravel():
            lines.append(f"{v.real:.17g} {v.imag:.17g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, validate: bool = True) -> "DensityOperator":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        dim = int(lines[0])
        vals = []
        for ln in lines[1 : 1 + dim * dim]:
            re, im = ln.split()
            vals.append(complex(float(re), float(im)))
        if len(vals) != dim * dim:
            raise ValueError(f"expected {dim * dim} entries, got {len(vals)}")
        return cls(np.array(vals).reshape(dim, dim), validate=validate)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> "DensityOperator":
        return cls.loads(Path(path).read_text())


def _as_matrix(x) -> np.ndarray:
    return x.matrix if isinstance(x, DensityOperator) else np.asarray(x, dtype=np.complex128)


def trace_norm(h) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.abs(kernels.jacobi_eigvalsh(_as_matrix(h))).sum())


def trace_distance(a, b) -> float:
    """||a - b||_tr (no factor 1/2), via Jacobi eigenvalues of the difference."""
    ma, mb = _as_matrix(a), _as_matrix(b)
    if ma.shape != mb.shape:
        raise ValueError(f"dimension mismatch: {ma.shape[0]} vs {mb.shape[0]}")
    return trace_norm(ma - mb)


def fully_mixed_operator(dim: int) -> DensityOperator:
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return DensityOperator(np.eye(dim) / dim, validate=False)


def pure_state(vec) -> DensityOperator:
    v = np.asarray(vec, dtype=np.complex128)
    v = v / np.linalg.norm(v)
    return DensityOperator(np.outer(v, v.conj()), validate=False)


def random_pure_state(dim: int, rng=None) -> DensityOperator:
    """Haar-random pure state."""
    g = as_generator(rng)
    return pure_state(g.normal(size=dim) + 1j * g.normal(size=dim))


def random_density(dim: int, rng=None, rank: int | None = None) -> DensityOperator:
    """Random mixed state from a Ginibre matrix G: G G^dagger / tr."""
    g = as_generator(rng)
    r = dim if rank is None else rank
    gin = g.normal(size=(dim, r)) + 1j * g.normal(size=(dim, r))
    rho = gin @ gin.conj().T
    rho = (rho + rho.conj().T) / 2
    return DensityOperator(rho / np.trace(rho).real, validate=False)


# ----------------------------------------------------------------- entropies


@dataclass(frozen=True)
class EntropyReport:
    shannon_bits: float
    source: str


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _shannon(probs) -> float:
    h = 0.0
    for p in probs:
        p = float(p)
        if p > 0.0:
            h -= p * math.log2(p)
    return h


def entropy(x) -> EntropyReport:
    """Shannon entropy in bits of a diagonal state, of the spectrum of a dense
    state, or of a plain probability vector / mapping. 0 log 0 := 0."""
    if isinstance(x, DiagonalState):
        # H = k - 2^-k sum n log2 n keeps precision for tiny weights
        num = x.numerators.astype(np.float64)
        h = x.log2_denom - float(np.sum(num * np.log2(num))) / float(1 << x.log2_denom)
        return EntropyReport(max(h, 0.0), "diagonal")
    if isinstance(x, DensityOperator):
        return EntropyReport(max(_shannon(np.clip(x.eigenvalues(), 0.0, None)), 0.0), "von-neumann")
    if isinstance(x, Mapping):
        return EntropyReport(_shannon(x.values()), "distribution")
    if isinstance(x, (Sequence, np.ndarray)):
        return EntropyReport(_shannon(x), "distribution")
    raise TypeError(f"cannot take the entropy of {type(x).__name__}")
