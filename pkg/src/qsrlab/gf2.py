"""Linear algebra over GF(2) on bit-packed rows.

A row of an m x n matrix is a Python int of n bits with column 0 as its most
significant bit; vectors use the same convention, so ``str(v)`` reads left to
right as (v_0, v_1, ...).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from . import kernels
from .errors import GuardError

MAX_DIM = 24
BRUTEFORCE_LIMIT = 24


@dataclass(frozen=True)
class BitVector:
    length: int
    value: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("BitVector length must be >= 1")
        if self.value < 0 or self.value >> self.length:
            raise ValueError(f"value {self.value} does not fit in {self.length} bits")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitVector":
        value = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError("bits must be 0 or 1")
            value = (value << 1) | b
        return cls(len(bits), value)

    @classmethod
    def parse(cls, text: str) -> "BitVector":
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a bit string: {text!r}")
        return cls(len(text), int(text, 2))

    @classmethod
    def zeros(cls, length: int) -> "BitVector":
        return cls(length, 0)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.length - 1 - i)) & 1 for i in range(self.length))

    def __xor__(self, other: "BitVector") -> "BitVector":
        if other.length != self.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")
        return BitVector(self.length, self.value ^ other.value)

    def __str__(self) -> str:
        return format(self.value, f"0{self.length}b")


class BitMatrix:
    """An m x n matrix over GF(2), stored as m packed rows."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Iterable[int]):
        if not (1 <= nrows <= MAX_DIM and 1 <= ncols <= MAX_DIM):
            raise GuardError(f"matrix dimensions must satisfy 1 <= m, n <= {MAX_DIM}")
        rows = tuple(int(r) for r in rows)
        if len(rows) != nrows:
            raise ValueError(f"expected {nrows} rows, got {len(rows)}")
        for r in rows:
            if r < 0 or r >> ncols:
                raise ValueError(f"row {r:b} wider than {ncols} columns")
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows

    @classmethod
    def from_bits(cls, bits: Sequence[Sequence[int]]) -> "BitMatrix":
        if not bits:
            raise ValueError("empty matrix")
        ncols = len(bits[0])
        if any(len(r) != ncols for r in bits):
            raise ValueError("ragged rows")
        return cls(len(bits), ncols, (BitVector.from_bits(r).value for r in bits))

    @classmethod
    def from_int(cls, value: int, nrows: int, ncols: int) -> "BitMatrix":
        """Inverse of :meth:`to_int` (row 0 in the most significant bits)."""
        mask = (1 << ncols) - 1
        return cls(nrows, ncols, ((value >> ((nrows - 1 - i) * ncols)) & mask for i in range(nrows)))

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "BitMatrix":
        return cls(nrows, ncols, [0] * nrows)

    @classmethod
    def identity(cls, size: int) -> "BitMatrix":
        return cls(size, size, (1 << (size - 1 - i) for i in range(size)))

    def to_int(self) -> int:
        acc = 0
        for r in self.rows:
            acc = (acc << self.ncols) | r
        return acc

    @property
    def bits(self) -> list[list[int]]:
        return [list(BitVector(self.ncols, r).bits) for r in self.rows]

    def __xor__(self, other: "BitMatrix") -> "BitMatrix":
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return BitMatrix(self.nrows, self.ncols, (a ^ b for a, b in zip(self.rows, other.rows)))

    def __eq__(self, other):
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return (self.nrows, self.ncols, self.rows) == (other.nrows, other.ncols, other.rows)

    def __hash__(self):
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self):
        return f"BitMatrix({self.nrows}, {self.ncols}, {self.bits})"

    # file format: "m n" header, then m lines of n characters
    def dumps(self) -> str:
        lines = [f"{self.nrows} {self.ncols}"]
        lines += [format(r, f"0{self.ncols}b") for r in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "BitMatrix":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty key file")
        try:
            m, n = (int(v) for v in lines[0].split())
        except ValueError:
            raise ValueError(f"bad key header {lines[0]!r}, expected 'm n'") from None
        body = lines[1:]
        if len(body) != m:
            raise ValueError(f"key file declares {m} rows but has {len(body)}")
        rows = []
        for ln in body:
            if len(ln) != n or set(ln) - {"0", "1"}:
                raise ValueError(f"bad key row {ln!r}, expected {n} characters of 0/1")
            rows.append(int(ln, 2))
        return cls(m, n, rows)

    def save(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def load(cls, path) -> "BitMatrix":
        return cls.loads(Path(path).read_text())


def parity(v: int) -> int:
    return bin(v).count("1") & 1


def matvec_int(a: BitMatrix, x: int) -> int:
    acc = 0
    for r in a.rows:
        acc = (acc << 1) | parity(r & x)
    return acc


def matvec(a: BitMatrix, x: BitVector) -> BitVector:
    """A x over GF(2); result bit i is the parity of row i AND x."""
    if x.length != a.ncols:
        raise ValueError(f"dimension mismatch: matrix has {a.ncols} columns, vector has length {x.length}")
    return BitVector(a.nrows, matvec_int(a, x.value))


def rank(vectors: Sequence[BitVector]) -> int:
    """GF(2) rank of the span of ``vectors``; the empty list has rank 0."""
    if not vectors:
        return 0
    n = vectors[0].length
    if any(v.length != n for v in vectors):
        raise ValueError("all vectors must have the same length")
    return kernels.rank_packed([v.value for v in vectors], n)


@dataclass(frozen=True)
class RankDistribution:
    """Law of the rank of t uniform vectors in {0,1}^n; ``probs[d]`` = P(rank = d)."""

    n: int
    t: int
    probs: tuple[Fraction, ...]

    def __getitem__(self, d: int) -> Fraction:
        return self.probs[d]


def rank_distribution(n: int, t: int) -> RankDistribution:
    """Exact rank law via the chain d -> d+1.

    From rank d the next uniform vector lies in the current span with
    probability 2^{d-n}, otherwise the rank grows by one.
    """
    if n < 1 or t < 0:
        raise ValueError("need n >= 1 and t >= 0")
    probs = [Fraction(0)] * (t + 1)
    probs[0] = Fraction(1)
    for step in range(t):
        nxt = [Fraction(0)] * (t + 1)
        for d in range(step + 1):
            p = probs[d]
            if not p:
                continue
            stay = Fraction(1, 2 ** (n - d)) if d <= n else Fraction(1)
            nxt[d] += p * stay
            if d < n:
                nxt[d + 1] += p * (1 - stay)
        probs = nxt
    return RankDistribution(n, t, tuple(probs))


def rank_distribution_bruteforce(n: int, t: int) -> RankDistribution:
    """Rank law from exhaustive enumeration of all 2^{nt} tuples."""
    if n < 1 or t < 0:
        raise ValueError("need n >= 1 and t >= 0")
    if n * t > BRUTEFORCE_LIMIT:
        raise GuardError(f"exhaustive enumeration requires n*t <= {BRUTEFORCE_LIMIT} (got {n * t})")
    counts = kernels.rank_counts(n, t)
    total = 1 << (n * t)
    return RankDistribution(n, t, tuple(Fraction(int(c), total) for c in counts))
