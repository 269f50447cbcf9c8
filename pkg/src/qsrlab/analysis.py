"""Exact security figures for the matrix scheme and checkers for the general bounds.

Everything that can be exact is a Fraction; floating point only enters
through log2 in entropy-based bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Hashable, Mapping, Sequence

import numpy as np

from .errors import ConsistencyError
from .gf2 import BitMatrix, BitVector, rank_distribution
from .qsr_core import SchemeParams, averaged_cipher_counts, cipher_state, y_mask
from .qstate import DensityOperator, DiagonalState, binary_entropy, entropy, tensor_diag
from .rng import SplitMix64

AF_TOL = 1e-9
BOUND_TOL = 1e-10


def fmt_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class SecurityReport:
    params: SchemeParams
    epsilon_exact: Fraction
    paper_bound: Fraction
    spectrum: tuple[tuple[Fraction, int], ...]
    holds: bool

    @property
    def regime(self) -> dict:
        return {"m": self.params.m, "n": self.params.n, "t": self.params.t,
                "delta": fmt_fraction(self.params.effective_delta)}

    def to_dict(self) -> dict:
        return {
            "params": self.regime,
            "epsilon_exact": fmt_fraction(self.epsilon_exact),
            "epsilon_float": float(self.epsilon_exact),
            "bound": fmt_fraction(self.paper_bound),
            "spectrum": [[fmt_fraction(w), mult] for w, mult in self.spectrum],
            "holds": self.holds,
        }


def predicted_spectrum(params: SchemeParams) -> dict[Fraction, int]:
    """Nonzero weights of gamma_0: 2^{-dm-tn} with multiplicity 2^{tn} P(d) 2^{dm}."""
    m, n, t = params.m, params.n, params.t
    law = rank_distribution(n, t)
    out = {}
    for d, p in enumerate(law.probs):
        if p:
            mult = p * 2 ** (t * n) * 2 ** (d * m)
            if mult.denominator != 1:
                raise ConsistencyError(f"non-integral multiplicity {mult}")
            out[Fraction(1, 2 ** (d * m + t * n))] = int(mult)
    return out


def epsilon_closed_form(params: SchemeParams) -> Fraction:
    """2 sum_d P(d) (1 - 2^{-(t-d) m})."""
    law = rank_distribution(params.n, params.t)
    return 2 * sum((p * (1 - Fraction(1, 2 ** ((params.t - d) * params.m))) for d, p in enumerate(law.probs)),
                   Fraction(0))


def _l1_to_uniform(counts: np.ndarray, k: int, num_bits: int) -> Fraction:
    """||counts/2^k - uniform||_1 over 2^num_bits strings, exact."""
    if k >= num_bits:
        diff = counts - (1 << (k - num_bits))
        return Fraction(int(np.abs(diff).sum(dtype=object)), 1 << k)
    diff = (counts << (num_bits - k)) - 1
    return Fraction(int(np.abs(diff).sum(dtype=object)), 1 << num_bits)


def epsilon_enumerated(params: SchemeParams) -> Fraction:
    """||gamma_0 - fully mixed||_1 from exhaustive key enumeration."""
    counts, k = averaged_cipher_counts(params, [0] * params.t)
    return _l1_to_uniform(counts, k, params.t * params.cipher_bits)


def randomization_epsilon_exact(params: SchemeParams) -> SecurityReport:
    """Exact distance of gamma_s to the fully mixed state (any s), two ways.

    Raises ConsistencyError if the closed form and enumeration disagree.
    """
    params.check_exact()
    closed = epsilon_closed_form(params)
    direct = epsilon_enumerated(params)
    if closed != direct:
        raise ConsistencyError(f"closed form {closed} != enumeration {direct} at {params}")
    bound = Fraction(2) ** (params.t - params.n + 1)
    spectrum = tuple(sorted(predicted_spectrum(params).items(), reverse=True))
    return SecurityReport(params, closed, bound, spectrum, closed <= bound)


# ------------------------------------------------------------ message-level security


def _normalize_dist(dist: Mapping, t: int, m: int) -> dict[tuple[int, ...], Fraction]:
    out: dict[tuple[int, ...], Fraction] = {}
    for key, p in dist.items():
        tup = tuple(v.value if isinstance(v, BitVector) else int(v) for v in key)
        if len(tup) != t or any(v < 0 or v >> m for v in tup):
            raise ValueError(f"bad message tuple {key!r} for t={t}, m={m}")
        p = Fraction(p) if not isinstance(p, float) else Fraction(p)
        if p < 0:
            raise ValueError("negative probability")
        if p:
            out[tup] = out.get(tup, Fraction(0)) + p
    if sum(out.values(), Fraction(0)) != 1:
        raise ValueError("message distribution does not sum to 1")
    return out


class ClassicalScheme:
    """A classical-message scheme given by a key law and a cipher map.

    ``cipher(key, s)`` returns the DiagonalState of one cipher of message s.
    """

    def __init__(self, key_probs: Mapping[Hashable, Fraction], cipher: Callable[[Hashable, int], DiagonalState],
                 message_bits: int):
        self.key_probs = {k: Fraction(p) for k, p in key_probs.items() if p}
        if sum(self.key_probs.values(), Fraction(0)) != 1:
            raise ValueError("key distribution does not sum to 1")
        self.cipher = cipher
        self.message_bits = message_bits
        self._invertible = None

    def key_entropy(self) -> float:
        return entropy([float(p) for p in self.key_probs.values()]).shannon_bits

    def is_invertible(self) -> bool:
        """Per key, ciphers of distinct messages have disjoint supports (cached)."""
        if self._invertible is None:
            self._invertible = self._scan_invertible()
        return self._invertible

    def _scan_invertible(self) -> bool:
        for key in self.key_probs:
            seen: set[int] = set()
            for s in range(1 << self.message_bits):
                sup = set(self.cipher(key, s).indices.tolist())
                if seen & sup:
                    return False
                seen |= sup
        return True

    def averaged_dense(self, s_tuple: tuple[int, ...]) -> tuple[np.ndarray, int]:
        """Dense numerators of sum_k P(k) rho_{k,s_1} (x) ... (x) rho_{k,s_t}, and their exponent."""
        den = math.lcm(*(p.denominator for p in self.key_probs.values()))
        if den & (den - 1):
            raise ValueError("key probabilities must be dyadic")
        parts = []
        for key, p in self.key_probs.items():
            st = DiagonalState(0, [0], [1], 0)
            for s in s_tuple:
                st = tensor_diag(st, self.cipher(key, s))
            parts.append((int(p * den), st))
        k = max(st.log2_denom for _, st in parts)
        total = sum(w * st.dense(k) for w, st in parts)
        return total, k + den.bit_length() - 1


class MatrixScheme(ClassicalScheme):
    """The matrix-key scheme, with averaged ciphers from the enumeration kernel."""

    def __init__(self, params: SchemeParams):
        params.check_exact()
        m, n = params.m, params.n
        self.params = params
        self._compressed = None
        keys = {k: Fraction(1, 1 << (m * n)) for k in range(1 << (m * n))}
        super().__init__(keys, lambda k, s: cipher_state(BitMatrix.from_int(k, m, n), BitVector(m, s)), m)

    def key_entropy(self) -> float:
        return float(self.params.m * self.params.n)

    def averaged_dense(self, s_tuple):
        counts, k = averaged_cipher_counts(self.params, [0] * self.params.t)
        if not any(s_tuple):
            return counts, k
        # bit-flip covariance: gamma_s(z) = gamma_0(z xor mask(s))
        idx = np.arange(counts.size, dtype=np.int64) ^ y_mask(self.params, s_tuple)
        return counts[idx], k

    def compressed(self):
        """gamma_0 as a (y-tuple, x-column) table with duplicate x-columns merged.

        Flipping messages only permutes the y axis, so equal columns stay equal
        and each unique column is weighted by how often it occurs.
        """
        if self._compressed is None:
            m, n, t = self.params.m, self.params.n, self.params.t
            counts, k = averaged_cipher_counts(self.params, [0] * t)
            z = np.arange(counts.size, dtype=np.int64)
            ys = np.zeros_like(z)
            xs = np.zeros_like(z)
            for i in range(t):
                off = (t - 1 - i) * (m + n)
                ys |= ((z >> (off + n)) & ((1 << m) - 1)) << ((t - 1 - i) * m)
                xs |= ((z >> off) & ((1 << n) - 1)) << ((t - 1 - i) * n)
            table = np.zeros((1 << (t * m), 1 << (t * n)), dtype=np.int64)
            table[ys, xs] = counts
            cols, mult = np.unique(table, axis=1, return_counts=True)
            self._compressed = (cols, mult.astype(np.int64), k)
        return self._compressed

    def message_offset(self, s_tuple) -> int:
        m, t = self.params.m, self.params.t
        return sum(int(v) << ((t - 1 - i) * m) for i, v in enumerate(s_tuple))


def _secure_lhs(scheme: ClassicalScheme, dist: dict[tuple[int, ...], Fraction]) -> Fraction:
    """sum_s P(s) || R_s - sum_r P(r) R_r ||_1, streaming over s twice to bound memory."""
    tuples = list(dist)
    den = math.lcm(*(p.denominator for p in dist.values()))
    ints = [int(dist[s] * den) for s in tuples]
    if isinstance(scheme, MatrixScheme):
        table, col_weight, k = scheme.compressed()
        rows = np.arange(table.shape[0], dtype=np.int64)

        def state(s):
            return table[rows ^ scheme.message_offset(s)]
    else:
        k = scheme.averaged_dense(tuples[0])[1]
        col_weight = None

        def state(s):
            arr, kk = scheme.averaged_dense(s)
            if kk != k:
                raise ConsistencyError("averaged ciphers with differing denominators")
            return arr

    dtype = object if den * den * (1 << k) >= 1 << 62 else np.int64
    avg = None
    for w, s in zip(ints, tuples):
        term = w * state(s).astype(dtype)
        avg = term if avg is None else avg + term
    total = 0
    for w, s in zip(ints, tuples):
        diff = np.abs(den * state(s).astype(dtype) - avg)
        if col_weight is not None:
            diff = diff * col_weight
        total += w * int(diff.sum() if dtype is np.int64 else diff.sum(dtype=object))
    return Fraction(total, den * den * (1 << k))


def secure_epsilon(params: SchemeParams, message_dist: Mapping) -> Fraction:
    """||rho^{SC} - rho^S (x) rho^C||_1 for the matrix scheme under ``message_dist``.

    The message register is classical, so the norm splits into
    sum_s P(s) ||gamma_s - sum_r P(r) gamma_r||_1, evaluated exactly.
    """
    params.check_exact()
    dist = _normalize_dist(message_dist, params.t, params.m)
    return _secure_lhs(MatrixScheme(params), dist)


def uniform_distribution(t: int, m: int) -> dict[tuple[int, ...], Fraction]:
    p = Fraction(1, 1 << (t * m))
    return {tup: p for tup in product(range(1 << m), repeat=t)}


@dataclass(frozen=True)
class BoundReport:
    lhs: float
    rhs: float
    h_st: float
    h_k: float
    satisfied: bool
    lhs_exact: Fraction | None = field(default=None, compare=False)


def theorem1_check(scheme: ClassicalScheme, message_dist: Mapping, t: int) -> BoundReport:
    """Distance to product form versus (H(S^t) - H(K) - 2) / (4 t log|S|)."""
    if t < 1:
        raise ValueError("t must be >= 1")
    if not scheme.is_invertible():
        raise ValueError("scheme is not invertible on the classical messages")
    dist = _normalize_dist(message_dist, t, scheme.message_bits)
    lhs = _secure_lhs(scheme, dist)
    h_st = entropy([float(p) for p in dist.values()]).shannon_bits
    h_k = scheme.key_entropy()
    rhs = (h_st - h_k - 2) / (4 * t * scheme.message_bits)
    return BoundReport(float(lhs), rhs, h_st, h_k, float(lhs) >= rhs - BOUND_TOL, lhs)


# ------------------------------------------------------------- entropy continuity


@dataclass(frozen=True)
class AlickiFannesReport:
    delta: float
    lhs: float
    rhs: float
    holds: bool


def _conditional_entropy(state, a_bits: int | None, d_a: int | None) -> float:
    if isinstance(state, DiagonalState):
        b_bits = state.num_bits - a_bits
        marg = np.bincount(state.indices & ((1 << b_bits) - 1), weights=state.numerators.astype(np.float64),
                           minlength=1 << b_bits) / float(1 << state.log2_denom)
        return entropy(state).shannon_bits - entropy(marg).shannon_bits
    mat = state.matrix
    d_b = mat.shape[0] // d_a
    rho_b = np.einsum("ijik->jk", mat.reshape(d_a, d_b, d_a, d_b))
    return entropy(state).shannon_bits - entropy(DensityOperator(rho_b, validate=False)).shannon_bits


def alicki_fannes_gap(rho_ab, sigma_ab, d_a: int) -> AlickiFannesReport:
    """|S(A|B)_rho - S(A|B)_sigma| against 4 delta log d_A + 2 h(delta).

    States are DiagonalStates (A = the top log2 d_A bits) or DensityOperators
    on C^{d_A} (x) C^{d_B}. delta is the full trace norm and must be <= 1.
    Raises ConsistencyError if the inequality fails.
    """
    from .qstate import l1_distance, trace_distance

    if isinstance(rho_ab, DiagonalState):
        a_bits = d_a.bit_length() - 1
        if d_a != 1 << a_bits or a_bits > rho_ab.num_bits:
            raise ValueError("d_A must be a power of two not exceeding the state size")
        delta = float(l1_distance(rho_ab, sigma_ab))
    else:
        a_bits = None
        if rho_ab.dim % d_a:
            raise ValueError("d_A does not divide the dimension")
        delta = trace_distance(rho_ab, sigma_ab)
    if delta > 1 + 1e-12:
        raise ValueError(f"trace distance {delta:.6g} exceeds 1; the continuity bound needs delta <= 1")
    delta = min(delta, 1.0)
    lhs = abs(_conditional_entropy(rho_ab, a_bits, d_a) - _conditional_entropy(sigma_ab, a_bits, d_a))
    rhs = 4 * delta * math.log2(d_a) + 2 * binary_entropy(delta)
    rep = AlickiFannesReport(delta, lhs, rhs, lhs <= rhs + AF_TOL)
    if not rep.holds:
        raise ConsistencyError(f"continuity bound violated: {lhs} > {rhs}")
    return rep


@dataclass(frozen=True)
class EntropyFloor:
    bits: float
    raw_bits: float
    vacuous: bool


def corollary1_min_entropy(t: int, d: int, eps: float) -> EntropyFloor:
    """Necessary key entropy (1 - 8 eps) t log d - 2; negative values report 0."""
    if eps < 0:
        raise ValueError("eps must be >= 0")
    raw = (1 - 8 * float(eps)) * t * math.log2(d) - 2
    return EntropyFloor(max(raw, 0.0), raw, raw <= 0)


# --------------------------------------------------------- factor-two equivalence


@dataclass(frozen=True)
class SandwichReport:
    eps_r: Fraction
    eps_s: Fraction
    forward: bool  # eps_s <= 2 eps_r
    converse: bool  # eps_r <= 2 eps_s
    distributions: int

    @property
    def holds(self) -> bool:
        return self.forward and self.converse


MAX_TWO_POINT = 64


def battery_distributions(params: SchemeParams, seed: int = 0) -> list[dict]:
    """Deterministic battery: uniform, point masses, two-point pairs (0, r), random sparse."""
    t, m = params.t, params.m
    rng = SplitMix64(seed)
    space = 1 << (t * m)

    def unpack(v):
        return tuple((v >> ((t - 1 - i) * m)) & ((1 << m) - 1) for i in range(t))

    out = [uniform_distribution(t, m), {unpack(0): Fraction(1)}]
    if space > 1:
        out.append({unpack(space - 1): Fraction(1)})
        others = list(range(1, space))
        if len(others) > MAX_TWO_POINT:
            others = sorted({1 + rng.randbelow(space - 1) for _ in range(MAX_TWO_POINT)})
        for r in others:
            out.append({unpack(0): Fraction(1, 2), unpack(r): Fraction(1, 2)})
        for _ in range(3):
            support = sorted({rng.randbelow(space) for _ in range(4)})
            weights = [1 + rng.randbelow(7) for _ in support]
            tot = sum(weights)
            out.append({unpack(v): Fraction(w, tot) for v, w in zip(support, weights)})
    return out


def lemma1_crosscheck(params: SchemeParams, distributions: Sequence[Mapping] | None = None) -> SandwichReport:
    """Sandwich between the randomizing and the product-form security figures."""
    params.check_exact()
    eps_r = randomization_epsilon_exact(params).epsilon_exact
    dists = list(distributions) if distributions is not None else battery_distributions(params)
    scheme = MatrixScheme(params)
    eps_s = max(_secure_lhs(scheme, _normalize_dist(d, params.t, params.m)) for d in dists)
    return SandwichReport(eps_r, eps_s, eps_s <= 2 * eps_r, eps_r <= 2 * eps_s, len(dists))


def default_grid(max_m: int = 3, max_n: int = 4, max_t: int = 3) -> list[SchemeParams]:
    """(m, n, t) with m <= 3, n <= 4, 0 <= t <= 3 inside the exact-enumeration guards."""
    out = []
    for m in range(1, max_m + 1):
        for n in range(1, max_n + 1):
            for t in range(0, max_t + 1):
                if t * (m + n) <= 24 and m * n <= 24:
                    out.append(SchemeParams(m, n, t))
    return out
