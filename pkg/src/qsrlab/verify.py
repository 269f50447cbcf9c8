"""Acceptance battery: one check per criterion, each returning a CheckResult.

Checks recompute their quantities through independent routes where one
exists (enumeration versus closed form, key-by-key tensor products versus the
enumeration kernel) and report the first discrepancy found.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .analysis import (
    ClassicalScheme,
    battery_distributions,
    default_grid,
    epsilon_closed_form,
    epsilon_enumerated,
    lemma1_crosscheck,
    predicted_spectrum,
    theorem1_check,
    uniform_distribution,
    MatrixScheme,
)
from .gf2 import BitMatrix, BitVector, rank_distribution, rank_distribution_bruteforce
from .hybrid import asymptotic_ratio, hybrid_randomization_distance, keysize_accounting
from .pauli_otp import PauliKey, SubsampledScheme, randomize_full
from .qsr_core import SchemeParams, adversary_state, averaged_cipher, averaged_cipher_counts, cipher_state, encryption_key_state
from .qstate import DiagonalState, random_density, trace_distance
from .rng import SplitMix64

SPECTRUM_BUDGET_S = 30.0
VERIFY_BUDGET_S = 120.0


@dataclass(frozen=True)
class CheckResult:
    key: str
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.key:>3} {self.name}: {self.detail} ({self.seconds:.2f}s)"

    def to_dict(self) -> dict:
        return {"id": self.key, "name": self.name, "ok": self.ok, "detail": self.detail, "seconds": self.seconds}


def grid_from_spec(spec: str) -> list[SchemeParams]:
    """'default', 'empty', or 'm=1:3,n=1:4,t=0:3' (inclusive ranges; single values allowed)."""
    spec = spec.strip()
    if spec == "default":
        return default_grid()
    if spec in ("empty", ""):
        return []
    ranges = {"m": (1, 3), "n": (1, 4), "t": (0, 3)}
    for part in spec.split(","):
        name, _, rng = part.partition("=")
        name = name.strip()
        if name not in ranges or not rng:
            raise ValueError(f"bad grid component {part!r}; expected m=a:b, n=a:b or t=a:b")
        lo, _, hi = rng.partition(":")
        lo_i = int(lo)
        hi_i = int(hi) if hi else lo_i
        ranges[name] = (lo_i, hi_i)
    out = []
    for m in range(ranges["m"][0], ranges["m"][1] + 1):
        for n in range(ranges["n"][0], ranges["n"][1] + 1):
            for t in range(ranges["t"][0], ranges["t"][1] + 1):
                p = SchemeParams(m, n, t)
                p.check_exact()
                out.append(p)
    return out


def _zeros(t):
    return [0] * t


# ---------------------------------------------------------------- criteria


def check_spectrum(grid) -> tuple[bool, str]:
    start = time.perf_counter()
    for p in grid:
        counts, k = averaged_cipher_counts(p, _zeros(p.t))
        vals, mult = np.unique(counts[counts > 0], return_counts=True)
        seen = {Fraction(int(v), 1 << k): int(c) for v, c in zip(vals, mult)}
        want = predicted_spectrum(p)
        if seen != want:
            return False, f"spectrum mismatch at (m,n,t)=({p.m},{p.n},{p.t})"
    elapsed = time.perf_counter() - start
    if elapsed >= SPECTRUM_BUDGET_S:
        return False, f"{len(grid)} instances exact but took {elapsed:.1f}s >= {SPECTRUM_BUDGET_S:.0f}s"
    return True, f"{len(grid)} instances exact in {elapsed:.2f}s"


def check_randomization_bound(grid) -> tuple[bool, str]:
    p = SchemeParams(1, 2, 2)
    closed, direct = epsilon_closed_form(p), epsilon_enumerated(p)
    if not closed == direct == Fraction(21, 32):
        return False, f"eps*(1,2,2): closed {closed}, enumerated {direct}, expected 21/32"
    worst = Fraction(0)
    for q in grid:
        closed, direct = epsilon_closed_form(q), epsilon_enumerated(q)
        if closed != direct:
            return False, f"closed {closed} != enumerated {direct} at ({q.m},{q.n},{q.t})"
        bound = Fraction(2) ** (q.t - q.n + 1)
        if closed > bound:
            return False, f"eps* = {closed} > 2^(t-n+1) at ({q.m},{q.n},{q.t})"
        worst = max(worst, closed / bound)
    for m in (1, 2, 3):
        q = SchemeParams.from_delta(m, 4, Fraction(1, 2))
        e = epsilon_enumerated(q)
        if q.t != 2 or e > Fraction(1, 2):
            return False, f"n=4, delta=1/2: t={q.t}, eps*={e}"
    return True, f"eps*(1,2,2)=21/32; bound holds on {len(grid)} instances (max eps*/bound {float(worst):.4f}); n=4 delta=1/2 ok"


def check_rank_law(max_nt: int = 16) -> tuple[bool, str]:
    cases = 0
    for n in range(1, max_nt + 1):
        for t in range(0, max_nt // n + 1):
            if rank_distribution(n, t).probs != rank_distribution_bruteforce(n, t).probs:
                return False, f"recurrence != enumeration at n={n}, t={t}"
            cases += 1
    for n in range(1, 9):
        for t in range(0, n + 1):
            want = Fraction(1)
            for i in range(t):
                want *= 1 - Fraction(1, 2 ** (n - i))
            if rank_distribution(n, t).probs[t] != want:
                return False, f"full-rank probability wrong at n={n}, t={t}"
    return True, f"{cases} (n,t) pairs with nt <= {max_nt} exact; full-rank product formula exact"


def check_invertibility(max_dim: int = 3) -> tuple[bool, str]:
    keys = 0
    for m in range(1, max_dim + 1):
        for n in range(1, max_dim + 1):
            for a_int in range(1 << (m * n)):
                a = BitMatrix.from_int(a_int, m, n)
                owner = {}
                for s in range(1 << m):
                    for z in cipher_state(a, BitVector(m, s)).indices.tolist():
                        if owner.setdefault(z, s) != s:
                            return False, f"supports overlap for key {a_int} at m={m}, n={n}"
                keys += 1
    return True, f"{keys} keys, all message supports pairwise disjoint"


def check_zero_message(grid) -> tuple[bool, str]:
    pairs = sorted({(p.m, p.n) for p in grid})
    keys = 0
    for m, n in pairs:
        for a_int in range(1 << (m * n)):
            a = BitMatrix.from_int(a_int, m, n)
            if cipher_state(a, BitVector(m, 0)) != encryption_key_state(a):
                return False, f"rho_(A,0) != rho_A for key {a_int} at m={m}, n={n}"
            keys += 1
    rng = SplitMix64(2)
    states = 0
    for p in grid:
        for t1 in range(p.t + 1):
            s = [rng.getrandbits(p.m) for _ in range(t1)]
            if adversary_state(p, t1, s) != averaged_cipher(p, s + _zeros(p.t - t1)):
                return False, f"adversary state mismatch at ({p.m},{p.n},{p.t}), t1={t1}"
            states += 1
    return True, f"{keys} keys; {states} adversary states equal padded averaged ciphers"


def check_sandwich(grid) -> tuple[bool, str]:
    tight = 0.0
    for p in grid:
        rep = lemma1_crosscheck(p)
        if not rep.holds:
            return False, f"sandwich fails at ({p.m},{p.n},{p.t}): eps_r={rep.eps_r}, eps_s={rep.eps_s}"
        if rep.eps_r:
            tight = max(tight, float(rep.eps_s / rep.eps_r))
    return True, f"{len(grid)} instances; max eps_s/eps_r = {tight:.4f}"


def toy_schemes() -> list[tuple[str, ClassicalScheme]]:
    """Hand-made invertible schemes with non-uniform (dyadic) key laws."""

    def xor_pad(m):
        return lambda key, s: DiagonalState(m, [key ^ s], [1], 0)

    def shift_pad(m):
        mask = (1 << m) - 1
        return lambda key, s: DiagonalState(m, [(s + key) & mask], [1], 0)

    def noisy_pad(key, s):
        # one message bit plus a noisy tag bit that does not reveal s
        b = str(s ^ key)
        return DiagonalState.from_weights({b + "0": Fraction(3, 4), b + "1": Fraction(1, 4)})

    return [
        ("skewed xor m=2", ClassicalScheme({0: Fraction(1, 2), 1: Fraction(1, 4), 2: Fraction(1, 8), 3: Fraction(1, 8)}, xor_pad(2), 2)),
        ("two-key xor m=3", ClassicalScheme({0: Fraction(3, 4), 5: Fraction(1, 4)}, xor_pad(3), 3)),
        ("shift pad m=2", ClassicalScheme({0: Fraction(1, 8), 1: Fraction(1, 8), 3: Fraction(3, 4)}, shift_pad(2), 2)),
        ("noisy tag m=1", ClassicalScheme({0: Fraction(7, 8), 1: Fraction(1, 8)}, noisy_pad, 1)),
    ]


def check_entropy_bound(grid) -> tuple[bool, str]:
    p = SchemeParams(4, 1, 3)
    rep = theorem1_check(MatrixScheme(p), uniform_distribution(3, 4), 3)
    if rep.rhs != 0.125 or rep.lhs < 0.125 - 1e-10 or not rep.satisfied:
        return False, f"m=4,n=1,t=3: lhs {rep.lhs:.17g}, rhs {rep.rhs:.17g}"
    checks = 1
    for q in grid:
        if q.t < 1:
            continue
        scheme = MatrixScheme(q)
        for dist in battery_distributions(q):
            if not theorem1_check(scheme, dist, q.t).satisfied:
                return False, f"entropy bound fails at ({q.m},{q.n},{q.t})"
            checks += 1
    for name, scheme in toy_schemes():
        m = scheme.message_bits
        for t in (1, 2, 3):
            uni = uniform_distribution(t, m)
            skew = {k: Fraction(1, 2 * len(uni)) for k in uni}
            first = next(iter(uni))
            skew[first] += Fraction(1, 2)
            for dist in (uni, skew):
                if not theorem1_check(scheme, dist, t).satisfied:
                    return False, f"entropy bound fails on toy scheme {name}, t={t}"
                checks += 1
    return True, f"m=4,n=1,t=3 lhs {rep.lhs:.6f} >= 1/8; {checks} (scheme, distribution) cases hold"


def check_pauli(samples: int = 100, seed: int = 8) -> tuple[bool, str]:
    g = SplitMix64(seed).numpy()
    worst = 0.0
    for q in (1, 2):
        mixed = np.eye(1 << q) / (1 << q)
        for _ in range(samples):
            rho = random_density(1 << q, g)
            worst = max(worst, trace_distance(randomize_full(rho, q), mixed))
    if worst > 1e-11:
        return False, f"max distance {worst:.3g} > 1e-11"
    return True, f"{2 * samples} states, max distance {worst:.3g}"


def _hybrid_cases(max_n=4, max_t=3):
    for n in range(1, max_n + 1):
        for t in range(1, max_t + 1):
            for t1 in range(0, t + 1):
                yield SchemeParams(2, n, t), t1


def check_hybrid_perfect(seed: int = 9) -> tuple[bool, str]:
    g = SplitMix64(seed).numpy()
    cases = 0
    for p, t1 in _hybrid_cases():
        sigmas = [random_density(2, g) for _ in range(t1)]
        rep = hybrid_randomization_distance(p, sigmas, t1, eps2=0.0)
        if not rep.holds:
            return False, f"n={p.n}, t={p.t}, t1={t1}: {rep.distance:.17g} > {rep.bound:.17g}"
        cases += 1
    return True, f"{cases} (n,t,t1) cases within eps1 + t1*0"


def check_hybrid_equality(seed: int = 9) -> tuple[bool, str]:
    g = SplitMix64(seed).numpy()
    bad = []
    cases = 0
    for p, t1 in _hybrid_cases():
        sigmas = [random_density(2, g) for _ in range(t1)]
        rep = hybrid_randomization_distance(p, sigmas, t1, eps2=0.0)
        cases += 1
        if abs(rep.distance - rep.eps1) > 1e-11:
            bad.append((p.n, p.t, t1, rep.distance, rep.eps1))
    if bad:
        n, t, t1, d, e = bad[0]
        return False, (f"{len(bad)}/{cases} cases differ from the classical-only distance; "
                       f"first n={n}, t={t}, t1={t1}: hybrid {d:.6f} vs classical {e:.6f}")
    return True, f"{cases} cases equal to within 1e-11"


def check_hybrid_subsampled(seed: int = 10) -> tuple[bool, str]:
    g = SplitMix64(seed).numpy()
    inner = SubsampledScheme(1, (PauliKey(1, 0, 0), PauliKey(1, 1, 0)))
    cases = 0
    worst_slack = math.inf
    for p, t1 in _hybrid_cases():
        sigmas = [random_density(2, g) for _ in range(t1)]
        rep = hybrid_randomization_distance(p, sigmas, t1, inner=inner)
        if not rep.holds:
            return False, f"n={p.n}, t={p.t}, t1={t1}: {rep.distance:.17g} > {rep.bound:.17g}"
        worst_slack = min(worst_slack, rep.bound - rep.distance)
        cases += 1
    return True, f"K=2 pad, {cases} cases hold, min slack {worst_slack:.3g}"


def check_keysize_exact() -> tuple[bool, str]:
    b = keysize_accounting(2, 4, 2.0 ** -3, 2.0 ** -4)
    if b.entropy_bits != 60:
        return False, f"entropy_bits = {b.entropy_bits!r}, expected 60"
    return True, "keysize_accounting(2, 4, 2^-3, 2^-4) = 60 bits"


RATIO_DELTAS = ((0.1, 0.1), (0.25, 0.25), (0.5, 0.5))


def check_ratio_t16(tol: float = 0.05) -> tuple[bool, str]:
    parts = []
    ok = True
    for d1, d2 in RATIO_DELTAS:
        ratio, limit = asymptotic_ratio(16, 10, d1, d2)
        rel = abs(ratio - limit) / limit
        ok &= rel <= tol
        parts.append(f"d=({d1},{d2}) {ratio:.4f} vs {limit:.4f} ({100 * rel:.1f}%)")
    return ok, "t=16, log d=10: " + "; ".join(parts)


def check_ratio_limit(tol: float = 0.05) -> tuple[bool, str]:
    t = log_d = 1 << 12
    worst = 0.0
    for d1, d2 in RATIO_DELTAS:
        ratio, limit = asymptotic_ratio(t, log_d, d1, d2)
        worst = max(worst, abs(ratio - limit) / limit)
    return worst <= tol, f"t = log d = {t}: max relative gap {100 * worst:.3f}%"


CHECKS: list[tuple[str, str, Callable]] = [
    ("1", "spectrum law", lambda g: check_spectrum(g)),
    ("2", "randomization value and bound", lambda g: check_randomization_bound(g)),
    ("3", "rank-distribution oracle", lambda g: check_rank_law()),
    ("4", "invertibility", lambda g: check_invertibility()),
    ("5", "zero-message identity", lambda g: check_zero_message(g)),
    ("6", "factor-two sandwich", lambda g: check_sandwich(g)),
    ("7", "entropy bound", lambda g: check_entropy_bound(g)),
    ("8", "Pauli pad perfection", lambda g: check_pauli()),
    ("9a", "hybrid bound, perfect pad", lambda g: check_hybrid_perfect()),
    ("9b", "hybrid equals classical-only distance", lambda g: check_hybrid_equality()),
    ("9c", "hybrid bound, K=2 pad", lambda g: check_hybrid_subsampled()),
    ("10a", "key size 60 bits", lambda g: check_keysize_exact()),
    ("10b", "ratio within 5% at t=16, d=2^10", lambda g: check_ratio_t16()),
    ("10c", "ratio converges at large t, log d", lambda g: check_ratio_limit()),
]


def run_checks(grid, keys=None) -> list[CheckResult]:
    out = []
    for key, name, fn in CHECKS:
        if keys is not None and key not in keys:
            continue
        start = time.perf_counter()
        try:
            ok, detail = fn(grid)
        except Exception as exc:  # a crash is a failed certificate, not a crashed run
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(key, name, bool(ok), detail, time.perf_counter() - start))
    return out
