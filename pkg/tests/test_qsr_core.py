from collections import Counter
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from qsrlab.errors import GuardError
from qsrlab.gf2 import BitMatrix, BitVector, matvec_int
from qsrlab.qsr_core import (
    CipherInstance,
    KeyInstance,
    SchemeParams,
    adversary_state,
    averaged_cipher,
    cipher_state,
    decrypt,
    encrypt_instance,
    encryption_key_state,
    keygen,
    sample_averaged_cipher,
    sample_key_instance,
    y_mask,
)
from qsrlab.qstate import DiagonalState, entropy, l1_distance, tensor_diag, tensor_power
from qsrlab.rng import SplitMix64

small_keys = st.integers(1, 3).flatmap(
    lambda m: st.integers(1, 3).flatmap(
        lambda n: st.integers(0, (1 << (m * n)) - 1).map(lambda v: BitMatrix.from_int(v, m, n))
    )
)


def test_params_from_delta_and_guards():
    p = SchemeParams.from_delta(1, 4, "1/2")
    assert p.t == 2 and p.effective_delta == Fraction(1, 2)
    assert SchemeParams.from_delta(1, 5, 0.5).t == 2
    assert SchemeParams.from_delta(2, 10, 0.3).t == 7
    with pytest.raises(ValueError):
        SchemeParams.from_delta(1, 4, 1)
    with pytest.raises(ValueError):
        SchemeParams(0, 1, 1)
    with pytest.raises(GuardError, match=r"t\(m\+n\) <= 24"):
        SchemeParams(3, 8, 3).check_exact()
    with pytest.raises(GuardError, match="mn <= 24"):
        SchemeParams(8, 8, 0).check_keys()
    with pytest.raises(GuardError, match="n <= 8"):
        SchemeParams(1, 9, 1).check_keys()


def test_keygen_golden_fixture():
    assert keygen(2, 3, SplitMix64(5)).dumps() == "2 3\n011\n000\n"
    assert keygen(2, 3, SplitMix64(5)) == keygen(2, 3, SplitMix64(5))
    a = keygen(2, 3, SplitMix64(11))
    assert (a.nrows, a.ncols) == (2, 3)


def test_keygen_uniform_chi_square():
    rng = SplitMix64(2024)
    draws = 64000
    counts = Counter(keygen(2, 3, rng).to_int() for _ in range(draws))
    observed = [counts.get(v, 0) for v in range(64)]
    assert sum(observed) == draws
    assert chisquare(observed).pvalue > 0.001


def test_keygen_guard():
    with pytest.raises(GuardError):
        keygen(5, 5, SplitMix64(0))


def test_encryption_key_state_examples():
    assert encryption_key_state(BitMatrix.zeros(1, 1)).weights == {"00": Fraction(1, 2), "01": Fraction(1, 2)}
    want = {b: Fraction(1, 4) for b in ("0000", "0101", "1010", "1111")}
    assert encryption_key_state(BitMatrix.identity(2)).weights == want


@given(small_keys)
def test_encryption_key_state_entropy_and_zero_message(a):
    rho = encryption_key_state(a)
    assert entropy(rho).shannon_bits == pytest.approx(a.ncols)
    assert cipher_state(a, BitVector.zeros(a.nrows)) == rho


def test_encrypt_examples():
    k = KeyInstance(BitVector.parse("10"), BitVector.parse("1"))
    assert encrypt_instance(k, BitVector.parse("00")) == CipherInstance(k.a_x, k.x)
    c = encrypt_instance(k, BitVector.parse("11"))
    assert (str(c.y), str(c.x)) == ("01", "1")
    with pytest.raises(ValueError):
        encrypt_instance(k, BitVector.parse("1"))


def test_cipher_state_zero_key():
    st_ = cipher_state(BitMatrix.zeros(2, 2), BitVector.parse("10"))
    assert st_.weights == {"1000": Fraction(1, 4), "1001": Fraction(1, 4), "1010": Fraction(1, 4), "1011": Fraction(1, 4)}


@given(small_keys, st.data())
def test_distinct_messages_orthogonal(a, data):
    s1 = data.draw(st.integers(0, (1 << a.nrows) - 1))
    s2 = data.draw(st.integers(0, (1 << a.nrows) - 1))
    d = l1_distance(cipher_state(a, BitVector(a.nrows, s1)), cipher_state(a, BitVector(a.nrows, s2)))
    assert d == (0 if s1 == s2 else 2)


def test_monte_carlo_cipher_matches_exact():
    a = BitMatrix.from_bits([[1, 0, 1], [0, 1, 1]])
    s = BitVector.parse("10")
    rng = SplitMix64(77)
    draws = 100_000
    counts = Counter()
    for _ in range(draws):
        c = encrypt_instance(sample_key_instance(a, rng), s)
        counts[(c.y.value << 3) | c.x.value] += 1
    exact = cipher_state(a, s)
    emp = {z: c / draws for z, c in counts.items()}
    l1 = sum(abs(emp.get(z, 0.0) - float(exact.weight(z))) for z in set(emp) | set(exact.indices.tolist()))
    assert l1 < 0.02


def test_decrypt_round_trip_exhaustive_m2_n2():
    for a_int, x, s in product(range(16), range(4), range(4)):
        a = BitMatrix.from_int(a_int, 2, 2)
        k = KeyInstance(BitVector(2, matvec_int(a, x)), BitVector(2, x))
        assert decrypt(a, encrypt_instance(k, BitVector(2, s))).value == s


def test_decrypt_zero_key_and_wrong_key():
    c = CipherInstance(BitVector.parse("101"), BitVector.parse("11"))
    assert decrypt(BitMatrix.zeros(3, 2), c) == BitVector.parse("101")
    a = BitMatrix.from_bits([[1, 0], [0, 1]])
    wrong = BitMatrix.from_bits([[1, 1], [0, 1]])
    k = KeyInstance(BitVector.parse("01"), BitVector.parse("01"))  # A x for x = 01
    s = BitVector.parse("00")
    c = encrypt_instance(k, s)
    assert decrypt(a, c) == s
    # s xor (A xor A') x = 00 xor 10
    assert decrypt(wrong, c) == BitVector.parse("10")
    assert decrypt(wrong, c) != s
    with pytest.raises(ValueError):
        decrypt(BitMatrix.zeros(2, 3), c)


def test_cipher_wire_format():
    c = CipherInstance(BitVector.parse("1010"), BitVector.parse("011"))
    assert c.dumps() == "a 3 4 3\n"
    assert CipherInstance.loads(c.dumps()) == c
    with pytest.raises(ValueError):
        CipherInstance.loads("a 3 4")


def test_averaged_cipher_smallest_case():
    g = averaged_cipher(SchemeParams(1, 1, 1), [0])
    assert g.weights == {"00": Fraction(1, 2), "01": Fraction(1, 4), "11": Fraction(1, 4)}


def test_averaged_cipher_spectrum_m1_n2_t2():
    g = averaged_cipher(SchemeParams(1, 2, 2), [0, 0])
    assert g.support_size == 43
    assert g.spectrum() == {Fraction(1, 64): 24, Fraction(1, 32): 18, Fraction(1, 16): 1}


@pytest.mark.parametrize("m,n,t", [(1, 1, 2), (1, 2, 2), (2, 2, 2), (2, 1, 3)])
def test_averaged_cipher_matches_key_by_key_sum(m, n, t):
    p = SchemeParams(m, n, t)
    s = [(3 * i + 1) % (1 << m) for i in range(t)]
    acc = {}
    for a_int in range(1 << (m * n)):
        a = BitMatrix.from_int(a_int, m, n)
        st_ = DiagonalState(0, [0], [1], 0)
        for v in s:
            st_ = tensor_diag(st_, cipher_state(a, BitVector(m, v)))
        for z, w in st_.weights.items():
            acc[z] = acc.get(z, 0) + w / (1 << (m * n))
    assert averaged_cipher(p, s).weights == acc


@given(st.integers(1, 2), st.integers(1, 3), st.integers(1, 2), st.data())
@settings(max_examples=25)
def test_bit_flip_covariance(m, n, t, data):
    p = SchemeParams(m, n, t)
    s = data.draw(st.lists(st.integers(0, (1 << m) - 1), min_size=t, max_size=t))
    g0 = averaged_cipher(p, [0] * t)
    assert averaged_cipher(p, s) == g0.flip(y_mask(p, s))


def test_adversary_state_special_cases():
    p = SchemeParams(2, 2, 2)
    for s in product(range(4), repeat=2):
        assert adversary_state(p, 2, s) == averaged_cipher(p, s)
    mix = {}
    for a_int in range(16):
        rho = tensor_power(encryption_key_state(BitMatrix.from_int(a_int, 2, 2)), 2)
        for z, w in rho.weights.items():
            mix[z] = mix.get(z, 0) + w / 16
    assert adversary_state(p, 0, []).weights == mix
    for t1 in range(3):
        for s in product(range(4), repeat=t1):
            assert adversary_state(p, t1, list(s)) == averaged_cipher(p, list(s) + [0] * (2 - t1))
    with pytest.raises(ValueError):
        adversary_state(p, 3, [0, 0, 0])


def test_message_validation():
    p = SchemeParams(2, 2, 1)
    with pytest.raises(ValueError):
        averaged_cipher(p, [4])
    with pytest.raises(ValueError):
        averaged_cipher(p, [0, 0])
    with pytest.raises(ValueError):
        averaged_cipher(p, [BitVector.parse("1")])
    assert averaged_cipher(p, [BitVector.parse("11")]) == averaged_cipher(p, [3])


def test_monte_carlo_averaged_cipher_close_to_exact():
    p = SchemeParams(1, 2, 2)
    draws = 100_000
    counts = sample_averaged_cipher(p, [1, 0], draws, SplitMix64(3))
    exact = averaged_cipher(p, [1, 0])
    zs = set(counts) | set(exact.indices.tolist())
    l1 = sum(abs(counts.get(z, 0) / draws - float(exact.weight(z))) for z in zs)
    assert l1 < 0.02
