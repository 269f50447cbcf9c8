import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qsrlab.errors import GuardError
from qsrlab.qstate import (
    DensityOperator,
    DiagonalState,
    binary_entropy,
    entropy,
    fully_mixed,
    fully_mixed_operator,
    l1_distance,
    pure_state,
    random_density,
    random_pure_state,
    tensor_diag,
    tensor_power,
    trace_distance,
    trace_norm,
)


@st.composite
def diag_states(draw, max_bits=4, max_k=6):
    bits = draw(st.integers(0, max_bits))
    k = draw(st.integers(0, max_k))
    size = 1 << bits
    # random composition of 2^k into `size` parts
    cuts = sorted(draw(st.lists(st.integers(0, 1 << k), min_size=size - 1, max_size=size - 1)))
    parts = np.diff([0] + cuts + [1 << k])
    return DiagonalState(bits, np.arange(size), parts, k)


def dense_l1(a: DiagonalState, b: DiagonalState) -> float:
    """Oracle: eigenvalues of the dense difference."""
    diff = a.to_operator().matrix - b.to_operator().matrix
    return float(np.abs(np.linalg.eigvalsh(diff)).sum())


def test_tensor_examples():
    p0, p1 = DiagonalState.point("0"), DiagonalState.point("1")
    assert tensor_diag(p0, p1) == DiagonalState.point("01")
    assert tensor_diag(fully_mixed(1), fully_mixed(1)) == fully_mixed(2)
    a = DiagonalState.from_weights({"0": Fraction(3, 4), "1": Fraction(1, 4)})
    got = tensor_diag(a, fully_mixed(1))
    assert got.weights == {"00": Fraction(3, 8), "01": Fraction(3, 8), "10": Fraction(1, 8), "11": Fraction(1, 8)}


@given(diag_states(max_bits=3), diag_states(max_bits=3))
def test_tensor_matches_kronecker(a, b):
    want = np.kron(a.to_operator().matrix, b.to_operator().matrix)
    assert np.allclose(tensor_diag(a, b).to_operator().matrix, want, atol=1e-15)


def test_tensor_power():
    a = DiagonalState.from_weights({"0": Fraction(1, 2), "1": Fraction(1, 2)})
    assert tensor_power(a, 3) == fully_mixed(3)
    assert tensor_power(a, 0) == DiagonalState(0, [0], [1], 0)


def test_l1_examples():
    a = fully_mixed(2)
    assert l1_distance(a, a) == 0
    assert l1_distance(DiagonalState.point("0"), DiagonalState.point("1")) == 2
    b = DiagonalState.from_weights({"00": Fraction(1, 2), "11": Fraction(1, 2)})
    assert l1_distance(a, b) == 1
    assert dense_l1(a, b) == pytest.approx(1, abs=1e-12)


@given(diag_states(), diag_states())
def test_l1_is_a_metric_matching_dense_oracle(a, b):
    if a.num_bits != b.num_bits:
        with pytest.raises(ValueError):
            l1_distance(a, b)
        return
    d = l1_distance(a, b)
    assert 0 <= d <= 2
    assert d == l1_distance(b, a)
    assert float(d) == pytest.approx(dense_l1(a, b), abs=1e-12)


def test_diagonal_state_validation():
    with pytest.raises(ValueError):
        DiagonalState(1, [0, 1], [1, 1], 2)  # sums to 1/2
    with pytest.raises(ValueError):
        DiagonalState(1, [0, 2], [1, 1], 1)
    with pytest.raises(ValueError):
        DiagonalState(1, [0, 0], [1, 1], 1)
    with pytest.raises(ValueError):
        DiagonalState.from_weights({"0": Fraction(1, 3), "1": Fraction(2, 3)})


def test_diagonal_state_canonical_equality():
    a = DiagonalState(1, [0, 1], [2, 2], 2)
    b = DiagonalState(1, [1, 0], [1, 1], 1)
    assert a == b
    assert a.log2_denom == 1
    assert a.weight("1") == Fraction(1, 2) and a.weight(3 & 1) == Fraction(1, 2)
    assert DiagonalState.point("10").weight("01") == 0


@given(diag_states())
def test_diagonal_serialization_round_trip(a):
    assert DiagonalState.loads(a.dumps()) == a


def test_diagonal_dumps_format():
    a = DiagonalState.from_weights({"01": Fraction(1, 4), "10": Fraction(3, 4)})
    assert a.dumps() == "01 1/2^2\n10 3/2^2\n"


@given(diag_states(), st.integers(0, 15))
def test_flip_preserves_spectrum_and_is_involution(a, mask):
    mask &= (1 << a.num_bits) - 1
    assert a.flip(mask).spectrum() == a.spectrum()
    assert a.flip(mask).flip(mask) == a


def test_spectrum_and_dense():
    a = DiagonalState.from_weights({"00": Fraction(1, 2), "01": Fraction(1, 4), "11": Fraction(1, 4)})
    assert a.spectrum() == {Fraction(1, 2): 1, Fraction(1, 4): 2}
    assert a.dense().tolist() == [2, 1, 0, 1]
    assert a.dense(3).tolist() == [4, 2, 0, 2]
    with pytest.raises(ValueError):
        a.dense(1)


def test_to_operator_guard():
    with pytest.raises(GuardError):
        fully_mixed(13).to_operator()


def test_fully_mixed_examples():
    assert fully_mixed(1).weights == {"0": Fraction(1, 2), "1": Fraction(1, 2)}
    assert fully_mixed(3).spectrum() == {Fraction(1, 8): 8}
    assert np.allclose(fully_mixed_operator(2).matrix, np.eye(2) / 2)


def test_trace_distance_examples():
    z0, z1 = pure_state([1, 0]), pure_state([0, 1])
    assert trace_distance(z0, z0) == pytest.approx(0, abs=1e-12)
    assert trace_distance(z0, z1) == pytest.approx(2, abs=1e-10)
    assert trace_distance(z0, fully_mixed_operator(2)) == pytest.approx(1, abs=1e-10)
    with pytest.raises(ValueError):
        trace_distance(z0, fully_mixed_operator(4))


@pytest.mark.parametrize("dim", [2, 3, 4, 8, 16, 32, 64])
def test_trace_norm_matches_numpy(dim):
    g = np.random.default_rng(dim)
    a, b = random_density(dim, g), random_density(dim, g)
    want = np.abs(np.linalg.eigvalsh(a.matrix - b.matrix)).sum()
    assert trace_distance(a, b) == pytest.approx(want, abs=1e-10)


@given(st.integers(0, 2**32))
def test_trace_distance_bounds(seed):
    g = np.random.default_rng(seed)
    a, b = random_density(4, g), random_pure_state(4, g)
    d = trace_distance(a, b)
    assert 0 <= d <= 2 + 1e-12
    assert d == pytest.approx(trace_distance(b, a), abs=1e-12)


def test_random_states_are_valid():
    g = np.random.default_rng(1)
    for dim in (2, 4, 8):
        for rho in (random_density(dim, g), random_pure_state(dim, g), random_density(dim, g, rank=1)):
            DensityOperator(rho.matrix)  # validates
    assert np.trace(random_pure_state(4, g).matrix @ random_pure_state(4, g).matrix).real <= 1 + 1e-12


def test_density_validation():
    with pytest.raises(ValueError, match="Hermitian"):
        DensityOperator([[0.5, 1], [0, 0.5]])
    with pytest.raises(ValueError, match="trace"):
        DensityOperator(np.eye(2))
    with pytest.raises(ValueError, match="negative"):
        DensityOperator([[1.5, 0], [0, -0.5]])
    with pytest.raises(ValueError):
        DensityOperator(np.ones(3) / 3)


def test_density_serialization(tmp_path):
    rho = random_density(4, np.random.default_rng(3))
    back = DensityOperator.loads(rho.dumps())
    assert np.array_equal(back.matrix, rho.matrix)
    path = tmp_path / "rho.txt"
    rho.save(path)
    assert np.array_equal(DensityOperator.load(path).matrix, rho.matrix)
    assert rho.dumps().splitlines()[0] == "4"
    with pytest.raises(ValueError):
        DensityOperator.loads("2\n1 0\n0 0\n")


def test_entropy_examples():
    assert entropy(fully_mixed(6)).shannon_bits == pytest.approx(6)
    assert entropy(pure_state([1, 1j])).shannon_bits == pytest.approx(0, abs=1e-9)
    h = 2 - 0.75 * math.log2(3)
    assert entropy([0.75, 0.25]).shannon_bits == pytest.approx(h, abs=1e-12)
    assert binary_entropy(0.25) == pytest.approx(h, abs=1e-12)
    assert h == pytest.approx(0.811278, abs=1e-6)
    assert entropy({"a": 0.5, "b": 0.5}).shannon_bits == pytest.approx(1)
    assert binary_entropy(0) == binary_entropy(1) == 0
    with pytest.raises(TypeError):
        entropy(3.0)


@given(diag_states())
def test_entropy_routes_agree(a):
    direct = -sum(float(w) * math.log2(float(w)) for w in a.weights.values())
    assert entropy(a).shannon_bits == pytest.approx(direct, abs=1e-10)
    if a.num_bits <= 3:
        assert entropy(a.to_operator()).shannon_bits == pytest.approx(direct, abs=1e-8)
    assert 0 <= entropy(a).shannon_bits <= a.num_bits + 1e-12
