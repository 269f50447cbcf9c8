"""Backend parity: the compiled kernels and the numpy fallback must agree exactly."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsrlab import _fallback, kernels
from qsrlab.gf2 import BitVector, rank, rank_distribution_bruteforce

BACKENDS = kernels.available_backends()
IDS = [mod.BACKEND for mod in BACKENDS]


def test_backend_names():
    assert kernels.BACKEND in ("cython", "python")
    assert IDS[-1] == "python"


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
@given(st.integers(1, 10).flatmap(lambda n: st.tuples(st.just(n), st.lists(st.integers(0, (1 << n) - 1), max_size=8))))
def test_rank_packed_matches_gf2(mod, case):
    n, vecs = case
    assert mod.rank_packed(vecs, n) == rank([BitVector(n, v) for v in vecs])


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
@pytest.mark.parametrize("n,t", [(1, 1), (2, 2), (3, 2), (2, 3), (4, 3), (1, 5), (5, 1)])
def test_rank_counts_match_enumeration(mod, n, t):
    counts = mod.rank_counts(n, t)
    law = rank_distribution_bruteforce(n, t)
    assert int(np.sum(counts)) == 1 << (n * t)
    assert [c for c in np.asarray(counts).tolist()] == [int(p * (1 << (n * t))) for p in law.probs]


def naive_gamma(m, n, t, s):
    counts = np.zeros(1 << (t * (m + n)), dtype=np.int64)
    for a in range(1 << (m * n)):
        rows = [(a >> ((m - 1 - i) * n)) & ((1 << n) - 1) for i in range(m)]
        for tup in range(1 << (t * n)):
            z = 0
            for i in range(t):
                x = (tup >> ((t - 1 - i) * n)) & ((1 << n) - 1)
                y = 0
                for r in rows:
                    y = (y << 1) | (bin(r & x).count("1") & 1)
                z = (z << (m + n)) | ((y ^ s[i]) << n) | x
            counts[z] += 1
    return counts


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
@pytest.mark.parametrize("m,n,t,s", [(1, 1, 1, [0]), (1, 2, 2, [1, 0]), (2, 2, 2, [3, 1]), (2, 1, 3, [1, 2, 3]), (1, 1, 0, [])])
def test_gamma_counts_match_naive(mod, m, n, t, s):
    assert np.array_equal(mod.gamma_counts(m, n, t, s), naive_gamma(m, n, t, s))


def test_gamma_counts_backends_agree_larger():
    got = [mod.gamma_counts(3, 3, 2, [5, 2]) for mod in BACKENDS]
    assert all(np.array_equal(got[0], g) for g in got[1:])


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
def test_gamma_counts_rejects_bad_tuple(mod):
    with pytest.raises(ValueError):
        mod.gamma_counts(1, 1, 2, [0])


def random_hermitian(dim, g):
    a = g.normal(size=(dim, dim)) + 1j * g.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
@pytest.mark.parametrize("dim", [1, 2, 3, 5, 8, 16, 33, 64])
def test_jacobi_matches_numpy(mod, dim):
    g = np.random.default_rng(dim)
    h = random_hermitian(dim, g)
    assert np.allclose(mod.jacobi_eigvalsh(h), np.linalg.eigvalsh(h), atol=1e-10)


@pytest.mark.parametrize("mod", BACKENDS, ids=IDS)
def test_jacobi_special_matrices(mod):
    assert np.allclose(mod.jacobi_eigvalsh(np.diag([3.0, -1.0, 2.0])), [-1, 2, 3])
    assert np.allclose(mod.jacobi_eigvalsh(np.zeros((4, 4))), 0)
    big = 1e6 * random_hermitian(6, np.random.default_rng(0))
    assert np.allclose(mod.jacobi_eigvalsh(big), np.linalg.eigvalsh(big), rtol=0, atol=1e-6)
    degenerate = np.kron(np.eye(2), [[0, 1], [1, 0]]).astype(complex)
    assert np.allclose(mod.jacobi_eigvalsh(degenerate), [-1, -1, 1, 1])
    with pytest.raises(ValueError):
        mod.jacobi_eigvalsh(np.zeros((2, 3)))


@settings(max_examples=30)
@given(st.integers(0, 2**32 - 1), st.integers(1, 12))
def test_jacobi_backends_agree(seed, dim):
    h = random_hermitian(dim, np.random.default_rng(seed))
    ref = _fallback.jacobi_eigvalsh(h)
    for mod in BACKENDS:
        assert np.allclose(mod.jacobi_eigvalsh(h), ref, atol=1e-12)
        assert mod.jacobi_eigvalsh(h).sum() == pytest.approx(np.trace(h).real, abs=1e-10)
