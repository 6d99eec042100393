import numpy as np
import pytest
from hypothesis import given, strategies as st

from fockflow import numkit
from fockflow.errors import InputError, NumericalFailure
from fockflow.numkit import Definiteness

from conftest import crandn

seeds = st.integers(0, 2**32 - 1)


def test_expm_scalar_and_diagonal():
    assert np.allclose(numkit.expm([[2.0]], -0.5), [[np.exp(-1.0)]])
    d = numkit.expm(np.diag([1.0, 1j]), 2.0)
    assert np.allclose(d, np.diag([np.exp(2.0), np.exp(2j)]))


def test_expm_nilpotent_is_exact_polynomial():
    n = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)
    t = 3.0
    expected = np.eye(3) + t * n + 0.5 * t**2 * n @ n
    assert np.allclose(numkit.expm(n, t), expected, atol=1e-13)


def test_expm_batched_matches_loop():
    rng = np.random.default_rng(1)
    m = crandn(rng, 3, 3)
    taus = np.array([0.1, -0.4 + 0.2j, 1j])
    stack = numkit.expm(m, taus)
    assert stack.shape == (3, 3, 3)
    for k, t in enumerate(taus):
        assert np.allclose(stack[k], numkit.expm(m, t))


def test_expm_overflow_raises():
    with pytest.raises(NumericalFailure):
        numkit.expm([[1.0]], 1e4)


@given(seeds)
def test_expm_group_law(seed):
    rng = np.random.default_rng(seed)
    m = crandn(rng, 2, 2)
    s, t = rng.normal(size=2)
    lhs = numkit.expm(m, s) @ numkit.expm(m, t)
    assert np.allclose(lhs, numkit.expm(m, s + t), rtol=1e-10, atol=1e-10)


@given(seeds)
def test_real_rep_is_multiplicative(seed):
    rng = np.random.default_rng(seed)
    a, b = crandn(rng, 3, 3), crandn(rng, 3, 3)
    assert np.allclose(numkit.real_rep(a @ b), numkit.real_rep(a) @ numkit.real_rep(b))
    z = crandn(rng, 3)
    assert np.allclose(numkit.to_complex(numkit.real_rep(a) @ numkit.to_real(z)), a @ z)


def test_psd_classify_examples():
    assert numkit.psd_classify(np.eye(2)) is Definiteness.POSITIVE_DEFINITE
    assert numkit.psd_classify(np.diag([1.0, 0.0])) is Definiteness.POSITIVE_SEMIDEFINITE
    assert numkit.psd_classify(np.diag([1.0, 1e-12])) is Definiteness.POSITIVE_SEMIDEFINITE
    assert numkit.psd_classify(np.diag([1.0, -1e-3])) is Definiteness.INDEFINITE
    assert numkit.psd_classify(np.zeros((2, 2))) is Definiteness.POSITIVE_SEMIDEFINITE
    with pytest.raises(InputError):
        numkit.psd_classify(np.eye(2), rel_tol=0.0)


def test_psd_classify_is_scale_invariant():
    s = np.diag([3.0, -1e-6])
    for c in (1e-8, 1.0, 1e8):
        assert numkit.psd_classify(c * s) is Definiteness.INDEFINITE


def test_herm_sqrt():
    p = np.array([[2.0, 1j], [-1j, 2.0]])
    g = numkit.herm_sqrt(p)
    assert np.allclose(g @ g, p)
    assert np.allclose(g, g.conj().T)
    with pytest.raises(InputError):
        numkit.herm_sqrt(np.diag([1.0, -1.0]))


@given(seeds, st.integers(1, 4))
def test_takagi_reconstructs(seed, n):
    rng = np.random.default_rng(seed)
    s = crandn(rng, n, n)
    s = s + s.T
    u, sigma = numkit.takagi(s)
    assert np.allclose(u @ np.diag(sigma) @ u.T, s, atol=1e-10)
    assert np.allclose(u.conj().T @ u, np.eye(n), atol=1e-10)
    assert np.all(np.diff(sigma) <= 1e-12)
    assert np.allclose(sigma, np.linalg.svd(s, compute_uv=False))


def test_takagi_rank_deficient():
    v = np.array([1.0, 1j, 0.0]) / np.sqrt(2)
    s = 0.7 * np.outer(v, v)
    u, sigma = numkit.takagi(s)
    assert np.allclose(sigma, [0.7, 0.0, 0.0], atol=1e-13)
    assert np.allclose(u.conj().T @ u, np.eye(3), atol=1e-12)
    assert np.allclose(u @ np.diag(sigma) @ u.T, s, atol=1e-12)


def test_null_space_and_rank():
    a = np.array([[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])
    ns = numkit.null_space(a)
    assert ns.shape == (3, 2)
    assert np.allclose(a @ ns, 0)
    assert numkit.numerical_rank(a, 1e-10) == 1


def test_jordan_probe_defective_fokker_planck_matrix():
    probe = numkit.jordan_probe(np.array([[0.0, -0.5], [0.5, 1.0]]))
    assert len(probe.eigenvalues) == 1
    c = probe.eigenvalues[0]
    assert abs(c.value - 0.5) < 1e-7
    assert (c.multiplicity, c.max_block_size) == (2, 2)
    assert probe.repeated() == [(c.value, 1), (c.value, 0)]


def test_jordan_probe_rotated_block():
    rng = np.random.default_rng(4)
    j = np.diag([2.0, 2.0, 2.0]) + np.diag([1.0, 1.0], 1)
    q, _ = np.linalg.qr(crandn(rng, 3, 3))
    probe = numkit.jordan_probe(q @ j @ q.conj().T)
    assert [(c.multiplicity, c.block_sizes) for c in probe.eigenvalues] == [(3, (3,))]


def test_jordan_probe_semisimple():
    probe = numkit.jordan_probe(np.diag([1.0, 1.0, 2.0]))
    blocks = sorted((round(c.value.real, 8), c.block_sizes) for c in probe.eigenvalues)
    assert blocks == [(1.0, (1, 1)), (2.0, (1,))]
