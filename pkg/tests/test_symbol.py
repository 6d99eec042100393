import numpy as np
import pytest
from hypothesis import given, strategies as st

from fockflow import models
from fockflow.errors import HypothesisViolation, InputError
from fockflow.numkit import INF
from fockflow.symbol import (QuadraticSymbol, fokker_planck, fundamental_matrix,
                             harmonic_oscillator, index_J, poisson_bracket, poisson_bracket_at,
                             rotated_oscillator, spectrum_is_C_flag, symbol_from_fundamental,
                             symplectic, symplectic_matrix)

from conftest import crandn

seeds = st.integers(0, 2**32 - 1)


def random_symbol(rng, n):
    q = crandn(rng, 2 * n, 2 * n)
    return QuadraticSymbol.from_matrix(q + q.T)


def test_evaluation_matches_formula():
    q = fokker_planck(0.7, 0.2)
    x1, x2, xi1, xi2 = 0.3, -1.1, 0.4, 2.0
    expected = (0.1 * (x1**2 + xi1**2) + 0.5 * (x2**2 + xi2**2)
                + 1j * 0.7 * (x1 * xi2 - x2 * xi1))
    assert np.isclose(q(np.array([x1, x2, xi1, xi2])), expected)


def test_asymmetric_block_rejected():
    with pytest.raises(InputError, match="qxx"):
        QuadraticSymbol([[1.0, 2.0], [0.0, 1.0]], np.zeros((2, 2)), np.eye(2))


def test_symplectic_form():
    v = np.array([1.0, 2.0])
    w = np.array([3.0, 5.0])
    assert symplectic(v, w) == 2.0 * 3.0 - 5.0 * 1.0
    assert np.isclose(v @ symplectic_matrix(1) @ w, symplectic(v, w))


@given(seeds, st.integers(1, 3))
def test_fundamental_matrix_defines_the_symbol(seed, n):
    rng = np.random.default_rng(seed)
    q = random_symbol(rng, n)
    f = fundamental_matrix(q)
    v = rng.normal(size=2 * n)
    assert np.isclose(symplectic(v, f @ v), q(v))
    back = symbol_from_fundamental(f)
    assert np.allclose(back.matrix(), q.matrix())


@given(seeds, st.integers(1, 3))
def test_poisson_bracket_two_routes(seed, n):
    rng = np.random.default_rng(seed)
    q1, q2 = random_symbol(rng, n), random_symbol(rng, n)
    v = rng.normal(size=2 * n)
    assert np.isclose(poisson_bracket(q1, q2)(v), poisson_bracket_at(q1, q2, v))


def test_poisson_bracket_example():
    xi2 = QuadraticSymbol([[0.0]], [[0.0]], [[1.0]])
    x2 = QuadraticSymbol([[1.0]], [[0.0]], [[0.0]])
    br = poisson_bracket(xi2, x2)  # {xi^2, x^2} = 4 x xi
    assert np.allclose(br.matrix(), [[0, 2], [2, 0]])


def test_harmonic_oscillator_has_no_real_zero():
    flag = spectrum_is_C_flag(harmonic_oscillator(2), restarts=16)
    assert not flag.raised
    assert flag.q_value > 0.4


def test_spectrum_flag_finds_witness():
    rng = np.random.default_rng(5)
    v = np.array([1.0, 0.0, 0.0, 0.0])
    re = rng.normal(size=(4, 4))
    re = re + re.T
    im = rng.normal(size=(4, 4))
    im = im + im.T
    re -= (v @ re @ v) * np.eye(4)
    im -= (v @ im @ v) * np.eye(4)
    q = QuadraticSymbol.from_matrix(re + 1j * im)
    assert abs(poisson_bracket_at(q.imag_part(), q.real_part(), v)) > 1e-3
    flag = spectrum_is_C_flag(q, restarts=32, seed=1)
    assert flag.raised
    assert abs(q(flag.witness)) < 1e-8


def test_index_J_fokker_planck():
    q = fokker_planck(0.5, 0.0)
    assert index_J(q, np.array([0.0, 1.0, 0.0, 0.0])) == 0
    assert index_J(q, np.array([1.0, 0.0, 0.3, 0.0])) == 1
    assert index_J(harmonic_oscillator(1), np.array([1.0, 0.0])) == 0


def test_index_J_infinite_and_invalid():
    q = QuadraticSymbol(np.diag([1.0, 0.0]), np.zeros((2, 2)), np.diag([1.0, 0.0]))
    assert index_J(q, np.array([0.0, 1.0, 0.0, 0.0])) is INF
    bad = QuadraticSymbol([[1.0]], [[0.0]], [[-1.0]])
    with pytest.raises(HypothesisViolation):
        index_J(bad, np.array([1.0, 0.0]))


def test_rotated_oscillator_symbol():
    q = rotated_oscillator(np.pi / 3)
    assert np.isclose(q(np.array([1.0, 0.0])), 0.5 * np.exp(2j * np.pi / 3))
    assert np.isclose(q(np.array([0.0, 1.0])), 0.5)


def test_random_symbol_generator_is_in_scope():
    rng = np.random.default_rng(0)
    ss = models.random_supersymmetric(rng, 2)
    assert np.linalg.eigvalsh(ss.a_plus.imag).min() > 0
    assert np.linalg.eigvalsh(ss.a_minus.imag).max() < 0
