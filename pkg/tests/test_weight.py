import numpy as np
import pytest
from hypothesis import given, strategies as st

from fockflow import models
from fockflow.errors import HypothesisViolation, InputError
from fockflow.numkit import INF
from fockflow.reduction import direct_normal_form
from fockflow.weight import (Weight, decompose, delta_ceiling, escape_coefficient, escape_factor,
                             global_index, hermitian_matrix, index_I, k1_coefficient,
                             rotated_oscillator_weight, shifted_weight, takagi_normal_form,
                             theta_form)
from fockflow import numkit

from conftest import crandn

seeds = st.integers(0, 2**32 - 1)


def test_standard_weight():
    w = Weight.standard(2)
    z = np.array([1 + 1j, 2.0])
    assert np.isclose(w(z), 0.5 * np.vdot(z, z).real)
    dec = decompose(w)
    assert np.allclose(dec.g, np.eye(2))
    assert np.allclose(dec.hpp, 0)
    assert delta_ceiling(w) is INF


def test_rotated_oscillator_weight_parts():
    th = 5 * np.pi / 12
    w = rotated_oscillator_weight(th)
    z = np.array([0.3 - 0.8j])
    assert np.isclose(w(z), 0.5 * (abs(z[0]) ** 2 - np.sin(th) * (z[0] ** 2).real))
    dec = decompose(w)
    assert np.allclose(dec.big_h, [[np.sin(th)]])
    assert np.isclose(delta_ceiling(w), -0.5 * np.log(np.sin(th)))


def test_non_convex_weight_rejected():
    with pytest.raises(HypothesisViolation):
        Weight(np.diag([1.0, -1.0]))
    with pytest.raises(InputError):
        Weight(np.eye(3))


@given(seeds, st.integers(1, 3))
def test_decomposition_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    w = models.random_weight(rng, n)
    dec = decompose(w)
    rebuilt = Weight.from_parts(dec.g, dec.hpp)
    assert np.allclose(rebuilt.hess, w.hess, atol=1e-10)
    assert np.allclose(dec.g.conj().T @ dec.g, hermitian_matrix(w))
    assert np.linalg.norm(dec.big_h, 2) < 1


@given(seeds, st.integers(1, 3))
def test_takagi_normal_form(seed, n):
    rng = np.random.default_rng(seed)
    w = models.random_weight(rng, n)
    s, sigma = takagi_normal_form(w)
    assert np.all((sigma >= 0) & (sigma < 1))
    y = crandn(rng, n)
    expected = 0.5 * (np.vdot(y, y).real - (y @ np.diag(sigma) @ y).real)
    assert np.isclose(w(s @ y), expected)


def test_shifted_weight_convexity_threshold():
    w = rotated_oscillator_weight(np.pi / 3)
    ceiling = delta_ceiling(w)
    assert shifted_weight(w, ceiling - 1e-3).convex
    assert not shifted_weight(w, ceiling + 1e-3).convex
    assert np.allclose(shifted_weight(w, 0.0).form.hess, w.hess)


@given(seeds)
def test_theta_is_time_derivative(seed):
    rng = np.random.default_rng(seed)
    nf = models.random_normal_form(rng, 2)
    z = crandn(rng, 2)
    h = 1e-6
    fd = (nf.weight(numkit.expm(nf.m, h) @ z) - nf.weight(numkit.expm(nf.m, -h) @ z)) / (2 * h)
    assert np.isclose(theta_form(nf)(z), fd, rtol=1e-5, atol=1e-8)


def test_escape_factor_values():
    assert escape_factor(0) == 1.0
    assert np.isclose(escape_factor(1), 1 / 3)
    assert np.isclose(escape_factor(2), 1 / 20)


def test_fokker_planck_indices(fp0):
    i0, dims = global_index(fp0)
    assert i0 == 1
    assert dims == [2, 0]
    assert np.isclose(k1_coefficient(fp0), 0.25 / 3)


def test_chain_indices(chain):
    i0, dims = global_index(chain)
    assert (i0, dims) == (2, [4, 2, 0])
    assert np.isclose(k1_coefficient(chain), 1.0 * 0.25 / 20)
    assert index_I(chain, np.array([1.0, 0.0, 0.0])) == 2
    assert index_I(chain, np.array([0.0, 1.0, 0.0])) == 1
    assert index_I(chain, np.array([0.0, 0.0, 1.0])) == 0


def test_escape_coefficient_matches_small_time_expansion(chain):
    z = np.array([1.0, 0.0, 0.0])
    c = escape_coefficient(chain, z)
    t = 1e-2
    # Phi(e^{-tM} z) decreases: Phi(z) - Phi(e^{-tM} z) ~ c t^5
    diff = chain.weight(z) - chain.weight(numkit.expm(chain.m, -t) @ z)
    assert np.isclose(diff / t**5, c, rtol=1e-2)


def test_index_I_infinite_for_isometric_direction():
    nf = direct_normal_form(np.diag([1j, 1.0]), Weight.standard(2))
    assert index_I(nf, np.array([1.0, 0.0])) is INF
    assert global_index(nf)[0] is INF
    with pytest.raises(HypothesisViolation):
        k1_coefficient(nf)


def test_indefinite_theta_rejected():
    nf = direct_normal_form(np.diag([1.0, -1.0]), Weight.standard(2))
    with pytest.raises(HypothesisViolation):
        index_I(nf, np.array([1.0, 0.0]))
