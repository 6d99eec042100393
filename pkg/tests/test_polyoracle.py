from math import factorial

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fockflow import models, numkit, polyoracle as po
from fockflow.errors import InputError
from fockflow.reduction import direct_normal_form
from fockflow.semigroup import classify
from fockflow.weight import Weight

seeds = st.integers(0, 2**32 - 1)


def test_multi_indices_graded():
    idx = po.multi_indices(2, 2)
    assert idx == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(po.multi_indices(3, 4)) == 35


def test_gram_standard_weight_is_diagonal():
    g = po.gram(Weight.standard(1), 5)
    expected = np.diag([np.pi * factorial(k) for k in range(6)])
    assert np.allclose(g.entries, expected)
    assert np.isclose(g.entries[0, 0], np.pi)
    g2 = po.gram(Weight.standard(2), 3)
    diag = [np.pi**2 * factorial(a) * factorial(b) for a, b in g2.indices]
    assert np.allclose(g2.entries, np.diag(diag))


def test_gram_rotated_weight_couples_degree_two(rho):
    g = po.gram(rho.weight, 4)
    assert abs(g.entries[0, 2]) > 1.0
    assert abs(g.entries[0, 1]) == 0.0
    assert np.allclose(g.entries, g.entries.conj().T)
    assert np.linalg.eigvalsh(g.entries).min() > 0


def test_gram_against_monte_carlo(rho):
    g = po.gram(rho.weight, 4)
    est, err = po.gram_monte_carlo(rho.weight, 4, samples=1_000_000, seed=0)
    assert np.all(np.abs(est - g.entries) <= 3 * err)


def test_degree_guard():
    with pytest.raises(InputError):
        po.gram(Weight.standard(1), 13)
    nf = direct_normal_form([[1.0]], Weight.standard(1))
    with pytest.raises(InputError):
        po.truncated_tail_norm(nf, -1.0, 3, 3)


def test_substitution_is_degree_preserving():
    rng = np.random.default_rng(2)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    idx = po.multi_indices(2, 4)
    t = po.substitution_matrix(a, idx)
    deg = np.array([sum(x) for x in idx])
    assert np.all(t[deg[:, None] != deg[None, :]] == 0)
    assert t[0, 0] == 1
    # (a z)_1 = a00 z1 + a01 z2
    assert np.allclose(t[1:3, 1], [a[0, 0], a[0, 1]])


def test_truncated_norm_orthogonal_examples():
    nf = direct_normal_form([[1.0]], Weight.standard(1))
    for degree in (0, 3, 7):
        assert np.isclose(po.truncated_norm(nf, -1.0, degree), 1.0)
    for n_trunc in (0, 2, 4):
        assert np.isclose(po.truncated_tail_norm(nf, -1.0, n_trunc, n_trunc + 3),
                          np.exp(-(n_trunc + 1)))
    assert np.isclose(po.truncated_tail_norm(nf, 0.0, 2, 5), 1.0)


def test_degree_two_block_of_diagonal_flow():
    s1, s2 = 0.7, 1.3
    nf = direct_normal_form(np.diag(np.log([s1, s2])), Weight.standard(2))
    block = po.truncated_tail_norm(nf, 1.0, 1, 2)
    assert np.isclose(block, max(s1**2, s1 * s2, s2**2))


@given(seeds)
def test_truncated_norm_monotone_in_degree(seed):
    rng = np.random.default_rng(seed)
    nf = models.random_normal_form(rng, int(rng.integers(1, 3)))
    tau = complex(rng.uniform(-1, 0.5), rng.uniform(-1, 1))
    table = po.gram(nf.weight, 6)
    norms = [po.truncated_norm(nf, tau, d, table) for d in range(7)]
    assert np.all(np.diff(norms) >= -1e-9 * max(norms))


def test_pi_norm(rho):
    for n_trunc in range(4):
        assert np.isclose(po.pi_norm(Weight.standard(2), n_trunc, 5), 1.0)
    assert po.pi_norm(rho.weight, 0, 4) > 1.0
    assert np.isclose(po.pi_norm(rho.weight, 6, 6), 1.0)


def test_reproducing_kernel_standard_weight():
    w = Weight.standard(1)
    partial, target = po.reproducing_kernel_check(w, np.array([0.0]), 0)
    assert np.isclose(partial, 1 / np.pi) and np.isclose(target, 1 / np.pi)
    sums = [po.reproducing_kernel_check(w, np.array([1.0]), d)[0] for d in range(6)]
    taylor = np.cumsum([1 / factorial(k) for k in range(6)]) / np.pi
    assert np.allclose(sums, taylor)
    assert np.isclose(po.reproducing_kernel_check(w, np.array([1.0]), 12)[1], np.e / np.pi)


def test_reproducing_kernel_converges_upward(rho):
    table = po.gram(rho.weight, 12)
    point = np.array([0.2 - 0.1j])
    sums = [po.reproducing_kernel_check(rho.weight, point, d, table) for d in range(0, 13, 2)]
    partials = np.array([s[0] for s in sums])
    target = sums[0][1]
    assert np.all(np.diff(partials) > 0)
    assert np.all(partials < target)
    assert target - partials[-1] < 0.5 * (target - partials[0])


def test_change_of_variables_identity(rho):
    assert po.change_of_vars_identity_check(rho, 0.0, 4) == 0.0
    nf = direct_normal_form([[1.0]], Weight.standard(1))
    assert po.change_of_vars_identity_check(nf, -1.0, 1) <= 1e-10
    rng = np.random.default_rng(9)
    for _ in range(3):
        nf = models.random_normal_form(rng, 2)
        assert po.change_of_vars_identity_check(nf, complex(rng.uniform(-1, 0), rng.uniform(-1, 1)), 5) <= 1e-8


def test_orthonormal_basis_identity(rho):
    assert np.allclose(po.orthonormal_basis_gram(rho.weight, 6), np.eye(7), atol=1e-10)
    rng = np.random.default_rng(3)
    w = models.random_weight(rng, 1)
    assert np.allclose(po.orthonormal_basis_gram(w, 6), np.eye(7), atol=1e-9)


def test_bounded_verdict_respects_norm_bound(rho):
    table = po.gram(rho.weight, 10)
    rep = classify(rho, -3.2, with_delta0=False)
    norms = [po.truncated_norm(rho, -3.2, d, table) for d in range(11)]
    assert max(norms) <= rep.norm_bound + 1e-6


def test_compact_tail_norms_decay(rho):
    table = po.gram(rho.weight, 10)
    tails = [po.truncated_tail_norm(rho, -7.0, n, 10, table) for n in range(8)]
    assert np.all(np.diff(np.log(tails)) < 0)
    sv = po.singular_values(rho, -7.0, 10, table)
    assert sv[0] <= classify(rho, -7.0, with_delta0=False).norm_bound + 1e-6


def test_tail_norm_tracks_flow_norm_after_last_transition(rho):
    ratios = []
    for t in (6.5, 8.0, 10.0, 12.0):
        tail = po.truncated_tail_norm(rho, -t, 0, 8)
        ratios.append(tail / np.linalg.norm(numkit.expm(rho.m, -t), 2))
    assert max(ratios) / min(ratios) < 10
