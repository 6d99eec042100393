import numpy as np
import pytest
from hypothesis import given, strategies as st

from fockflow import models, numkit
from fockflow.errors import HypothesisViolation
from fockflow.reduction import direct_normal_form, regauge
from fockflow.semigroup import (GridSpec, LargeTauVerdict, SharedGroundState, Verdict, classify,
                                delta0, delta0_closed_form, difference_hessian, eigenvalue_lattice,
                                imaginary_split, large_tau_verdict, linear_extension_classify,
                                norm_decay_fit, region_scan, relative_margin, return_bound,
                                return_rates, shared_ground_state_criterion, small_time_order,
                                small_time_slope, transition_times, verdict_margins, _kernel)
from fockflow.symbol import QuadraticSymbol, harmonic_oscillator
from fockflow.weight import Weight, delta_ceiling

seeds = st.integers(0, 2**32 - 1)


def test_rotated_oscillator_verdicts(rho):
    assert classify(rho, -1.0).verdict is Verdict.UNBOUNDED
    rep = classify(rho, -3.2)
    assert rep.verdict.bounded
    assert rep.delta0 > 0
    assert np.isclose(rep.norm_bound, np.exp(3.2 * np.cos(5 * np.pi / 12)))


def test_unbounded_witness_decreases_weight(rho):
    rep = classify(rho, -1.0)
    z = rep.witness
    back = numkit.expm(rho.m, 1.0) @ z
    assert rho.weight(back) < rho.weight(z)


def test_rotated_oscillator_transitions(rho):
    times = transition_times(rho, np.pi, 8.0)
    assert np.allclose(times, [3.01147, 3.54857, 5.86234], atol=1e-4)


def test_harmonic_oscillator_delta0():
    nf = direct_normal_form([[1.0]], Weight.standard(1))
    for t in (0.1, 1.0, 3.0):
        rep = classify(nf, -t)
        assert rep.verdict is Verdict.COMPACT
        assert np.isclose(rep.delta0, t, atol=1e-9)
    assert classify(nf, 1j).verdict is Verdict.BOUNDED


@given(seeds, st.integers(1, 3))
def test_delta0_two_routes(seed, n):
    rng = np.random.default_rng(seed)
    nf = models.random_normal_form(rng, n)
    tau = complex(rng.uniform(-2, 0.5), rng.uniform(-2, 2))
    d_bisect = delta0(nf, tau)
    d_closed = delta0_closed_form(nf, tau)
    assert abs(d_bisect - d_closed) < 1e-7 * max(1.0, abs(d_closed))
    ceiling = delta_ceiling(nf.weight)
    assert d_bisect < ceiling
    assert (d_bisect >= -1e-9) == classify(nf, tau, with_delta0=False).verdict.bounded


def test_delta0_routes_agree_with_large_backward_flow():
    rng = np.random.default_rng(3)
    nf, tau = models.random_contraction_case(rng, 3)
    assert np.linalg.norm(numkit.expm(nf.m, -tau), 2) > 1e8
    assert abs(delta0(nf, tau) - delta0_closed_form(nf, tau)) < 1e-9


@given(seeds, st.integers(1, 3))
def test_margin_two_routes(seed, n):
    rng = np.random.default_rng(seed)
    nf = models.random_normal_form(rng, n)
    tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
    direct = relative_margin(_kernel(nf), difference_hessian(nf, tau))
    assert np.isclose(classify(nf, tau, with_delta0=False).margin, direct, rtol=1e-7, atol=1e-9)


@given(seeds, st.integers(1, 2))
def test_verdict_is_gauge_invariant(seed, n):
    rng = np.random.default_rng(seed)
    nf = models.random_normal_form(rng, n)
    moved = regauge(nf, models.random_gauge(rng, n))
    tau = complex(rng.uniform(-3, 1), rng.uniform(-3, 3))
    a, b = classify(nf, tau, with_delta0=False), classify(moved, tau, with_delta0=False)
    assert np.isclose(a.margin, b.margin, rtol=1e-6, atol=1e-9)


def test_region_scan_matches_pointwise(rho):
    grid = GridSpec(-6, 1, 8, -2, 2, 5)
    scan = region_scan(rho, grid, workers=2, chunk=7)
    assert scan.verdicts.shape == (5, 8)
    for tau, verdict, d0, bound in scan.cells():
        rep = classify(rho, tau)
        assert verdict is rep.verdict
        assert np.isclose(d0, rep.delta0, atol=1e-8)
        assert np.isclose(bound, rep.norm_bound)
    again = region_scan(rho, grid, workers=3, chunk=11)
    assert np.array_equal(again.delta0, scan.delta0)


def test_small_time_slope():
    nf = direct_normal_form(np.eye(2), Weight.standard(2))
    assert np.isclose(small_time_slope(nf), 1.0)
    assert np.isclose(delta0(nf, -1e-3), 1e-3)
    fp = models.fokker_planck_nf(0.5, 0.3)
    assert np.isclose(small_time_slope(fp), 0.3)


def test_fokker_planck_small_time(fp0):
    res = small_time_order(fp0)
    assert (res.order, res.i0) == (3, 1)
    assert np.isclose(res.upper_c, 0.25 / 12)
    assert res.lower_c <= res.upper_c
    assert res.lower_c > 0.9 * res.upper_c


def test_chain_small_time(chain):
    res = small_time_order(chain)
    assert (res.order, res.i0) == (5, 2)
    assert np.isclose(res.upper_c, 0.25 / 320)
    fitted = norm_decay_fit(chain.m, 5)
    assert np.isclose(fitted, 0.25 / 720, rtol=1e-4)
    assert fitted < res.upper_c


def test_norm_decay_fit_fokker_planck():
    m = models.fokker_planck_nf(0.3, 0.0).m
    assert np.isclose(norm_decay_fit(m, 3), 0.09 / 12, rtol=1e-3)


def test_eigenvalue_lattice_defective(fp0):
    lat = eigenvalue_lattice(fp0, 2)
    assert len(lat) == 6
    values = sorted(round(p.value.real, 6) for p in lat)
    assert values == [0.0, 0.5, 0.5, 1.0, 1.0, 1.0]
    orders = {p.alpha: p.order for p in lat}
    assert orders[(0, 0)] == 1
    assert orders[(1, 0)] == 2 and orders[(0, 1)] == 1
    assert orders[(2, 0)] == 3


def test_return_rates(fp0, rho):
    r = return_rates(fp0)
    assert (r.rho, r.big_r, r.b_plus, r.weak_limit_exists) == pytest.approx((0.5, 2, 2.0, True))
    assert np.isclose(r.rate(2.0), 2.0 * np.exp(-1.0))
    r2 = return_rates(rho)
    assert np.isclose(r2.rho, np.cos(5 * np.pi / 12))
    assert r2.big_r == 1


def test_return_bound_orthogonal_case():
    nf = direct_normal_form(np.diag([1.0, 2.0]), Weight.standard(2))
    b = return_bound(nf, 0.5, 2)
    assert np.isclose(b.exact, np.exp(-0.5 * 3))
    assert np.isclose(b.upper, b.exact)


def test_large_tau(rho):
    assert large_tau_verdict(rho, -20) is LargeTauVerdict.GUARANTEED_BOUNDED
    assert large_tau_verdict(rho, 10) is LargeTauVerdict.GUARANTEED_UNBOUNDED
    assert large_tau_verdict(rho, -0.01) is LargeTauVerdict.INCONCLUSIVE
    with pytest.raises(HypothesisViolation):
        large_tau_verdict(direct_normal_form([[1j]], Weight.standard(1)), -1)


def test_linear_extension(rho):
    iso = direct_normal_form([[1j]], Weight.standard(1))
    assert linear_extension_classify(iso, [1.0], [0.0], -1.0) is Verdict.UNBOUNDED
    assert linear_extension_classify(iso, [0.0], [0.0], -1.0) is Verdict.BOUNDED
    assert linear_extension_classify(rho, [0.0], [0.0], -3.2).bounded
    assert linear_extension_classify(rho, [1.0], [2.0], -7.0) is Verdict.COMPACT


def test_imaginary_split():
    nf = direct_normal_form(np.diag([1j, 1.0]), Weight.standard(2))
    res = imaginary_split(nf)
    assert res.has_imaginary and res.orthogonal and res.skew_verified
    assert res.h_cancellation_verified
    assert not imaginary_split(direct_normal_form([[1.0]], Weight.standard(1))).has_imaginary


def test_shared_ground_state():
    h = harmonic_oscillator(1)
    assert shared_ground_state_criterion(h, h, 1, 0.5) is SharedGroundState.BOUNDED
    assert shared_ground_state_criterion(h, h, 1, 1.5) is SharedGroundState.UNBOUNDED
    assert shared_ground_state_criterion(h, 2 * h, 1, 0.4) is SharedGroundState.BOUNDED
    assert shared_ground_state_criterion(h, 2 * h, 1, 0.6) is SharedGroundState.UNBOUNDED
    other = QuadraticSymbol([[1.0]], [[0.0]], [[0.25]])
    assert shared_ground_state_criterion(h, other, 1, 0.5) is SharedGroundState.NOT_APPLICABLE


def test_verdict_margins_batch(rho):
    taus = np.array([-1.0, -3.2, -7.0])
    m = verdict_margins(rho, taus)
    assert m[0] < 0 < m[1] and m[2] > 0
