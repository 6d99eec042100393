"""Analysis of exp(tau P) for P = Mz.d_z on the space weighted by Phi.

exp(tau P) u(z) = u(e^{tau M} z), so every question reduces to comparing
Phi(e^{-tau M} z) with Phi(z), a finite-dimensional real quadratic problem.
"""

from __future__ import annotations

import enum
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import mpmath
import numpy as np
import scipy.linalg as sla

from . import numkit
from .errors import HypothesisViolation, InputError, NumericalFailure
from .numkit import INF, NEG_INF, Definiteness, Infinity, real_rep, to_complex
from .reduction import NormalForm, supersymmetric_decompose
from .symbol import QuadraticSymbol
from .weight import (Weight, decompose, global_index, hermitian_matrix, k1_coefficient,
                     theta_form)

DEFAULT_BISECT_TOL = 1e-10
MAX_DOUBLINGS = 60


class Verdict(enum.Enum):
    UNBOUNDED = "U"
    BOUNDED = "B"
    COMPACT = "C"

    @property
    def bounded(self) -> bool:
        return self is not Verdict.UNBOUNDED


_FROM_DEFINITENESS = {
    Definiteness.INDEFINITE: Verdict.UNBOUNDED,
    Definiteness.POSITIVE_SEMIDEFINITE: Verdict.BOUNDED,
    Definiteness.POSITIVE_DEFINITE: Verdict.COMPACT,
}


@dataclass(frozen=True, eq=False)
class ClassificationReport:
    tau: complex
    verdict: Verdict
    delta0: float | Infinity | None
    norm_bound: float
    margin: float
    witness: np.ndarray | None
    rel_tol: float
    bisect_tol: float


@dataclass(frozen=True)
class _Kernel:
    """Precomputed real matrices shared by every tau for one normal form."""

    hess: np.ndarray
    herm: np.ndarray  # real form of G^*G
    whiten: np.ndarray  # hess^{-1/2}
    root: np.ndarray  # hess^{1/2}
    m: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    trace: complex


def _kernel(nf: NormalForm) -> _Kernel:
    dec = decompose(nf.weight)
    ev, vec = np.linalg.eigh(nf.weight.hess)
    whiten = (vec / np.sqrt(ev)) @ vec.T
    root = (vec * np.sqrt(ev)) @ vec.T
    return _Kernel(nf.weight.hess, real_rep(hermitian_matrix(nf.weight)), whiten, root, nf.m, dec.g,
                   np.linalg.inv(dec.g), complex(np.trace(nf.m)))


def difference_hessian(nf: NormalForm, tau: complex) -> np.ndarray:
    """Hessian of z -> Phi(e^{-tau M} z) - Phi(z)."""
    r = real_rep(numkit.expm(nf.m, -tau))
    h = nf.weight.hess
    return numkit.symmetrize(r.T @ h @ r - h)


def relative_margin(kern: _Kernel, s: np.ndarray) -> np.ndarray:
    """min over z of S(z)/Phi(z), i.e. lambda_min(hess^{-1/2} S hess^{-1/2}).  Batched.

    Measuring S against Phi rather than against ||S|| makes the margin, and so
    every verdict, invariant under linear changes of variables.
    """
    w = kern.whiten
    return np.linalg.eigvalsh(numkit.symmetrize(w @ s @ w))[..., 0]


def _margins(kern: _Kernel, forward: np.ndarray, delta: np.ndarray | float = 0.0) -> np.ndarray:
    """min_z Phi^{(delta)}(e^{-tau M} z)/Phi(z) - 1 for a stack of real forward flows e^{tau M}.

    With y = e^{-tau M} z the minimum equals 1/||hess^{1/2} F hess_delta^{-1/2}||^2,
    which is accurate even when the backward flow is huge and forming the
    difference Hessian would cancel catastrophically.  A non-convex shifted
    weight can never dominate Phi, so it gets margin -1.
    """
    delta = np.asarray(delta, dtype=float)
    if delta.ndim == 0 and delta == 0.0:
        inv_root = kern.whiten
        convex = np.ones(forward.shape[:-2], dtype=bool)
    else:
        shifted = kern.hess + np.expm1(-2.0 * delta)[..., None, None] * kern.herm
        ev, vec = np.linalg.eigh(shifted)
        convex = ev[..., 0] > 0
        safe = np.where(convex[..., None], ev, 1.0)
        inv_root = (vec / np.sqrt(safe)[..., None, :]) @ np.swapaxes(vec, -1, -2)
    top = np.linalg.norm(kern.root @ forward @ inv_root, ord=2, axis=(-2, -1))
    return np.where(convex, 1.0 / top**2 - 1.0, -1.0)


def _delta0_batch(kern: _Kernel, forward: np.ndarray, upper: np.ndarray,
                  rel_tol: float, tol: float) -> np.ndarray:
    """Largest delta with Phi^{(delta)}(A z) >= Phi(z), by vectorized bisection."""
    hi = np.array(upper, dtype=float)
    ok_hi = _margins(kern, forward, hi) >= -rel_tol
    lo = hi - 1.0
    step = np.ones_like(hi)
    ok_lo = _margins(kern, forward, lo) >= -rel_tol
    for _ in range(MAX_DOUBLINGS):
        need = ~ok_lo & ~ok_hi
        if not need.any():
            break
        hi = np.where(need, lo, hi)
        step = np.where(need, 2.0 * step, step)
        lo = np.where(need, lo - step, lo)
        ok_lo = np.where(need, _margins(kern, forward, lo) >= -rel_tol, ok_lo)
    else:
        if (~ok_lo & ~ok_hi).any():
            raise NumericalFailure("delta0 bracketing failed after 60 doublings")
    # each entry stops on its own width, so results do not depend on batching
    active = ~ok_hi & (hi - lo > tol)
    while active.any():
        mid = 0.5 * (lo + hi)
        ok = _margins(kern, forward[active], mid[active]) >= -rel_tol
        idx = np.nonzero(active)[0]
        lo[idx[ok]] = mid[idx[ok]]
        hi[idx[~ok]] = mid[idx[~ok]]
        active = ~ok_hi & (hi - lo > tol)
    return np.where(ok_hi, hi, lo)


def _upper_brackets(kern: _Kernel, forward: np.ndarray) -> np.ndarray:
    """-log ||G e^{tau M} G^{-1}|| for a stack of e^{tau M}."""
    conj = kern.g @ forward @ kern.ginv
    return -np.log(np.linalg.norm(conj, ord=2, axis=(-2, -1)))


def delta0(nf: NormalForm, tau: complex, rel_tol: float = numkit.DEFAULT_PSD_TOL,
           tol: float = DEFAULT_BISECT_TOL) -> float:
    """sup{delta : Phi^{(delta)}(e^{-tau M} z) >= Phi(z) for all z}."""
    kern = _kernel(nf)
    forward = numkit.expm(nf.m, tau)[None]
    upper = _upper_brackets(kern, forward)
    return float(_delta0_batch(kern, real_rep(forward), upper, rel_tol, tol)[0])


def delta0_closed_form(nf: NormalForm, tau: complex) -> float | Infinity:
    """delta0 via one generalized eigenvalue (cross-check for the bisection).

    With y = e^{-tau M} z and F = e^{tau M} the condition reads
    (H - K) + e^{-2 delta} K >= F^T H F, i.e. e^{-2 delta} >= lambda_max(F^T H F - H + K, K).
    Working with the forward flow avoids cancellation when e^{-tau M} is large.
    """
    f = real_rep(numkit.expm(nf.m, tau))
    hess = nf.weight.hess
    k = real_rep(hermitian_matrix(nf.weight))
    t = f.T @ hess @ f - hess + k
    lam = sla.eigh(numkit.symmetrize(t), numkit.symmetrize(k), eigvals_only=True)[-1]
    if lam <= 0:
        return INF
    return float(-0.5 * np.log(lam))


def classify(nf: NormalForm, tau: complex, rel_tol: float = numkit.DEFAULT_PSD_TOL,
             with_delta0: bool = True, bisect_tol: float = DEFAULT_BISECT_TOL
             ) -> ClassificationReport:
    tau = complex(tau)
    kern = _kernel(nf)
    forward = real_rep(numkit.expm(nf.m, tau))
    margin = float(_margins(kern, forward[None])[0])
    verdict = _FROM_DEFINITENESS[numkit.definiteness_from_margin(margin, rel_tol)]
    witness = None
    if verdict is Verdict.UNBOUNDED:
        # z = F w where w maximizes Phi(F w)/Phi(w); then Phi(e^{-tau M} z) < Phi(z)
        _, _, vt = np.linalg.svd(kern.root @ forward @ kern.whiten)
        z = to_complex(forward @ kern.whiten @ vt[0])
        witness = z / np.linalg.norm(z)
    d0 = delta0(nf, tau, rel_tol, bisect_tol) if with_delta0 else None
    bound = float(np.exp(-(tau * complex(np.trace(nf.m))).real))
    return ClassificationReport(tau, verdict, d0, bound, margin, witness, rel_tol, bisect_tol)


def verdict_margins(nf: NormalForm, taus: np.ndarray) -> np.ndarray:
    """Normalized smallest eigenvalue of the difference form for many tau at once."""
    taus = np.asarray(taus, dtype=complex).ravel()
    kern = _kernel(nf)
    return _margins(kern, real_rep(numkit.expm(nf.m, taus)))


# ---------------------------------------------------------------------------
# region scans and transition times


@dataclass(frozen=True)
class GridSpec:
    re_min: float
    re_max: float
    re_count: int
    im_min: float
    im_max: float
    im_count: int

    def __post_init__(self):
        if self.re_count < 1 or self.im_count < 1:
            raise InputError("grid counts must be >= 1")

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.linspace(self.re_min, self.re_max, self.re_count),
                np.linspace(self.im_min, self.im_max, self.im_count))


@dataclass(frozen=True, eq=False)
class RegionGrid:
    """Cells in row-major order: row index = imaginary part, column = real part."""

    grid: GridSpec
    re_axis: np.ndarray
    im_axis: np.ndarray
    verdicts: np.ndarray  # (im_count, re_count) of Verdict
    delta0: np.ndarray
    norm_bound: np.ndarray
    rel_tol: float
    bisect_tol: float

    def cells(self):
        for i, im in enumerate(self.im_axis):
            for j, re in enumerate(self.re_axis):
                yield complex(re, im), self.verdicts[i, j], self.delta0[i, j], self.norm_bound[i, j]

    def unbounded_mask(self) -> np.ndarray:
        return np.vectorize(lambda v: v is Verdict.UNBOUNDED)(self.verdicts)


def _scan_chunk(kern: _Kernel, m: np.ndarray, taus: np.ndarray, rel_tol: float,
                bisect_tol: float, want_delta0: bool):
    forward = numkit.expm(m, taus)
    flows = real_rep(forward)
    margins = _margins(kern, flows)
    if want_delta0:
        d0 = _delta0_batch(kern, flows, _upper_brackets(kern, forward), rel_tol, bisect_tol)
    else:
        d0 = np.full(taus.shape, np.nan)
    return margins, d0


def region_scan(nf: NormalForm, grid: GridSpec, rel_tol: float = numkit.DEFAULT_PSD_TOL,
                bisect_tol: float = DEFAULT_BISECT_TOL, with_delta0: bool = True,
                workers: int = 4, chunk: int = 2048) -> RegionGrid:
    """Classify every grid point; chunks run in threads and are assembled in order."""
    re_axis, im_axis = grid.axes()
    taus = (re_axis[None, :] + 1j * im_axis[:, None]).ravel()
    kern = _kernel(nf)
    pieces = [taus[i:i + chunk] for i in range(0, taus.size, chunk)]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = list(pool.map(
            lambda p: _scan_chunk(kern, nf.m, p, rel_tol, bisect_tol, with_delta0), pieces))
    margins = np.concatenate([r[0] for r in results])
    d0 = np.concatenate([r[1] for r in results])
    verdicts = np.empty(taus.size, dtype=object)
    for k, mg in enumerate(margins):
        verdicts[k] = _FROM_DEFINITENESS[numkit.definiteness_from_margin(mg, rel_tol)]
    shape = (grid.im_count, grid.re_count)
    bounds = np.exp(-(taus * kern.trace).real)
    return RegionGrid(grid, re_axis, im_axis, verdicts.reshape(shape), d0.reshape(shape),
                      bounds.reshape(shape), rel_tol, bisect_tol)


def transition_times(nf: NormalForm, angle: float, t_max: float, step: float = 2e-3,
                     rel_tol: float = numkit.DEFAULT_PSD_TOL, tol: float = 1e-6) -> list[float]:
    """Times t in (0, t_max] where tau = t e^{i angle} switches between bounded and unbounded."""
    if t_max <= 0:
        raise InputError("t_max must be positive")
    direction = np.exp(1j * angle)
    count = max(int(np.ceil(t_max / step)), 2)
    ts = np.linspace(t_max / count, t_max, count)
    bounded = verdict_margins(nf, ts * direction) >= -rel_tol
    out = []
    for k in np.nonzero(bounded[1:] != bounded[:-1])[0]:
        lo, hi = ts[k], ts[k + 1]
        state_lo = bounded[k]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if (verdict_margins(nf, [mid * direction])[0] >= -rel_tol) == state_lo:
                lo = mid
            else:
                hi = mid
        out.append(0.5 * (lo + hi))
    return out


# ---------------------------------------------------------------------------
# small-time behaviour


def small_time_slope(nf: NormalForm) -> float:
    """inf Theta(z)/|Gz|^2: the limit of delta0(-t)/t as t -> 0+."""
    th = theta_form(nf)
    if np.any(th.hess) and th.definiteness() is Definiteness.INDEFINITE:
        raise HypothesisViolation("Theta is indefinite")
    rp = real_rep(hermitian_matrix(nf.weight))
    return float(sla.eigh(th.hess, 2.0 * rp, eigvals_only=True)[0])


@dataclass(frozen=True)
class SmallTimeOrder:
    """delta0(-t) is comparable to t^order; upper_c bounds the constant from above.

    ``order`` is None when the global index is infinite, i.e. exp(-tP) is
    never compact.
    """

    order: int | None
    i0: int | Infinity
    upper_c: float | None
    lower_c: float | None


def small_time_order(nf: NormalForm, t_lo: float = 1e-2, t_hi: float = 1e-1,
                     samples: int = 9) -> SmallTimeOrder:
    i0, _ = global_index(nf)
    if i0 is INF:
        return SmallTimeOrder(None, INF, None, None)
    order = 2 * i0 + 1
    upper = k1_coefficient(nf) / 4**i0
    ts = np.geomspace(t_lo, t_hi, samples)
    vals = np.array([delta0(nf, -t, rel_tol=1e-14, tol=1e-18) for t in ts])
    good = vals > 0
    lower = None
    if good.any():
        lower = float(np.exp(np.mean(np.log(vals[good]) - order * np.log(ts[good]))))
    return SmallTimeOrder(order, i0, float(upper), lower)


def norm_decay_fit(m: np.ndarray, order: int, t_lo: float = 1e-3, t_hi: float = 1e-2,
                   samples: int = 10, digits: int = 50) -> float:
    """Fit c in 1 - ||e^{-tM}|| = c t^order + O(t^{order+1}).

    Evaluated in extended precision, so orders well past double precision
    resolution can be fitted.  The fit is linear in t on y(t) = (1-||.||)/t^order
    and returns the intercept.
    """
    with mpmath.workdps(digits):
        mat = mpmath.matrix([[mpmath.mpc(complex(x)) for x in row] for row in np.asarray(m)])
        ts = [mpmath.mpf(t_lo) * (mpmath.mpf(t_hi) / t_lo) ** (mpmath.mpf(k) / (samples - 1))
              for k in range(samples)]
        ys = []
        for t in ts:
            e = mpmath.expm(-t * mat)
            gram = e.H * e
            ev = mpmath.eighe(gram, eigvals_only=True)
            top = max(mpmath.re(x) for x in ev)
            ys.append((1 - mpmath.sqrt(top)) / t**order)
        xs = np.array([float(t) for t in ts])
        yv = np.array([float(y) for y in ys])
    slope, intercept = np.polyfit(xs, yv, 1)
    return float(intercept)


# ---------------------------------------------------------------------------
# spectral data


@dataclass(frozen=True)
class LatticePoint:
    alpha: tuple[int, ...]
    value: complex
    order: int | None


def eigenvalue_lattice(nf: NormalForm, max_degree: int,
                       tol: float = numkit.DEFAULT_CLUSTER_TOL) -> list[LatticePoint]:
    """All sums alpha.lambda for |alpha| <= max_degree with eigenvalues repeated."""
    probe = numkit.jordan_probe(nf.m, tol)
    rep = probe.repeated()
    lams = np.array([v for v, _ in rep])
    dist = np.array([r for _, r in rep])
    orders_ok = not probe.warnings
    out = []
    n = len(rep)
    for deg in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(n), deg):
            alpha = [0] * n
            for j in combo:
                alpha[j] += 1
            a = np.array(alpha)
            order = int(1 + dist @ a) if orders_ok else None
            out.append(LatticePoint(tuple(alpha), complex(lams @ a), order))
    return out


@dataclass(frozen=True)
class ReturnRates:
    rho: float
    big_r: int
    theta_plus: float | None
    theta_minus: float | None
    b_plus: float | None
    b_minus: float | None
    weak_limit_exists: bool
    note: str = ""

    def rate(self, t: float) -> float:
        """A(t) = t^{R-1} e^{-rho t}."""
        return t ** (self.big_r - 1) * np.exp(-self.rho * t)


def return_rates(nf: NormalForm, tol: float = numkit.DEFAULT_CLUSTER_TOL) -> ReturnRates:
    probe = numkit.jordan_probe(nf.m, tol)
    clusters = probe.eigenvalues
    rho = min(c.value.real for c in clusters)
    radius = probe.tolerance
    at_rho = [c for c in clusters if abs(c.value.real - rho) <= radius]
    big_r = max(c.max_block_size for c in at_rho)
    weak = sum(1 for c in at_rho if c.max_block_size == big_r) == 1
    if rho <= 0:
        return ReturnRates(rho, big_r, None, None, None, None, weak,
                           "spectrum not in the open right half-plane; angular data omitted")
    args = [(np.angle(c.value), c) for c in clusters]
    th_p = max(a for a, _ in args)
    th_m = min(a for a, _ in args)
    atol = max(tol, 1e-12)

    def bcoef(theta):
        return max((c.max_block_size - 1) / abs(c.value) for a, c in args if abs(a - theta) <= atol)

    return ReturnRates(rho, big_r, th_p, th_m, bcoef(th_p), bcoef(th_m), weak)


@dataclass(frozen=True)
class ReturnBound:
    lower: float
    upper: float
    exact: float | None


def return_bound(nf: NormalForm, t: float, n_trunc: int) -> ReturnBound:
    """Raw rate quantities A(t)^{N+1} and ||G e^{-tM} G^{-1}||^{N+1}."""
    rep = classify(nf, -t, with_delta0=False)
    if rep.verdict is Verdict.UNBOUNDED:
        raise HypothesisViolation(f"exp(-tP) is unbounded at t = {t}")
    rates = return_rates(nf)
    dec = decompose(nf.weight)
    flow = numkit.expm(nf.m, -t)
    conj = dec.g @ flow @ np.linalg.inv(dec.g)
    upper = float(np.linalg.norm(conj, 2)) ** (n_trunc + 1)
    exact = upper if np.linalg.norm(dec.big_h, 2) <= 1e-14 else None
    return ReturnBound(rates.rate(t) ** (n_trunc + 1), upper, exact)


# ---------------------------------------------------------------------------
# large |tau|, affine terms, imaginary eigenvalues


class LargeTauVerdict(enum.Enum):
    GUARANTEED_BOUNDED = "guaranteed-bounded"
    GUARANTEED_UNBOUNDED = "guaranteed-unbounded"
    INCONCLUSIVE = "inconclusive"


def sphere_ratio(w: Weight) -> float:
    """sqrt(min Phi / max Phi) on the unit sphere."""
    ev = np.linalg.eigvalsh(w.hess)
    return float(np.sqrt(ev[0] / ev[-1]))


def large_tau_verdict(nf: NormalForm, tau: complex) -> LargeTauVerdict:
    ev = np.linalg.eigvals(nf.m)
    if np.any(ev.real <= 0):
        raise HypothesisViolation("spectrum of M is not in the open right half-plane")
    c0 = sphere_ratio(nf.weight)
    nrm = float(np.linalg.norm(numkit.expm(nf.m, tau), 2))
    if nrm <= c0:
        return LargeTauVerdict.GUARANTEED_BOUNDED
    if nrm > 1.0 / c0:
        return LargeTauVerdict.GUARANTEED_UNBOUNDED
    return LargeTauVerdict.INCONCLUSIVE


def linear_extension_classify(nf: NormalForm, a: np.ndarray, b: np.ndarray, tau: complex,
                              rel_tol: float = numkit.DEFAULT_PSD_TOL) -> Verdict:
    """Verdict for the generator Mz.d_z + a.z + b.d_z (affine terms)."""
    n = nf.n
    a = np.asarray(a, dtype=complex).reshape(n)
    b = np.asarray(b, dtype=complex).reshape(n)
    if np.linalg.cond(nf.m) > 1e12:
        raise HypothesisViolation("M is singular")
    minv = np.linalg.inv(nf.m)
    shift = minv @ b
    flow = numkit.expm(nf.m, -tau)
    s = difference_hessian(nf, tau)
    h = nf.weight.hess
    rflow = real_rep(flow)
    c = numkit.to_real(shift)
    # linear part of Phi(A z - c) - Phi(z - c) + Re(a.M^{-1}(A - 1) z)
    lin_phi = -(rflow.T @ h @ c) + h @ c
    row = a @ minv @ (flow - np.eye(n))
    lin_a = np.concatenate([row.real, -row.imag])
    grad = lin_phi + lin_a
    margin = float(_margins(_kernel(nf), real_rep(numkit.expm(nf.m, tau))[None])[0])
    state = numkit.definiteness_from_margin(margin, rel_tol)
    if state is Definiteness.INDEFINITE:
        return Verdict.UNBOUNDED
    if state is Definiteness.POSITIVE_DEFINITE:
        return Verdict.COMPACT
    # null directions of S measured against Phi, as for the verdict itself
    whiten = _kernel(nf).whiten
    ev, vec = np.linalg.eigh(numkit.symmetrize(whiten @ s @ whiten))
    kernel = whiten @ vec[:, np.abs(ev) <= rel_tol]
    gscale = max(np.linalg.norm(lin_phi), np.linalg.norm(lin_a), np.linalg.norm(h @ c), 1e-300)
    if kernel.size and np.linalg.norm(kernel.T @ grad) > 1e-9 * max(gscale, 1.0):
        return Verdict.UNBOUNDED
    return Verdict.BOUNDED


@dataclass(frozen=True, eq=False)
class ImaginarySplit:
    has_imaginary: bool
    v_basis: np.ndarray | None = None
    w_basis: np.ndarray | None = None
    orthogonal: bool | None = None
    skew_verified: bool | None = None
    h_cancellation_verified: bool | None = None


def _invariant_subspace(m: np.ndarray, select) -> np.ndarray:
    _, z, sdim = sla.schur(m.astype(complex), output="complex", sort=select)
    return z[:, :sdim]


def imaginary_split(nf: NormalForm, tol: float = numkit.DEFAULT_CLUSTER_TOL,
                    samples: int = 20, seed: int = 0) -> ImaginarySplit:
    th = theta_form(nf)
    if np.any(th.hess) and th.definiteness() is Definiteness.INDEFINITE:
        raise HypothesisViolation("Theta is indefinite")
    m = nf.m
    scale = max(np.linalg.norm(m, 2), numkit.CLUSTER_FLOOR)
    cut = tol * scale
    ev = np.linalg.eigvals(m)
    if not np.any(np.abs(ev.real) <= cut):
        return ImaginarySplit(False)
    v = _invariant_subspace(m, lambda x: abs(x.real) <= cut)
    # complementary invariant subspace, not the orthogonal complement
    w = _complementary_invariant(m, v, cut)
    dec = decompose(nf.weight)
    gv, gw = dec.g @ v, dec.g @ w
    ortho = bool(np.linalg.norm(gv.conj().T @ gw) <= 1e-8 * np.linalg.norm(gv) * np.linalg.norm(gw))
    q, _ = np.linalg.qr(gv)
    restricted = q.conj().T @ dec.g @ m @ np.linalg.inv(dec.g) @ q
    skew = bool(np.linalg.norm(restricted + restricted.conj().T) <= 1e-8 * scale)
    basis = np.hstack([v, w])
    proj_w = basis @ np.diag([0.0] * v.shape[1] + [1.0] * w.shape[1]) @ np.linalg.inv(basis)
    hpp = dec.hpp
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        z = rng.normal(size=nf.n) + 1j * rng.normal(size=nf.n)
        mz = m @ z
        lhs = mz @ (hpp @ z)
        rhs = mz @ (proj_w.T @ hpp @ proj_w @ z)
        worst = max(worst, abs(lhs - rhs) / max(1.0, np.linalg.norm(hpp, 2) * np.vdot(z, z).real * scale))
    return ImaginarySplit(True, v, w, ortho, skew, bool(worst <= 1e-8))


def _complementary_invariant(m: np.ndarray, v: np.ndarray, cut: float) -> np.ndarray:
    """Sum of generalized eigenspaces for eigenvalues with |Re| > cut."""
    n = m.shape[0]
    k = v.shape[1]
    if k == n:
        return np.zeros((n, 0), dtype=complex)
    _, z, sdim = sla.schur(m.astype(complex), output="complex", sort=lambda x: abs(x.real) <= cut)
    t = z.conj().T @ m @ z
    t11, t12, t22 = t[:sdim, :sdim], t[:sdim, sdim:], t[sdim:, sdim:]
    # block-diagonalize: find X with T11 X - X T22 = -T12
    x = sla.solve_sylvester(t11, -t22, -t12)
    cols = np.vstack([x, np.eye(n - sdim)])
    return z @ cols


# ---------------------------------------------------------------------------
# shared ground state comparison


class SharedGroundState(enum.Enum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    NOT_APPLICABLE = "not-applicable"


def _check_real_pd(q: QuadraticSymbol, name: str):
    mat = q.matrix()
    if np.abs(mat.imag).max() > 1e-12 * max(1.0, np.abs(mat).max()):
        raise InputError(f"{name} is not real-valued")
    if numkit.psd_classify(mat.real, 1e-10) is not Definiteness.POSITIVE_DEFINITE:
        raise InputError(f"{name} is not positive definite")


def shared_ground_state_criterion(q1: QuadraticSymbol, q2: QuadraticSymbol,
                                  delta1: float, delta2: float, tol: float = 1e-8
                                  ) -> SharedGroundState:
    """Boundedness of exp(delta2 Q2) exp(-delta1 Q1) when both share a Gaussian ground state."""
    from .reduction import normal_form_from_supersymmetric

    _check_real_pd(q1, "q1")
    _check_real_pd(q2, "q2")
    s1, s2 = supersymmetric_decompose(q1), supersymmetric_decompose(q2)
    scale = max(np.abs(s1.a_plus).max(), 1.0)
    if np.abs(s1.a_plus - s2.a_plus).max() > tol * scale:
        return SharedGroundState.NOT_APPLICABLE
    nf1 = normal_form_from_supersymmetric(s1, None, q1)
    nf2 = normal_form_from_supersymmetric(s2, None, q2)
    g = decompose(nf1.weight).g
    ginv = np.linalg.inv(g)
    b1 = g @ nf1.m @ ginv
    b2 = g @ nf2.m @ ginv
    prod = numkit.expm(b2, delta2) @ numkit.expm(b1, -delta1)
    nrm = float(np.linalg.norm(prod, 2))
    return SharedGroundState.BOUNDED if nrm <= 1.0 + 1e-10 else SharedGroundState.UNBOUNDED


__all__ = [
    "Verdict", "ClassificationReport", "classify", "delta0", "delta0_closed_form",
    "difference_hessian", "verdict_margins", "GridSpec", "RegionGrid", "region_scan",
    "transition_times", "small_time_slope", "SmallTimeOrder", "small_time_order",
    "norm_decay_fit", "LatticePoint", "eigenvalue_lattice", "ReturnRates", "return_rates",
    "ReturnBound", "return_bound", "LargeTauVerdict", "large_tau_verdict", "sphere_ratio",
    "linear_extension_classify", "ImaginarySplit", "imaginary_split", "SharedGroundState",
    "shared_ground_state_criterion", "NEG_INF",
]
