"""From a quadratic symbol to the normal form (M, Phi).

The pipeline is: Hamilton map F -> its invariant planes for eigenvalues in
the upper and lower half-planes -> graphs xi = A_pm x -> factor
q = B(xi - A_- x).(xi - A_+ x) -> complex canonical map
z = L(xi - A_- x), zeta = L'(xi - A_+ x) with L'^T L = (A_+ - A_-)^{-1}.
In these coordinates q becomes (Mz).(i zeta) and the image of real phase
space is the graph zeta = -2i d_z Phi.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from . import numkit
from .errors import HypothesisViolation, InputError, NumericalFailure
from .symbol import QuadraticSymbol, fundamental_matrix, symplectic_matrix
from .weight import Weight


@dataclass(frozen=True, eq=False)
class LagrangianGraph:
    a: np.ndarray
    im_sign: str  # "positive", "negative" or "indefinite"
    asymmetry: float


@dataclass(frozen=True, eq=False)
class SupersymmetricForm:
    a_plus: np.ndarray
    a_minus: np.ndarray
    b: np.ndarray
    residual: float = 0.0

    def __post_init__(self):
        ap = np.atleast_2d(np.asarray(self.a_plus, dtype=complex))
        am = np.atleast_2d(np.asarray(self.a_minus, dtype=complex))
        b = np.atleast_2d(np.asarray(self.b, dtype=complex))
        n = ap.shape[0]
        if ap.shape != (n, n) or am.shape != (n, n) or b.shape != (n, n):
            raise InputError("aPlus, aMinus and b must be square of the same size")
        for name, a in (("aPlus", ap), ("aMinus", am)):
            if np.abs(a - a.T).max() > 1e-12 * max(1.0, np.abs(a).max()):
                raise InputError(f"{name} is not symmetric")
        ip = np.linalg.eigvalsh(0.5 * (ap + ap.T).imag)
        im = np.linalg.eigvalsh(0.5 * (am + am.T).imag)
        if ip[0] <= 1e-10 or im[-1] >= -1e-10:
            raise HypothesisViolation("Im aPlus must be positive definite and Im aMinus negative definite")
        object.__setattr__(self, "a_plus", 0.5 * (ap + ap.T))
        object.__setattr__(self, "a_minus", 0.5 * (am + am.T))
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.b.shape[0]

    def to_symbol(self) -> QuadraticSymbol:
        """q(v) = B l_-(v) . l_+(v) with l_pm = xi - A_pm x."""
        n = self.n
        e_minus = np.hstack([-self.a_minus, np.eye(n)])
        e_plus = np.hstack([-self.a_plus, np.eye(n)])
        return QuadraticSymbol.from_matrix(e_plus.T @ self.b @ e_minus)


@dataclass(frozen=True, eq=False)
class NormalForm:
    """P = Mz.d_z acting on the weighted space of entire functions with weight Phi.

    ``kappa`` is the complex canonical map (x, xi) -> (z, zeta) when the normal
    form came from a symbol; it is None for directly supplied normal forms.
    """

    m: np.ndarray
    weight: Weight
    gauge: np.ndarray | None = None
    lambda_plus: np.ndarray | None = None
    lambda_minus: np.ndarray | None = None
    kappa: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.m, dtype=complex))
        if m.shape != (self.weight.n, self.weight.n):
            raise InputError(f"M has shape {m.shape} but the weight has n = {self.weight.n}")
        if not np.all(np.isfinite(m)):
            raise InputError("M has non-finite entries")
        object.__setattr__(self, "m", m)

    @property
    def n(self) -> int:
        return self.m.shape[0]

    def point_map(self, v: np.ndarray) -> np.ndarray:
        """z-coordinate of the real phase-space point v = (x, xi)."""
        if self.kappa is None:
            raise InputError("normal form has no canonical map attached")
        return self.kappa[: self.n] @ np.asarray(v)


def stable_planes(f: np.ndarray, tol: float = numkit.DEFAULT_CLUSTER_TOL):
    """Orthonormal bases of the sums of generalized eigenspaces with Im > 0 and Im < 0."""
    f = np.asarray(f, dtype=complex)
    dim = f.shape[0]
    n = dim // 2
    scale = max(np.linalg.norm(f, 2), numkit.CLUSTER_FLOOR)
    ev = np.linalg.eigvals(f)
    bad = ev[np.abs(ev.imag) <= tol * scale]
    if bad.size:
        raise HypothesisViolation(f"degenerate split: eigenvalue {bad[0]:.6g} is on the real axis")
    out = []
    for sign in (1, -1):
        _, z, sdim = sla.schur(f, output="complex", sort=lambda x, s=sign: s * x.imag > 0)
        if sdim != n:
            raise HypothesisViolation(f"invariant plane has dimension {sdim}, expected {n}")
        basis = z[:, :n]
        drift = np.linalg.norm(f @ basis - basis @ (basis.conj().T @ f @ basis), 2)
        if drift > 1e-9 * scale:
            raise NumericalFailure(f"invariant subspace check failed ({drift:.2e})")
        out.append(basis)
    return out[0], out[1]


def lagrangian_graph(basis: np.ndarray) -> LagrangianGraph:
    """A with plane = {(x, A x)}."""
    basis = np.asarray(basis, dtype=complex)
    n = basis.shape[1]
    top, bot = basis[:n], basis[n:]
    if np.linalg.cond(top) > 1e12:
        raise HypothesisViolation("plane not a graph over the base")
    a = np.linalg.solve(top.T, bot.T).T
    asym = float(np.abs(a - a.T).max() / max(np.abs(a).max(), 1e-300))
    a = 0.5 * (a + a.T)
    ev = np.linalg.eigvalsh(a.imag)
    scale = max(np.abs(ev).max(), 1e-300)
    if ev[0] > 1e-10 * scale:
        sign = "positive"
    elif ev[-1] < -1e-10 * scale:
        sign = "negative"
    else:
        sign = "indefinite"
    return LagrangianGraph(a, sign, asym)


def _solve_b(q: QuadraticSymbol, a_plus: np.ndarray, a_minus: np.ndarray):
    n = q.n
    e_minus = np.hstack([-a_minus, np.eye(n)])
    e_plus = np.hstack([-a_plus, np.eye(n)])
    cols = []
    for i in range(n):
        for j in range(n):
            unit = np.zeros((n, n), dtype=complex)
            unit[i, j] = 1.0
            s = e_plus.T @ unit @ e_minus
            cols.append((0.5 * (s + s.T)).ravel())
    design = np.array(cols).T
    target = q.matrix().ravel()
    sol, *_ = np.linalg.lstsq(design, target, rcond=None)
    resid = np.linalg.norm(design @ sol - target) / max(np.linalg.norm(target), 1e-300)
    return sol.reshape(n, n), float(resid)


def supersymmetric_decompose(q: QuadraticSymbol, tol: float = numkit.DEFAULT_CLUSTER_TOL
                             ) -> SupersymmetricForm:
    f = fundamental_matrix(q)
    plus, minus = stable_planes(f, tol)
    gp, gm = lagrangian_graph(plus), lagrangian_graph(minus)
    if gp.im_sign != "positive" or gm.im_sign != "negative":
        raise HypothesisViolation(
            "the invariant planes are not positive/negative definite; "
            "the operator is outside the scope of the reduction")
    b, resid = _solve_b(q, gp.a, gm.a)
    if resid > 1e-8:
        raise NumericalFailure(f"could not factor the symbol (residual {resid:.2e})")
    return SupersymmetricForm(gp.a, gm.a, b, resid)


def canonical_map(ss: SupersymmetricForm, gauge: np.ndarray | None = None) -> np.ndarray:
    """K with (z, zeta) = K (x, xi)."""
    n = ss.n
    ell = np.eye(n, dtype=complex) if gauge is None else np.asarray(gauge, dtype=complex)
    c = np.linalg.inv(ss.a_plus - ss.a_minus)
    ell_dual = np.linalg.inv(ell).T @ c
    return np.block([[-ell @ ss.a_minus, ell], [-ell_dual @ ss.a_plus, ell_dual]])


def weight_from_map(kappa: np.ndarray) -> np.ndarray:
    """Hessian of Phi(z) = Re(z . (i/2) zeta(z)) over the image of real phase space."""
    n = kappa.shape[0] // 2
    kz, kzeta = kappa[:n], kappa[n:]
    to_z = np.vstack([kz.real, kz.imag])  # real 2n x 2n, v -> (Re z, Im z)
    inv = np.linalg.inv(to_z)
    s = 0.5j * kz.T @ kzeta
    s_real = numkit.symmetrize(s).real
    return numkit.symmetrize(2.0 * inv.T @ s_real @ inv)


def normal_form_from_supersymmetric(ss: SupersymmetricForm, gauge: np.ndarray | None = None,
                                    q: QuadraticSymbol | None = None) -> NormalForm:
    n = ss.n
    ell = np.eye(n, dtype=complex) if gauge is None else np.atleast_2d(np.asarray(gauge, dtype=complex))
    if ell.shape != (n, n) or np.linalg.cond(ell) > 1e12:
        raise InputError("gauge must be an invertible n x n matrix")
    if q is None:
        q = ss.to_symbol()
    kappa = canonical_map(ss, ell)
    jmat = symplectic_matrix(n)
    canon = np.linalg.norm(kappa.T @ jmat @ kappa - jmat, 2) / max(np.linalg.norm(kappa, 2) ** 2, 1.0)
    if canon > 1e-10:
        raise NumericalFailure(f"constructed map is not canonical ({canon:.2e})")
    m = -1j * ell @ (ss.a_plus - ss.a_minus) @ ss.b @ np.linalg.inv(ell)

    kinv = np.linalg.inv(kappa)
    qp = kinv.T @ q.matrix() @ kinv
    scale = max(np.linalg.norm(q.matrix(), 2), np.linalg.norm(qp, 2))
    purity = max(np.linalg.norm(qp[:n, :n], 2), np.linalg.norm(qp[n:, n:], 2)) / scale
    if purity > 1e-9:
        raise NumericalFailure(f"transformed symbol is not of the form (Mz).(i zeta) ({purity:.2e})")

    hess = weight_from_map(kappa)
    try:
        weight = Weight(hess)
    except HypothesisViolation:
        raise HypothesisViolation("reduction produced non-convex weight")

    f = fundamental_matrix(q)
    ev_f = np.linalg.eigvals(f)
    upper = np.sort_complex(-2j * ev_f[ev_f.imag > 0])
    ev_m = np.sort_complex(np.linalg.eigvals(m))
    spec_gap = float(_multiset_distance(upper, ev_m) / max(np.abs(ev_m).max(), 1e-300))
    if spec_gap > 1e-6:
        raise NumericalFailure(f"spectra of M and F disagree ({spec_gap:.2e})")
    plus = minus = None
    try:
        plus, minus = stable_planes(f)
    except HypothesisViolation:
        pass
    diag = {"canonicity": float(canon), "purity": float(purity),
            "spectral_match": spec_gap, "factor_residual": ss.residual}
    return NormalForm(m, weight, ell, plus, minus, kappa, diag)


def _multiset_distance(a: np.ndarray, b: np.ndarray) -> float:
    if a.size != b.size:
        return float("inf")
    from scipy.optimize import linear_sum_assignment
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max()) if a.size else 0.0


def normal_form(q: QuadraticSymbol, gauge: np.ndarray | None = None,
                tol: float = numkit.DEFAULT_CLUSTER_TOL) -> NormalForm:
    """Reduce q to (M, Phi) using the gauge L (identity by default)."""
    ss = supersymmetric_decompose(q, tol)
    return normal_form_from_supersymmetric(ss, gauge, q)


def direct_normal_form(m: np.ndarray, weight: Weight | np.ndarray) -> NormalForm:
    """A normal form given by M and a weight Hessian, without a symbol."""
    if not isinstance(weight, Weight):
        weight = Weight(np.asarray(weight, dtype=float))
    return NormalForm(np.atleast_2d(np.asarray(m, dtype=complex)), weight)


def regauge(nf: NormalForm, s: np.ndarray) -> NormalForm:
    """Change variables z -> s z: M -> s M s^{-1}, Phi -> Phi(s^{-1} .)."""
    s = np.atleast_2d(np.asarray(s, dtype=complex))
    sinv = np.linalg.inv(s)
    weight = Weight(nf.weight.compose(sinv).hess)
    kappa = None
    if nf.kappa is not None:
        n = nf.n
        kappa = np.block([[s, np.zeros((n, n))], [np.zeros((n, n)), sinv.T]]) @ nf.kappa
    gauge = None if nf.gauge is None else s @ nf.gauge
    return NormalForm(s @ nf.m @ sinv, weight, gauge, nf.lambda_plus, nf.lambda_minus,
                      kappa, dict(nf.diagnostics))
