"""Strictly convex real-quadratic weights on C^n and quantities built from them.

A weight is stored as the real Hessian ``hess`` on R^{2n} = (Re z, Im z), so
that Phi(z) = 1/2 v.hess.v.  Every complex object (G, h'', H) is a derived
view.  The same storage convention is used for any ``RealQForm``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg as sla

from . import numkit
from .errors import HypothesisViolation, InputError
from .numkit import INF, Definiteness, Infinity, real_rep, to_real

if TYPE_CHECKING:
    from .reduction import NormalForm


@dataclass(frozen=True, eq=False)
class RealQForm:
    """Real quadratic form Q(z) = 1/2 v.hess.v on C^n viewed as R^{2n}."""

    hess: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.hess, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] % 2:
            raise InputError(f"hessian must be 2n x 2n, got {h.shape}")
        object.__setattr__(self, "hess", numkit.symmetrize(h))

    @property
    def n(self) -> int:
        return self.hess.shape[0] // 2

    def __call__(self, z: np.ndarray) -> np.ndarray:
        v = to_real(z)
        return 0.5 * np.einsum("...i,ij,...j->...", v, self.hess, v)

    def bilinear(self, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        """The symmetric real-bilinear form with Q(z) = B(z, z)."""
        return 0.5 * np.einsum("...i,ij,...j->...", to_real(z), self.hess, to_real(w))

    def compose(self, a: np.ndarray) -> "RealQForm":
        """z -> Q(a z) for a complex n x n matrix a."""
        r = real_rep(a)
        return RealQForm(r.T @ self.hess @ r)

    def definiteness(self, rel_tol: float = numkit.DEFAULT_PSD_TOL) -> Definiteness:
        return numkit.psd_classify(self.hess, rel_tol)

    def norm(self) -> float:
        """max |Q(z)| over |z| = 1."""
        return 0.5 * float(np.linalg.norm(self.hess, 2))


class Weight(RealQForm):
    """A strictly convex weight Phi."""

    def __post_init__(self):
        super().__post_init__()
        if numkit.psd_classify(self.hess, 1e-12) is not Definiteness.POSITIVE_DEFINITE:
            raise HypothesisViolation("weight is not strictly convex")

    @classmethod
    def standard(cls, n: int) -> "Weight":
        """Phi = |z|^2 / 2."""
        return cls(np.eye(2 * n))

    @classmethod
    def from_parts(cls, g: np.ndarray, hpp: np.ndarray | None = None) -> "Weight":
        """Phi = 1/2 |G z|^2 - Re(1/2 z.hpp.z)."""
        g = np.atleast_2d(np.asarray(g, dtype=complex))
        hess = real_rep(g.conj().T @ g)
        if hpp is not None:
            s = np.atleast_2d(np.asarray(hpp, dtype=complex))
            s = 0.5 * (s + s.T)
            x, y = s.real, s.imag
            hess = hess - np.block([[x, -y], [-y, -x]])
        return cls(hess)


@dataclass(frozen=True)
class Decomposition:
    """Phi = 1/2 |G z|^2 - Re h(z), h(z) = 1/2 z.hpp.z, H = G^{-T} hpp G^{-1}."""

    g: np.ndarray
    hpp: np.ndarray
    big_h: np.ndarray


def _mult_i(n: int) -> np.ndarray:
    return real_rep(1j * np.eye(n))


def hermitian_part(w: RealQForm) -> RealQForm:
    j = _mult_i(w.n)
    return RealQForm(0.5 * (w.hess + j.T @ w.hess @ j))


def pluriharmonic_part(w: RealQForm) -> RealQForm:
    return RealQForm(w.hess - hermitian_part(w).hess)


def hermitian_matrix(w: RealQForm) -> np.ndarray:
    """P with Phi_herm(z) = 1/2 z^* P z, so P = G^* G."""
    hh = hermitian_part(w).hess
    n = w.n
    p = hh[:n, :n] + 1j * hh[n:, :n]
    return 0.5 * (p + p.conj().T)


def decompose(w: Weight) -> Decomposition:
    n = w.n
    p = hermitian_matrix(w)
    try:
        g = numkit.herm_sqrt(p)
    except InputError as exc:
        raise HypothesisViolation(f"Hermitian part of the weight is not definite: {exc}")
    hp = pluriharmonic_part(w).hess
    hpp = -hp[:n, :n] + 1j * hp[:n, n:]
    hpp = 0.5 * (hpp + hpp.T)
    ginv = np.linalg.inv(g)
    big_h = ginv.T @ hpp @ ginv
    return Decomposition(g, hpp, 0.5 * (big_h + big_h.T))


def delta_ceiling(w: Weight) -> float | Infinity:
    """-1/2 log ||H||, or INF when the pluriharmonic part vanishes."""
    nrm = float(np.linalg.norm(decompose(w).big_h, 2))
    if nrm <= 1e-15:
        return INF
    return -0.5 * np.log(nrm)


@dataclass(frozen=True, eq=False)
class ShiftedWeight:
    form: RealQForm
    delta: float
    convex: bool


def shifted_weight(w: Weight, delta: float) -> ShiftedWeight:
    """Phi + ((e^{-2 delta} - 1)/2) |G z|^2."""
    rp = real_rep(hermitian_matrix(w))
    hess = w.hess + np.expm1(-2.0 * delta) * rp
    form = RealQForm(hess)
    convex = form.definiteness(1e-12) is Definiteness.POSITIVE_DEFINITE
    return ShiftedWeight(form, float(delta), convex)


def takagi_normal_form(w: Weight) -> tuple[np.ndarray, np.ndarray]:
    """(S, sigma) with Phi(S y) = 1/2 (|y|^2 - Re y.diag(sigma).y), sigma in [0, 1)."""
    dec = decompose(w)
    u, sigma = numkit.takagi(dec.big_h)
    return np.linalg.inv(dec.g) @ u.conj(), sigma


def theta_form(nf: "NormalForm") -> RealQForm:
    """Theta(z) = 2 Re((Mz).d_z Phi(z)) = d/dt Phi(e^{tM} z) at t = 0."""
    r = real_rep(nf.m)
    h = nf.weight.hess
    return RealQForm(r.T @ h + h @ r)


def _require_psd_theta(nf: "NormalForm") -> RealQForm:
    th = theta_form(nf)
    if np.any(th.hess) and th.definiteness() is Definiteness.INDEFINITE:
        raise HypothesisViolation("Theta is indefinite (the weak ellipticity condition fails)")
    return th


def index_I(nf: "NormalForm", z: np.ndarray, rel_tol: float = 1e-10) -> int | Infinity:
    """Smallest k with Theta(M^k z) != 0, INF if none for k <= 2n-2."""
    z = np.asarray(z, dtype=complex)
    if not np.any(z):
        raise InputError("index_I needs a nonzero vector")
    th = _require_psd_theta(nf)
    scale = th.norm()
    w = z.copy()
    for k in range(2 * nf.n - 1):
        if th(w) > rel_tol * scale * np.vdot(w, w).real:
            return k
        w = nf.m @ w
    return INF


def _theta_root(th: RealQForm) -> np.ndarray:
    ev, vec = np.linalg.eigh(th.hess)
    return (vec * np.sqrt(np.clip(ev, 0.0, None))).T


def kernel_chain(nf: "NormalForm", rel_tol: float = numkit.DEFAULT_RANK_TOL):
    """Bases of V_k = {z : Theta(M^j z) = 0, j <= k} for k = 0..2n-2 (real coordinates)."""
    th = _require_psd_theta(nf)
    root = _theta_root(th)
    rm = real_rep(nf.m)
    rows = []
    power = np.eye(2 * nf.n)
    bases = []
    for _ in range(2 * nf.n - 1):
        blk = root @ power
        nrm = np.linalg.norm(blk, 2)
        rows.append(blk / nrm if nrm > 0 else blk)
        bases.append(numkit.null_space(np.vstack(rows), rel_tol))
        power = rm @ power
    return bases


def global_index(nf: "NormalForm") -> tuple[int | Infinity, list[int]]:
    """(I0, dims of V_0, V_1, ...) where I0 is the first k with V_k = {0}."""
    bases = kernel_chain(nf)
    dims = [b.shape[1] for b in bases]
    for k, d in enumerate(dims):
        if d == 0:
            return k, dims[: k + 1]
    return INF, dims


def escape_factor(order_index: int) -> float:
    """binom(2I, I) / (2I+1)!."""
    return comb(2 * order_index, order_index) / factorial(2 * order_index + 1)


def escape_coefficient(nf: "NormalForm", z: np.ndarray) -> float:
    """Leading coefficient c in Phi(e^{tM}z) - Phi(z) ~ c t^{2I+1}."""
    idx = index_I(nf, z)
    if idx is INF:
        raise HypothesisViolation("index is infinite; Phi(e^{tM}z) is constant in t")
    w = np.linalg.matrix_power(nf.m, idx) @ np.asarray(z, dtype=complex)
    return escape_factor(idx) * float(theta_form(nf)(w))


def k1_coefficient(nf: "NormalForm") -> float:
    """binom(2I0,I0)/(2I0+1)! * min Theta(M^{I0} z)/|Gz|^2 over V_{I0-1}."""
    i0, _ = global_index(nf)
    if i0 is INF:
        raise HypothesisViolation("global index is infinite")
    n = nf.n
    basis = np.eye(2 * n) if i0 == 0 else kernel_chain(nf)[i0 - 1]
    th = theta_form(nf).compose(np.linalg.matrix_power(nf.m, i0))
    rp = real_rep(hermitian_matrix(nf.weight))
    a = basis.T @ th.hess @ basis
    b = 2.0 * basis.T @ rp @ basis
    lam = sla.eigh(numkit.symmetrize(a), numkit.symmetrize(b), eigvals_only=True)
    return escape_factor(i0) * float(lam[0])


def rotated_oscillator_weight(theta: float) -> Weight:
    """Phi = 1/2 (|z|^2 - sin(theta) Re z^2), n = 1."""
    return Weight.from_parts(np.eye(1), np.array([[np.sin(theta)]]))


__all__ = [
    "RealQForm", "Weight", "Decomposition", "decompose", "delta_ceiling",
    "shifted_weight", "takagi_normal_form", "theta_form", "index_I", "global_index",
    "kernel_chain", "escape_coefficient", "k1_coefficient", "hermitian_part",
    "pluriharmonic_part", "hermitian_matrix", "rotated_oscillator_weight",
]
