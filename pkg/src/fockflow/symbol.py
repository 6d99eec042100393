"""Complex quadratic symbols q(x, xi) on R^{2n} and their Hamilton maps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from . import numkit
from .errors import HypothesisViolation, InputError
from .numkit import INF, Infinity


def _sym_block(a, name: str, n: int) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.shape != (n, n):
        raise InputError(f"{name} must have shape ({n}, {n}), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError(f"{name} has non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class QuadraticSymbol:
    """q(x, xi) = x.qxx.x + 2 x.qxxi.xi + xi.qxixi.xi (no conjugation)."""

    qxx: np.ndarray
    qxxi: np.ndarray
    qxixi: np.ndarray

    def __post_init__(self):
        n = np.asarray(self.qxx).shape[0]
        qxx = _sym_block(self.qxx, "qxx", n)
        qxxi = _sym_block(self.qxxi, "qxxi", n)
        qxixi = _sym_block(self.qxixi, "qxixi", n)
        for name, blk in (("qxx", qxx), ("qxixi", qxixi)):
            if np.abs(blk - blk.T).max(initial=0.0) > 1e-12 * max(1.0, np.abs(blk).max()):
                raise InputError(f"{name} is not symmetric")
        object.__setattr__(self, "qxx", 0.5 * (qxx + qxx.T))
        object.__setattr__(self, "qxxi", qxxi)
        object.__setattr__(self, "qxixi", 0.5 * (qxixi + qxixi.T))

    @property
    def n(self) -> int:
        return self.qxx.shape[0]

    def matrix(self) -> np.ndarray:
        """Symmetric 2n x 2n complex Q with q(v) = v.Q.v."""
        return np.block([[self.qxx, self.qxxi], [self.qxxi.T, self.qxixi]])

    @classmethod
    def from_matrix(cls, q: np.ndarray) -> "QuadraticSymbol":
        q = np.asarray(q, dtype=complex)
        q = 0.5 * (q + q.T)
        n = q.shape[0] // 2
        return cls(q[:n, :n], q[:n, n:], q[n:, n:])

    def __call__(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v)
        return np.einsum("...i,ij,...j->...", v, self.matrix(), v)

    def real_part(self) -> "QuadraticSymbol":
        return QuadraticSymbol(self.qxx.real, self.qxxi.real, self.qxixi.real)

    def imag_part(self) -> "QuadraticSymbol":
        return QuadraticSymbol(self.qxx.imag, self.qxxi.imag, self.qxixi.imag)

    def scale(self) -> float:
        return float(np.linalg.norm(self.matrix(), 2))

    def __add__(self, other: "QuadraticSymbol") -> "QuadraticSymbol":
        return QuadraticSymbol.from_matrix(self.matrix() + other.matrix())

    def __mul__(self, c: complex) -> "QuadraticSymbol":
        return QuadraticSymbol.from_matrix(c * self.matrix())

    __rmul__ = __mul__

    def compose(self, k: np.ndarray) -> "QuadraticSymbol":
        """The symbol v -> q(k v) for a linear map k of R^{2n} (or C^{2n})."""
        return QuadraticSymbol.from_matrix(k.T @ self.matrix() @ k)

    def gradient(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(d_x q, d_xi q) at v."""
        n = self.n
        x, xi = v[:n], v[n:]
        return (2 * (self.qxx @ x + self.qxxi @ xi),
                2 * (self.qxxi.T @ x + self.qxixi @ xi))


def fundamental_matrix(q: QuadraticSymbol) -> np.ndarray:
    """Hamilton map F with sigma(v, F v) = q(v).

    F = [[qxxi^T, qxixi], [-qxx, -qxxi]].
    """
    return np.block([[q.qxxi.T, q.qxixi], [-q.qxx, -q.qxxi]])


def symbol_from_fundamental(f: np.ndarray) -> QuadraticSymbol:
    f = np.asarray(f, dtype=complex)
    n = f.shape[0] // 2
    return QuadraticSymbol(-f[n:, :n], -f[n:, n:], f[:n, n:])


def symplectic_matrix(n: int) -> np.ndarray:
    """J with sigma(v, w) = v.J.w."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def symplectic(v: np.ndarray, w: np.ndarray) -> complex:
    """sigma((x, xi), (y, eta)) = xi.y - eta.x, bilinear."""
    v, w = np.asarray(v), np.asarray(w)
    if v.shape != w.shape or v.shape[-1] % 2:
        raise InputError("symplectic form needs two vectors of equal even length")
    n = v.shape[-1] // 2
    return np.sum(v[..., n:] * w[..., :n], axis=-1) - np.sum(w[..., n:] * v[..., :n], axis=-1)


def poisson_bracket(q1: QuadraticSymbol, q2: QuadraticSymbol) -> QuadraticSymbol:
    """{q1, q2} = d_xi q1 . d_x q2 - d_xi q2 . d_x q1, via F({q1,q2}) = -2[F1, F2]."""
    if q1.n != q2.n:
        raise InputError("symbols have different dimensions")
    f1, f2 = fundamental_matrix(q1), fundamental_matrix(q2)
    return symbol_from_fundamental(-2.0 * (f1 @ f2 - f2 @ f1))


def poisson_bracket_at(q1: QuadraticSymbol, q2: QuadraticSymbol, v: np.ndarray) -> complex:
    """Pointwise bracket from the gradients (independent of the matrix route)."""
    gx1, gxi1 = q1.gradient(v)
    gx2, gxi2 = q2.gradient(v)
    return complex(gxi1 @ gx2 - gxi2 @ gx1)


@dataclass(frozen=True)
class SpectrumFlag:
    """Outcome of the heuristic search for a real zero with nonvanishing bracket.

    ``raised`` means a witness was found, so the spectrum is the whole plane.
    ``raised=False`` is not a proof of the contrary.
    """

    raised: bool
    witness: np.ndarray | None
    q_value: float | None
    bracket: float | None
    restarts: int
    note: str


def spectrum_is_C_flag(q: QuadraticSymbol, restarts: int = 64, seed: int = 0,
                       zero_tol: float = 1e-8, bracket_tol: float = 1e-6) -> SpectrumFlag:
    if restarts < 1:
        raise InputError("restarts must be >= 1")
    qm = q.matrix()
    qre, qim = qm.real, qm.imag
    bracket = poisson_bracket(q.imag_part(), q.real_part())
    dim = 2 * q.n

    def resid(v):
        return np.array([v @ qre @ v, v @ qim @ v, v @ v - 1.0])

    def jac(v):
        return np.vstack([2 * qre @ v, 2 * qim @ v, 2 * v])

    rng = np.random.default_rng(seed)
    starts = rng.normal(size=(restarts, dim))
    candidates = []
    for idx, s in enumerate(starts):
        sol = least_squares(resid, s / np.linalg.norm(s), jac=jac, method="trf",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400)
        v = sol.x / np.linalg.norm(sol.x)
        qv = abs(complex(q(v)))
        bv = abs(complex(bracket(v)))
        candidates.append((qv, bv, idx, v))
    zeros = [c for c in candidates if c[0] <= zero_tol]
    if zeros:
        qv, bv, _, v = max(zeros, key=lambda c: (c[1], -c[2]))
        if bv >= bracket_tol:
            return SpectrumFlag(True, v, qv, bv, restarts,
                                "real zero with nonvanishing bracket found; spectrum is C")
    best = min(candidates, key=lambda c: (c[0], -c[1], c[2]))
    return SpectrumFlag(False, None, best[0], best[1], restarts,
                        "no witness found; this does not prove the spectrum is discrete")


def index_J(q: QuadraticSymbol, v: np.ndarray, rel_tol: float = 1e-10) -> int | Infinity:
    """Smallest k with Re F (Im F)^k v != 0, or INF if none for k <= 2n-1."""
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        raise InputError("index_J needs a nonzero vector")
    re_q = q.real_part().matrix().real
    if numkit.psd_classify(re_q, 1e-10) is numkit.Definiteness.INDEFINITE and np.any(re_q):
        raise HypothesisViolation("Re q is not positive semidefinite")
    f = fundamental_matrix(q)
    re_f, im_f = f.real, f.imag
    fnorm = np.linalg.norm(f, 2)
    vnorm = np.linalg.norm(v)
    w = v.copy()
    for k in range(2 * q.n):
        if np.linalg.norm(re_f @ w) > rel_tol * fnorm ** (k + 1) * vnorm:
            return k
        w = im_f @ w
    return INF


def harmonic_oscillator(n: int = 1) -> QuadraticSymbol:
    """q = (|x|^2 + |xi|^2) / 2."""
    return QuadraticSymbol(0.5 * np.eye(n), np.zeros((n, n)), 0.5 * np.eye(n))


def rotated_oscillator(theta: float, scale: float = 0.5) -> QuadraticSymbol:
    """q = scale * (xi^2 + e^{2 i theta} x^2), n = 1."""
    return QuadraticSymbol(np.array([[scale * np.exp(2j * theta)]]), np.zeros((1, 1)),
                           np.array([[scale + 0j]]))


def fokker_planck(a: float, b: float) -> QuadraticSymbol:
    """Two-dimensional model: b/2 (x1^2+xi1^2) + 1/2 (x2^2+xi2^2) + i a (x1 xi2 - x2 xi1)."""
    qxx = np.diag([b / 2, 0.5]).astype(complex)
    qxixi = qxx.copy()
    # 2 x.qxxi.xi = i a (x1 xi2 - x2 xi1)
    qxxi = np.array([[0, 0.5j * a], [-0.5j * a, 0]])
    return QuadraticSymbol(qxx, qxxi, qxixi)
