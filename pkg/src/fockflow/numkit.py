"""Dense complex linear-algebra kernels.

Everything here is a pure function of its arguments.  Matrices are plain
numpy arrays; ``complex`` inputs are accepted wherever a real matrix would do.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import InputError, NumericalFailure

DEFAULT_CLUSTER_TOL = 1e-8
CLUSTER_FLOOR = 1e-12
DEFAULT_PSD_TOL = 1e-10
DEFAULT_RANK_TOL = 1e-10


class Infinity(enum.Enum):
    """Distinguished infinite values (never encoded as float sentinels)."""

    POSITIVE = "inf"
    NEGATIVE = "-inf"

    def __str__(self) -> str:
        return self.value


INF = Infinity.POSITIVE
NEG_INF = Infinity.NEGATIVE


def as_float(x) -> float:
    """Convert an extended real to a float (for plotting or CSV output)."""
    if x is INF:
        return float("inf")
    if x is NEG_INF:
        return float("-inf")
    return float(x)


class Definiteness(enum.Enum):
    POSITIVE_DEFINITE = "PD"
    POSITIVE_SEMIDEFINITE = "PSD"
    INDEFINITE = "indefinite"


def _square(m: np.ndarray, what: str = "matrix") -> np.ndarray:
    m = np.asarray(m)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise InputError(f"{what} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InputError(f"{what} has non-finite entries")
    return m


def expm(m: np.ndarray, tau: complex | np.ndarray = 1.0) -> np.ndarray:
    """Return exp(tau * m).

    Uses scipy's scaling-and-squaring with Pade approximants of order up to 13
    (Al-Mohy and Higham).  No eigendecomposition is involved, so defective
    matrices are handled exactly as well as diagonalizable ones.

    ``tau`` may be an array of shape ``(k,)``; the result then has shape
    ``(k, n, n)``.  Overflow raises ``NumericalFailure``.
    """
    m = _square(m)
    tau_arr = np.asarray(tau)
    if tau_arr.ndim == 0:
        arg = tau_arr * m
    else:
        arg = tau_arr.reshape(-1, 1, 1) * m
    with np.errstate(over="ignore", invalid="ignore"):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            out = sla.expm(arg)
    if not np.all(np.isfinite(out)):
        raise NumericalFailure("matrix exponential overflowed; |tau|*|m| too large")
    return out


def real_rep(a: np.ndarray) -> np.ndarray:
    """Real 2n x 2n matrix of the complex-linear map z -> a z on (Re z, Im z).

    Works on stacks of matrices (leading batch dimensions).
    """
    a = np.asarray(a, dtype=complex)
    re, im = a.real, a.imag
    top = np.concatenate([re, -im], axis=-1)
    bot = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bot], axis=-2)


def to_real(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.concatenate([z.real, z.imag], axis=-1)


def to_complex(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = v.shape[-1] // 2
    return v[..., :n] + 1j * v[..., n:]


def symmetrize(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s)
    return 0.5 * (s + np.swapaxes(s, -1, -2))


def psd_margin(s: np.ndarray) -> np.ndarray:
    """lambda_min(s) / ||s||_2, with 0 for the zero matrix.  Batched."""
    ev = np.linalg.eigvalsh(symmetrize(s))
    scale = np.max(np.abs(ev), axis=-1)
    lo = ev[..., 0]
    safe = np.where(scale > 0, scale, 1.0)
    return np.where(scale > 0, lo / safe, 0.0)


def definiteness_from_margin(margin: float, rel_tol: float) -> Definiteness:
    if margin > rel_tol:
        return Definiteness.POSITIVE_DEFINITE
    if margin < -rel_tol:
        return Definiteness.INDEFINITE
    return Definiteness.POSITIVE_SEMIDEFINITE


def psd_classify(s: np.ndarray, rel_tol: float = DEFAULT_PSD_TOL) -> Definiteness:
    """Classify a real symmetric matrix by its smallest eigenvalue.

    Ties within +-rel_tol*||s|| count as semidefinite.
    """
    if rel_tol <= 0:
        raise InputError("rel_tol must be positive")
    s = _square(np.asarray(s, dtype=float), "symmetric matrix")
    return definiteness_from_margin(float(psd_margin(s)), rel_tol)


def herm_sqrt(p: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Positive definite Hermitian square root of a Hermitian PD matrix."""
    p = _square(np.asarray(p, dtype=complex))
    scale = max(np.linalg.norm(p, 2), np.finfo(float).tiny)
    if np.linalg.norm(p - p.conj().T, 2) > 1e-10 * scale:
        raise InputError("matrix is not Hermitian")
    w, v = np.linalg.eigh(0.5 * (p + p.conj().T))
    if w[0] <= tol * scale:
        raise InputError(f"matrix is not positive definite: eigenvalue {w[0]:.3e}")
    r = (v * np.sqrt(w)) @ v.conj().T
    return 0.5 * (r + r.conj().T)


def takagi(sym: np.ndarray, tol: float = 1e-13) -> tuple[np.ndarray, np.ndarray]:
    """Takagi factorization sym = U diag(sigma) U^T, sigma descending.

    Solved through the real symmetric eigenproblem of
    [[Re S, Im S], [Im S, -Re S]], whose positive eigenvalues are the
    singular values of S with eigenvectors (x, y) such that u = x + i y.
    """
    s = _square(np.asarray(sym, dtype=complex))
    n = s.shape[0]
    scale = np.linalg.norm(s, 2)
    if np.linalg.norm(s - s.T, 2) > 1e-12 * max(scale, 1.0):
        raise InputError("takagi requires a complex symmetric matrix")
    s = 0.5 * (s + s.T)
    big = np.block([[s.real, s.imag], [s.imag, -s.real]])
    w, v = np.linalg.eigh(big)
    order = np.argsort(w)[::-1]
    w, v = w[order], v[:, order]
    cutoff = tol * max(scale, np.finfo(float).tiny)
    k = int(np.sum(w[:n] > cutoff))
    u_pos = v[:n, :k] + 1j * v[n:, :k]
    if k < n:
        # complete with an orthonormal basis of the complement
        _, _, vh = np.linalg.svd(u_pos.conj().T, full_matrices=True) if k else (None, None, np.eye(n))
        comp = vh[k:].conj().T
        u = np.concatenate([u_pos, comp], axis=1)
    else:
        u = u_pos
    sigma = np.concatenate([w[:k], np.zeros(n - k)])
    return u, sigma


def null_space(a: np.ndarray, rel_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of ker a, rank decided against rel_tol*sigma_max."""
    a = np.atleast_2d(np.asarray(a))
    ncols = a.shape[1]
    if a.size == 0:
        return np.eye(ncols, dtype=a.dtype)
    _, sv, vh = np.linalg.svd(a, full_matrices=True)
    smax = sv[0] if sv.size else 0.0
    rank = int(np.sum(sv > rel_tol * smax)) if smax > 0 else 0
    return vh[rank:].conj().T


def numerical_rank(a: np.ndarray, threshold: float) -> int:
    sv = np.linalg.svd(np.atleast_2d(a), compute_uv=False)
    return int(np.sum(sv > threshold))


@dataclass(frozen=True)
class EigenCluster:
    value: complex
    multiplicity: int
    max_block_size: int
    block_sizes: tuple[int, ...]


@dataclass(frozen=True)
class JordanProbe:
    eigenvalues: tuple[EigenCluster, ...]
    tolerance: float
    warnings: tuple[str, ...] = field(default=())

    def repeated(self) -> list[tuple[complex, int]]:
        """Eigenvalues repeated by multiplicity, each paired with r~ (distance to block end)."""
        out = []
        for c in self.eigenvalues:
            for size in c.block_sizes:
                out.extend((c.value, size - pos) for pos in range(1, size + 1))
        return out


def _nullities(m: np.ndarray, lam: complex, kmax: int, rank_tol: float) -> list[int]:
    n = m.shape[0]
    shifted = m - lam * np.eye(n)
    base = max(np.linalg.norm(m, 2), abs(lam), CLUSTER_FLOOR)
    power = np.eye(n, dtype=complex)
    out = []
    for k in range(1, kmax + 1):
        power = power @ shifted
        out.append(n - numerical_rank(power, rank_tol * base**k))
    return out


def _blocks_from_nullities(nul: list[int]) -> tuple[int, ...]:
    # number of blocks of size >= k is nul[k-1] - nul[k-2]
    d = [0] + nul
    at_least = [d[k] - d[k - 1] for k in range(1, len(d))]
    sizes = []
    for k, cnt in enumerate(at_least, start=1):
        nxt = at_least[k] if k < len(at_least) else 0
        sizes.extend([k] * max(cnt - nxt, 0))
    return tuple(sorted(sizes, reverse=True))


def _cluster_ok(m, lam, mult, rank_tol) -> tuple[bool, tuple[int, ...]]:
    nul = _nullities(m, lam, mult, rank_tol)
    blocks = _blocks_from_nullities(nul)
    return (nul[0] >= 1 and nul[-1] == mult and sum(blocks) == mult), blocks


def jordan_probe(m: np.ndarray, tol: float = DEFAULT_CLUSTER_TOL,
                 rank_tol: float = DEFAULT_RANK_TOL) -> JordanProbe:
    """Cluster eigenvalues and detect Jordan block sizes.

    Eigenvalues closer than tol*||m|| (floor 1e-12) are merged.  Because a
    Jordan block of size s perturbed by rounding splits by roughly eps^(1/s),
    neighbouring clusters within sqrt(tol)*||m|| are additionally merged when
    the rank staircase of (m - mean)^k confirms a single defective eigenvalue.
    Block sizes come from the nullities of (m - lambda)^k.
    """
    if tol <= 0:
        raise InputError("tol must be positive")
    m = _square(np.asarray(m, dtype=complex))
    n = m.shape[0]
    norm = np.linalg.norm(m, 2)
    radius = max(tol * norm, CLUSTER_FLOOR)
    coarse = max(np.sqrt(tol) * norm, radius)
    ev = np.linalg.eigvals(m)

    # single-linkage clustering at the fine radius
    groups: list[list[complex]] = []
    for lam in sorted(ev, key=lambda c: (c.real, c.imag)):
        hits = [g for g in groups if min(abs(lam - x) for x in g) <= radius]
        merged = [lam]
        for g in hits:
            merged.extend(g)
            groups.remove(g)
        groups.append(merged)

    # merge rounding-split defective clusters
    changed = True
    while changed:
        changed = False
        for i in range(len(groups)):
            for j in range(i + 1, len(groups)):
                gi, gj = groups[i], groups[j]
                if abs(np.mean(gi) - np.mean(gj)) > coarse:
                    continue
                union = gi + gj
                ok, _ = _cluster_ok(m, np.mean(union), len(union), rank_tol)
                if ok:
                    groups[i] = union
                    del groups[j]
                    changed = True
                    break
            if changed:
                break

    notes = []
    clusters = []
    for g in groups:
        lam = complex(np.mean(g))
        ok, blocks = _cluster_ok(m, lam, len(g), rank_tol)
        if not ok:
            notes.append(f"rank staircase inconsistent at {lam:.6g}; assuming semisimple")
            blocks = (1,) * len(g)
        clusters.append(EigenCluster(lam, len(g), max(blocks), blocks))
    clusters.sort(key=lambda c: (c.value.real, c.value.imag))
    for i in range(len(clusters)):
        for j in range(i + 1, len(clusters)):
            d = abs(clusters[i].value - clusters[j].value)
            if radius < d <= 10 * radius:
                notes.append(f"eigenvalues {clusters[i].value:.6g} and "
                             f"{clusters[j].value:.6g} are close to the cluster tolerance")
    return JordanProbe(tuple(clusters), radius, tuple(notes))
