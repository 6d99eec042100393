"""Brute-force checks on spaces of polynomials.

Inner products of monomials in the weighted space are Gaussian moments:
with v = (Re z, Im z) distributed as N(0, (2 hess)^{-1}),

    <z^a, z^b> = (int e^{-2 Phi}) * E[z^a conj(z)^b].

The moments are computed with the Isserlis recursion on the 2n complex
linear forms (z, conj z).  Lebesgue measure on C^n is the product of the
real-plane measures.  Everything built here only ever restricts the true
operators to finite-dimensional invariant subspaces, so every norm is a
lower bound for the corresponding infinite-dimensional one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from . import numkit
from .errors import InputError
from .reduction import NormalForm
from .weight import Weight, decompose, hermitian_matrix

MAX_DEGREE = 12


def multi_indices(n: int, max_degree: int) -> list[tuple[int, ...]]:
    """All alpha in N^n with |alpha| <= max_degree, graded then lexicographic."""
    out = []
    for deg in range(max_degree + 1):
        block = []
        for combo in itertools.combinations_with_replacement(range(n), deg):
            a = [0] * n
            for j in combo:
                a[j] += 1
            block.append(tuple(a))
        out.extend(sorted(block, reverse=True))
    return out


def _guard(max_degree: int):
    if max_degree < 0 or max_degree > MAX_DEGREE:
        raise InputError(f"max_degree must be in [0, {MAX_DEGREE}]")


def _moment_function(cov: np.ndarray):
    """E[w^gamma] for jointly Gaussian centred complex forms with E[w_a w_b] = cov[a, b]."""
    size = cov.shape[0]

    @lru_cache(maxsize=None)
    def moment(gamma: tuple[int, ...]) -> complex:
        total = sum(gamma)
        if total == 0:
            return 1.0 + 0j
        if total % 2:
            return 0j
        a = next(i for i, g in enumerate(gamma) if g)
        rest = list(gamma)
        rest[a] -= 1
        acc = 0j
        for b in range(size):
            if rest[b]:
                mult = rest[b]
                rest[b] -= 1
                acc += mult * cov[a, b] * moment(tuple(rest))
                rest[b] += 1
        return acc

    return moment


def gaussian_mass(w: Weight) -> float:
    """int e^{-2 Phi} dL = pi^n / sqrt(det hess)."""
    return float(np.pi**w.n / np.sqrt(np.linalg.det(w.hess)))


@dataclass(frozen=True, eq=False)
class GramTable:
    """entries[i, j] = <z^{alpha_i}, z^{alpha_j}> = int z^{alpha_i} conj(z^{alpha_j}) e^{-2 Phi}."""

    weight: Weight
    max_degree: int
    indices: tuple[tuple[int, ...], ...]
    entries: np.ndarray
    normalization: str = "Lebesgue measure on C^n = product of real planes"

    def norm_matrix(self) -> np.ndarray:
        """W with ||sum c_a z^a||^2 = c^* W c."""
        return self.entries.T

    def degree_mask(self, lo: int, hi: int) -> np.ndarray:
        deg = np.array([sum(a) for a in self.indices])
        return (deg >= lo) & (deg <= hi)


def gram(w: Weight, max_degree: int) -> GramTable:
    _guard(max_degree)
    n = w.n
    cov_real = 0.5 * np.linalg.inv(w.hess)
    eye = np.eye(n)
    forms = np.block([[eye, 1j * eye], [eye, -1j * eye]])  # (z, conj z) = forms @ v
    cov = forms @ cov_real @ forms.T
    moment = _moment_function(cov)
    idx = multi_indices(n, max_degree)
    size = len(idx)
    ent = np.empty((size, size), dtype=complex)
    for i, a in enumerate(idx):
        for j in range(i, size):
            val = moment(a + idx[j])
            ent[i, j] = val
            ent[j, i] = np.conj(val)
    ent *= gaussian_mass(w)
    return GramTable(w, max_degree, tuple(idx), ent)


def gram_monte_carlo(w: Weight, max_degree: int, samples: int = 1_000_000, seed: int = 0
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Seeded Monte Carlo estimate of the Gram entries and their standard errors."""
    _guard(max_degree)
    n = w.n
    rng = np.random.default_rng(seed)
    cov_real = 0.5 * np.linalg.inv(w.hess)
    v = rng.multivariate_normal(np.zeros(2 * n), cov_real, size=samples)
    z = v[:, :n] + 1j * v[:, n:]
    idx = multi_indices(n, max_degree)
    mons = np.stack([np.prod(z ** np.array(a), axis=1) for a in idx], axis=1)
    prod = mons[:, :, None] * mons.conj()[:, None, :]
    mass = gaussian_mass(w)
    mean = prod.mean(axis=0) * mass
    err = np.sqrt(prod.real.var(axis=0) + prod.imag.var(axis=0)) / np.sqrt(samples) * mass
    return mean, err


def substitution_matrix(a: np.ndarray, indices) -> np.ndarray:
    """T with (u o a)(z) = sum_b (T c)_b z^b for u = sum_alpha c_alpha z^alpha."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    n = a.shape[0]
    pos = {al: k for k, al in enumerate(indices)}
    cache: dict[tuple[int, ...], dict[tuple[int, ...], complex]] = {(0,) * n: {(0,) * n: 1.0 + 0j}}

    def poly(alpha):
        if alpha in cache:
            return cache[alpha]
        j = next(i for i, x in enumerate(alpha) if x)
        lower = list(alpha)
        lower[j] -= 1
        base = poly(tuple(lower))
        out: dict[tuple[int, ...], complex] = {}
        for mono, coef in base.items():
            for k in range(n):
                if a[j, k] != 0:
                    key = list(mono)
                    key[k] += 1
                    key = tuple(key)
                    out[key] = out.get(key, 0j) + coef * a[j, k]
        cache[alpha] = out
        return out

    t = np.zeros((len(indices), len(indices)), dtype=complex)
    for col, alpha in enumerate(indices):
        for mono, coef in poly(alpha).items():
            t[pos[mono], col] = coef
    return t


def _whitened_operator(table: GramTable, op: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """L^* S L^{-*} where W = L L^* on the masked span (after diagonal scaling of W)."""
    w = table.norm_matrix()[np.ix_(mask, mask)]
    d = 1.0 / np.sqrt(np.real(np.diag(w)))
    ws = d[:, None] * w * d[None, :]
    chol = np.linalg.cholesky(0.5 * (ws + ws.conj().T))
    sub = op[np.ix_(mask, mask)]
    scaled = (1.0 / d)[:, None] * sub * d[None, :]
    right = sla.solve_triangular(chol.conj(), scaled.T, lower=True).T
    return chol.conj().T @ right


def _operator_norm(table: GramTable, op: np.ndarray, mask: np.ndarray) -> float:
    """Norm of op (acting on coefficient vectors) restricted to the masked span."""
    return float(np.linalg.norm(_whitened_operator(table, op, mask), 2))


def _flow_operator(nf: NormalForm, tau: complex, table: GramTable) -> np.ndarray:
    return substitution_matrix(numkit.expm(nf.m, tau), table.indices)


def truncated_norm(nf: NormalForm, tau: complex, max_degree: int,
                   table: GramTable | None = None) -> float:
    """Norm of u -> u(e^{tau M} .) on polynomials of degree <= max_degree."""
    _guard(max_degree)
    if table is None or table.max_degree < max_degree:
        table = gram(nf.weight, max_degree)
    op = _flow_operator(nf, tau, table)
    return _operator_norm(table, op, table.degree_mask(0, max_degree))


def truncated_tail_norm(nf: NormalForm, tau: complex, n_trunc: int, max_degree: int,
                        table: GramTable | None = None) -> float:
    """Same, restricted to span{z^alpha : n_trunc < |alpha| <= max_degree}."""
    _guard(max_degree)
    if max_degree <= n_trunc:
        raise InputError("max_degree must exceed N")
    if table is None or table.max_degree < max_degree:
        table = gram(nf.weight, max_degree)
    op = _flow_operator(nf, tau, table)
    return _operator_norm(table, op, table.degree_mask(n_trunc + 1, max_degree))


def pi_norm(w: Weight, n_trunc: int, max_degree: int, table: GramTable | None = None) -> float:
    """Norm of the Taylor truncation at degree n_trunc on polynomials of degree <= max_degree."""
    _guard(max_degree)
    if max_degree < n_trunc:
        raise InputError("max_degree must be at least N")
    if table is None or table.max_degree < max_degree:
        table = gram(w, max_degree)
    mask = table.degree_mask(0, max_degree)
    keep = table.degree_mask(0, n_trunc).astype(complex)
    return _operator_norm(table, np.diag(keep), mask)


def reproducing_kernel_check(w: Weight, point: np.ndarray, max_degree: int,
                             table: GramTable | None = None) -> tuple[float, float]:
    """(partial kernel sum on the diagonal, exact value pi^{-n} |det G|^2 e^{2 Phi(w)}).

    The partial sum increases to the exact value; for |G w|^2 well below
    max_degree the gap is at the level of the tail of an exponential series.
    """
    _guard(max_degree)
    if table is None or table.max_degree < max_degree:
        table = gram(w, max_degree)
    point = np.atleast_1d(np.asarray(point, dtype=complex))
    mons = np.array([np.prod(point ** np.array(a)) for a in table.indices])
    mask = table.degree_mask(0, max_degree)
    mons = mons[mask]
    ent = table.entries[np.ix_(mask, mask)]
    partial = float(np.real(mons.conj() @ np.linalg.solve(ent, mons)))
    det = float(np.real(np.linalg.det(hermitian_matrix(w))))
    target = float(np.pi ** (-w.n) * det * np.exp(2.0 * w(point)))
    return partial, target


def change_of_vars_identity_check(nf: NormalForm, tau: complex, max_degree: int,
                                  samples: int = 20, seed: int = 0) -> float:
    """max relative error of ||u(e^{tau M}.)||_Phi = e^{-Re tau tr M} ||u||_{Phi(e^{-tau M}.)}."""
    _guard(max_degree)
    t1 = gram(nf.weight, max_degree)
    pulled = Weight(nf.weight.compose(numkit.expm(nf.m, -tau)).hess)
    t2 = gram(pulled, max_degree)
    op = _flow_operator(nf, tau, t1)
    w1, w2 = t1.norm_matrix(), t2.norm_matrix()
    factor = np.exp(-(tau * np.trace(nf.m)).real)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        c = rng.normal(size=len(t1.indices)) + 1j * rng.normal(size=len(t1.indices))
        tc = op @ c
        lhs = np.sqrt(np.real(tc.conj() @ w1 @ tc))
        rhs = factor * np.sqrt(np.real(c.conj() @ w2 @ c))
        worst = max(worst, abs(lhs - rhs) / rhs)
    return float(worst)


def singular_values(nf: NormalForm, tau: complex, max_degree: int,
                    table: GramTable | None = None) -> np.ndarray:
    """Singular values of the truncated flow operator in the weighted inner product."""
    if table is None or table.max_degree < max_degree:
        table = gram(nf.weight, max_degree)
    mask = table.degree_mask(0, max_degree)
    core = _whitened_operator(table, _flow_operator(nf, tau, table), mask)
    return np.linalg.svd(core, compute_uv=False)


def orthonormal_basis_gram(w: Weight, max_degree: int) -> np.ndarray:
    """Gram matrix of |det G| (pi^n alpha!)^{-1/2} (Gz)^alpha e^{-h} (should be the identity).

    Multiplying by e^{-h} turns the weight Phi into its Hermitian part
    1/2 |Gz|^2, so the Gram matrix is computed there.
    """
    from math import factorial

    dec = decompose(w)
    herm = Weight(numkit.real_rep(dec.g.conj().T @ dec.g))
    table = gram(herm, max_degree)
    t = substitution_matrix(dec.g, table.indices)
    scale = np.array([abs(np.linalg.det(dec.g)) / np.sqrt(np.pi**w.n * np.prod([factorial(k) for k in a]))
                      for a in table.indices])
    coeffs = t * scale[None, :]
    return coeffs.conj().T @ table.norm_matrix() @ coeffs
