"""Ready-made normal forms and random generators used by scripts and tests."""

from __future__ import annotations

import numpy as np

from .reduction import NormalForm, SupersymmetricForm, direct_normal_form, normal_form
from .symbol import QuadraticSymbol, fokker_planck
from .weight import Weight, rotated_oscillator_weight

ROTATION_ANGLE = 5 * np.pi / 12


def rotated_oscillator(theta: float = ROTATION_ANGLE) -> NormalForm:
    """M = e^{i theta} with Phi = 1/2 (|z|^2 - sin(theta) Re z^2)."""
    return direct_normal_form([[np.exp(1j * theta)]], rotated_oscillator_weight(theta))


def fokker_planck_nf(a: float, b: float) -> NormalForm:
    return normal_form(fokker_planck(a, b))


def fokker_planck_eigenvalues(a: float, b: float) -> tuple[complex, complex]:
    root = np.sqrt(complex((1 - b) ** 2 - 4 * a * a))
    return 0.5 * (1 + b + root), 0.5 * (1 + b - root)


def chain_matrix(a: float, b: float) -> np.ndarray:
    """Three-site chain [[0, -b, 0], [b, 0, -a], [0, a, 1]] (damping on the last site only)."""
    return np.array([[0, -b, 0], [b, 0, -a], [0, a, 1]], dtype=complex)


def chain_nf(a: float = 1.0, b: float = 0.5) -> NormalForm:
    return direct_normal_form(chain_matrix(a, b), Weight.standard(3))


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_supersymmetric(rng: np.random.Generator, n: int) -> SupersymmetricForm:
    """Random B and symmetric A_+/A_- with Im A_+ > 0 > Im A_-.

    Draws are rejected until -i(A_+ - A_-)B has spectrum in the open right
    half-plane, so that the symbol is within reach of the reduction.
    """
    def sym(scale):
        x = rng.normal(size=(n, n)) * scale
        return x + x.T

    def pd():
        x = rng.normal(size=(n, n))
        return x @ x.T + 0.3 * np.eye(n)

    while True:
        a_plus = sym(0.5) + 1j * pd()
        a_minus = sym(0.5) - 1j * pd()
        b = np.eye(n) + 0.3 * _complex_normal(rng, (n, n))
        ev = np.linalg.eigvals(-1j * (a_plus - a_minus) @ b)
        if ev.real.min() > 0.05 * np.abs(ev).max():
            return SupersymmetricForm(a_plus, a_minus, b)


def random_symbol(rng: np.random.Generator, n: int) -> QuadraticSymbol:
    return random_supersymmetric(rng, n).to_symbol()


def random_weight(rng: np.random.Generator, n: int, h_max: float = 0.9) -> Weight:
    """Phi = 1/2|Gz|^2 - Re h with ||G^{-T} h'' G^{-1}|| uniform in [0, h_max)."""
    g = np.eye(n) + 0.3 * _complex_normal(rng, (n, n))
    h = _complex_normal(rng, (n, n))
    h = h + h.T
    h *= rng.uniform(0, h_max) / np.linalg.norm(h, 2)
    return Weight.from_parts(g, g.T @ h @ g)


def random_normal_form(rng: np.random.Generator, n: int) -> NormalForm:
    return direct_normal_form(_complex_normal(rng, (n, n)), random_weight(rng, n))


def random_gauge(rng: np.random.Generator, n: int) -> np.ndarray:
    return np.eye(n) + 0.4 * _complex_normal(rng, (n, n))


def random_contraction_case(rng: np.random.Generator, n: int) -> tuple[NormalForm, float]:
    """A normal form with h = 0 and a tau < 0 for which ||G e^{tau M} G^{-1}|| <= 1."""
    b = _complex_normal(rng, (n, n))
    accretive = b @ b.conj().T + 0.5j * (b + b.conj().T)
    g = np.eye(n) + 0.3 * _complex_normal(rng, (n, n))
    m = np.linalg.inv(g) @ accretive @ g
    return direct_normal_form(m, Weight.from_parts(g)), -float(rng.uniform(0.05, 1.5))
