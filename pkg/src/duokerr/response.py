"""Linear response about a stationary amplitude pair.

Covers the conservative effective potential and its curvature at the origin,
and the retarded Green's function of the damped linearization.  Fluctuation
vectors are ordered (d_alpha1, d_alpha1*, d_alpha2, d_alpha2*); the real
Hessian uses (Re alpha1, Im alpha1, Re alpha2, Im alpha2).

Poles are extracted as eigenvalues of the first-order generator equivalent to
det [G^R(w)]^-1 = 0: with [G^R(w)]^-1 = w B + M0, where B = diag(1,-1,1,-1)
and M0 the matrix at w = 0, the determinant vanishes exactly at the
eigenvalues of -B M0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import SystemParams

_B = np.diag([1.0, -1.0, 1.0, -1.0])


def effective_potential(alpha1: complex, alpha2: complex,
                        params: SystemParams) -> float:
    """Conservative potential V over the two complex amplitudes."""
    v = 0.0
    for a, u in ((alpha1, params.u1), (alpha2, params.u2)):
        p = abs(a) ** 2
        v += params.delta * p + 0.25 * u * p * p
    v += 2.0 * params.j_coupling * (alpha1 * np.conj(alpha2)).real
    return float(v)


@dataclass(frozen=True)
class HessianSpectrum:
    """Sorted eigenvalues of the potential's 4x4 real Hessian at the origin."""

    eigenvalues: np.ndarray
    matrix: np.ndarray


@dataclass(frozen=True)
class PoleSet:
    """Slow and fast pole pairs of the retarded Green's function.

    Branches are labeled by |Re w|, slow being the smaller; ``degenerate``
    marks the tie at J = 0 where the split is arbitrary.
    """

    slow: tuple
    fast: tuple
    degenerate: bool = False

    @property
    def all_poles(self) -> np.ndarray:
        return np.array([*self.slow, *self.fast], dtype=complex)


def hessian_at_origin(params: SystemParams) -> HessianSpectrum:
    d = params.delta
    j = params.j_coupling
    h = 2.0 * np.array([
        [d, 0.0, j, 0.0],
        [0.0, d, 0.0, j],
        [j, 0.0, d, 0.0],
        [0.0, j, 0.0, d],
    ])
    return HessianSpectrum(eigenvalues=np.sort(np.linalg.eigvalsh(h)), matrix=h)


def inverse_green_matrix(omega: complex, params: SystemParams,
                         alpha1: complex = 0j, alpha2: complex = 0j) -> np.ndarray:
    """Inverse retarded Green's function at a general expansion point.

    Away from the origin the diagonal picks up U|alpha|^2 and the anomalous
    off-diagonal -U alpha^2 / 2 couples each amplitude to its conjugate.
    """
    g1 = params.delta + params.u1 * abs(alpha1) ** 2
    g2 = params.delta + params.u2 * abs(alpha2) ** 2
    j = params.j_coupling
    gam = params.gamma
    x1 = 0.5 * params.u1 * alpha1 ** 2
    x2 = 0.5 * params.u2 * alpha2 ** 2
    return np.array([
        [omega - g1 + 1j * gam, -x1, -j, 0.0],
        [-np.conj(x1), -omega - g1 - 1j * gam, 0.0, -j],
        [-j, 0.0, omega - g2 + 1j * gam, -x2],
        [0.0, -j, -np.conj(x2), -omega - g2 - 1j * gam],
    ], dtype=complex)


def keldysh_noise_matrix(params: SystemParams) -> np.ndarray:
    """Keldysh block of the inverse Green's function: 2i gamma per entry."""
    return 2j * params.gamma * np.eye(4)


def _split_branches(poles: np.ndarray) -> PoleSet:
    order = np.argsort(np.abs(poles.real), kind="stable")
    poles = poles[order]
    slow = tuple(sorted(poles[:2], key=lambda w: -w.real))
    fast = tuple(sorted(poles[2:], key=lambda w: -w.real))
    degenerate = abs(abs(slow[0].real) - abs(fast[0].real)) < 1e-9
    return PoleSet(slow=slow, fast=fast, degenerate=degenerate)


def retarded_poles_analytic(params: SystemParams) -> PoleSet:
    """Closed-form vacuum poles: +-|J - |Delta|| - ig and +-(J + |Delta|) - ig."""
    w_s = abs(params.j_coupling - abs(params.delta))
    w_f = abs(params.j_coupling + abs(params.delta))
    gam = params.gamma
    return PoleSet(
        slow=(w_s - 1j * gam, -w_s - 1j * gam),
        fast=(w_f - 1j * gam, -w_f - 1j * gam),
        degenerate=abs(w_s - w_f) < 1e-9,
    )


def retarded_poles_numeric(params: SystemParams,
                           alpha1: complex = 0j, alpha2: complex = 0j) -> PoleSet:
    """Poles as eigenvalues of the generator -B M0; exact for this block form."""
    m0 = inverse_green_matrix(0.0, params, alpha1, alpha2)
    poles = np.linalg.eigvals(-_B @ m0)
    residual = max(abs(np.linalg.det(inverse_green_matrix(w, params, alpha1, alpha2)))
                   for w in poles)
    if residual > 1e-6:
        raise ArithmeticError(
            f"pole extraction failed: determinant residual {residual:.3e}")
    return _split_branches(poles)


def scan_poles(params: SystemParams, j_values) -> list:
    """Numeric vacuum poles along a coupling sweep.

    Rows (J, Re w_s, Im w_s, Re w_f, Im w_f) use the nonnegative-frequency
    member of each branch.
    """
    rows = []
    for j in j_values:
        p = retarded_poles_numeric(params.with_(j_coupling=float(j)))
        rows.append((float(j), p.slow[0].real, p.slow[0].imag,
                     p.fast[0].real, p.fast[0].imag))
    return rows
