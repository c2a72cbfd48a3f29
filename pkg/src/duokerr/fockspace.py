"""Operators and states on truncated one- and two-mode Fock bases.

Basis conventions used throughout the package:

- A single mode truncated at maximum photon number ``n_max`` has dimension
  ``n_max + 1`` with basis states |0>, ..., |n_max>.
- The two-mode space is the tensor product with mode 1 as the slow (outer)
  index: the composite basis state |n1, n2> sits at flat index
  ``n1 * (n_max + 1) + n2``.  ``embed_mode`` and ``partial_trace`` both rely
  on this ordering and must never disagree about it.
- Truncation corrupts only the top Fock level: [a, a†] = 1 holds exactly on
  the sub-block that excludes |n_max>.  Adequacy of the cutoff is monitored
  downstream via population leakage into the top levels, not repaired here.

All operators are dense complex matrices; at the working cutoffs
(n_max ~ 10, two-mode dimension 121) dense storage is both faster and simpler
than sparse formats.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FockCutoff:
    """Maximum photon number per mode; basis dimension per mode is n_max + 1."""

    n_max: int

    def __post_init__(self) -> None:
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise ValueError(f"n_max must be an integer >= 1, got {self.n_max!r}")

    @property
    def dim(self) -> int:
        """Single-mode dimension."""
        return self.n_max + 1

    @property
    def dim2(self) -> int:
        """Two-mode dimension (dim squared)."""
        return (self.n_max + 1) ** 2


def build_annihilation(cutoff: FockCutoff) -> np.ndarray:
    """Single-mode annihilation operator: <n-1| a |n> = sqrt(n)."""
    return np.diag(np.sqrt(np.arange(1, cutoff.dim, dtype=float)), k=1).astype(complex)


def embed_mode(op: np.ndarray, mode: int, cutoff: FockCutoff) -> np.ndarray:
    """Embed a single-mode operator into the two-mode space.

    Mode 1 is the outer tensor factor (op ⊗ I), mode 2 the inner (I ⊗ op).
    """
    op = np.asarray(op)
    if op.shape != (cutoff.dim, cutoff.dim):
        raise ValueError(
            f"operator shape {op.shape} does not match single-mode dimension {cutoff.dim}"
        )
    eye = np.eye(cutoff.dim, dtype=complex)
    if mode == 1:
        return np.kron(op, eye)
    if mode == 2:
        return np.kron(eye, op)
    raise ValueError(f"mode must be 1 or 2, got {mode!r}")


def vacuum_density(cutoff: FockCutoff) -> np.ndarray:
    """Rank-one projector onto |0,0> on the two-mode space."""
    rho = np.zeros((cutoff.dim2, cutoff.dim2), dtype=complex)
    rho[0, 0] = 1.0
    return rho


def coherent_vector(alpha: complex, cutoff: FockCutoff) -> np.ndarray:
    """Truncated coherent-state amplitudes e^{-|a|^2/2} a^n / sqrt(n!).

    Renormalized after truncation, so the tail weight beyond n_max is folded
    back; callers should keep |alpha|^2 well below n_max.
    """
    n = np.arange(cutoff.dim)
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, cutoff.dim)))])
    vec = np.exp(-0.5 * abs(alpha) ** 2 - 0.5 * log_fact) * (complex(alpha) ** n)
    return vec / np.linalg.norm(vec)


def coherent_density(alpha1: complex, alpha2: complex, cutoff: FockCutoff) -> np.ndarray:
    """Pure product state |alpha1>|alpha2> as a two-mode density matrix."""
    vec = np.kron(coherent_vector(alpha1, cutoff), coherent_vector(alpha2, cutoff))
    return np.outer(vec, vec.conj())


def _mode_dim(rho: np.ndarray) -> int:
    dim2 = rho.shape[0]
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    d = round(np.sqrt(dim2))
    if d * d != dim2:
        raise ValueError(f"dimension {dim2} is not a perfect square of a per-mode dimension")
    return d


def partial_trace(rho: np.ndarray, keep: int) -> np.ndarray:
    """Reduced density matrix of one mode of a two-mode state.

    ``keep=1`` traces out mode 2 and vice versa.  Linear and trace-preserving.
    """
    d = _mode_dim(rho)
    r4 = np.asarray(rho).reshape(d, d, d, d)
    if keep == 1:
        return np.einsum("abcb->ac", r4)
    if keep == 2:
        return np.einsum("abac->bc", r4)
    raise ValueError(f"keep must be 1 or 2, got {keep!r}")
