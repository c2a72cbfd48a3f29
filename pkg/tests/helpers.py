"""Small shared builders for the test suite."""

import numpy as np

from duokerr.drive import DriveSignal


def random_density(dim: int, seed: int) -> np.ndarray:
    """Random full-rank density matrix (Hermitian, trace one, positive)."""
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def random_hermitian(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (m + m.conj().T) / 2


def constant_signal(value: float, update_interval: float, t_end: float) -> DriveSignal:
    n = int(round(t_end / update_interval))
    return DriveSignal(update_interval=update_interval,
                       values=np.full(n, float(value)), seed=0, kind="constant")
