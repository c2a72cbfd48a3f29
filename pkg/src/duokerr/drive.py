"""Stochastic input signals s(t) that drive the oscillators.

Signals are piecewise constant: s(t) = values[floor(t / update_interval)].
Two families are provided, a symmetric two-state telegraph process and
uniform i.i.d. values on [-1, 1].  Generation uses the counter-based Philox
bit generator so that sweep results are reproducible regardless of thread
scheduling; identical seeds give bit-identical signals.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

SeedLike = "int | tuple | np.random.SeedSequence"


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    elif isinstance(seed, tuple):
        # (entropy, spawn_key) pair, used by sweep orchestration
        entropy, spawn_key = seed
        ss = np.random.SeedSequence(entropy, spawn_key=tuple(spawn_key))
    else:
        ss = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class DriveSignal:
    """Piecewise-constant input signal with one value per update interval."""

    update_interval: float
    values: np.ndarray
    seed: object = None
    kind: str = "custom"

    def __post_init__(self) -> None:
        if self.update_interval <= 0:
            raise ValueError(f"update_interval must be > 0, got {self.update_interval}")
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def t_end(self) -> float:
        return len(self.values) * self.update_interval

    def value_at(self, t: float) -> float:
        """Piecewise-constant lookup; defined on 0 <= t < t_end."""
        if not 0.0 <= t < self.t_end:
            raise ValueError(f"t={t} outside signal domain [0, {self.t_end})")
        return float(self.values[int(t / self.update_interval)])

    def to_csv(self, path) -> None:
        """Export as (time, value) rows, one per interval start, for audit."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["time", "value"])
            for k, v in enumerate(self.values):
                writer.writerow([f"{k * self.update_interval:.12g}", f"{v:.12g}"])


def _n_intervals(t_end: float, update_interval: float) -> int:
    if update_interval <= 0:
        raise ValueError(f"update_interval must be > 0, got {update_interval}")
    n = int(np.ceil(t_end / update_interval - 1e-12))
    if n < 1:
        raise ValueError(f"t_end={t_end} shorter than one update interval {update_interval}")
    return n


def telegraph(switch_rate: float, update_interval: float, t_end: float, seed) -> DriveSignal:
    """Symmetric telegraph signal on {-1, +1}.

    Starts at +1 or -1 with equal probability; at each interval boundary the
    sign flips with probability 1 - exp(-switch_rate * update_interval).
    """
    if switch_rate <= 0:
        raise ValueError(f"switch_rate must be > 0, got {switch_rate}")
    rng = _rng(seed)
    n = _n_intervals(t_end, update_interval)
    p_flip = -np.expm1(-switch_rate * update_interval)
    start = 1.0 if rng.random() < 0.5 else -1.0
    flips = rng.random(n - 1) < p_flip
    steps = np.concatenate(([start], np.where(flips, -1.0, 1.0)))
    return DriveSignal(update_interval, np.cumprod(steps), seed=seed, kind="telegraph")


def uniform_iid(update_interval: float, t_end: float, seed) -> DriveSignal:
    """Uniform i.i.d. signal on [-1, 1], uncorrelated across intervals."""
    rng = _rng(seed)
    n = _n_intervals(t_end, update_interval)
    return DriveSignal(update_interval, rng.uniform(-1.0, 1.0, n), seed=seed, kind="uniform")


def value_at(signal: DriveSignal, t: float) -> float:
    """Module-level alias for DriveSignal.value_at."""
    return signal.value_at(t)
