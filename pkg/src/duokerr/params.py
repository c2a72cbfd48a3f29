"""Physical constants of the two-oscillator model.

The model is hard-wired symmetric in detuning and decay (same Delta and gamma
for both modes); the two Kerr coefficients may differ.  All quantities are in
units of inverse time, with the drive entering the Hamiltonian as
``drive_value * (a† + a)`` per mode where ``drive_value = s(t) * f_strength``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .fockspace import FockCutoff


@dataclass(frozen=True)
class SystemParams:
    """All physical constants: detuning, coupling, Kerr terms, decay, drive, cutoff."""

    delta: float
    j_coupling: float
    u1: float
    u2: float
    gamma: float
    f_strength: float
    cutoff: FockCutoff = FockCutoff(10)

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        for name in ("delta", "j_coupling", "u1", "u2", "gamma", "f_strength"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not float("-inf") < value < float("inf"):
                raise ValueError(f"{name} must be a finite real number, got {value!r}")
        if not isinstance(self.cutoff, FockCutoff):
            object.__setattr__(self, "cutoff", FockCutoff(self.cutoff))

    def with_(self, **overrides) -> "SystemParams":
        """Copy with some fields replaced (cutoff accepts a bare integer)."""
        return replace(self, **overrides)
