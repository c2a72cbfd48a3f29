"""Mean-field and second-order moment-closure dynamics of the coupled pair.

The mean-field equations evolve the two amplitudes alone:

    da_j/dt = -(gamma + i delta) a_j - i J a_k - i U_j a_j |a_j|^2 - i v(t)

The closure-level equations evolve eight complex moments (a1, a2, n1, n2,
a1^2, a2^2, a1†a2, a1a2), with every third- and fourth-order moment replaced
by its value under vanishing third- and fourth-order cumulants:

    <ABC>  = <AB><C> + <AC><B> + <BC><A> - 2<A><B><C>
    <ABCD> = <AB><CD> + <AC><BD> + <AD><BC> - 2<A><B><C><D>

Photon numbers are stored as complex and kept real by the flow itself (the
right-hand side pairs each term with its conjugate); their imaginary part is
tracked as an integration health number.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .drive import DriveSignal
from .lindblad import IntegrationError, Trajectory, _validate_grid
from .params import SystemParams


@dataclass(frozen=True)
class MeanFieldState:
    alpha1: complex = 0j
    alpha2: complex = 0j

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha1, self.alpha2], dtype=complex)

    @classmethod
    def from_array(cls, arr) -> "MeanFieldState":
        return cls(complex(arr[0]), complex(arr[1]))


@dataclass(frozen=True)
class CumulantState:
    a1: complex = 0j
    a2: complex = 0j
    n1: complex = 0j
    n2: complex = 0j
    a1sq: complex = 0j
    a2sq: complex = 0j
    a1dag_a2: complex = 0j
    a1a2: complex = 0j

    def as_array(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.n1, self.n2, self.a1sq,
                         self.a2sq, self.a1dag_a2, self.a1a2], dtype=complex)

    @classmethod
    def from_array(cls, arr) -> "CumulantState":
        return cls(*(complex(x) for x in arr))


def coherent_cumulant_state(alpha1: complex, alpha2: complex) -> CumulantState:
    """Moments of a product of coherent states with the given amplitudes."""
    a1 = complex(alpha1)
    a2 = complex(alpha2)
    return CumulantState(
        a1=a1, a2=a2,
        n1=abs(a1) ** 2, n2=abs(a2) ** 2,
        a1sq=a1 * a1, a2sq=a2 * a2,
        a1dag_a2=np.conj(a1) * a2, a1a2=a1 * a2,
    )


def meanfield_rhs(state: MeanFieldState, params: SystemParams,
                  drive_value: float = 0.0) -> MeanFieldState:
    a1, a2 = state.alpha1, state.alpha2
    lam = params.gamma + 1j * params.delta
    j = params.j_coupling
    v = drive_value
    return MeanFieldState(
        alpha1=-lam * a1 - 1j * j * a2 - 1j * params.u1 * a1 * abs(a1) ** 2 - 1j * v,
        alpha2=-lam * a2 - 1j * j * a1 - 1j * params.u2 * a2 * abs(a2) ** 2 - 1j * v,
    )


def cumulant_rhs(state: CumulantState, params: SystemParams,
                 drive_value: float = 0.0) -> CumulantState:
    out = np.empty(8, dtype=complex)
    _cumulant_rhs_arr(state.as_array(), params.delta, params.j_coupling,
                      params.u1, params.u2, params.gamma, drive_value, out)
    return CumulantState.from_array(out)


@njit(cache=True)
def _meanfield_rhs_arr(s, delta, j, u1, u2, gamma, v, out):
    a1 = s[0]
    a2 = s[1]
    lam = gamma + 1j * delta
    out[0] = -lam * a1 - 1j * j * a2 - 1j * u1 * a1 * (a1.real ** 2 + a1.imag ** 2) - 1j * v
    out[1] = -lam * a2 - 1j * j * a1 - 1j * u2 * a2 * (a2.real ** 2 + a2.imag ** 2) - 1j * v


@njit(cache=True)
def _cumulant_rhs_arr(s, delta, j, u1, u2, gamma, v, out):
    a1 = s[0]
    a2 = s[1]
    n1 = s[2]
    n2 = s[3]
    q1 = s[4]          # <a1^2>
    q2 = s[5]          # <a2^2>
    c = s[6]           # <a1† a2>
    m = s[7]           # <a1 a2>
    b1 = np.conj(a1)
    b2 = np.conj(a2)
    lam = gamma + 1j * delta

    out[0] = (-lam * a1 - 1j * j * a2 - 1j * v
              - 1j * u1 * (2.0 * n1 * a1 + q1 * b1 - 2.0 * b1 * a1 * a1))
    out[1] = (-lam * a2 - 1j * j * a1 - 1j * v
              - 1j * u2 * (2.0 * n2 * a2 + q2 * b2 - 2.0 * b2 * a2 * a2))
    # photon numbers, written with explicit conjugate pairs so reality is
    # preserved by construction
    out[2] = (-2.0 * gamma * n1 - 1j * j * (c - np.conj(c))
              - 1j * v * (b1 - a1))
    out[3] = (-2.0 * gamma * n2 + 1j * j * (c - np.conj(c))
              - 1j * v * (b2 - a2))
    out[4] = (-2.0 * lam * q1 - 2.0 * 1j * j * m - 2.0 * 1j * v * a1
              - 1j * u1 * (q1 + 6.0 * n1 * q1 - 4.0 * b1 * a1 * a1 * a1))
    out[5] = (-2.0 * lam * q2 - 2.0 * 1j * j * m - 2.0 * 1j * v * a2
              - 1j * u2 * (q2 + 6.0 * n2 * q2 - 4.0 * b2 * a2 * a2 * a2))
    out[6] = (-2.0 * gamma * c + 1j * j * (n2 - n1) + 1j * v * (a2 - b1)
              + 1j * u1 * (2.0 * n1 * c + np.conj(q1) * m - 2.0 * b1 * b1 * a1 * a2)
              - 1j * u2 * (2.0 * n2 * c + np.conj(m) * q2 - 2.0 * b1 * b2 * a2 * a2))
    out[7] = (-2.0 * lam * m - 1j * j * (q1 + q2) - 1j * v * (a1 + a2)
              - 1j * u1 * (2.0 * n1 * m + c * q1 - 2.0 * b1 * a1 * a1 * a2)
              - 1j * u2 * (2.0 * n2 * m + np.conj(c) * q2 - 2.0 * a1 * b2 * a2 * a2))


@njit(cache=True)
def _run_ode(state, drive_vals, steps_per, dt, delta, j, u1, u2, gamma, kind, rec):
    """RK4 over all intervals; returns first non-finite boundary or -1."""
    nvar = state.shape[0]
    k1 = np.empty(nvar, dtype=np.complex128)
    k2 = np.empty(nvar, dtype=np.complex128)
    k3 = np.empty(nvar, dtype=np.complex128)
    k4 = np.empty(nvar, dtype=np.complex128)
    tmp = np.empty(nvar, dtype=np.complex128)
    half = 0.5 * dt
    sixth = dt / 6.0
    for b in range(drive_vals.shape[0]):
        v = drive_vals[b]
        for _ in range(steps_per):
            if kind == 0:
                _meanfield_rhs_arr(state, delta, j, u1, u2, gamma, v, k1)
            else:
                _cumulant_rhs_arr(state, delta, j, u1, u2, gamma, v, k1)
            for i in range(nvar):
                tmp[i] = state[i] + half * k1[i]
            if kind == 0:
                _meanfield_rhs_arr(tmp, delta, j, u1, u2, gamma, v, k2)
            else:
                _cumulant_rhs_arr(tmp, delta, j, u1, u2, gamma, v, k2)
            for i in range(nvar):
                tmp[i] = state[i] + half * k2[i]
            if kind == 0:
                _meanfield_rhs_arr(tmp, delta, j, u1, u2, gamma, v, k3)
            else:
                _cumulant_rhs_arr(tmp, delta, j, u1, u2, gamma, v, k3)
            for i in range(nvar):
                tmp[i] = state[i] + dt * k3[i]
            if kind == 0:
                _meanfield_rhs_arr(tmp, delta, j, u1, u2, gamma, v, k4)
            else:
                _cumulant_rhs_arr(tmp, delta, j, u1, u2, gamma, v, k4)
            for i in range(nvar):
                state[i] += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        ok = True
        for i in range(nvar):
            if not (np.isfinite(state[i].real) and np.isfinite(state[i].imag)):
                ok = False
            rec[b, i] = state[i]
        if not ok:
            return b
    return -1


_KINDS = {"meanfield": 0, "cumulant": 1}


def integrate(kind: str, state0, params: SystemParams, signal: DriveSignal,
              dt: float, t_end: float | None = None, *,
              washout: float = 0.0) -> Trajectory:
    """Evolve a mean-field or closure-level state under a drive signal.

    Stepping, recording and washout follow the master-equation integrator:
    fixed RK4 step dividing the update interval, one sample per boundary,
    samples kept for times strictly past the washout.  Divergence raises
    IntegrationError with the boundary time.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown integrator kind {kind!r}")
    nvar = 2 if kind == "meanfield" else 8
    if state0 is None:
        state = np.zeros(nvar, dtype=complex)
    elif isinstance(state0, (MeanFieldState, CumulantState)):
        state = state0.as_array()
    else:
        state = np.asarray(state0, dtype=complex).copy()
    if state.shape != (nvar,):
        raise ValueError(f"{kind} state must have {nvar} components")

    if t_end is None:
        t_end = signal.t_end
    if t_end > signal.t_end + 1e-9:
        raise ValueError("t_end extends beyond the drive signal")
    interval = signal.update_interval
    steps_per, n_int = _validate_grid(interval, dt, t_end)

    drive_vals = params.f_strength * signal.values[:n_int].astype(np.float64)
    rec = np.empty((n_int, nvar), dtype=complex)
    bad = _run_ode(state, drive_vals, steps_per, dt, params.delta,
                   params.j_coupling, params.u1, params.u2, params.gamma,
                   _KINDS[kind], rec)
    if bad >= 0:
        raise IntegrationError(
            f"{kind} state diverged by t={(bad + 1) * interval:.6g}")

    boundary_times = interval * np.arange(1, n_int + 1)
    keep = boundary_times > washout + 1e-9
    diagnostics = {"dt": dt, "n_steps": steps_per * n_int}
    if kind == "cumulant":
        diagnostics["max_im_n"] = float(np.abs(rec[:, 2:4].imag).max()) if n_int else 0.0
    return Trajectory(
        times=boundary_times[keep],
        x1=rec[keep, 0].real.copy(),
        x2=rec[keep, 1].real.copy(),
        y1=rec[keep, 0].imag.copy(),
        y2=rec[keep, 1].imag.copy(),
        inputs=np.asarray(signal.values[:n_int], dtype=float)[keep],
        state_samples=rec[keep],
        diagnostics=diagnostics,
    )
