"""Truncated-Fock master-equation integrator for the coupled pair.

Model dissipator: d rho / dt = -i [H, rho] + sum_i 2 gamma (a_i rho a_i†
- {n_i, rho} / 2), i.e. single-photon loss at rate 2 gamma per mode, matching
the gamma that appears as the linewidth in the linear response functions.

Time stepping is classical fourth-order Runge-Kutta with a fixed step that
must divide the drive update interval exactly; the drive amplitude is constant
within each interval.  Observables are recorded at interval boundaries only.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .drive import DriveSignal
from .fockspace import FockCutoff, build_annihilation, embed_mode, partial_trace
from .params import SystemParams

# Abort thresholds for the integration monitors.  Trace drift and negative
# eigenvalues at this level mean the step size is too large for the spectrum
# retained by the cutoff, so continuing would silently corrupt statistics.
TRACE_TOL = 1e-6
NEGATIVITY_TOL = -1e-6


class IntegrationError(RuntimeError):
    """Raised when a density-matrix sanity monitor trips mid-run."""


class ReadoutSample(NamedTuple):
    time: float
    x1: float
    x2: float
    y1: float
    y2: float
    input: float


@dataclass
class Trajectory:
    """Boundary-sampled observables of one integration run.

    ``inputs[j]`` is the drive symbol that was held during the interval
    ending at ``times[j]``, so row j pairs the response with the input that
    produced it.
    """

    times: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    inputs: np.ndarray
    final_state: np.ndarray | None = None
    avg_state: np.ndarray | None = None
    snapshots: list | None = None
    state_samples: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    def samples(self):
        for j in range(self.times.size):
            yield ReadoutSample(self.times[j], self.x1[j], self.x2[j],
                                self.y1[j], self.y2[j], self.inputs[j])

    @property
    def features(self) -> np.ndarray:
        """Readout matrix with columns (x1, x2, y1, y2)."""
        return np.column_stack([self.x1, self.x2, self.y1, self.y2])


def build_hamiltonian(params: SystemParams, drive_value: float = 0.0) -> np.ndarray:
    """Dense two-mode Hamiltonian at a frozen drive amplitude."""
    cut = params.cutoff
    a = build_annihilation(cut)
    n_op = a.conj().T @ a
    kerr = a.conj().T @ a.conj().T @ a @ a
    h = np.zeros((cut.dim2, cut.dim2), dtype=complex)
    for mode, u in ((1, params.u1), (2, params.u2)):
        h += params.delta * embed_mode(n_op, mode, cut)
        h += 0.5 * u * embed_mode(kerr, mode, cut)
        h += drive_value * embed_mode(a + a.conj().T, mode, cut)
    a1 = embed_mode(a, 1, cut)
    a2 = embed_mode(a, 2, cut)
    h += params.j_coupling * (a1.conj().T @ a2 + a2.conj().T @ a1)
    return h


def lindblad_rhs(rho: np.ndarray, params: SystemParams,
                 drive_value: float = 0.0) -> np.ndarray:
    """Reference right-hand side, written directly from the operator form."""
    cut = params.cutoff
    h = build_hamiltonian(params, drive_value)
    out = -1j * (h @ rho - rho @ h)
    a = build_annihilation(cut)
    for mode in (1, 2):
        am = embed_mode(a, mode, cut)
        nm = am.conj().T @ am
        out += 2.0 * params.gamma * (am @ rho @ am.conj().T
                                     - 0.5 * (nm @ rho + rho @ nm))
    return out


def _csr_parts(params: SystemParams):
    """CSR arrays of H0 and the drive operator on their union pattern."""
    cut = params.cutoff
    h0 = build_hamiltonian(params, drive_value=0.0)
    a = build_annihilation(cut)
    dop = sum(embed_mode(a + a.conj().T, mode, cut) for mode in (1, 2))
    mask = (h0 != 0) | (dop != 0)
    np.fill_diagonal(mask, True)
    rows, cols = np.nonzero(mask)
    counts = np.bincount(rows, minlength=cut.dim2)
    indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    return (indptr, cols.astype(np.int64),
            h0[rows, cols].astype(complex), dop[rows, cols].astype(complex))


def _ladder_factors(cut: FockCutoff):
    """Per-basis-state jump factors; zero at the truncation edge.

    f1[i] = sqrt(n1 + 1) couples |n1, n2> to |n1 + 1, n2> (stride dim per
    mode), f2 likewise with stride 1.
    """
    d1 = cut.dim
    idx = np.arange(cut.dim2)
    n1 = idx // d1
    n2 = idx % d1
    f1 = np.where(n1 < cut.n_max, np.sqrt(n1 + 1.0), 0.0)
    f2 = np.where(n2 < cut.n_max, np.sqrt(n2 + 1.0), 0.0)
    return f1, f2, (n1 + n2).astype(np.float64)


def _validate_grid(interval: float, dt: float, t_end: float):
    steps = int(round(interval / dt))
    if steps < 1 or abs(steps * dt - interval) > 1e-9 * max(1.0, interval):
        raise ValueError(
            f"dt={dt} does not divide the update interval {interval}")
    n_int = int(round(t_end / interval))
    if n_int < 1 or abs(n_int * interval - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError(
            f"t_end={t_end} is not a whole number of update intervals")
    return steps, n_int


def evolve(rho0: np.ndarray, params: SystemParams, signal: DriveSignal,
           dt: float, t_end: float | None = None, *, washout: float = 0.0,
           store_snapshots: bool = False, average_state: bool = False,
           check_every: int = 1) -> Trajectory:
    """Integrate from ``rho0`` under a piecewise-constant drive signal.

    Records one sample per update interval, at its end.  Samples with time
    strictly greater than ``washout`` are kept.  ``average_state`` accumulates
    the mean post-washout boundary state; ``check_every`` sets how many
    intervals pass between positivity (eigenvalue) checks, while trace and
    Hermiticity are monitored at every boundary.
    """
    cut = params.cutoff
    d = cut.dim2
    if rho0.shape != (d, d):
        raise ValueError(f"rho0 must be {d}x{d} for this cutoff")
    if t_end is None:
        t_end = signal.t_end
    if t_end > signal.t_end + 1e-9:
        raise ValueError("t_end extends beyond the drive signal")
    interval = signal.update_interval
    steps_per, n_int = _validate_grid(interval, dt, t_end)
    if check_every < 1:
        raise ValueError("check_every must be >= 1")

    drive_vals = params.f_strength * signal.values[:n_int].astype(np.float64)
    indptr, indices, h0data, fdata = _csr_parts(params)
    f1, f2, ntot = _ladder_factors(cut)

    rho = np.array(rho0, dtype=complex, order="C", copy=True)
    hbuf = np.empty_like(h0data)
    k = np.empty((d, d), dtype=complex)
    stage = np.empty((d, d), dtype=complex)
    acc = np.empty((d, d), dtype=complex)
    work = np.empty((d, d), dtype=complex)

    boundary_times = interval * np.arange(1, n_int + 1)
    keep = boundary_times > washout + 1e-9
    first_record_global = int(np.argmax(keep)) if keep.any() else n_int

    x1 = np.empty(n_int)
    x2 = np.empty(n_int)
    y1 = np.empty(n_int)
    y2 = np.empty(n_int)
    tr_err = np.empty(n_int)
    herm_err = np.empty(n_int)
    top_pop = np.empty(n_int)
    rho_sum = np.zeros((d, d), dtype=complex)
    snapshots = [] if store_snapshots else None
    n_acc = 0
    min_eig = np.inf

    chunk = 1 if store_snapshots else check_every
    start = 0
    while start < n_int:
        stop = min(start + chunk, n_int)
        first_rec = max(first_record_global - start, 0)
        n_acc += _kernels.run_intervals(
            rho, drive_vals[start:stop], steps_per, dt, indptr, indices,
            h0data, fdata, f1, f2, ntot, cut.dim, cut.n_max, params.gamma,
            first_rec, x1[start:stop], x2[start:stop], y1[start:stop],
            y2[start:stop], tr_err[start:stop], herm_err[start:stop],
            top_pop[start:stop], rho_sum, average_state,
            hbuf, k, stage, acc, work)
        worst = start + int(np.argmax(tr_err[start:stop]))
        if tr_err[worst] > TRACE_TOL:
            raise IntegrationError(
                f"trace drifted by {tr_err[worst]:.3e} at t="
                f"{boundary_times[worst]:.6g}; reduce dt or raise the cutoff")
        low = np.linalg.eigvalsh(rho)[0]
        min_eig = min(min_eig, low)
        if low < NEGATIVITY_TOL:
            raise IntegrationError(
                f"density matrix lost positivity (min eig {low:.3e}) by t="
                f"{boundary_times[stop - 1]:.6g}; reduce dt or raise the cutoff")
        if store_snapshots and stop - 1 >= first_record_global:
            snapshots.append(rho.copy())
        start = stop

    avg_state = rho_sum / n_acc if (average_state and n_acc) else None
    if average_state and n_acc == 0:
        warnings.warn("washout covers the whole run; no states averaged")

    diagnostics = {
        "max_trace_drift": float(tr_err.max()) if n_int else 0.0,
        "max_herm_defect": float(herm_err.max()) if n_int else 0.0,
        "max_top_population": float(top_pop.max()) if n_int else 0.0,
        "min_eigenvalue": float(min_eig),
        "dt": dt,
        "n_steps": steps_per * n_int,
    }
    return Trajectory(
        times=boundary_times[keep],
        x1=x1[keep], x2=x2[keep], y1=y1[keep], y2=y2[keep],
        inputs=np.asarray(signal.values[:n_int], dtype=float)[keep],
        final_state=rho,
        avg_state=avg_state,
        snapshots=snapshots,
        diagnostics=diagnostics,
    )


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Entropy in nats; eigenvalues below 1e-14 contribute nothing."""
    evals = np.linalg.eigvalsh(rho)
    if evals[0] < -1e-8:
        raise ValueError(
            f"state has eigenvalue {evals[0]:.3e}; not a density matrix")
    evals = evals[evals > 1e-14]
    return float(-np.sum(evals * np.log(evals)))


def quantum_mutual_information(rho: np.ndarray) -> float:
    """S(rho_1) + S(rho_2) - S(rho_12) of a two-mode state, in nats."""
    s1 = von_neumann_entropy(partial_trace(rho, keep=1))
    s2 = von_neumann_entropy(partial_trace(rho, keep=2))
    return s1 + s2 - von_neumann_entropy(rho)


def time_averaged_state(snapshots) -> np.ndarray:
    """Mean of a sequence of density matrices."""
    snapshots = list(snapshots)
    if not snapshots:
        raise ValueError("no snapshots to average")
    return sum(snapshots[1:], start=np.array(snapshots[0], dtype=complex)) / len(snapshots)
