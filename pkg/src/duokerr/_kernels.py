"""Jitted inner loops for the master-equation integrator.

The Hamiltonian is stored in CSR form on the union sparsity pattern of its
static part H0 and the drive operator D = sum_i (a_i† + a_i), so that per
update interval only the data array changes: H = H0 + v * D.  The dissipative
part is applied structurally: for each mode the jump term a ρ a† is a strided,
scaled copy of ρ and the anticommutator is an element-wise scaling by total
photon number.

The commutator is computed as -i(C - C†) from the single product C = H ρ,
which is valid because ρ stays Hermitian along every Runge-Kutta stage state
(the right-hand side maps Hermitian matrices to Hermitian matrices and stage
states are real-coefficient combinations).  Hermiticity drift is therefore a
monitored diagnostic, not an enforced projection.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _rhs(rho, indptr, indices, hdata, f1, f2, ntot, d1, gamma, out, work):
    d = rho.shape[0]
    for r in range(d):
        for c in range(d):
            work[r, c] = 0.0 + 0.0j
        for p in range(indptr[r], indptr[r + 1]):
            k = indices[p]
            h = hdata[p]
            for c in range(d):
                work[r, c] += h * rho[k, c]
    for i in range(d):
        for j in range(d):
            out[i, j] = (
                -1j * (work[i, j] - np.conj(work[j, i]))
                - gamma * (ntot[i] + ntot[j]) * rho[i, j]
            )
    two_g = 2.0 * gamma
    for i in range(d):
        fi = f1[i]
        if fi != 0.0:
            for j in range(d):
                fj = f1[j]
                if fj != 0.0:
                    out[i, j] += two_g * fi * fj * rho[i + d1, j + d1]
    for i in range(d):
        fi = f2[i]
        if fi != 0.0:
            for j in range(d):
                fj = f2[j]
                if fj != 0.0:
                    out[i, j] += two_g * fi * fj * rho[i + 1, j + 1]


@njit(cache=True)
def _rk4_steps(rho, nsteps, dt, indptr, indices, hdata, f1, f2, ntot, d1, gamma,
               k, stage, acc, work):
    d = rho.shape[0]
    half = 0.5 * dt
    sixth = dt / 6.0
    for _ in range(nsteps):
        _rhs(rho, indptr, indices, hdata, f1, f2, ntot, d1, gamma, k, work)
        for i in range(d):
            for j in range(d):
                acc[i, j] = k[i, j]
                stage[i, j] = rho[i, j] + half * k[i, j]
        _rhs(stage, indptr, indices, hdata, f1, f2, ntot, d1, gamma, k, work)
        for i in range(d):
            for j in range(d):
                acc[i, j] += 2.0 * k[i, j]
                stage[i, j] = rho[i, j] + half * k[i, j]
        _rhs(stage, indptr, indices, hdata, f1, f2, ntot, d1, gamma, k, work)
        for i in range(d):
            for j in range(d):
                acc[i, j] += 2.0 * k[i, j]
                stage[i, j] = rho[i, j] + dt * k[i, j]
        _rhs(stage, indptr, indices, hdata, f1, f2, ntot, d1, gamma, k, work)
        for i in range(d):
            for j in range(d):
                rho[i, j] += sixth * (acc[i, j] + k[i, j])


@njit(cache=True)
def _boundary_stats(rho, f1, f2, ntot, d1, n_max):
    """Readout, trace error, Hermiticity defect and top-level population."""
    d = rho.shape[0]
    a1 = 0.0 + 0.0j
    a2 = 0.0 + 0.0j
    tr = 0.0
    top = 0.0
    herm = 0.0
    dim1 = d1
    for i in range(d):
        if f1[i] != 0.0:
            a1 += f1[i] * rho[i + d1, i]
        if f2[i] != 0.0:
            a2 += f2[i] * rho[i + 1, i]
        pii = rho[i, i].real
        tr += pii
        n1 = i // dim1
        n2 = i - n1 * dim1
        if n1 == n_max or n2 == n_max:
            top += pii
        for j in range(i, d):
            defect = abs(rho[i, j] - np.conj(rho[j, i]))
            if defect > herm:
                herm = defect
    return a1, a2, tr, top, herm


@njit(cache=True)
def run_intervals(rho, drive_vals, steps_per, dt, indptr, indices, h0data, fdata,
                  f1, f2, ntot, d1, n_max, gamma, first_record,
                  x1, x2, y1, y2, tr_err, herm_err, top_pop,
                  rho_sum, accumulate,
                  hbuf, k, stage, acc, work):
    """Integrate a block of update intervals, recording at each boundary.

    Boundary b (0-based within this block) records the state after interval b.
    ``rho_sum`` accumulates post-boundary states from ``first_record`` onward
    when ``accumulate`` is set; returns the number of accumulated states.
    """
    n_int = drive_vals.shape[0]
    nnz = h0data.shape[0]
    d = rho.shape[0]
    n_acc = 0
    for b in range(n_int):
        v = drive_vals[b]
        for p in range(nnz):
            hbuf[p] = h0data[p] + v * fdata[p]
        _rk4_steps(rho, steps_per, dt, indptr, indices, hbuf, f1, f2, ntot, d1,
                   gamma, k, stage, acc, work)
        a1, a2, tr, top, herm = _boundary_stats(rho, f1, f2, ntot, d1, n_max)
        x1[b] = a1.real
        y1[b] = a1.imag
        x2[b] = a2.real
        y2[b] = a2.imag
        tr_err[b] = abs(tr - 1.0)
        herm_err[b] = herm
        top_pop[b] = top
        if accumulate and b >= first_record:
            for i in range(d):
                for j in range(d):
                    rho_sum[i, j] += rho[i, j]
            n_acc += 1
    return n_acc
