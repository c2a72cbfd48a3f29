"""Empirical joint distributions and the decomposition of drive information.

Distributions are dense 3-axis probability tables over (input symbol,
readout-1 symbol, readout-2 symbol).  All classical information quantities
are in bits.

The decomposition splits I(s:(X1,X2)) into redundant, synergistic and two
unique parts.  Everything follows from the minimum of I_Q(s:(X1,X2)) over
the set of Q that preserve both pairwise marginals (s,X1) and (s,X2) of the
measured P.  That set factorizes over input symbols: Q(s,x1,x2) =
P(s) R_s(x1,x2), where each R_s ranges over the transportation polytope with
row marginal P(x1|s) and column marginal P(x2|s).  The objective becomes
sum_s P(s) KL(R_s || q) with q the mixture of the R_s, which is jointly
convex, so alternating two exact minimizations converges to the global
minimum: the mixture update q <- sum_s P(s) R_s, and per slice the
information projection of q onto the polytope, computed by iterative
proportional fitting.  Starting from the product couplings keeps every R_s
inside the support of q, which IPF preserves.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from importlib import resources

import numpy as np
from numba import njit

_LOG2 = np.log(2.0)


class OptimizationError(RuntimeError):
    """Decomposition optimizer failed to converge; carries the residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class DiscreteJoint:
    """Normalized joint probability table with axes (s, x1, x2)."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 3:
            raise ValueError("probability table must have three axes")
        if p.min() < -1e-12:
            raise ValueError(f"negative probability {p.min():.3e}")
        total = p.sum()
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "probs", np.clip(p, 0.0, None))

    @property
    def dims(self) -> tuple:
        return self.probs.shape

    def marginal_s(self) -> np.ndarray:
        return self.probs.sum(axis=(1, 2))

    def pairwise(self, source: int) -> np.ndarray:
        """Joint of s with one readout axis (source 1 or 2)."""
        if source == 1:
            return self.probs.sum(axis=2)
        if source == 2:
            return self.probs.sum(axis=1)
        raise ValueError("source must be 1 or 2")

    def swap_sources(self) -> "DiscreteJoint":
        return DiscreteJoint(self.probs.transpose(0, 2, 1).copy())

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["s", "x1", "x2", "prob"])
            for idx, val in np.ndenumerate(self.probs):
                if val > 0.0:
                    writer.writerow([idx[0], idx[1], idx[2], f"{val:.12g}"])

    @classmethod
    def from_csv(cls, path) -> "DiscreteJoint":
        rows = []
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                rows.append((int(row["s"]), int(row["x1"]), int(row["x2"]),
                             float(row["prob"])))
        if not rows:
            raise ValueError(f"no probability rows in {path}")
        dims = tuple(max(r[i] for r in rows) + 1 for i in range(3))
        p = np.zeros(dims)
        for s, x1, x2, val in rows:
            p[s, x1, x2] += val
        return cls(p)


def load_gate(name: str) -> DiscreteJoint:
    """Bundled logic-gate distribution: 'and', 'xor' or 'copy'."""
    ref = resources.files("duokerr").joinpath(f"data/gates/{name}.csv")
    with resources.as_file(ref) as path:
        return DiscreteJoint.from_csv(path)


def discretize(series, n_bins: int = 16, strategy: str = "equal_width",
               edges=None) -> np.ndarray:
    """Map a real series to integer symbols.

    Equal-width bins span [min, max] of the series, values at the top edge
    landing in the top bin.  A constant series collapses to one symbol and
    warns, since information against it is necessarily zero.
    """
    series = np.asarray(series, dtype=float)
    if series.size == 0:
        raise ValueError("empty series")
    if strategy == "equal_width":
        if n_bins < 2:
            raise ValueError("need at least 2 bins")
        lo, hi = series.min(), series.max()
        if hi - lo <= 1e-300:
            warnings.warn("constant series discretizes to a single symbol")
            return np.zeros(series.shape, dtype=np.int64)
        edges = np.linspace(lo, hi, n_bins + 1)
    elif strategy == "explicit_edges":
        if edges is None:
            raise ValueError("explicit_edges needs edges")
        edges = np.asarray(edges, dtype=float)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    syms = np.searchsorted(edges, series, side="right") - 1
    return np.clip(syms, 0, len(edges) - 2).astype(np.int64)


def symbolize(series) -> np.ndarray:
    """Symbols for an already-discrete series (e.g. a two-level drive)."""
    _, syms = np.unique(np.asarray(series), return_inverse=True)
    return syms.astype(np.int64)


def joint_histogram(s_syms, x1_syms, x2_syms, dims=None) -> DiscreteJoint:
    """Normalized count table over symbol triples."""
    s = np.asarray(s_syms, dtype=np.int64)
    x1 = np.asarray(x1_syms, dtype=np.int64)
    x2 = np.asarray(x2_syms, dtype=np.int64)
    if not (s.shape == x1.shape == x2.shape) or s.ndim != 1 or s.size == 0:
        raise ValueError("symbol streams must be equal-length 1-d and nonempty")
    if dims is None:
        dims = (int(s.max()) + 1, int(x1.max()) + 1, int(x2.max()) + 1)
    flat = (s * dims[1] + x1) * dims[2] + x2
    counts = np.bincount(flat, minlength=dims[0] * dims[1] * dims[2])
    return DiscreteJoint(counts.reshape(dims) / s.size)


def _mi_table(pxy: np.ndarray) -> float:
    """MI in bits between the two axes of a 2-d joint table."""
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    mask = pxy > 0
    ratio = pxy[mask] / (px @ py)[mask]
    return float(np.sum(pxy[mask] * np.log(ratio)) / _LOG2)


def mutual_information(p: DiscreteJoint, target: str = "joint") -> float:
    """I(s : target) in bits; target is 'x1', 'x2' or 'joint' for (X1,X2)."""
    if target == "joint":
        ns = p.dims[0]
        return _mi_table(p.probs.reshape(ns, -1))
    if target in ("x1", "x2"):
        return _mi_table(p.pairwise(1 if target == "x1" else 2))
    raise ValueError(f"unknown target {target!r}")


def co_information(p: DiscreteJoint) -> float:
    """I(s:X1) + I(s:X2) - I(s:(X1,X2)); negative values signal synergy."""
    return (mutual_information(p, "x1") + mutual_information(p, "x2")
            - mutual_information(p, "joint"))


@dataclass(frozen=True)
class PIDResult:
    mi_joint: float
    mi_1: float
    mi_2: float
    redundancy: float
    synergy: float
    unique1: float
    unique2: float
    syn_norm: float
    rdn_norm: float


# --- constrained minimization of I_Q over the marginal-preserving set ---
#
# The per-cycle primitives run thousands of times per empirical table, so
# they are compiled; the Python wrappers keep the error semantics.

@njit(cache=True)
def _ipf_core(q, rows, cols, tol, max_sweeps):
    ns, n1 = rows.shape
    n2 = cols.shape[1]
    r = np.empty((ns, n1, n2))
    for s in range(ns):
        for i in range(n1):
            keep_row = rows[s, i] > 0.0
            for j in range(n2):
                ok = keep_row and cols[s, j] > 0.0
                r[s, i, j] = q[i, j] if ok else 0.0
    for _ in range(max_sweeps):
        err = 0.0
        for s in range(ns):
            for i in range(n1):
                target = rows[s, i]
                if target <= 0.0:
                    continue
                tot = 0.0
                for j in range(n2):
                    tot += r[s, i, j]
                if tot <= 0.0:
                    return r, 1
                scale = target / tot
                for j in range(n2):
                    r[s, i, j] *= scale
            for j in range(n2):
                target = cols[s, j]
                if target <= 0.0:
                    continue
                tot = 0.0
                for i in range(n1):
                    tot += r[s, i, j]
                if tot <= 0.0:
                    return r, 2
                scale = target / tot
                for i in range(n1):
                    r[s, i, j] *= scale
            for i in range(n1):
                tot = 0.0
                for j in range(n2):
                    tot += r[s, i, j]
                dev = abs(tot - rows[s, i])
                if dev > err:
                    err = dev
        if err < tol:
            break
    return r, 0


def _ipf_all(q: np.ndarray, rows: np.ndarray, cols: np.ndarray,
             tol: float, max_sweeps: int) -> np.ndarray:
    """Information projections of q onto every slice polytope at once.

    q is one reference table; rows (ns, n1) and cols (ns, n2) carry each
    slice's marginal targets.  Multiplicative sweeps preserve the zero
    pattern, so support never grows beyond supp(q).
    """
    r, status = _ipf_core(q, rows, cols, tol, max_sweeps)
    if status == 1:
        raise OptimizationError(
            "projection lost the support of a required row", np.inf)
    if status == 2:
        raise OptimizationError(
            "projection lost the support of a required column", np.inf)
    return r


@njit(cache=True)
def _round_core(r, rows, cols):
    ns, n1, n2 = r.shape
    out = np.empty_like(r)
    for s in range(ns):
        for i in range(n1):
            for j in range(n2):
                out[s, i, j] = max(r[s, i, j], 0.0)
        for i in range(n1):
            tot = 0.0
            for j in range(n2):
                tot += out[s, i, j]
            if tot > rows[s, i] and tot > 0.0:
                scale = rows[s, i] / tot
                for j in range(n2):
                    out[s, i, j] *= scale
        for j in range(n2):
            tot = 0.0
            for i in range(n1):
                tot += out[s, i, j]
            if tot > cols[s, j] and tot > 0.0:
                scale = cols[s, j] / tot
                for i in range(n1):
                    out[s, i, j] *= scale
        dr = np.empty(n1)
        dc = np.empty(n2)
        total = 0.0
        for i in range(n1):
            tot = 0.0
            for j in range(n2):
                tot += out[s, i, j]
            dr[i] = max(rows[s, i] - tot, 0.0)
            total += dr[i]
        for j in range(n2):
            tot = 0.0
            for i in range(n1):
                tot += out[s, i, j]
            dc[j] = max(cols[s, j] - tot, 0.0)
        if total > 0.0:
            for i in range(n1):
                for j in range(n2):
                    out[s, i, j] += dr[i] * dc[j] / total
    return out


def _round_to_marginals(r: np.ndarray, rows: np.ndarray,
                        cols: np.ndarray) -> np.ndarray:
    """Repair each slice's marginals exactly by scaling down then topping up.

    Scaling rows and columns that overshoot leaves only nonnegative deficits,
    which an additive rank-one patch fills; the result is exactly feasible
    and differs from the input by at most the original marginal error.
    """
    return _round_core(np.asarray(r, dtype=np.float64), rows, cols)


@njit(cache=True)
def _objective_core(ps, slices, q):
    ns, n1, n2 = slices.shape
    total = 0.0
    for s in range(ns):
        acc = 0.0
        for i in range(n1):
            for j in range(n2):
                x = slices[s, i, j]
                if x > 0.0 and q[i, j] > 0.0:
                    acc += x * (np.log(x) - np.log(q[i, j]))
        total += ps[s] * acc
    return total


def _objective_bits(ps, slices, q) -> float:
    """sum_s P(s) KL(R_s || q), in bits; 0 log 0 terms excluded.

    Taken as a log difference so subnormal mixture cells cannot overflow
    the ratio.
    """
    return _objective_core(ps, slices, q) / _LOG2


@njit(cache=True)
def _mixture_core(ps, slices):
    ns, n1, n2 = slices.shape
    q = np.zeros((n1, n2))
    for s in range(ns):
        for i in range(n1):
            for j in range(n2):
                q[i, j] += ps[s] * slices[s, i, j]
    return q


def _mixture(ps, slices) -> np.ndarray:
    return _mixture_core(ps, slices)


def _minimize_projection(ps, rows, cols, tol, max_iter):
    """Alternate the mixture update with per-slice information projections.

    The plain alternation is monotone but crawls when the optimum sits on a
    polytope face (cells decaying to zero multiplicatively), so each cycle
    also tries two descent candidates, each repaired to exact feasibility:
    a quadratic extrapolation of the fixed-point sequence, accepted whenever
    it does not lose ground on the cycle start (its step length doubles
    while accepted), and, once progress stalls, a face snap that zeroes
    near-vanished cells outright.  Acceptance is by objective value, so both
    are safe on convex instances.  Inner projections run with a tolerance
    tied to the outer progress; a cycle that fails to descend means they
    were too loose for this instance (the feasibility repair then injects
    noise above the true drop), so the iterate is held and the inner budget
    escalated rather than accepting a regression.
    """
    def step(slices, inner_tol, sweeps):
        # rounding keeps every iterate exactly feasible, so objective values
        # of competing candidates stay comparable
        return _round_to_marginals(
            _ipf_all(_mixture(ps, slices), rows, cols, inner_tol, sweeps),
            rows, cols)

    def fval(slices):
        return _objective_bits(ps, slices, _mixture(ps, slices))

    slices = rows[:, :, None] * cols[:, None, :]
    obj = fval(slices)
    drop = np.inf
    inner_tol = 1e-8
    sweeps = 100
    boost = 1.0
    for _ in range(max_iter):
        x1 = step(slices, inner_tol, sweeps)
        x2 = step(x1, inner_tol, sweeps)
        accepted, f_acc = x2, fval(x2)
        r = x1 - slices
        v = x2 - 2.0 * x1 + slices
        vv = float((v * v).sum())
        if vv > 1e-30:
            alpha = -np.sqrt(float((r * r).sum()) / vv) * boost
            cand = slices - 2.0 * alpha * r + alpha * alpha * v
            cand = _round_to_marginals(np.clip(cand, 0.0, None), rows, cols)
            cand = step(cand, inner_tol, sweeps)
            f_cand = fval(cand)
            if f_cand <= obj:
                boost = min(boost * 2.0, 64.0)
                if f_cand <= f_acc:
                    accepted, f_acc = cand, f_cand
            else:
                boost = max(boost * 0.5, 1.0)
        if abs(obj - f_acc) < 1e-5:
            cutoff = 1e-2 * accepted.max(axis=(1, 2), keepdims=True)
            snapped = np.where(accepted < cutoff, 0.0, accepted)
            if (snapped < accepted).any():
                cand = step(_round_to_marginals(snapped, rows, cols),
                            inner_tol, sweeps)
                f_cand = fval(cand)
                if f_cand < f_acc:
                    accepted, f_acc = cand, f_cand
        drop = obj - f_acc
        if drop <= -tol:
            inner_tol = max(inner_tol * 1e-2, 1e-15)
            sweeps = min(sweeps * 4, 200000)
            continue
        if f_acc <= obj:
            slices, obj = accepted, f_acc
        if abs(drop) < tol:
            slices = _round_to_marginals(
                _ipf_all(_mixture(ps, slices), rows, cols, 1e-15, 20000),
                rows, cols)
            return fval(slices), slices
        inner_tol = min(inner_tol, max(1e-13, abs(drop) * 1e-2))
    raise OptimizationError(
        f"no convergence after {max_iter} iterations "
        f"(last objective change {drop:.3e} bits)", float(abs(drop)))


def _free_cells(shape):
    return [(i, j) for i in range(shape[0] - 1) for j in range(shape[1] - 1)]


def _minimize_grid(ps, rows, cols, tol, levels: int = 6, points: int = 33):
    """Cyclic per-cell grid scans with shrinking windows.

    Fallback for alphabets small enough that each slice has only a few free
    cells; each interior cell moves within the box allowed by nonnegativity
    of its row/column complements, all other cells adjusting along the last
    row and column.
    """
    slices = rows[:, :, None] * cols[:, None, :]

    def objective():
        return _objective_bits(ps, slices, _mixture(ps, slices))

    def move(r, i, j, delta):
        r[i, j] += delta
        r[i, -1] -= delta
        r[-1, j] -= delta
        r[-1, -1] += delta

    obj = objective()
    width = 1.0
    for _ in range(levels):
        for _ in range(200):
            start_obj = obj
            for k in range(slices.shape[0]):
                r = slices[k]
                for (i, j) in _free_cells(r.shape):
                    lo = -min(r[i, j], r[-1, -1])
                    hi = min(r[i, -1], r[-1, j])
                    lo, hi = lo * width, hi * width
                    if hi - lo <= 0:
                        continue
                    best_d, best_obj = 0.0, obj
                    for d in np.linspace(lo, hi, points):
                        move(r, i, j, d)
                        val = objective()
                        move(r, i, j, -d)
                        if val < best_obj:
                            best_d, best_obj = d, val
                    if best_d != 0.0:
                        move(r, i, j, best_d)
                        obj = best_obj
            if start_obj - obj < tol * 0.1:
                break
        width *= 0.25
    return obj, slices


def broja_pid(p: DiscreteJoint, tol: float = 1e-9, max_iter: int = 20000,
              method: str = "projection", return_q: bool = False):
    """Partial information decomposition of I(s:(X1,X2)).

    Synergy is the information lost at the constrained minimum, redundancy
    the co-information gained there; unique parts follow from the pairwise
    informations, which every feasible Q shares with P.
    """
    mi_joint = mutual_information(p, "joint")
    mi_1 = mutual_information(p, "x1")
    mi_2 = mutual_information(p, "x2")

    ps_full = p.marginal_s()
    keep = np.nonzero(ps_full > 0)[0]
    ps = ps_full[keep]
    rows = np.stack([p.pairwise(1)[s] / ps_full[s] for s in keep])
    cols = np.stack([p.pairwise(2)[s] / ps_full[s] for s in keep])

    if method == "projection":
        mi_min, slices = _minimize_projection(ps, rows, cols, tol, max_iter)
    elif method == "grid":
        if max(p.dims[1], p.dims[2]) > 3:
            raise ValueError("grid method supports at most 3 symbols per readout")
        mi_min, slices = _minimize_grid(ps, rows, cols, tol)
    else:
        raise ValueError(f"unknown method {method!r}")

    redundancy = mi_1 + mi_2 - mi_min
    synergy = mi_joint - mi_min
    unique1 = mi_1 - redundancy
    unique2 = mi_2 - redundancy

    atoms = {"redundancy": redundancy, "synergy": synergy,
             "unique1": unique1, "unique2": unique2}
    for name, val in atoms.items():
        if val < -1e-9:
            raise OptimizationError(
                f"{name} = {val:.3e} bits is negative beyond tolerance",
                float(-val))
        atoms[name] = max(val, 0.0)

    result = PIDResult(
        mi_joint=mi_joint, mi_1=mi_1, mi_2=mi_2,
        redundancy=atoms["redundancy"], synergy=atoms["synergy"],
        unique1=atoms["unique1"], unique2=atoms["unique2"],
        syn_norm=atoms["synergy"] / mi_joint if mi_joint > 1e-9 else 0.0,
        rdn_norm=atoms["redundancy"] / mi_joint if mi_joint > 1e-9 else 0.0,
    )
    if not return_q:
        return result
    q_opt = np.zeros_like(p.probs)
    q_opt[keep] = ps[:, None, None] * slices
    return result, q_opt
