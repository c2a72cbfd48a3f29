"""Sweep orchestration and CSV persistence.

One sweep point = one value of the swept system parameter; realizations
inside a point differ only by the drive seed, spawned as (point, realization)
from the master seed, so reruns are bit-identical regardless of scheduling.
Outputs are CSV (12 significant digits) plus a JSON sidecar carrying the
config, its hash and every seed key; nothing time-stamped, so replaying a
config reproduces files byte for byte.
"""

from __future__ import annotations

import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .config import ExperimentConfig, parse_config
from .drive import telegraph, uniform_iid
from .fockspace import vacuum_density
from .infodecomp import (OptimizationError, broja_pid, co_information,
                         discretize, joint_histogram, mutual_information,
                         symbolize)
from .lindblad import IntegrationError, evolve, quantum_mutual_information
from .memory import mc_curve
from .params import SystemParams
from .response import effective_potential, scan_poles
from .semiclassical import integrate

_PID_METRICS = ("mi_joint", "mi_1", "mi_2", "coi", "redundancy", "synergy",
                "unique1", "unique2", "syn_norm", "rdn_norm")


@dataclass
class SweepRecord:
    value: float
    metrics: dict
    seeds: list
    config_hash: str
    error: str | None = None


def _make_signal(config: ExperimentConfig, seed):
    if config.signal_kind == "telegraph":
        return telegraph(config.switch_rate, config.update_interval,
                         config.duration, seed)
    return uniform_iid(config.update_interval, config.duration, seed)


def _simulate_pid(config: ExperimentConfig, params: SystemParams, signal):
    """One realization; returns (inputs, x1, x2, qmi-or-None) post-washout."""
    if config.simulator == "quantum":
        traj = evolve(vacuum_density(params.cutoff), params, signal,
                      config.dt, washout=config.washout, average_state=True)
        qmi = quantum_mutual_information(traj.avg_state)
    else:
        traj = integrate(config.simulator, None, params, signal, config.dt,
                         washout=config.washout)
        qmi = None
    lag = config.lag
    if lag >= traj.times.size:
        raise ValueError("lag leaves no paired samples")
    if lag:
        return traj.inputs[:-lag], traj.x1[lag:], traj.x2[lag:], qmi
    return traj.inputs, traj.x1, traj.x2, qmi


def _input_symbols(pooled, per_real, input_bins):
    """Natural alphabet for few-valued drives, else equal-width bins."""
    uniq = np.unique(pooled)
    if input_bins is None and uniq.size <= 8:
        lookup = {v: i for i, v in enumerate(uniq)}
        return [np.array([lookup[v] for v in arr], dtype=np.int64)
                for arr in per_real]
    n_bins = input_bins or 8
    edges = np.linspace(pooled.min(), pooled.max(), n_bins + 1)
    return [discretize(arr, strategy="explicit_edges", edges=edges)
            for arr in per_real]


def _mean_se(values):
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    se = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
    return mean, se


def _pid_point(config: ExperimentConfig, params: SystemParams,
               point_idx: int) -> tuple:
    runs = []
    seeds = []
    for r in range(config.realizations):
        seed = (config.seed, (point_idx, r))
        seeds.append([point_idx, r])
        runs.append(_simulate_pid(config, params, _make_signal(config, seed)))

    all_s = np.concatenate([run[0] for run in runs])
    x1_edges = np.linspace(min(run[1].min() for run in runs),
                           max(run[1].max() for run in runs),
                           config.output_bins + 1)
    x2_edges = np.linspace(min(run[2].min() for run in runs),
                           max(run[2].max() for run in runs),
                           config.output_bins + 1)
    s_syms = _input_symbols(all_s, [run[0] for run in runs], config.input_bins)
    dims = (max(int(s.max()) for s in s_syms) + 1,
            config.output_bins, config.output_bins)

    per_real = {name: [] for name in _PID_METRICS}
    qmis = []
    pooled_streams = []
    for (inputs, x1, x2, qmi), s in zip(runs, s_syms):
        x1s = discretize(x1, strategy="explicit_edges", edges=x1_edges)
        x2s = discretize(x2, strategy="explicit_edges", edges=x2_edges)
        pooled_streams.append((s, x1s, x2s))
        joint = joint_histogram(s, x1s, x2s, dims=dims)
        pid = broja_pid(joint, tol=config.pid_tol)
        coi = co_information(joint)
        for name in _PID_METRICS:
            per_real[name].append(coi if name == "coi" else getattr(pid, name))
        if qmi is not None:
            qmis.append(qmi)

    metrics = {}
    for name in _PID_METRICS:
        mean, se = _mean_se(per_real[name])
        metrics[f"{name}_mean"] = mean
        metrics[f"{name}_se"] = se
    if qmis:
        metrics["qmi_mean"], metrics["qmi_se"] = _mean_se(qmis)

    pooled = joint_histogram(
        np.concatenate([t[0] for t in pooled_streams]),
        np.concatenate([t[1] for t in pooled_streams]),
        np.concatenate([t[2] for t in pooled_streams]), dims=dims)
    pid = broja_pid(pooled, tol=config.pid_tol)
    for name in _PID_METRICS:
        metrics[f"pooled_{name}"] = (co_information(pooled) if name == "coi"
                                     else getattr(pid, name))
    metrics["samples"] = float(all_s.size)
    return metrics, seeds


def _memory_point(config: ExperimentConfig, params: SystemParams,
                  point_idx: int) -> tuple:
    if config.signal_kind != "uniform":
        raise ValueError("the recall task is defined for uniform drive signals")
    curve = mc_curve(params, config.simulator, config.max_delay,
                     config.realizations, seed=(config.seed, (point_idx,)),
                     dt=config.dt, t_end=config.duration,
                     washout=config.washout, alpha0=config.alpha0,
                     train_frac=config.train_frac, lam=config.ridge)
    metrics = {}
    for n, m, se in zip(curve.delays, curve.mc, curve.mc_stderr):
        metrics[f"mc{n}_mean"] = float(m)
        metrics[f"mc{n}_se"] = float(se)
    metrics["gamma_fit"] = curve.gamma_fit
    metrics["intercept"] = curve.intercept
    seeds = [[point_idx, r] for r in range(config.realizations)]
    return metrics, seeds


def run_point(config: ExperimentConfig, point_idx: int, value: float) -> SweepRecord:
    params = config.params.with_(**{config.sweep_parameter: float(value)})
    try:
        if config.task == "pid":
            metrics, seeds = _pid_point(config, params, point_idx)
        else:
            metrics, seeds = _memory_point(config, params, point_idx)
        return SweepRecord(value=float(value), metrics=metrics, seeds=seeds,
                           config_hash=config.config_hash)
    except (IntegrationError, OptimizationError, ValueError) as exc:
        return SweepRecord(value=float(value), metrics={}, seeds=[],
                           config_hash=config.config_hash, error=str(exc))


def run_sweep(config: ExperimentConfig) -> list:
    """All sweep points in order; failures are recorded, not raised."""
    points = list(enumerate(config.sweep_values))
    workers = int(os.environ.get("DUOKERR_WORKERS", "1"))
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run_point, [config] * len(points),
                                 [i for i, _ in points],
                                 [v for _, v in points]))
    return [run_point(config, i, v) for i, v in points]


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def emit_csv(records, path, config: ExperimentConfig):
    """Write sweep records plus a JSON sidecar for exact replay."""
    records = list(records)
    if not records:
        raise ValueError("no records to write")
    metric_names = []
    for rec in records:
        if rec.metrics:
            metric_names = list(rec.metrics)
            break
    header = [config.sweep_parameter, *metric_names, "error"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for rec in records:
            row = [_fmt(rec.value)]
            row += [_fmt(rec.metrics[m]) if m in rec.metrics else "nan"
                    for m in metric_names]
            row.append(rec.error or "")
            writer.writerow(row)
    sidecar = {
        "version": __version__,
        "config_hash": config.config_hash,
        "master_seed": config.seed,
        "config": config.to_dict(),
        "records": [{"value": rec.value, "seeds": rec.seeds,
                     "error": rec.error} for rec in records],
    }
    with open(f"{path}.meta.json", "w") as fh:
        json.dump(sidecar, fh, sort_keys=True, indent=2)
        fh.write("\n")


# --- named figure-data experiments ---

_J_SWEEP = [round(0.25 * k, 2) for k in range(13)]


def _pid_figure(regime, signal_kind="telegraph", gamma=None, **extra):
    sampling = {"duration": 300.0, "washout": 20.0, "realizations": 50,
                "seed": 0}
    if regime == "meanfield":
        sampling["duration"] = 2000.0
    params = {}
    if gamma is not None:
        params["gamma"] = gamma
    if regime == "quantum":
        params["cutoff"] = 6
    doc = {"regime": regime, "task": "pid",
           "sweep": {"parameter": "j_coupling", "values": _J_SWEEP},
           "signal": {"kind": signal_kind},
           "sampling": sampling, "params": params}
    doc.update(extra)
    return parse_config(doc)


def _memory_figure(parameter, values, max_delay, realizations=50):
    # displaced start: recall contrast across J needs the Kerr-active
    # relaxation window (see mc_curve), so the window is short and the
    # washout only clips the feature rows closest to the preparation
    return parse_config({
        "regime": "quantum", "task": "memory", "params": {"cutoff": 6},
        "sweep": {"parameter": parameter, "values": values},
        "sampling": {"duration": 6.0, "washout": 0.5, "alpha0": 0.5,
                     "realizations": realizations, "seed": 0},
        "analysis": {"max_delay": max_delay},
    })


def _write_potential_table(path):
    grid = np.linspace(-3.0, 3.0, 121)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "re_alpha1", "re_alpha2", "potential"])
        for j in (1.0, 2.0, 3.0):
            params = SystemParams(delta=-2.0, j_coupling=j, u1=6.25e-3,
                                  u2=1.25e-2, gamma=0.5, f_strength=2.0)
            for a1 in grid:
                for a2 in grid:
                    v = effective_potential(a1, a2, params)
                    writer.writerow([_fmt(j), _fmt(a1), _fmt(a2), _fmt(v)])


def _write_pole_table(path):
    j_values = np.arange(0.0, 3.0001, 0.05)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["gamma", "j", "re_slow", "im_slow",
                         "re_fast", "im_fast"])
        for gamma in (0.25, 0.5, 1.0):
            params = SystemParams(delta=-2.0, j_coupling=0.0, u1=0.0, u2=0.0,
                                  gamma=gamma, f_strength=0.0)
            for row in scan_poles(params, j_values):
                writer.writerow([_fmt(gamma)] + [_fmt(x) for x in row])


def figure_specs() -> dict:
    """Named experiments behind each published data panel."""
    return {
        "fig2_left": [("", _pid_figure("meanfield"))],
        "fig2_right": [("", _pid_figure("quantum"))],
        "fig3": [(regime, _pid_figure(regime))
                 for regime in ("meanfield", "cumulant", "quantum")],
        "fig4": [("", _write_potential_table)],
        "fig5": [("", _write_pole_table)],
        "fig6": [("", _pid_figure("quantum", signal_kind="uniform"))],
        "fig7": [(f"gamma{g:g}", _pid_figure("quantum", gamma=g))
                 for g in (0.5, 1.0, 2.0, 4.0)],
        "fig8a": [("", _memory_figure("j_coupling", _J_SWEEP[:9],
                                      max_delay=10))],
        "fig8b": [("", _memory_figure("j_coupling",
                                      [1.96, 1.97, 1.98, 1.99, 2.0],
                                      max_delay=20))],
        "fig9": [("", _memory_figure("gamma", [0.5, 1.0, 2.0], max_delay=20,
                                     realizations=100))],
        "figD1": [("", _pid_figure("cumulant"))],
    }


def run_figure(name: str, outdir: str) -> list:
    """Run one named experiment; returns the written CSV paths."""
    specs = figure_specs()
    if name not in specs:
        raise ValueError(f"unknown figure {name!r}; known: "
                         f"{', '.join(sorted(specs))}")
    os.makedirs(outdir, exist_ok=True)
    written = []
    for suffix, payload in specs[name]:
        stem = f"{name}_{suffix}" if suffix else name
        path = os.path.join(outdir, f"{stem}.csv")
        if callable(payload):
            payload(path)
        else:
            emit_csv(run_sweep(payload), path, payload)
        written.append(path)
    return written
