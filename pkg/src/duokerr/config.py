"""Experiment configuration: presets, schema validation, defaults.

A config document is YAML with five optional sections (params, sweep, signal,
sampling, analysis) on top of two scalar keys (regime, task).  Unknown keys
anywhere are rejected with their path, so typos fail loudly instead of
silently running defaults.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass

import yaml

from .fockspace import FockCutoff
from .params import SystemParams

# Drive/interaction presets; detuning and loss are shared by all three.
REGIME_PRESETS = {
    "meanfield": {"f_strength": 2.0, "u1": 6.25e-3, "u2": 1.25e-2},
    "quantum": {"f_strength": 0.2, "u1": 4.0, "u2": 8.0},
    "cumulant": {"f_strength": 0.5, "u1": 0.2, "u2": 0.4},
}
_BASE = {"delta": -2.0, "gamma": 0.5, "j_coupling": 2.0}

_SWEEPABLE = ("delta", "j_coupling", "u1", "u2", "gamma", "f_strength")
_TASKS = ("pid", "memory")
_SIMULATORS = ("quantum", "meanfield", "cumulant")
_SIGNALS = ("telegraph", "uniform")


class ConfigError(ValueError):
    """Schema violation, reported with the offending key path."""


@dataclass(frozen=True)
class ExperimentConfig:
    regime: str
    task: str
    params: SystemParams
    simulator: str
    sweep_parameter: str
    sweep_values: tuple
    signal_kind: str
    switch_rate: float
    update_interval: float
    dt: float
    washout: float
    duration: float
    realizations: int
    seed: int
    alpha0: float = 0.0
    output_bins: int = 16
    input_bins: int | None = None
    pid_tol: float = 1e-9
    lag: int = 0
    max_delay: int = 10
    train_frac: float = 0.7
    ridge: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["params"] = asdict(self.params)
        d["params"]["cutoff"] = self.params.cutoff.n_max
        d["sweep_values"] = list(self.sweep_values)
        return d

    @property
    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _require(section: dict, path: str, allowed: dict):
    """Fill defaults and reject unknown keys; returns the merged section."""
    merged = dict(allowed)
    for key, val in section.items():
        if key not in allowed:
            raise ConfigError(f"unknown key {path}.{key}")
        merged[key] = val
    return merged


def _positive(value, path, kind=float, minimum=None, strict=False):
    try:
        value = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{path} must be {kind.__name__}") from None
    if minimum is not None and (value <= minimum if strict else value < minimum):
        op = ">" if strict else ">="
        raise ConfigError(f"{path} must be {op} {minimum}")
    return value


def parse_config(doc) -> ExperimentConfig:
    """Validate a YAML document (text, mapping, or file path) into a config."""
    if isinstance(doc, str):
        doc = yaml.safe_load(doc)
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a mapping")

    top = _require(doc, "config", {
        "regime": "quantum", "task": "pid", "simulator": None,
        "params": {}, "sweep": {}, "signal": {}, "sampling": {},
        "analysis": {},
    })
    regime = top["regime"]
    if regime not in REGIME_PRESETS:
        raise ConfigError(
            f"unknown regime {regime!r}; valid presets: "
            f"{', '.join(sorted(REGIME_PRESETS))}")
    task = top["task"]
    if task not in _TASKS:
        raise ConfigError(f"task must be one of {_TASKS}")
    simulator = top["simulator"] or regime
    if simulator not in _SIMULATORS:
        raise ConfigError(f"simulator must be one of {_SIMULATORS}")

    p = _require(top["params"] or {}, "params", {
        **_BASE, **REGIME_PRESETS[regime], "cutoff": 10})
    params = SystemParams(
        delta=float(p["delta"]), j_coupling=float(p["j_coupling"]),
        u1=float(p["u1"]), u2=float(p["u2"]), gamma=float(p["gamma"]),
        f_strength=float(p["f_strength"]),
        cutoff=FockCutoff(int(p["cutoff"])),
    )

    sweep = _require(top["sweep"] or {}, "sweep", {
        "parameter": "j_coupling", "values": None})
    if sweep["parameter"] not in _SWEEPABLE:
        raise ConfigError(f"sweep.parameter must be one of {_SWEEPABLE}")
    values = sweep["values"]
    if values is None:
        values = [getattr(params, sweep["parameter"])]
    try:
        values = tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigError("sweep.values must be a list of numbers") from None
    if not values or any(not math.isfinite(v) for v in values):
        raise ConfigError("sweep.values must be finite and nonempty")

    pid_task = task == "pid"
    sig = _require(top["signal"] or {}, "signal", {
        "kind": "telegraph" if pid_task else "uniform",
        "switch_rate": 1.0,
        "update_interval": 1.0 if pid_task else 0.01,
    })
    if sig["kind"] not in _SIGNALS:
        raise ConfigError(f"signal.kind must be one of {_SIGNALS}")

    interval = _positive(sig["update_interval"], "signal.update_interval",
                         float, 0.0, strict=True)
    samp = _require(top["sampling"] or {}, "sampling", {
        "dt": 0.01,
        "washout": 20.0 if pid_task else 10.0,
        "duration": 1e5 * interval if pid_task else 50.0,
        "realizations": 50,
        "seed": 0,
        "alpha0": 0.0,
    })
    ana = _require(top["analysis"] or {}, "analysis", {
        "output_bins": 16, "input_bins": None, "pid_tol": 1e-9, "lag": 0,
        "max_delay": 10, "train_frac": 0.7, "ridge": 0.0,
    })

    return ExperimentConfig(
        regime=regime, task=task, params=params, simulator=simulator,
        sweep_parameter=sweep["parameter"], sweep_values=values,
        signal_kind=sig["kind"],
        switch_rate=_positive(sig["switch_rate"], "signal.switch_rate",
                              float, 0.0, strict=True),
        update_interval=interval,
        dt=_positive(samp["dt"], "sampling.dt", float, 0.0, strict=True),
        washout=_positive(samp["washout"], "sampling.washout", float, 0.0),
        duration=_positive(samp["duration"], "sampling.duration",
                           float, 0.0, strict=True),
        realizations=_positive(samp["realizations"], "sampling.realizations",
                               int, 1),
        seed=int(samp["seed"]),
        alpha0=float(samp["alpha0"]),
        output_bins=_positive(ana["output_bins"], "analysis.output_bins",
                              int, 2),
        input_bins=(None if ana["input_bins"] is None else
                    _positive(ana["input_bins"], "analysis.input_bins", int, 2)),
        pid_tol=_positive(ana["pid_tol"], "analysis.pid_tol", float, 0.0,
                          strict=True),
        lag=_positive(ana["lag"], "analysis.lag", int, 0),
        max_delay=_positive(ana["max_delay"], "analysis.max_delay", int, 1),
        train_frac=_positive(ana["train_frac"], "analysis.train_frac",
                             float, 0.0, strict=True),
        ridge=_positive(ana["ridge"], "analysis.ridge", float, 0.0),
    )


_FLAT_KEYS = {
    "sweep_parameter": ("sweep", "parameter"),
    "sweep_values": ("sweep", "values"),
    "signal_kind": ("signal", "kind"),
    "switch_rate": ("signal", "switch_rate"),
    "update_interval": ("signal", "update_interval"),
    "dt": ("sampling", "dt"),
    "washout": ("sampling", "washout"),
    "duration": ("sampling", "duration"),
    "realizations": ("sampling", "realizations"),
    "seed": ("sampling", "seed"),
    "alpha0": ("sampling", "alpha0"),
    "output_bins": ("analysis", "output_bins"),
    "input_bins": ("analysis", "input_bins"),
    "pid_tol": ("analysis", "pid_tol"),
    "lag": ("analysis", "lag"),
    "max_delay": ("analysis", "max_delay"),
    "train_frac": ("analysis", "train_frac"),
    "ridge": ("analysis", "ridge"),
}
for _name in ("delta", "j_coupling", "u1", "u2", "gamma", "f_strength",
              "cutoff"):
    _FLAT_KEYS[_name] = ("params", _name)


def preset_config(regime: str, task: str = "pid", **overrides) -> ExperimentConfig:
    """Programmatic config builder used by figure manifests and tests.

    Accepts either whole config sections (``params={...}``) or the flat
    field names of ExperimentConfig (``sweep_values=[...]``, ``gamma=1.0``),
    which are routed into their sections.
    """
    doc = {"regime": regime, "task": task}
    for section in ("params", "sweep", "signal", "sampling", "analysis"):
        if section in overrides:
            doc[section] = dict(overrides.pop(section))
    for key in list(overrides):
        if key in _FLAT_KEYS:
            section, name = _FLAT_KEYS[key]
            doc.setdefault(section, {})[name] = overrides.pop(key)
    doc.update(overrides)
    return parse_config(doc)
