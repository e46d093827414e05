"""Scenario files, built-in experiment presets, and batch execution.

A scenario is a nested key-value document (YAML) with ``plant``,
``uncertainty``, ``reference``, ``controller`` and ``engine`` sections;
matrices are written row-major as nested lists.  The built-in presets run
the standard SISO validation campaign: nominal step/ramp, disturbed step
with the augmentation off / matched-only / both full laws, and the
disturbed ramp comparison.
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .augmentation import (
    DEFAULT_BANDWIDTH,
    DEFAULT_SAMPLE_PERIOD,
    AugmentationConfig,
    PiecewiseConstantLaw,
    build_control_law,
)
from .engine import EngineConfig, SimTrace, run_closed_loop
from .errors import ConfigError
from .metrics import Metrics, compute_metrics
from .plant import ReferenceSignal, UncertainPlant, UncertaintySpec

PLANT_PRESETS: dict[str, dict] = {
    # second-order SISO benchmark: poles at -5 +/- 5j, feedforward gain 0.025
    "paper-siso": {
        "A": [[-10.0, -50.0], [1.0, 0.0]],
        "B1": [[2000.0], [0.0]],
        "C": [[0.0, 1.0]],
    },
}

_SECTIONS = ("name", "plant", "uncertainty", "reference", "controller", "engine", "output")
_PLANT_KEYS = ("preset", "A", "B1", "B2", "C", "x0")
_UNCERTAINTY_KEYS = ("matched", "unmatched", "onset")
_REFERENCE_KEYS = ("kind", "onset", "amplitude", "gradient")
_CONTROLLER_KEYS = (
    "law",
    "sample_period",
    "bandwidth_matched",
    "bandwidth_unmatched",
    "L_p",
)
_ENGINE_KEYS = ("t_end", "substeps_per_sample")
_OUTPUT_KEYS = ("csv", "plots")


@dataclass(frozen=True)
class Scenario:
    """A fully validated experiment: plant, command, tuning and horizon.

    ``write_csv`` / ``write_plots`` are the file's output defaults; the CLI
    flags add to them.
    """

    name: str
    plant: UncertainPlant
    uncertainty: UncertaintySpec
    signal: ReferenceSignal
    augmentation: AugmentationConfig
    engine: EngineConfig
    write_csv: bool = False
    write_plots: bool = False


@dataclass(frozen=True)
class RunResult:
    label: str
    trace: SimTrace
    metrics: Metrics


@dataclass(frozen=True)
class PresetResult:
    name: str
    runs: list[RunResult]
    shared_fingerprint: str


def _require_keys(section: dict, allowed: tuple, where: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key {where}.{key}; expected one of {sorted(allowed)}")


def _matrix(section: dict, key: str, where: str) -> np.ndarray | None:
    if key not in section or section[key] is None:
        return None
    try:
        m = np.asarray(section[key], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}.{key} is not a numeric matrix: {exc}") from exc
    if not np.all(np.isfinite(m)):
        raise ConfigError(f"{where}.{key} has non-finite entries")
    return m


def _vector(section: dict, key: str, where: str) -> np.ndarray | None:
    if key not in section or section[key] is None:
        return None
    raw = section[key]
    if np.isscalar(raw):
        raw = [raw]
    try:
        v = np.asarray(raw, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}.{key} is not a numeric vector: {exc}") from exc
    if not np.all(np.isfinite(v)):
        raise ConfigError(f"{where}.{key} has non-finite entries")
    return v


def _scalar(section: dict, key: str, where: str, default=None) -> float | None:
    if key not in section or section[key] is None:
        return default
    try:
        return float(section[key])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}.{key} must be a number, got {section[key]!r}") from exc


def build_scenario(cfg: dict, name: str | None = None, law_override: str | None = None) -> Scenario:
    """Validate a scenario document and construct every runtime object.

    Every validation failure names the offending key.  The control law is
    constructed once here so configuration errors (unstable predictor
    dynamics, non-minimum-phase plant under the dynamics-inverting law, ...)
    surface at load time rather than mid-run.
    """
    if not isinstance(cfg, dict):
        raise ConfigError(f"scenario document must be a mapping, got {type(cfg).__name__}")
    _require_keys(cfg, _SECTIONS, "scenario")

    plant_cfg = cfg.get("plant")
    if not isinstance(plant_cfg, dict):
        raise ConfigError("scenario is missing the plant section")
    _require_keys(plant_cfg, _PLANT_KEYS, "plant")
    preset = plant_cfg.get("preset")
    if preset is not None:
        if preset not in PLANT_PRESETS:
            raise ConfigError(
                f"plant.preset {preset!r} is unknown; available: {sorted(PLANT_PRESETS)}"
            )
        base = dict(PLANT_PRESETS[preset])
        base.update({k: v for k, v in plant_cfg.items() if k != "preset" and v is not None})
        plant_cfg = base
    for req in ("A", "B1", "C"):
        if req not in plant_cfg:
            raise ConfigError(f"plant.{req} is required (or use plant.preset)")

    unc_cfg = cfg.get("uncertainty") or {}
    if not isinstance(unc_cfg, dict):
        raise ConfigError("uncertainty section must be a mapping")
    _require_keys(unc_cfg, _UNCERTAINTY_KEYS, "uncertainty")

    ref_cfg = cfg.get("reference")
    if not isinstance(ref_cfg, dict):
        raise ConfigError("scenario is missing the reference section")
    _require_keys(ref_cfg, _REFERENCE_KEYS, "reference")

    ctl_cfg = cfg.get("controller")
    if not isinstance(ctl_cfg, dict):
        raise ConfigError("scenario is missing the controller section")
    _require_keys(ctl_cfg, _CONTROLLER_KEYS, "controller")

    eng_cfg = cfg.get("engine") or {}
    if not isinstance(eng_cfg, dict):
        raise ConfigError("engine section must be a mapping")
    _require_keys(eng_cfg, _ENGINE_KEYS, "engine")

    out_cfg = cfg.get("output") or {}
    if not isinstance(out_cfg, dict):
        raise ConfigError("output section must be a mapping")
    _require_keys(out_cfg, _OUTPUT_KEYS, "output")

    a = _matrix(plant_cfg, "A", "plant")
    b1 = _matrix(plant_cfg, "B1", "plant")
    b2 = _matrix(plant_cfg, "B2", "plant")
    c = _matrix(plant_cfg, "C", "plant")
    x0 = _vector(plant_cfg, "x0", "plant")
    if a is None or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError(f"plant.A must be a square matrix, got {None if a is None else a.shape}")
    n = a.shape[0]
    if b1 is None:
        raise ConfigError("plant.B1 is required")
    b1 = b1.reshape(n, -1) if b1.ndim == 1 else b1
    m = b1.shape[1]

    matched = _vector(unc_cfg, "matched", "uncertainty")
    unmatched = _vector(unc_cfg, "unmatched", "uncertainty")
    onset = _scalar(unc_cfg, "onset", "uncertainty", default=0.0)
    if matched is None:
        matched = np.zeros(m)
    if unmatched is None:
        unmatched = np.zeros(n - m)
    if matched.shape != (m,):
        raise ConfigError(f"uncertainty.matched must have {m} entries, got {matched.shape}")
    if unmatched.shape != (n - m,):
        raise ConfigError(f"uncertainty.unmatched must have {n - m} entries, got {unmatched.shape}")
    if onset < 0.0:
        raise ConfigError(f"uncertainty.onset must be >= 0, got {onset}")
    uncertainty = UncertaintySpec(matched=matched, unmatched=unmatched, onset=onset)

    try:
        plant = UncertainPlant.from_matrices(
            A=a,
            B1=b1,
            C=c,
            B2=b2,
            x0=x0,
            f1=uncertainty.matched_fn(),
            f2=uncertainty.unmatched_fn(),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    kind = ref_cfg.get("kind")
    if kind not in ("step", "ramp"):
        raise ConfigError(f"reference.kind must be 'step' or 'ramp', got {kind!r}")
    try:
        signal = ReferenceSignal(
            kind=kind,
            onset=_scalar(ref_cfg, "onset", "reference", default=0.0),
            amplitude=_scalar(ref_cfg, "amplitude", "reference"),
            gradient=_scalar(ref_cfg, "gradient", "reference"),
        )
    except ValueError as exc:
        raise ConfigError(f"reference: {exc}") from exc

    law = law_override if law_override is not None else ctl_cfg.get("law")
    if law is None:
        raise ConfigError("controller.law is required")
    augmentation = AugmentationConfig(
        law=str(law),
        sample_period=_scalar(ctl_cfg, "sample_period", "controller", default=DEFAULT_SAMPLE_PERIOD),
        bandwidth_matched=_scalar(ctl_cfg, "bandwidth_matched", "controller", default=DEFAULT_BANDWIDTH),
        bandwidth_unmatched=_scalar(
            ctl_cfg, "bandwidth_unmatched", "controller", default=DEFAULT_BANDWIDTH
        ),
        predictor_gain=_matrix(ctl_cfg, "L_p", "controller"),
    )

    engine = EngineConfig(
        t_end=_scalar(eng_cfg, "t_end", "engine", default=10.0),
        substeps_per_sample=int(eng_cfg.get("substeps_per_sample", 1)),
    )

    # surface construction-time errors (Hurwitz check, singular update gain,
    # transmission-zero gate, improper realizations) at load time
    PiecewiseConstantLaw(plant, augmentation)
    build_control_law(plant, augmentation)

    return Scenario(
        name=str(cfg.get("name") or name or "scenario"),
        plant=plant,
        uncertainty=uncertainty,
        signal=signal,
        augmentation=augmentation,
        engine=engine,
        write_csv=bool(out_cfg.get("csv", False)),
        write_plots=bool(out_cfg.get("plots", False)),
    )


def load_scenario(path, law_override: str | None = None) -> Scenario:
    """Parse and validate a scenario file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"scenario file not found: {path}")
    try:
        doc = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path} is not valid YAML: {exc}") from exc
    return build_scenario(doc, name=path.stem, law_override=law_override)


def scenario_fingerprint(scenario: Scenario) -> str:
    """Hash of everything two compared runs must share (all but the law)."""
    payload = {
        "A": scenario.plant.A.tolist(),
        "B1": scenario.plant.B1.tolist(),
        "B2": scenario.plant.B2.tolist(),
        "C": scenario.plant.C.tolist(),
        "x0": scenario.plant.x0.tolist(),
        "matched": scenario.uncertainty.matched.tolist(),
        "unmatched": scenario.uncertainty.unmatched.tolist(),
        "uncertainty_onset": scenario.uncertainty.onset,
        "signal": [scenario.signal.kind, scenario.signal.onset, scenario.signal.amplitude,
                   scenario.signal.gradient],
        "sample_period": scenario.augmentation.sample_period,
        "bandwidth_matched": scenario.augmentation.bandwidth_matched,
        "bandwidth_unmatched": scenario.augmentation.bandwidth_unmatched,
        "predictor_gain": None
        if scenario.augmentation.predictor_gain is None
        else scenario.augmentation.predictor_gain.tolist(),
        "t_end": scenario.engine.t_end,
        "substeps": scenario.engine.substeps_per_sample,
    }
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


_BASE_UNCERTAIN = {
    "plant": {"preset": "paper-siso"},
    # disturbances switch on with the command so the adaptation transient is
    # part of the recorded response
    "uncertainty": {"matched": [0.05], "unmatched": [0.001], "onset": 2.0},
    "reference": {"kind": "step", "onset": 2.0, "amplitude": 1.0},
    "controller": {"law": "off"},
    "engine": {"t_end": 10.0},
}


def _preset(reference: dict, uncertainty: dict | None, laws: list[str]) -> dict:
    doc = copy.deepcopy(_BASE_UNCERTAIN)
    doc["reference"] = reference
    if uncertainty is None:
        doc["uncertainty"] = {}
    else:
        doc["uncertainty"] = uncertainty
    return {"doc": doc, "laws": laws}


PRESETS: dict[str, dict] = {
    "nominal-step": _preset(
        {"kind": "step", "onset": 2.0, "amplitude": 1.0}, None, ["off"]
    ),
    "nominal-ramp": _preset(
        {"kind": "ramp", "onset": 2.0, "gradient": 1.0}, None, ["off"]
    ),
    "uncertain-step-off": _preset(
        {"kind": "step", "onset": 2.0, "amplitude": 1.0},
        {"matched": [0.05], "unmatched": [0.001], "onset": 2.0},
        ["off"],
    ),
    "uncertain-step-matched-only": _preset(
        {"kind": "step", "onset": 2.0, "amplitude": 1.0},
        {"matched": [0.05], "unmatched": [0.001], "onset": 2.0},
        ["matched_only"],
    ),
    "uncertain-step-compare": _preset(
        {"kind": "step", "onset": 2.0, "amplitude": 1.0},
        {"matched": [0.05], "unmatched": [0.001], "onset": 2.0},
        ["original", "modified"],
    ),
    "uncertain-ramp-compare": _preset(
        {"kind": "ramp", "onset": 2.0, "gradient": 1.0},
        {"matched": [0.05], "unmatched": [0.001], "onset": 2.0},
        ["original", "modified"],
    ),
}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def run_scenario(scenario: Scenario, label: str | None = None) -> RunResult:
    """Simulate one scenario and summarize the trace."""
    name = label if label is not None else scenario.augmentation.law
    trace = run_closed_loop(
        scenario.plant, scenario.augmentation, scenario.signal, scenario.engine, label=name
    )
    return RunResult(label=name, trace=trace, metrics=compute_metrics(trace, scenario.signal))


def run_preset(name: str, law_override: str | None = None) -> PresetResult:
    """Execute a built-in experiment; compare presets run every listed law
    on identical inputs."""
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {preset_names()}")
    spec = PRESETS[name]
    laws = [law_override] if law_override is not None else spec["laws"]
    runs: list[RunResult] = []
    fingerprints = set()
    for law in laws:
        scenario = build_scenario(copy.deepcopy(spec["doc"]), name=name, law_override=law)
        fingerprints.add(scenario_fingerprint(scenario))
        runs.append(run_scenario(scenario))
    if len(fingerprints) != 1:
        raise AssertionError(f"compared runs of {name} did not share identical inputs")
    return PresetResult(name=name, runs=runs, shared_fingerprint=fingerprints.pop())


def format_report(result: PresetResult) -> str:
    """Human-readable metrics summary, with deltas when two laws are compared."""
    lines = [f"scenario: {result.name}"]
    for run in result.runs:
        mt = run.metrics
        parts = [
            f"law={run.label:<13}",
            f"y(t_end)={run.trace.y[-1]: .6f}",
            f"ss_err={mt.steady_state_error:.3e}",
        ]
        if mt.overshoot_pct is not None:
            parts.append(f"overshoot={mt.overshoot_pct:.3f}%")
        if mt.settling_time_2pct is not None:
            parts.append(f"settle={mt.settling_time_2pct:.3f}s")
        elif mt.tracking_lag is None:
            parts.append("settle=not-settled")
        if mt.rise_time_10_90 is not None:
            parts.append(f"rise={mt.rise_time_10_90:.4f}s")
        if mt.tracking_lag is not None:
            parts.append(f"lag={mt.tracking_lag:.4f}")
        parts.append(f"peak_u_a={mt.peak_u_a:.4g}")
        lines.append("  ".join(parts))
    if len(result.runs) == 2:
        a, b = result.runs
        mask_len = max(2, int(0.1 * a.trace.n_samples))
        yss_a = float(np.mean(a.trace.y[-mask_len:]))
        yss_b = float(np.mean(b.trace.y[-mask_len:]))
        lines.append(
            f"compare: |y_ss({a.label}) - y_ss({b.label})| = {abs(yss_a - yss_b):.3e}"
        )
        if a.metrics.overshoot_pct is not None and b.metrics.overshoot_pct is not None:
            lines.append(
                f"compare: overshoot {a.label} {a.metrics.overshoot_pct:.3f}% vs "
                f"{b.label} {b.metrics.overshoot_pct:.3f}%"
            )
    return "\n".join(lines)
