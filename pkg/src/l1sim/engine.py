"""Deterministic fixed-step closed-loop simulation.

At every sample boundary the engine computes the prediction error, updates
the disturbance estimate, updates the adaptive input (held over the interval)
and then integrates plant, reference model and predictor together with
classical RK4.  Identical inputs give bit-identical traces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .augmentation import (
    AugmentationConfig,
    ControlLawState,
    PiecewiseConstantLaw,
    build_control_law,
    control_update,
    predictor_deriv,
    resolve_predictor_gain,
)
from .errors import ConfigError, SimulationDiverged
from .plant import ReferenceSignal, UncertainPlant, plant_deriv, reference_model_deriv, reference_value


@dataclass(frozen=True)
class EngineConfig:
    """Time horizon and integrator refinement.

    The integrator step is the controller sample period divided by
    ``substeps_per_sample``, so it always divides the sample period exactly.
    """

    t_end: float = 10.0
    substeps_per_sample: int = 1

    def __post_init__(self):
        if not (self.t_end > 0.0):
            raise ConfigError(f"engine.t_end must be > 0, got {self.t_end}")
        if int(self.substeps_per_sample) != self.substeps_per_sample or self.substeps_per_sample < 1:
            raise ConfigError(
                f"engine.substeps_per_sample must be an integer >= 1, got {self.substeps_per_sample}"
            )

    def integrator_step(self, sample_period: float) -> float:
        return sample_period / self.substeps_per_sample


@dataclass
class SimTrace:
    """Time-indexed record of every closed-loop signal, one row per sample boundary."""

    t: np.ndarray
    r: np.ndarray
    y: np.ndarray
    y_m: np.ndarray
    u_a: np.ndarray      # (samples, m)
    sigma1: np.ndarray   # (samples, m)
    sigma2: np.ndarray   # (samples, n - m)
    x: np.ndarray        # (samples, n)
    x_hat: np.ndarray    # (samples, n)
    x_tilde: np.ndarray  # (samples, n)
    label: str = ""

    @property
    def n_samples(self) -> int:
        return self.t.shape[0]


def rk4_step(deriv, t: float, x: np.ndarray, h: float):
    """One classical 4th-order Runge-Kutta step of size h for dx/dt = deriv(t, x)."""
    if not (h > 0.0):
        raise ValueError(f"step size must be > 0, got {h}")
    k1 = deriv(t, x)
    k2 = deriv(t + 0.5 * h, x + (0.5 * h) * k1)
    k3 = deriv(t + 0.5 * h, x + (0.5 * h) * k2)
    k4 = deriv(t + h, x + h * k3)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _sample_count(t_end: float, sample_period: float) -> int:
    n = round(t_end / sample_period)
    if n < 1 or abs(n * sample_period - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise ConfigError(
            f"engine.t_end = {t_end} must be a whole number of controller sample "
            f"periods ({sample_period})"
        )
    return n


def run_closed_loop(
    plant: UncertainPlant,
    cfg: AugmentationConfig,
    sig: ReferenceSignal,
    eng: EngineConfig,
    label: str = "",
) -> SimTrace:
    """Simulate the closed loop and record every signal at each sample boundary."""
    T = cfg.sample_period
    n_steps = _sample_count(eng.t_end, T)
    h = eng.integrator_step(T)
    n, m, k = plant.n, plant.m, plant.n_unmatched

    adapter = PiecewiseConstantLaw(plant, cfg)
    law_state: ControlLawState = build_control_law(plant, cfg)
    l_gain = resolve_predictor_gain(plant, cfg)

    rows = n_steps + 1
    out = SimTrace(
        t=np.arange(rows) * T,
        r=np.zeros(rows),
        y=np.zeros(rows),
        y_m=np.zeros(rows),
        u_a=np.zeros((rows, m)),
        sigma1=np.zeros((rows, m)),
        sigma2=np.zeros((rows, k)),
        x=np.zeros((rows, n)),
        x_hat=np.zeros((rows, n)),
        x_tilde=np.zeros((rows, n)),
        label=label,
    )

    z = np.concatenate([plant.x0, plant.x0, plant.x0])  # [x, x_m, x_hat]
    held = {"u_a": np.zeros(m), "est": None, "r": 0.0}

    def deriv(t: float, state: np.ndarray) -> np.ndarray:
        x = state[:n]
        x_m = state[n : 2 * n]
        x_hat = state[2 * n :]
        est = held["est"]
        dx = plant_deriv(plant, x, held["u_a"], held["r"], t)
        dx_m = reference_model_deriv(plant, x_m, held["r"])
        dx_hat = predictor_deriv(plant, l_gain, x_hat, held["u_a"], held["r"], est, x_hat - x)
        return np.concatenate([dx, dx_m, dx_hat])

    for i in range(rows):
        t_i = i * T
        # LTV extension point: matrices are re-read every sample but constant
        # for every supported scenario; the estimator gain assumes they are.
        _A, _B1, _B2, C_t = plant.matrices_at(t_i)
        x = z[:n]
        x_m = z[n : 2 * n]
        x_hat = z[2 * n :]
        x_tilde = x_hat - x

        est = adapter.update(x_tilde, i)
        u_a = control_update(law_state, est)

        out.r[i] = reference_value(sig, t_i)
        out.y[i] = (C_t @ x).item()
        out.y_m[i] = (C_t @ x_m).item()
        out.u_a[i] = u_a
        out.sigma1[i] = est.matched
        out.sigma2[i] = est.unmatched
        out.x[i] = x
        out.x_hat[i] = x_hat
        out.x_tilde[i] = x_tilde

        if i == n_steps:
            break

        held["u_a"] = u_a
        held["est"] = est
        # overflow is detected via the finite check, not numpy warnings
        with np.errstate(over="ignore", invalid="ignore"):
            for j in range(eng.substeps_per_sample):
                t_sub = t_i + j * h
                held["r"] = reference_value(sig, t_sub)
                z = rk4_step(deriv, t_sub, z, h)
                if not np.all(np.isfinite(z)):
                    raise SimulationDiverged(t_sub + h, "closed-loop state is non-finite")
    return out
