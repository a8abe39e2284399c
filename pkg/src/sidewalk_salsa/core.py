"""Shared domain types, model parameters, and seeded randomness.

World frame: x is the lateral position (m) with the sidewalk centerline at
x = 0, y is the longitudinal position (m) along the walk. Headings are in
radians counterclockwise from the +x axis, so a pedestrian walking toward +y
has heading +pi/2. Each pedestrian also carries a body frame: forward
velocity v_forw along the heading and orthogonal velocity v_orth, positive
toward the pedestrian's own left.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

# Sidewalk geometry (environment constants, not tunable parameters).
SIDEWALK_HALF_WIDTH = 1.25
SIDEWALK_LENGTH = 15.0

# Acceleration input limits, absolute values.
A_FORW_MAX = 2.0
A_ORTH_MAX = 1.0
OMEGA_DOT_MAX = math.pi

PLAN_SHIFT_MODES = ("per_plan_step", "per_sim_step")


def travel_direction(phi: float) -> float:
    """+1.0 for a pedestrian heading toward +y, -1.0 toward -y."""
    return 1.0 if math.sin(phi) >= 0.0 else -1.0


@dataclass(frozen=True)
class PedestrianState:
    """Full kinematic state of one pedestrian (world position, body velocities)."""

    x: float
    y: float
    phi: float
    v_forw: float
    v_orth: float
    omega: float

    def __post_init__(self):
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise ValueError(f"non-finite state field {f.name}")


@dataclass(frozen=True)
class ControlInput:
    """Acceleration inputs in the body frame. Limits are enforced by
    dynamics.clamp_control, not at construction."""

    a_forw: float
    a_orth: float
    omega_dot: float


@dataclass(frozen=True)
class ModelParams:
    """All tunable model parameters with their default values."""

    dt_sim: float = 0.05           # simulation step (20 Hz)
    dt_plan: float = 0.25          # plan/belief point spacing (4 Hz)
    horizon: float = 7.0           # plan horizon (s)
    v_init: float = 1.3            # initial walking speed (m/s)
    r_com: float = 0.3             # comfortable lateral range (m)
    a_e: float = 0.2               # expected lateral acceleration (m/s^2)
    alpha: float = 0.1             # perception update rate (= 2 * dt_sim)
    beta: float = 0.03             # perception noise scale
    gamma_c: float = 0.5           # weight of the continue belief component
    zeta: float = 0.25             # bearing scale in the side weights
    eta: float = 10.0              # steepness of the bound sigmoids
    delta_x: float = 0.15          # bound sigmoid offset (m)
    r_collision: float = 0.25      # center distance counted as a collision (m)
    lambda1: float = 1.0           # forward velocity deviation
    lambda2: float = 100.0         # backward walking
    lambda3: float = 2.0           # orthogonal velocity
    lambda4: float = 5.0           # heading deviation
    lambda5: float = 1.0           # normalized angular acceleration
    lambda6: float = 1.0           # normalized forward acceleration
    lambda7: float = 1.0           # normalized orthogonal acceleration
    replan_factor: float = 0.75    # risk cap factor for a triggered replan
    retry_factor: float = 0.9      # looser cap after a failed replan
    timeout: float = 60.0          # max simulated time per trial (s)
    fy_denominator: float = 0.36   # (2 * r_com)^2; alternative reading 0.18
    renormalize_bias: bool = True  # keep belief weights summing to one under bias
    plan_shift_mode: str = "per_plan_step"

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"parameter {f.name} must be strictly positive")
        if not 0.0 < self.gamma_c < 1.0:
            raise ValueError("gamma_c must lie in (0, 1)")
        if not self.replan_factor < self.retry_factor < 1.0:
            raise ValueError("need replan_factor < retry_factor < 1")
        if self.plan_shift_mode not in PLAN_SHIFT_MODES:
            raise ValueError(f"plan_shift_mode must be one of {PLAN_SHIFT_MODES}")
        ratio = self.horizon / self.dt_plan
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("horizon must be an integer multiple of dt_plan")

    @property
    def n_plan(self) -> int:
        """Number of plan intervals in the horizon (28 with defaults)."""
        return int(round(self.horizon / self.dt_plan))

    @property
    def steps_per_plan(self) -> int:
        """Simulation steps per plan interval (5 with defaults)."""
        return int(round(self.dt_plan / self.dt_sim))


def default_params() -> ModelParams:
    return ModelParams()


class RandomSource:
    """Deterministic standard-normal stream, one per pedestrian per trial.

    Seeded by mixing (trial_seed, stream_index) so that equal seeds give
    bit-identical draw sequences regardless of what happens elsewhere.
    """

    def __init__(self, trial_seed: int, stream_index: int = 0):
        self.seed = (int(trial_seed), int(stream_index))
        self._gen = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence([int(trial_seed), int(stream_index)]))
        )

    def normal_draw(self) -> float:
        """One standard-normal variate; advances the stream."""
        return float(self._gen.standard_normal())


def normal_draw(rng: RandomSource) -> float:
    return rng.normal_draw()


# ---------------------------------------------------------------------------
# Parameter configuration files (key = value, INI sections).

_PARAMS_SECTION = "params"


def _parse_param(name: str, text: str):
    default = getattr(ModelParams, name, None)
    if isinstance(default, bool):
        low = text.strip().lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise ValueError(f"cannot parse boolean for {name}: {text!r}")
    if isinstance(default, str):
        return text.strip()
    return float(text)


def apply_param_overrides(p: ModelParams, overrides: dict[str, str]) -> ModelParams:
    """Apply string-valued overrides (e.g. from --set key=value) to params.

    Raises KeyError for unknown keys and ValueError for unparseable values.
    """
    valid = {f.name for f in fields(ModelParams)}
    parsed = {}
    for key, text in overrides.items():
        if key not in valid:
            raise KeyError(f"unknown parameter {key!r}")
        parsed[key] = _parse_param(key, text)
    return replace(p, **parsed)


def save_params(p: ModelParams, path: str | Path,
                extra_sections: dict[str, dict[str, str]] | None = None) -> None:
    """Write parameters (and optional extra sections) as an INI config file."""
    cp = configparser.ConfigParser()
    cp[_PARAMS_SECTION] = {f.name: repr(getattr(p, f.name)) if not isinstance(getattr(p, f.name), str)
                           else getattr(p, f.name)
                           for f in fields(p)}
    for name, mapping in (extra_sections or {}).items():
        cp[name] = {k: str(v) for k, v in mapping.items()}
    with open(path, "w") as fh:
        cp.write(fh)


def load_config(path: str | Path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise FileNotFoundError(path)
    return cp


def load_params(path: str | Path) -> ModelParams:
    """Load ModelParams from a config file written by save_params (lossless)."""
    cp = load_config(path)
    if not cp.has_section(_PARAMS_SECTION):
        return ModelParams()
    overrides = {k: v for k, v in cp.items(_PARAMS_SECTION)}
    return apply_param_overrides(ModelParams(), overrides)
