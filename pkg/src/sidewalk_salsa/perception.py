"""Noisy, delayed observation of the other pedestrian.

Positions are observed without error at every step. Velocities and heading
follow the true values through a first-order lag (rate alpha) plus Brownian
observation noise scaled by beta * sqrt(dt). The observed forward velocity is
clamped to be non-negative to keep the belief construction well posed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import ModelParams, PedestrianState, RandomSource


@dataclass(frozen=True)
class Observation:
    x_o: float
    y_o: float
    v_forw_o: float
    v_orth_o: float
    theta_o: float


def init_observation(true_state: PedestrianState) -> Observation:
    """Zero-error initial observation (no startup transient)."""
    return Observation(
        x_o=true_state.x,
        y_o=true_state.y,
        v_forw_o=max(true_state.v_forw, 0.0),
        v_orth_o=true_state.v_orth,
        theta_o=true_state.phi,
    )


def update_observation(obs: Observation, true_state: PedestrianState,
                       rng: RandomSource, p: ModelParams) -> Observation:
    """One perception update; call exactly once per simulation step.

    Draw order is fixed (forward, orthogonal, heading) so noise streams stay
    reproducible no matter what else changes in the loop.
    """
    e1 = rng.normal_draw()
    e2 = rng.normal_draw()
    e3 = rng.normal_draw()
    scale = p.beta * math.sqrt(p.dt_sim)
    v_forw = obs.v_forw_o + p.alpha * (true_state.v_forw - obs.v_forw_o) + scale * e1
    v_orth = obs.v_orth_o + p.alpha * (true_state.v_orth - obs.v_orth_o) + scale * e2
    theta = obs.theta_o + p.alpha * (true_state.phi - obs.theta_o) + scale * e3
    # Heading wrap-around is out of scope; headings stay near +-pi/2 here.
    assert abs(theta) <= math.pi + 0.5, "observed heading left the supported range"
    return Observation(
        x_o=true_state.x,
        y_o=true_state.y,
        v_forw_o=max(v_forw, 0.0),
        v_orth_o=v_orth,
        theta_o=theta,
    )
