"""Body-frame pedestrian dynamics.

Fixed-step semi-implicit Euler: velocities are updated from the accelerations
first, then positions from the updated velocities. The body orthogonal axis
points to the pedestrian's left (+90 degrees from the heading); this sign
convention is fixed here and used everywhere else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    A_FORW_MAX,
    A_ORTH_MAX,
    OMEGA_DOT_MAX,
    ControlInput,
    PedestrianState,
)


def clamp_control(u: ControlInput) -> ControlInput:
    """Clip each input component to its stated limit."""
    return ControlInput(
        a_forw=min(max(u.a_forw, -A_FORW_MAX), A_FORW_MAX),
        a_orth=min(max(u.a_orth, -A_ORTH_MAX), A_ORTH_MAX),
        omega_dot=min(max(u.omega_dot, -OMEGA_DOT_MAX), OMEGA_DOT_MAX),
    )


def step(s: PedestrianState, u: ControlInput, dt: float) -> PedestrianState:
    """Advance one state by dt under an (already clamped) control input."""
    v_forw = s.v_forw + u.a_forw * dt
    v_orth = s.v_orth + u.a_orth * dt
    omega = s.omega + u.omega_dot * dt
    phi = s.phi + omega * dt
    c, sn = math.cos(phi), math.sin(phi)
    vx = v_forw * c - v_orth * sn
    vy = v_forw * sn + v_orth * c
    return PedestrianState(
        x=s.x + vx * dt,
        y=s.y + vy * dt,
        phi=phi,
        v_forw=v_forw,
        v_orth=v_orth,
        omega=omega,
    )


def rollout(s0: PedestrianState, controls, dt: float) -> list[PedestrianState]:
    """Apply step() repeatedly; states[k] is the state after k+1 inputs."""
    if len(controls) == 0:
        raise ValueError("rollout needs at least one control")
    out = []
    s = s0
    for u in controls:
        s = step(s, u, dt)
        out.append(s)
    return out


@dataclass(frozen=True)
class StateArrays:
    """A rollout as per-quantity arrays, one entry per step."""

    x: np.ndarray
    y: np.ndarray
    phi: np.ndarray
    v_forw: np.ndarray
    v_orth: np.ndarray
    omega: np.ndarray

    def __len__(self):
        return self.x.shape[0]

    def state_at(self, k: int) -> PedestrianState:
        return PedestrianState(
            x=float(self.x[k]), y=float(self.y[k]), phi=float(self.phi[k]),
            v_forw=float(self.v_forw[k]), v_orth=float(self.v_orth[k]),
            omega=float(self.omega[k]),
        )


def rollout_arrays(s0: PedestrianState, u: np.ndarray, dt: float) -> StateArrays:
    """Closed-form vectorized rollout of an (n, 3) control array.

    Matches rollout(step(...)) to floating-point accumulation order
    differences only (velocities and headings are exact cumulative sums).
    """
    a, b, w = u[:, 0], u[:, 1], u[:, 2]
    v_forw = s0.v_forw + dt * np.cumsum(a)
    v_orth = s0.v_orth + dt * np.cumsum(b)
    omega = s0.omega + dt * np.cumsum(w)
    phi = s0.phi + dt * np.cumsum(omega)
    c, sn = np.cos(phi), np.sin(phi)
    x = s0.x + dt * np.cumsum(v_forw * c - v_orth * sn)
    y = s0.y + dt * np.cumsum(v_forw * sn + v_orth * c)
    return StateArrays(x=x, y=y, phi=phi, v_forw=v_forw, v_orth=v_orth, omega=omega)


def states_to_arrays(states) -> StateArrays:
    """Pack a list of PedestrianState into StateArrays."""
    return StateArrays(
        x=np.array([s.x for s in states]),
        y=np.array([s.y for s in states]),
        phi=np.array([s.phi for s in states]),
        v_forw=np.array([s.v_forw for s in states]),
        v_orth=np.array([s.v_orth for s in states]),
        omega=np.array([s.omega for s in states]),
    )
