"""Probabilistic belief about the other pedestrian's future lateral position.

The belief is a sequence of points on the planning grid (t_b = k * dt_plan,
k = 1..n). Each point fixes a longitudinal position by constant-velocity
extrapolation of the observed motion and carries a three-component Gaussian
mixture over the lateral position: the other pedestrian continues on their
current course, passes on the ego's left, or passes on the ego's right.

Side weights react to where the other pedestrian currently is and how they
are side-stepping: an observed drift toward the ego's right raises the
weight of the right-passing component, and vice versa. An optional cultural
bias multiplies the left/right weights (e.g. 1.3 / 0.7 for "others tend to
pass on my left") and is renormalized by default so the three weights keep
summing to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import SIDEWALK_HALF_WIDTH, ModelParams, PedestrianState, travel_direction
from .perception import Observation

SIGMA_FLOOR = 1e-4  # degeneracy floor for component standard deviations (m)

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class BeliefBias:
    """Multipliers on the left/right passing weights (ego perspective)."""

    m_l: float = 1.0
    m_r: float = 1.0

    def __post_init__(self):
        if self.m_l <= 0.0 or self.m_r <= 0.0:
            raise ValueError("bias multipliers must be positive")

    @classmethod
    def from_name(cls, name: str) -> "BeliefBias":
        """'right' = keep-right norm: others pass on my left (1.3 l / 0.7 r).
        'left' is the mirror; 'none' is the identity."""
        key = name.strip().lower()
        if key in ("none", "-", ""):
            return cls()
        if key == "right":
            return cls(m_l=1.3, m_r=0.7)
        if key == "left":
            return cls(m_l=0.7, m_r=1.3)
        raise ValueError(f"unknown belief bias {name!r}")


@dataclass(frozen=True)
class BeliefComponent:
    mu: float
    sigma: float
    gamma: float


@dataclass(frozen=True)
class BeliefPoint:
    """Mixture over the other's lateral position at one future time t_b."""

    t_b: float
    y_b: float
    components: tuple  # (continue, left, right)


@dataclass(frozen=True)
class BeliefGrid:
    """Array form of a full belief (used by the risk and planner hot paths)."""

    t: np.ndarray      # (n,)
    y: np.ndarray      # (n,)
    mu: np.ndarray     # (n, 3)
    sigma: np.ndarray  # (n, 3)
    w: np.ndarray      # (n, 3)

    def __len__(self):
        return self.t.shape[0]


def observed_world_velocity(obs: Observation) -> tuple[float, float]:
    """World-frame velocity implied by the observed body-frame velocities."""
    c, sn = math.cos(obs.theta_o), math.sin(obs.theta_o)
    vx = obs.v_forw_o * c - obs.v_orth_o * sn
    vy = obs.v_forw_o * sn + obs.v_orth_o * c
    return vx, vy


def belief_longitudes(obs: Observation, p: ModelParams) -> list[tuple[float, float]]:
    """(t_b, y_b) pairs on the planning grid, extrapolating the observed
    world-frame y velocity."""
    _, vy = observed_world_velocity(obs)
    return [(k * p.dt_plan, obs.y_o + vy * k * p.dt_plan)
            for k in range(1, p.n_plan + 1)]


def continue_component(obs: Observation, t_b: float, p: ModelParams) -> BeliefComponent:
    """Constant-velocity extrapolation with an uncertainty that grows like a
    sustained lateral acceleration of a_e / 3 (3-sigma covers a_e)."""
    vx, _ = observed_world_velocity(obs)
    mu = obs.x_o + vx * t_b
    sigma = max(0.5 * (p.a_e / 3.0) * t_b * t_b, SIGMA_FLOOR)
    return BeliefComponent(mu=mu, sigma=sigma, gamma=p.gamma_c)


def side_weights(ego: PedestrianState, obs: Observation, p: ModelParams,
                 bias: BeliefBias | None = None) -> tuple[float, float, float]:
    """Weights (continue, left, right) from the current geometry.

    The bearing term compares the other pedestrian's lateral offset (in the
    ego's left-positive convention) against the scaled longitudinal gap, so a
    faraway pedestrian splits the side weights evenly while a nearby offset
    pedestrian commits the weight to the side they are on. Side-stepping adds
    directly: motion toward the ego's left raises the left weight.
    """
    if bias is None:
        bias = BeliefBias()
    d = travel_direction(ego.phi)
    dx = obs.x_o - ego.x
    dy = obs.y_o - ego.y
    rest = 1.0 - p.gamma_c
    if dx * dx + dy * dy < 1e-24:
        # Coincident positions: degenerate geometry, split evenly.
        return p.gamma_c, rest / 2.0, rest / 2.0
    f_off = d * dy    # longitudinal offset, positive ahead of the ego
    l_off = -d * dx   # lateral offset, positive toward the ego's left
    bearing = math.atan2(l_off, p.zeta * f_off)
    v_lat = d * obs.v_orth_o * math.sin(obs.theta_o)  # side-step rate toward ego's left
    inner = 0.5 + bearing / math.pi + v_lat
    g_l = rest * min(max(inner, 0.0), 1.0)
    g_r = rest - g_l
    g_l *= bias.m_l
    g_r *= bias.m_r
    if p.renormalize_bias:
        s = g_l + g_r
        if s > 0.0:
            g_l, g_r = rest * g_l / s, rest * g_r / s
    return p.gamma_c, g_l, g_r


def side_component(ego: PedestrianState, obs: Observation, t_b: float,
                   side: str, p: ModelParams) -> BeliefComponent:
    """Passing component for one side of the ego pedestrian.

    If the extrapolated course already clears the comfortable range the
    component coincides with the continue component; otherwise the other
    pedestrian is assumed to pass at the minimum comfortable distance. The
    spread reflects the free space between the ego and that side's bound.
    The returned weight is the unbiased symmetric share; build_belief installs
    the actual weights from side_weights.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    d = travel_direction(ego.phi)
    left_dir = -d  # world-x direction of the ego's left
    sign = left_dir if side == "left" else -left_dir
    vx, _ = observed_world_velocity(obs)
    x_ext = obs.x_o + vx * t_b
    if abs(x_ext - ego.x) < p.r_com:
        mu = ego.x + sign * p.r_com
    else:
        mu = x_ext
    dx_side = abs(sign * SIDEWALK_HALF_WIDTH - ego.x)
    sigma = max((dx_side - p.r_com) / 6.0, SIGMA_FLOOR)
    return BeliefComponent(mu=mu, sigma=sigma, gamma=(1.0 - p.gamma_c) / 2.0)


def build_belief_grid(ego: PedestrianState, obs: Observation, p: ModelParams,
                      bias: BeliefBias | None = None) -> BeliefGrid:
    """Vectorized belief construction (the per-tick hot path)."""
    n = p.n_plan
    t = np.arange(1, n + 1, dtype=float) * p.dt_plan
    vx, vy = observed_world_velocity(obs)
    y = obs.y_o + vy * t
    g_c, g_l, g_r = side_weights(ego, obs, p, bias)
    mu_c = obs.x_o + vx * t
    sigma_c = np.maximum(0.5 * (p.a_e / 3.0) * t * t, SIGMA_FLOOR)
    d = travel_direction(ego.phi)
    left_dir = -d
    near = np.abs(mu_c - ego.x) < p.r_com
    mu_l = np.where(near, ego.x + left_dir * p.r_com, mu_c)
    mu_r = np.where(near, ego.x - left_dir * p.r_com, mu_c)
    sig_l = max((abs(left_dir * SIDEWALK_HALF_WIDTH - ego.x) - p.r_com) / 6.0, SIGMA_FLOOR)
    sig_r = max((abs(-left_dir * SIDEWALK_HALF_WIDTH - ego.x) - p.r_com) / 6.0, SIGMA_FLOOR)
    mu = np.stack([mu_c, mu_l, mu_r], axis=1)
    sigma = np.stack([sigma_c, np.full(n, sig_l), np.full(n, sig_r)], axis=1)
    w = np.tile(np.array([g_c, g_l, g_r]), (n, 1))
    return BeliefGrid(t=t, y=y, mu=mu, sigma=sigma, w=w)


def build_belief(ego: PedestrianState, obs: Observation, p: ModelParams,
                 bias: BeliefBias | None = None) -> list[BeliefPoint]:
    """Belief as a list of BeliefPoint (object view of build_belief_grid)."""
    grid = build_belief_grid(ego, obs, p, bias)
    points = []
    for k in range(len(grid)):
        comps = tuple(
            BeliefComponent(mu=float(grid.mu[k, j]), sigma=float(grid.sigma[k, j]),
                            gamma=float(grid.w[k, j]))
            for j in range(3)
        )
        points.append(BeliefPoint(t_b=float(grid.t[k]), y_b=float(grid.y[k]),
                                  components=comps))
    return points


def pack_grid(points) -> BeliefGrid:
    """Pack a sequence of BeliefPoint into array form."""
    n = len(points)
    t = np.array([bp.t_b for bp in points])
    y = np.array([bp.y_b for bp in points])
    mu = np.array([[c.mu for c in bp.components] for bp in points])
    sigma = np.array([[c.sigma for c in bp.components] for bp in points])
    w = np.array([[c.gamma for c in bp.components] for bp in points])
    assert mu.shape == (n, 3)
    return BeliefGrid(t=t, y=y, mu=mu, sigma=sigma, w=w)


def _norm_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / _SQRT2))


def prob_in_interval(bp: BeliefPoint, lo: float, hi: float) -> float:
    """Mixture probability mass on (lo, hi)."""
    assert lo < hi
    total = 0.0
    for c in bp.components:
        total += c.gamma * (_norm_cdf((hi - c.mu) / c.sigma) - _norm_cdf((lo - c.mu) / c.sigma))
    return total
