"""Perceived risk of a plan against a belief.

Two contributions per plan/belief point pair, each in [0, 1]:

* proximity: the believed probability that the other pedestrian is inside the
  ego's comfortable lateral range, discounted by the longitudinal gap through
  f_y = exp(-dy^2 / (2 r_com)^2);
* bounds: two steep sigmoids, one per sidewalk edge, roughly 0 on the
  centerline and near 1 at the edge (the transition midpoint sits delta_x
  inside the bound so the bound itself is already on the high plateau),
  discounted in time by f_t = exp(-t_b / horizon).

The pedestrian's perceived risk is the maximum of the summed contributions
over all horizon points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .core import SIDEWALK_HALF_WIDTH, ModelParams
from .belief import BeliefGrid, BeliefPoint, pack_grid, prob_in_interval


@dataclass(frozen=True)
class RiskBreakdown:
    p_close: np.ndarray   # (n,) proximity risk per point
    p_bounds: np.ndarray  # (n,) out-of-bounds risk per point
    total: np.ndarray     # (n,) sums
    max_total: float
    argmax_index: int

    @property
    def per_point(self):
        return list(zip(self.p_close, self.p_bounds, self.total))


def risk_profile(x: np.ndarray, y: np.ndarray, grid: BeliefGrid,
                 p: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (p_close, p_bounds) for planned positions x, y on the grid."""
    z_hi = (x[:, None] + p.r_com - grid.mu) / grid.sigma
    z_lo = (x[:, None] - p.r_com - grid.mu) / grid.sigma
    p_lat = np.sum(grid.w * (ndtr(z_hi) - ndtr(z_lo)), axis=1)
    dy = y - grid.y
    f_y = np.exp(-dy * dy / p.fy_denominator)
    p_close = f_y * p_lat
    f_t = np.exp(-grid.t / p.horizon)
    z_l = p.eta * (x + SIDEWALK_HALF_WIDTH - p.delta_x)
    z_r = p.eta * (x - SIDEWALK_HALF_WIDTH + p.delta_x)
    p_bounds = f_t * (0.5 * (1.0 - np.tanh(z_l)) + 0.5 * (1.0 + np.tanh(z_r)))
    return p_close, p_bounds


def proximity_risk(plan_point: tuple[float, float, float], bp: BeliefPoint,
                   p: ModelParams) -> float:
    """f_y-discounted probability of the other being within the comfort range."""
    x_e, y_e, t_b = plan_point
    assert abs(t_b - bp.t_b) < 1e-9, "plan and belief points must share t_b"
    dy = y_e - bp.y_b
    f_y = math.exp(-dy * dy / p.fy_denominator)
    return f_y * prob_in_interval(bp, x_e - p.r_com, x_e + p.r_com)


def bounds_risk(x_e: float, t_b: float, p: ModelParams) -> float:
    """Time-discounted risk of leaving the sidewalk at a planned position."""
    f_t = math.exp(-t_b / p.horizon)
    z_l = p.eta * (x_e + SIDEWALK_HALF_WIDTH - p.delta_x)
    z_r = p.eta * (x_e - SIDEWALK_HALF_WIDTH + p.delta_x)
    return f_t * (0.5 * (1.0 - math.tanh(z_l)) + 0.5 * (1.0 + math.tanh(z_r)))


def perceived_risk(plan, belief, p: ModelParams,
                   phase: float = 0.0) -> RiskBreakdown:
    """Evaluate a plan against a belief (list of BeliefPoint or BeliefGrid).

    The belief grid is anchored at the current instant while the plan's
    waypoints are anchored at its last update; between plan updates the plan
    is `phase` (in [0, 1), fraction of a plan interval) stale. Each belief
    point is paired with the plan position at the same absolute time by
    linear interpolation along the plan, so the evaluated risk moves smoothly
    as the plan is consumed.
    """
    grid = belief if isinstance(belief, BeliefGrid) else pack_grid(belief)
    n = len(grid)
    assert plan.controls.shape[0] == n, "plan and belief must cover the same horizon"
    x, y = plan.states.x, plan.states.y
    if phase > 0.0:
        x = np.concatenate([x, x[-1:]])
        y = np.concatenate([y, y[-1:]])
        x = (1.0 - phase) * x[:-1] + phase * x[1:]
        y = (1.0 - phase) * y[:-1] + phase * y[1:]
    p_close, p_bounds = risk_profile(x, y, grid, p)
    total = p_close + p_bounds
    k = int(np.argmax(total))
    return RiskBreakdown(p_close=p_close, p_bounds=p_bounds, total=total,
                         max_total=float(total[k]), argmax_index=k)
