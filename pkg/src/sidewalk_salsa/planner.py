"""Plan generation and maintenance.

A plan is a horizon of body-frame acceleration inputs on the planning grid
plus the states they roll out to. The initial plan is the unconstrained cost
minimum (walk straight at the initial speed, analytically zero cost). A
replan minimizes the same cost subject to the perceived risk staying under a
cap at every horizon point, solved by projected gradient descent on an
augmented Lagrangian with analytic gradients; infeasibility is a normal
outcome handled by the caller (emergency stop). Plans are consumed by
dropping the leading input and duplicating the final entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .core import (
    A_FORW_MAX,
    A_ORTH_MAX,
    OMEGA_DOT_MAX,
    SIDEWALK_HALF_WIDTH,
    ControlInput,
    ModelParams,
    PedestrianState,
)
from .dynamics import StateArrays, clamp_control, rollout_arrays, step, states_to_arrays
from .belief import BeliefGrid, pack_grid

MAX_ITERS = 200        # total inner gradient steps per replan
RISK_TOL = 1e-3        # constraint satisfaction tolerance
EARLY_STOP = True      # stop a descent at the first feasible stall
_MAX_OUTER = 6
_ARMIJO = 1e-4
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class Plan:
    controls: np.ndarray   # (n, 3): a_forw, a_orth, omega_dot
    states: StateArrays    # rollout of controls at dt spacing
    dt: float
    created_at: float = 0.0

    @property
    def n(self) -> int:
        return self.controls.shape[0]

    @property
    def waypoints(self) -> np.ndarray:
        """(n, 3) array of (x, y, t) with t relative to the plan start."""
        t = np.arange(1, self.n + 1) * self.dt
        return np.stack([self.states.x, self.states.y, t], axis=1)

    def mean_x(self) -> float:
        return float(self.states.x.mean())

    def first_control(self) -> ControlInput:
        return ControlInput(*map(float, self.controls[0]))


@dataclass(frozen=True)
class PlanOutcome:
    plan: Plan | None
    iterations: int
    max_risk: float

    @property
    def success(self) -> bool:
        return self.plan is not None


def _revcumsum(z: np.ndarray) -> np.ndarray:
    return z[::-1].cumsum()[::-1]


def plan_cost(plan: Plan, initial_v: float, initial_theta: float,
              p: ModelParams) -> float:
    return _cost(plan.controls, plan.states, initial_v, initial_theta, p)


def _cost(u: np.ndarray, st: StateArrays, initial_v: float, initial_theta: float,
          p: ModelParams) -> float:
    dv = st.v_forw - initial_v
    vneg = np.minimum(st.v_forw, 0.0)
    dth = st.phi - initial_theta
    a, b, w = u[:, 0], u[:, 1], u[:, 2]
    return float(
        p.lambda1 * dv @ dv
        + p.lambda2 * vneg @ vneg
        + p.lambda3 * st.v_orth @ st.v_orth
        + p.lambda4 * dth @ dth
        + p.lambda5 * (w @ w) / (OMEGA_DOT_MAX ** 2)
        + p.lambda6 * (a @ a) / (A_FORW_MAX ** 2)
        + p.lambda7 * (b @ b) / (A_ORTH_MAX ** 2)
    )


def cost_gradient(u: np.ndarray, st: StateArrays, initial_v: float,
                  initial_theta: float, p: ModelParams, dt: float) -> np.ndarray:
    """Analytic gradient of _cost with respect to the control array.

    Velocities and headings are linear in the inputs (cumulative sums), so the
    chain rule reduces to reverse cumulative sums.
    """
    n = u.shape[0]
    dv = st.v_forw - initial_v
    vneg = np.minimum(st.v_forw, 0.0)
    dth = st.phi - initial_theta
    idx = np.arange(1, n + 1, dtype=float)
    ga = 2.0 * dt * _revcumsum(p.lambda1 * dv + p.lambda2 * vneg) \
        + 2.0 * p.lambda6 * u[:, 0] / (A_FORW_MAX ** 2)
    gb = 2.0 * dt * _revcumsum(p.lambda3 * st.v_orth) \
        + 2.0 * p.lambda7 * u[:, 1] / (A_ORTH_MAX ** 2)
    wth = p.lambda4 * dth
    gw = 2.0 * dt * dt * (_revcumsum(wth * idx) - (idx - 1.0) * _revcumsum(wth)) \
        + 2.0 * p.lambda5 * u[:, 2] / (OMEGA_DOT_MAX ** 2)
    return np.stack([ga, gb, gw], axis=1)


def _risk_terms(st: StateArrays, grid: BeliefGrid, p: ModelParams):
    """Per-point risk and the pieces needed for its position gradient."""
    x, y = st.x, st.y
    z_hi = (x[:, None] + p.r_com - grid.mu) / grid.sigma
    z_lo = (x[:, None] - p.r_com - grid.mu) / grid.sigma
    p_lat = np.sum(grid.w * (ndtr(z_hi) - ndtr(z_lo)), axis=1)
    dy = y - grid.y
    f_y = np.exp(-dy * dy / p.fy_denominator)
    f_t = np.exp(-grid.t / p.horizon)
    th_l = np.tanh(p.eta * (x + SIDEWALK_HALF_WIDTH - p.delta_x))
    th_r = np.tanh(p.eta * (x - SIDEWALK_HALF_WIDTH + p.delta_x))
    r = f_y * p_lat + f_t * (0.5 * (1.0 - th_l) + 0.5 * (1.0 + th_r))
    return r, (z_hi, z_lo, p_lat, dy, f_y, f_t, th_l, th_r)


def _risk_gradient(cw: np.ndarray, u: np.ndarray, st: StateArrays,
                   grid: BeliefGrid, p: ModelParams, dt: float, cache) -> np.ndarray:
    """Gradient of sum_k cw[k] * r_k(u) with respect to the controls."""
    n = u.shape[0]
    z_hi, z_lo, p_lat, dy, f_y, f_t, th_l, th_r = cache
    pdf_hi = np.exp(-0.5 * z_hi * z_hi) / _SQRT_2PI
    pdf_lo = np.exp(-0.5 * z_lo * z_lo) / _SQRT_2PI
    dp_dx = np.sum(grid.w * (pdf_hi - pdf_lo) / grid.sigma, axis=1)
    dr_dx = f_y * dp_dx + f_t * 0.5 * p.eta * ((1.0 - th_r * th_r) - (1.0 - th_l * th_l))
    dr_dy = p_lat * f_y * (-2.0 * dy / p.fy_denominator)
    px = cw * dr_dx
    py = cw * dr_dy
    PX = _revcumsum(px)
    PY = _revcumsum(py)
    c, sn = np.cos(st.phi), np.sin(st.phi)
    ga = dt * dt * _revcumsum(c * PX + sn * PY)
    gb = dt * dt * _revcumsum(-sn * PX + c * PY)
    d_th = (-st.v_forw * sn - st.v_orth * c) * PX + (st.v_forw * c - st.v_orth * sn) * PY
    idx = np.arange(1, n + 1, dtype=float)
    gw = dt ** 3 * (_revcumsum(d_th * idx) - (idx - 1.0) * _revcumsum(d_th))
    return np.stack([ga, gb, gw], axis=1)


def initial_plan(s0: PedestrianState, p: ModelParams) -> Plan:
    """Unconstrained cost minimum: the zero-input straight-line plan."""
    u = np.zeros((p.n_plan, 3))
    return Plan(controls=u, states=rollout_arrays(s0, u, p.dt_plan), dt=p.dt_plan)


def shifted_emergency_plan(s: PedestrianState, p: ModelParams,
                           created_at: float = 0.0) -> Plan:
    """Braking plan: a = -2 v on every velocity component, re-evaluated at
    each plan step and clamped to the input limits (stop in about half a
    second from walking speed)."""
    controls = []
    states = []
    cur = s
    for _ in range(p.n_plan):
        u = clamp_control(ControlInput(
            a_forw=-2.0 * cur.v_forw,
            a_orth=-2.0 * cur.v_orth,
            omega_dot=-2.0 * cur.omega,
        ))
        cur = step(cur, u, p.dt_plan)
        controls.append([u.a_forw, u.a_orth, u.omega_dot])
        states.append(cur)
    return Plan(controls=np.array(controls), states=states_to_arrays(states),
                dt=p.dt_plan, created_at=created_at)


def advance_plan(plan: Plan, steps: int) -> Plan:
    """Drop the first `steps` entries and duplicate the final control/waypoint
    pair to keep the horizon length (continuing the current plan)."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if steps == 0:
        return plan
    k = min(steps, plan.n)
    controls = np.concatenate([plan.controls[k:], np.repeat(plan.controls[-1:], k, axis=0)])

    def shift(a: np.ndarray) -> np.ndarray:
        return np.concatenate([a[k:], np.full(k, a[-1])])

    st = StateArrays(
        x=shift(plan.states.x), y=shift(plan.states.y), phi=shift(plan.states.phi),
        v_forw=shift(plan.states.v_forw), v_orth=shift(plan.states.v_orth),
        omega=shift(plan.states.omega),
    )
    return Plan(controls=controls, states=st, dt=plan.dt, created_at=plan.created_at)


def _descend(s: PedestrianState, grid: BeliefGrid, risk_cap: float,
             u0: np.ndarray, budget: int, p: ModelParams,
             initial_v: float, initial_theta: float):
    """Projected gradient descent on the augmented Lagrangian from one start.

    Returns (best feasible controls or None, their cost, iterations used,
    last max risk seen).
    """
    dt = p.dt_plan
    n = p.n_plan
    lims = np.array([A_FORW_MAX, A_ORTH_MAX, OMEGA_DOT_MAX])

    def evaluate(u):
        st = rollout_arrays(s, u, dt)
        r, cache = _risk_terms(st, grid, p)
        c = _cost(u, st, initial_v, initial_theta, p)
        return st, r, c, cache

    u = np.clip(u0, -lims, lims)
    st, r, c, cache = evaluate(u)
    best_u = None
    best_cost = math.inf
    viol = float(np.max(r)) - risk_cap
    if viol <= RISK_TOL:
        best_u, best_cost = u.copy(), c

    lam = np.zeros(n)
    mu = 10.0
    iters = 0
    t_step = 0.05
    prev_viol = max(viol, 0.0)

    for _outer in range(_MAX_OUTER):
        if iters >= budget:
            break
        inner_budget = min(40, budget - iters)
        # Inner loop: projected gradient with Armijo backtracking for fixed
        # multipliers.
        for _ in range(inner_budget):
            cw = np.maximum(0.0, lam + mu * (r - risk_cap))
            lag = c + float(cw @ cw - lam @ lam) / (2.0 * mu)
            g = cost_gradient(u, st, initial_v, initial_theta, p, dt) \
                + _risk_gradient(cw, u, st, grid, p, dt, cache)
            accepted = False
            t_try = t_step
            for _bt in range(25):
                u_new = np.clip(u - t_try * g, -lims, lims)
                diff = u - u_new
                decrease = float(np.sum(g * diff))
                if decrease <= 1e-15:
                    break  # projected step is stationary
                st_n, r_n, c_n, cache_n = evaluate(u_new)
                s_n = np.maximum(0.0, lam + mu * (r_n - risk_cap))
                lag_n = c_n + float(s_n @ s_n - lam @ lam) / (2.0 * mu)
                if lag_n <= lag - _ARMIJO * decrease:
                    accepted = True
                    break
                t_try *= 0.5
            iters += 1
            if not accepted:
                break
            u, st, r, c, cache = u_new, st_n, r_n, c_n, cache_n
            t_step = min(t_try * 2.0, 10.0)
            v_now = float(np.max(r)) - risk_cap
            if v_now <= RISK_TOL and c < best_cost:
                best_u, best_cost = u.copy(), c
            if iters >= budget:
                break
        viol = max(float(np.max(r)) - risk_cap, 0.0)
        if EARLY_STOP and viol <= RISK_TOL and best_u is not None:
            break
        lam = np.maximum(0.0, lam + mu * (r - risk_cap))
        if viol > 0.25 * prev_viol:
            mu = min(mu * 5.0, 1e6)
        prev_viol = viol
    return best_u, best_cost, iters, float(np.max(r))


def _resume_seed(s: PedestrianState, p: ModelParams,
                 initial_v: float) -> np.ndarray:
    """Controls that ramp back to walking speed and damp out lateral motion,
    used as a second descent start when the pedestrian is nearly stopped."""
    controls = []
    cur = s
    for _ in range(p.n_plan):
        u = clamp_control(ControlInput(
            a_forw=2.0 * (initial_v - cur.v_forw),
            a_orth=-2.0 * cur.v_orth,
            omega_dot=-2.0 * cur.omega,
        ))
        cur = step(cur, u, p.dt_plan)
        controls.append([u.a_forw, u.a_orth, u.omega_dot])
    return np.array(controls)


def replan(s: PedestrianState, belief, risk_cap: float, warm_start: Plan,
           p: ModelParams, initial_v: float | None = None,
           initial_theta: float | None = None, created_at: float = 0.0) -> PlanOutcome:
    """Minimize the plan cost subject to max-point risk <= risk_cap.

    Projected gradient descent over the (n, 3) control array inside the input
    box, with an augmented Lagrangian on the per-point risk constraints and a
    fixed total iteration budget, warm-started from the caller's current
    (already shifted) plan. When the pedestrian is substantially below
    walking speed (emergency-stop recovery), the budget is shared with a
    second descent seeded from a resume-walking ramp; descending only from
    the braking plan tends to stall in a standstill local minimum even when
    accelerating back up is both feasible and much cheaper. Deterministic:
    identical inputs give identical output. Returns Infeasible (plan=None)
    when no iterate satisfies the cap within tolerance inside the budget.
    """
    grid = belief if isinstance(belief, BeliefGrid) else pack_grid(belief)
    if initial_v is None:
        initial_v = p.v_init
    if initial_theta is None:
        initial_theta = s.phi
    stopped = s.v_forw < 0.5 * initial_v
    warm_budget = MAX_ITERS // 2 if stopped else MAX_ITERS
    u_warm, c_warm, iters, r_warm = _descend(
        s, grid, risk_cap, warm_start.controls, warm_budget, p,
        initial_v, initial_theta)
    best_u, best_cost, last_risk = u_warm, c_warm, r_warm
    if stopped:
        u_res, c_res, it_res, r_res = _descend(
            s, grid, risk_cap, _resume_seed(s, p, initial_v),
            MAX_ITERS - warm_budget, p, initial_v, initial_theta)
        iters += it_res
        last_risk = min(last_risk, r_res)
        if u_res is not None and (best_u is None or c_res < best_cost):
            best_u, best_cost = u_res, c_res
    if best_u is None:
        return PlanOutcome(plan=None, iterations=iters, max_risk=last_risk)
    states = rollout_arrays(s, best_u, p.dt_plan)
    plan = Plan(controls=best_u, states=states, dt=p.dt_plan, created_at=created_at)
    r_final, _ = _risk_terms(states, grid, p)
    return PlanOutcome(plan=plan, iterations=iters, max_risk=float(np.max(r_final)))
