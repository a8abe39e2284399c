"""Per-pedestrian decision loop.

Each simulation step: update the observation of the other pedestrian, rebuild
the belief, evaluate the perceived risk of the current plan, and replan when
the risk exceeds the personal threshold rho (new plan capped at 0.75 rho).
If the constrained replan is infeasible the agent brakes to a stop and keeps
retrying every step with the looser cap 0.9 rho until a plan is found again.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .core import ControlInput, ModelParams, PedestrianState, RandomSource
from .belief import BeliefBias, build_belief_grid
from .dynamics import clamp_control
from .perception import Observation, init_observation, update_observation
from .planner import Plan, advance_plan, initial_plan, replan, shifted_emergency_plan
from .risk import perceived_risk


USE_PHASE = True


class AgentMode(enum.Enum):
    NORMAL = "normal"
    RECOVERING = "recovering"  # last replan failed; retry at the looser cap


@dataclass(frozen=True)
class AgentConfig:
    rho: float                 # personal risk threshold, in (0, 1]
    bias: BeliefBias = field(default_factory=BeliefBias)
    initial_x_offset: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0:
            raise ValueError("rho must lie in (0, 1]")


@dataclass(frozen=True)
class TickTelemetry:
    step: int
    time: float
    risk: float
    threshold: float
    replanned: bool
    replan_cap: float | None
    outcome: str | None        # 'success' | 'infeasible' when replanned
    mode: str
    iterations: int


@dataclass(frozen=True)
class PlanSnapshot:
    """Plan summary recorded at every plan-update instant (advance, replan,
    or emergency stop); drives the strategy-switch metric."""

    step: int
    mean_plan_x: float
    current_x: float


class Agent:
    """Owns one pedestrian's observation, plan, and mode."""

    def __init__(self, cfg: AgentConfig, rng: RandomSource,
                 start: PedestrianState, other_start: PedestrianState,
                 p: ModelParams, record_beliefs: bool = False):
        self.cfg = cfg
        self.rng = rng
        self.p = p
        self.theta_init = start.phi
        self.v_init = p.v_init
        self.obs: Observation = init_observation(other_start)
        self.plan: Plan = initial_plan(start, p)
        self.mode = AgentMode.NORMAL
        self.record_beliefs = record_beliefs
        self.snapshots: list[PlanSnapshot] = [
            PlanSnapshot(step=0, mean_plan_x=self.plan.mean_x(), current_x=start.x)
        ]
        self.belief_snapshots: list = []
        self._hold = 0
        self._shift_every = 1 if p.plan_shift_mode == "per_sim_step" else p.steps_per_plan

    def tick(self, step_index: int, self_state: PedestrianState,
             other_state: PedestrianState) -> tuple[ControlInput, TickTelemetry]:
        """One 20 Hz decision step; returns the control to apply now."""
        p = self.p
        now = (step_index - 1) * p.dt_sim
        plan_changed = False

        # Consume the plan on its own cadence before evaluating risk, so the
        # plan's waypoints line up with the belief grid and a replan warm
        # start is already shifted by the elapsed steps.
        if self._hold >= self._shift_every:
            self.plan = advance_plan(self.plan, 1)
            self._hold = 0
            plan_changed = True

        self.obs = update_observation(self.obs, other_state, self.rng, p)
        grid = build_belief_grid(self_state, self.obs, p, self.cfg.bias)
        if USE_PHASE and self._shift_every > 1:
            phase = self._hold / self._shift_every
        else:
            phase = 0.0
        risk = perceived_risk(self.plan, grid, p, phase=phase).max_total

        replanned = False
        cap = None
        outcome = None
        iterations = 0
        if self.mode is AgentMode.RECOVERING:
            cap = p.retry_factor * self.cfg.rho
        elif risk > self.cfg.rho:
            cap = p.replan_factor * self.cfg.rho
        if cap is not None:
            replanned = True
            result = replan(self_state, grid, cap, self.plan, p,
                            initial_v=self.v_init, initial_theta=self.theta_init,
                            created_at=now)
            iterations = result.iterations
            if result.success:
                self.plan = result.plan
                self.mode = AgentMode.NORMAL
                outcome = "success"
            else:
                self.plan = shifted_emergency_plan(self_state, p, created_at=now)
                self.mode = AgentMode.RECOVERING
                outcome = "infeasible"
            self._hold = 0
            plan_changed = True
            if self.record_beliefs:
                self.belief_snapshots.append((step_index, grid))

        if plan_changed:
            self.snapshots.append(PlanSnapshot(
                step=step_index, mean_plan_x=self.plan.mean_x(),
                current_x=self_state.x,
            ))

        control = clamp_control(self.plan.first_control())
        self._hold += 1
        telemetry = TickTelemetry(
            step=step_index, time=now, risk=risk, threshold=self.cfg.rho,
            replanned=replanned, replan_cap=cap, outcome=outcome,
            mode=self.mode.value, iterations=iterations,
        )
        return control, telemetry
