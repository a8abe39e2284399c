"""World stepping, termination detection, the built-in scenarios, and
seeded batch execution.

Both pedestrians start on opposite ends of the sidewalk facing each other at
walking speed. Within a step each agent reads the other's state frozen at the
step start (simultaneous update), so the symmetric scenario stays symmetric
up to observation noise. A trial ends when a pedestrian crosses the far end
(Finished), the centers come within the collision distance (Collision), a
pedestrian leaves the sidewalk laterally (OutOfBounds), or the simulated time
hits the timeout (Timeout).
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import (
    SIDEWALK_HALF_WIDTH,
    SIDEWALK_LENGTH,
    ModelParams,
    PedestrianState,
    RandomSource,
)
from .agent import Agent, AgentConfig, PlanSnapshot
from .belief import BeliefBias
from .dynamics import step


class EndState(enum.Enum):
    FINISHED = "Finished"
    COLLISION = "Collision"
    OUT_OF_BOUNDS = "OutOfBounds"
    TIMEOUT = "Timeout"


@dataclass(frozen=True)
class Scenario:
    name: str
    rho_a: float = 0.65
    rho_b: float = 0.65
    x_offset_a: float = 0.0
    x_offset_b: float = 0.0
    bias_a: BeliefBias = field(default_factory=BeliefBias)
    bias_b: BeliefBias = field(default_factory=BeliefBias)


SCENARIO_NAMES = (
    "symmetric",
    "different_sides",
    "different_risk_thresholds",
    "same_belief_bias",
    "different_belief_bias",
)


def make_scenario(name: str) -> Scenario:
    """Built-in scenario parameterizations.

    Belief biases are egocentric: 'right' (keep-right norm) weights the
    belief that the other will pass on the pedestrian's own left by 1.3 and
    own right by 0.7.
    """
    key = name.strip().lower()
    if key == "symmetric":
        return Scenario(name=key)
    if key == "different_sides":
        return Scenario(name=key, x_offset_a=0.1, x_offset_b=-0.1)
    if key == "different_risk_thresholds":
        return Scenario(name=key, rho_a=0.6, rho_b=0.7)
    if key == "same_belief_bias":
        return Scenario(name=key, bias_a=BeliefBias.from_name("right"),
                        bias_b=BeliefBias.from_name("right"))
    if key == "different_belief_bias":
        return Scenario(name=key, bias_a=BeliefBias.from_name("left"),
                        bias_b=BeliefBias.from_name("right"))
    raise ValueError(f"unknown scenario {name!r}; expected one of {SCENARIO_NAMES}")


@dataclass(frozen=True)
class PedestrianTrace:
    """Per-pedestrian time series for one trial."""

    states: np.ndarray        # (n_steps + 1, 6): x, y, phi, v_forw, v_orth, omega
    risk: np.ndarray          # (n_steps,)
    replanned: np.ndarray     # (n_steps,) bool
    replan_cap: np.ndarray    # (n_steps,) float, nan when no replan
    outcome: np.ndarray       # (n_steps,) int8: 0 none, 1 success, 2 infeasible
    recovering: np.ndarray    # (n_steps,) bool
    iterations: np.ndarray    # (n_steps,) int32
    snapshots: list[PlanSnapshot]
    belief_snapshots: list


@dataclass(frozen=True)
class TrialResult:
    scenario: str
    seed: int
    end_state: EndState
    passing_step: int | None
    n_steps: int
    dt_sim: float
    trace_a: PedestrianTrace
    trace_b: PedestrianTrace


_OUTCOME_CODE = {None: 0, "success": 1, "infeasible": 2}


def _state_row(s: PedestrianState) -> list[float]:
    return [s.x, s.y, s.phi, s.v_forw, s.v_orth, s.omega]


class _Recorder:
    def __init__(self, start: PedestrianState):
        self.states = [_state_row(start)]
        self.risk = []
        self.replanned = []
        self.cap = []
        self.outcome = []
        self.recovering = []
        self.iterations = []

    def record(self, state: PedestrianState, tel) -> None:
        self.states.append(_state_row(state))
        self.risk.append(tel.risk)
        self.replanned.append(tel.replanned)
        self.cap.append(tel.replan_cap if tel.replan_cap is not None else math.nan)
        self.outcome.append(_OUTCOME_CODE[tel.outcome])
        self.recovering.append(tel.mode == "recovering")
        self.iterations.append(tel.iterations)

    def freeze(self, agent: Agent) -> PedestrianTrace:
        return PedestrianTrace(
            states=np.array(self.states),
            risk=np.array(self.risk),
            replanned=np.array(self.replanned, dtype=bool),
            replan_cap=np.array(self.cap),
            outcome=np.array(self.outcome, dtype=np.int8),
            recovering=np.array(self.recovering, dtype=bool),
            iterations=np.array(self.iterations, dtype=np.int32),
            snapshots=list(agent.snapshots),
            belief_snapshots=list(agent.belief_snapshots),
        )


def initial_states(scenario: Scenario, p: ModelParams) -> tuple[PedestrianState, PedestrianState]:
    a = PedestrianState(x=scenario.x_offset_a, y=0.0, phi=math.pi / 2,
                        v_forw=p.v_init, v_orth=0.0, omega=0.0)
    b = PedestrianState(x=scenario.x_offset_b, y=SIDEWALK_LENGTH, phi=-math.pi / 2,
                        v_forw=p.v_init, v_orth=0.0, omega=0.0)
    return a, b


def run_trial(scenario: Scenario, seed: int, p: ModelParams | None = None,
              record_beliefs: bool = False) -> TrialResult:
    """Run one seeded trial to termination. Deterministic per (scenario, seed, p)."""
    if p is None:
        p = ModelParams()
    state_a, state_b = initial_states(scenario, p)
    agent_a = Agent(AgentConfig(rho=scenario.rho_a, bias=scenario.bias_a,
                                initial_x_offset=scenario.x_offset_a),
                    RandomSource(seed, 0), state_a, state_b, p, record_beliefs)
    agent_b = Agent(AgentConfig(rho=scenario.rho_b, bias=scenario.bias_b,
                                initial_x_offset=scenario.x_offset_b),
                    RandomSource(seed, 1), state_b, state_a, p, record_beliefs)
    rec_a = _Recorder(state_a)
    rec_b = _Recorder(state_b)

    max_steps = int(round(p.timeout / p.dt_sim))
    passing_step = None
    end_state = EndState.TIMEOUT
    n_steps = 0
    for k in range(1, max_steps + 1):
        # Freeze the step-start states so both agents see the same world.
        snap_a, snap_b = state_a, state_b
        u_a, tel_a = agent_a.tick(k, snap_a, snap_b)
        u_b, tel_b = agent_b.tick(k, snap_b, snap_a)
        state_a = step(snap_a, u_a, p.dt_sim)
        state_b = step(snap_b, u_b, p.dt_sim)
        rec_a.record(state_a, tel_a)
        rec_b.record(state_b, tel_b)
        n_steps = k
        if passing_step is None and state_a.y > state_b.y:
            passing_step = k
        dist = math.hypot(state_a.x - state_b.x, state_a.y - state_b.y)
        if dist < p.r_collision:
            end_state = EndState.COLLISION
            break
        if abs(state_a.x) > SIDEWALK_HALF_WIDTH or abs(state_b.x) > SIDEWALK_HALF_WIDTH:
            end_state = EndState.OUT_OF_BOUNDS
            break
        if state_a.y > SIDEWALK_LENGTH or state_b.y < 0.0:
            end_state = EndState.FINISHED
            break
    return TrialResult(
        scenario=scenario.name, seed=seed, end_state=end_state,
        passing_step=passing_step, n_steps=n_steps, dt_sim=p.dt_sim,
        trace_a=rec_a.freeze(agent_a), trace_b=rec_b.freeze(agent_b),
    )


def scenario_from_config(cp) -> Scenario:
    """Build a (possibly custom) scenario from a parsed config file.

    Uses [scenario] name plus optional [pedestrian.a] / [pedestrian.b]
    overrides (rho, x_offset, bias by name or bias_left/bias_right factors).
    """
    name = cp.get("scenario", "name", fallback="custom")
    try:
        base = make_scenario(name)
    except ValueError:
        base = Scenario(name=name)
    values = {
        "rho_a": base.rho_a, "rho_b": base.rho_b,
        "x_offset_a": base.x_offset_a, "x_offset_b": base.x_offset_b,
        "bias_a": base.bias_a, "bias_b": base.bias_b,
    }
    for tag in ("a", "b"):
        section = f"pedestrian.{tag}"
        if not cp.has_section(section):
            continue
        if cp.has_option(section, "rho"):
            values[f"rho_{tag}"] = cp.getfloat(section, "rho")
        if cp.has_option(section, "x_offset"):
            values[f"x_offset_{tag}"] = cp.getfloat(section, "x_offset")
        if cp.has_option(section, "bias"):
            values[f"bias_{tag}"] = BeliefBias.from_name(cp.get(section, "bias"))
        elif cp.has_option(section, "bias_left") or cp.has_option(section, "bias_right"):
            values[f"bias_{tag}"] = BeliefBias(
                m_l=cp.getfloat(section, "bias_left", fallback=1.0),
                m_r=cp.getfloat(section, "bias_right", fallback=1.0),
            )
    return Scenario(name=name, **values)


def _trial_task(args) -> TrialResult:
    scenario, seed, p, record_beliefs = args
    return run_trial(scenario, seed, p, record_beliefs)


def run_batch(scenario: Scenario, n_trials: int, base_seed: int,
              p: ModelParams | None = None, jobs: int = 1,
              record_beliefs: bool = False) -> list[TrialResult]:
    """Independent trials with seeds base_seed .. base_seed + n - 1, in seed
    order. Results are identical whether run serially or in parallel."""
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    if p is None:
        p = ModelParams()
    tasks = [(scenario, base_seed + i, p, record_beliefs) for i in range(n_trials)]
    if jobs <= 1 or n_trials == 1:
        return [_trial_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(_trial_task, tasks))
