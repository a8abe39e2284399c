"""Two-pedestrian sidewalk encounter simulator.

Each simulated pedestrian holds a deterministic plan for its own trajectory
and a probabilistic belief about the other pedestrian, replanning whenever
the perceived risk of the current plan exceeds a personal threshold. The
package reproduces the "sidewalk salsa" (mutual repeated evasion) in
symmetric head-on encounters and ships a batch experiment harness around it.
"""

from .core import (
    ControlInput,
    ModelParams,
    PedestrianState,
    RandomSource,
    default_params,
)
from .agent import Agent, AgentConfig, AgentMode
from .belief import BeliefBias, BeliefComponent, BeliefPoint, build_belief
from .metrics import ScenarioSummary, detect_salsa, strategy_switches, summarize
from .perception import Observation, init_observation, update_observation
from .planner import Plan, PlanOutcome, initial_plan, plan_cost, replan
from .risk import RiskBreakdown, perceived_risk
from .simulator import (
    EndState,
    Scenario,
    TrialResult,
    make_scenario,
    run_batch,
    run_trial,
)

__all__ = [
    "Agent",
    "AgentConfig",
    "AgentMode",
    "BeliefBias",
    "BeliefComponent",
    "BeliefPoint",
    "ControlInput",
    "EndState",
    "ModelParams",
    "Observation",
    "PedestrianState",
    "Plan",
    "PlanOutcome",
    "RandomSource",
    "RiskBreakdown",
    "Scenario",
    "ScenarioSummary",
    "TrialResult",
    "build_belief",
    "default_params",
    "detect_salsa",
    "init_observation",
    "initial_plan",
    "make_scenario",
    "perceived_risk",
    "plan_cost",
    "replan",
    "run_batch",
    "run_trial",
    "strategy_switches",
    "summarize",
    "update_observation",
]

__version__ = "0.1.0"
