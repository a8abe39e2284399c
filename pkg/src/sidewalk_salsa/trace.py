"""Trial trace export and replay loading.

Each trial writes two files named <scenario>_<seed>:

* a CSV with one row per simulation step (time, both pedestrians' states,
  per-step risk and replanned flag);
* a JSON file with the end state, passing step, plan snapshots (the inputs of
  the strategy-switch metric), replan events, stored switch counts, and
  optional belief snapshots at replan instants.

Every run also writes an effective-config INI sufficient to reproduce the run
bit-for-bit with the same build.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .core import ModelParams, save_params
from .metrics import detect_salsa, switch_counts
from .simulator import Scenario, TrialResult


class TraceError(Exception):
    """Malformed or inconsistent trace file."""


def trial_basename(result: TrialResult) -> str:
    return f"{result.scenario}_{result.seed}"


def write_trial_csv(result: TrialResult, path: str | Path) -> None:
    header = ["t"]
    for tag in ("a", "b"):
        header += [f"{c}_{tag}" for c in
                   ("x", "y", "phi", "v_forw", "v_orth", "omega", "risk", "replanned")]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(result.n_steps):
            row = [(k + 1) * result.dt_sim]
            for trace in (result.trace_a, result.trace_b):
                s = trace.states[k + 1]
                row += [s[0], s[1], s[2], s[3], s[4], s[5],
                        trace.risk[k], int(trace.replanned[k])]
            writer.writerow(row)


def _snapshot_list(trace):
    return [[int(s.step), float(s.mean_plan_x), float(s.current_x)]
            for s in trace.snapshots]


def _replan_events(trace):
    events = []
    for k in range(len(trace.risk)):
        if trace.replanned[k]:
            events.append({
                "step": k + 1,
                "risk": float(trace.risk[k]),
                "cap": float(trace.replan_cap[k]),
                "outcome": "success" if trace.outcome[k] == 1 else "infeasible",
                "iterations": int(trace.iterations[k]),
            })
    return events


def _belief_snapshots(trace):
    out = []
    for step_index, grid in trace.belief_snapshots:
        out.append({
            "step": int(step_index),
            "t_b": [float(v) for v in grid.t],
            "y_b": [float(v) for v in grid.y],
            "mu": grid.mu.tolist(),
            "sigma": grid.sigma.tolist(),
            "gamma": grid.w.tolist(),
        })
    return out


def write_trial_json(result: TrialResult, path: str | Path,
                     include_beliefs: bool = False) -> None:
    a, b = switch_counts(result)
    doc = {
        "scenario": result.scenario,
        "seed": result.seed,
        "end_state": result.end_state.value,
        "passing_step": result.passing_step,
        "n_steps": result.n_steps,
        "switches": {"a": a, "b": b},
        "salsa": detect_salsa(result),
        "plan_snapshots": {
            "a": _snapshot_list(result.trace_a),
            "b": _snapshot_list(result.trace_b),
        },
        "replan_events": {
            "a": _replan_events(result.trace_a),
            "b": _replan_events(result.trace_b),
        },
    }
    if include_beliefs:
        doc["belief_snapshots"] = {
            "a": _belief_snapshots(result.trace_a),
            "b": _belief_snapshots(result.trace_b),
        }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_trial_json(path: str | Path) -> dict:
    """Load and validate a trial JSON; raises TraceError naming the first
    offending record."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise TraceError(f"cannot parse trace {path}: {exc}") from exc
    for key in ("scenario", "seed", "end_state", "passing_step", "n_steps",
                "switches", "salsa", "plan_snapshots"):
        if key not in doc:
            raise TraceError(f"trace {path} is missing field {key!r}")
    for tag in ("a", "b"):
        snaps = doc["plan_snapshots"].get(tag)
        if not isinstance(snaps, list):
            raise TraceError(f"plan_snapshots[{tag!r}] is not a list")
        for i, rec in enumerate(snaps):
            if (not isinstance(rec, list) or len(rec) != 3
                    or not all(isinstance(v, (int, float)) for v in rec)):
                raise TraceError(f"bad record plan_snapshots[{tag!r}][{i}]")
    return doc


def write_trial_files(result: TrialResult, out_dir: str | Path,
                      include_beliefs: bool = False) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = trial_basename(result)
    csv_path = out / f"{base}.csv"
    json_path = out / f"{base}.json"
    write_trial_csv(result, csv_path)
    write_trial_json(result, json_path, include_beliefs)
    return csv_path, json_path


def write_effective_config(path: str | Path, p: ModelParams, scenario: Scenario,
                           n_trials: int, base_seed: int, jobs: int) -> None:
    sections = {
        "scenario": {"name": scenario.name},
        "pedestrian.a": {
            "rho": repr(scenario.rho_a),
            "x_offset": repr(scenario.x_offset_a),
            "bias_left": repr(scenario.bias_a.m_l),
            "bias_right": repr(scenario.bias_a.m_r),
        },
        "pedestrian.b": {
            "rho": repr(scenario.rho_b),
            "x_offset": repr(scenario.x_offset_b),
            "bias_left": repr(scenario.bias_b.m_l),
            "bias_right": repr(scenario.bias_b.m_r),
        },
        "run": {
            "trials": str(n_trials),
            "base_seed": str(base_seed),
            "jobs": str(jobs),
        },
    }
    save_params(p, path, extra_sections=sections)
