"""Strategy-switch counting, sidewalk-salsa detection, and batch summaries.

A strategy switch happens when the mean lateral position of the planned
waypoints leaves a +-0.2 m dead band around the pedestrian's current position
on the side opposite to the last recorded excursion (first excursions count
too). Staying on the same side or returning inside the band changes nothing.
Switches are counted at plan-update instants up to the moment the pedestrians
pass each other; a trial is a sidewalk salsa when both pedestrians switched
at least twice.
"""

from __future__ import annotations

from dataclasses import dataclass

from .simulator import EndState, TrialResult

DEAD_BAND = 0.2  # lateral dead band around the current position (m)


def strategy_switches(plan_means) -> int:
    """Count switches over (mean_plan_x, current_x) pairs, one per
    plan-update instant."""
    last = 0  # -1 left of band, +1 right of band, 0 no excursion yet
    count = 0
    for mean_x, cur_x in plan_means:
        if mean_x < cur_x - DEAD_BAND:
            side = -1
        elif mean_x > cur_x + DEAD_BAND:
            side = 1
        else:
            continue
        if side != last:
            count += 1
            last = side
    return count


def _pairs_up_to(snapshots, last_step: int | None):
    for snap in snapshots:
        if last_step is not None and snap.step > last_step:
            break
        yield snap.mean_plan_x, snap.current_x


def switch_counts(result: TrialResult, up_to_step: int | None = None) -> tuple[int, int]:
    """Per-pedestrian switch counts up to the passing moment (or the trial
    end when the pedestrians never passed), optionally truncated further."""
    limit = result.passing_step
    if up_to_step is not None:
        limit = up_to_step if limit is None else min(limit, up_to_step)
    return (
        strategy_switches(_pairs_up_to(result.trace_a.snapshots, limit)),
        strategy_switches(_pairs_up_to(result.trace_b.snapshots, limit)),
    )


def detect_salsa(result: TrialResult) -> bool:
    a, b = switch_counts(result)
    return a >= 2 and b >= 2


@dataclass(frozen=True)
class ScenarioSummary:
    scenario: str
    n_trials: int
    finished: int
    collided: int
    out_of_bounds: int
    timeout: int
    salsas: int
    switch_histogram: tuple[int, int, int, int]  # counts of 0, 1, 2, >=3 switches

    @property
    def histogram_total(self) -> int:
        return sum(self.switch_histogram)


def summarize(results) -> ScenarioSummary:
    """Tally end states, salsas, and the per-pedestrian switch histogram
    (two entries per trial)."""
    results = list(results)
    counts = {state: 0 for state in EndState}
    hist = [0, 0, 0, 0]
    salsas = 0
    for r in results:
        counts[r.end_state] += 1
        a, b = switch_counts(r)
        if a >= 2 and b >= 2:
            salsas += 1
        for c in (a, b):
            hist[min(c, 3)] += 1
    return ScenarioSummary(
        scenario=results[0].scenario if results else "",
        n_trials=len(results),
        finished=counts[EndState.FINISHED],
        collided=counts[EndState.COLLISION],
        out_of_bounds=counts[EndState.OUT_OF_BOUNDS],
        timeout=counts[EndState.TIMEOUT],
        salsas=salsas,
        switch_histogram=tuple(hist),
    )


def summary_table(summaries) -> str:
    """Plain-text end-state table, one row per scenario."""
    header = f"{'Scenario':<28}{'Finished':>10}{'Collided':>10}{'OutOfBounds':>13}{'Timeout':>9}{'Salsas':>8}"
    lines = [header, "-" * len(header)]
    for s in summaries:
        lines.append(
            f"{s.scenario:<28}{s.finished:>10}{s.collided:>10}{s.out_of_bounds:>13}"
            f"{s.timeout:>9}{s.salsas:>8}"
        )
    return "\n".join(lines)


def histogram_rows(summaries) -> list[list]:
    """Rows for the switch-count histogram CSV (per-pedestrian counts)."""
    rows = [["scenario", "switches_0", "switches_1", "switches_2", "switches_3_or_more", "n"]]
    for s in summaries:
        h = s.switch_histogram
        rows.append([s.scenario, h[0], h[1], h[2], h[3], s.histogram_total])
    return rows
