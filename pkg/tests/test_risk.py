import math

import numpy as np
import pytest

from sidewalk_salsa.core import ModelParams, PedestrianState
from sidewalk_salsa.perception import Observation
from sidewalk_salsa.belief import (
    BeliefComponent,
    BeliefPoint,
    build_belief,
    build_belief_grid,
    pack_grid,
    prob_in_interval,
)
from sidewalk_salsa.dynamics import rollout_arrays
from sidewalk_salsa.planner import Plan, initial_plan
from sidewalk_salsa.risk import bounds_risk, perceived_risk, proximity_risk

P = ModelParams()


def _ego(**kw):
    base = dict(x=0.0, y=0.0, phi=math.pi / 2, v_forw=1.3, v_orth=0.0, omega=0.0)
    base.update(kw)
    return PedestrianState(**base)


def _obs(**kw):
    base = dict(x_o=0.0, y_o=15.0, v_forw_o=1.3, v_orth_o=0.0, theta_o=-math.pi / 2)
    base.update(kw)
    return Observation(**base)


def _point(mu, sigma, gamma=(1.0, 0.0, 0.0), t_b=1.0, y_b=5.0):
    comps = tuple(BeliefComponent(mu=m, sigma=s, gamma=g)
                  for m, s, g in zip(mu, sigma, gamma))
    return BeliefPoint(t_b=t_b, y_b=y_b, components=comps)


SINGLE = _point(mu=(0.0, 0.0, 0.0), sigma=(0.1, 1.0, 1.0))


# --- proximity ----------------------------------------------------------

def test_proximity_zero_gap_is_pure_lateral_probability():
    r = proximity_risk((0.0, 5.0, 1.0), SINGLE, P)
    assert r == pytest.approx(prob_in_interval(SINGLE, -0.3, 0.3), abs=1e-12)


def test_proximity_longitudinal_discount():
    near = proximity_risk((0.0, 5.0, 1.0), SINGLE, P)
    far = proximity_risk((0.0, 5.6, 1.0), SINGLE, P)
    assert far / near == pytest.approx(math.exp(-1.0), abs=1e-9)


def test_proximity_tail_negligible():
    bp = _point(mu=(2.0, 2.0, 2.0), sigma=(0.05, 0.05, 0.05),
                gamma=(0.5, 0.25, 0.25))
    assert proximity_risk((0.0, 5.0, 1.0), bp, P) < 1e-8


def test_proximity_monotone_in_gap():
    last = math.inf
    for dy in np.linspace(0.0, 3.0, 30):
        r = proximity_risk((0.0, 5.0 + float(dy), 1.0), SINGLE, P)
        assert r <= last + 1e-15
        last = r


def test_proximity_requires_matching_time():
    with pytest.raises(AssertionError):
        proximity_risk((0.0, 5.0, 2.0), SINGLE, P)


def test_proximity_monte_carlo_oracle():
    bp = _point(mu=(0.0, -0.3, 0.3), sigma=(0.13, 0.158, 0.158),
                gamma=(0.5, 0.25, 0.25))
    x_e = 0.2
    rng = np.random.default_rng(1234)
    n = 1_000_000
    comp = rng.choice(3, size=n, p=[c.gamma for c in bp.components])
    mus = np.array([c.mu for c in bp.components])[comp]
    sigmas = np.array([c.sigma for c in bp.components])[comp]
    samples = rng.normal(mus, sigmas)
    frac = float(np.mean(np.abs(samples - x_e) < P.r_com))
    analytic = proximity_risk((x_e, 5.0, 1.0), bp, P)  # dy = 0, f_y = 1
    assert analytic == pytest.approx(frac, abs=0.002)


# --- bounds -------------------------------------------------------------

def test_bounds_negligible_mid_sidewalk():
    assert bounds_risk(0.0, 0.25, P) < 1e-6


def test_bounds_high_at_the_bound():
    # At the bound the transition midpoint sits delta_x inside, so the value
    # approaches the high plateau of the sigmoid.
    expected = 0.5 * (1.0 - math.tanh(-P.eta * P.delta_x))
    assert bounds_risk(-1.25, 1e-9, P) == pytest.approx(expected, abs=1e-3)
    assert bounds_risk(-1.25, 1e-9, P) == pytest.approx(0.9526, abs=1e-3)


def test_bounds_time_discount_factorizes():
    lhs = bounds_risk(0.8, 7.0, P)
    rhs = bounds_risk(0.8, 0.25, P) * math.exp(-7.0 / 7.0) / math.exp(-0.25 / 7.0)
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_bounds_monotone_outside_centerline():
    last = 0.0
    for x in np.linspace(0.0, 1.4, 50):
        r = bounds_risk(float(x), 1.0, P)
        assert r >= last - 1e-12
        last = r


def test_bounds_in_unit_interval():
    for x in np.linspace(-3.0, 3.0, 101):
        for t in (0.25, 2.0, 7.0):
            assert 0.0 <= bounds_risk(float(x), t, P) <= 1.0


# --- perceived risk -----------------------------------------------------

def _straight_plan(ego=None):
    return initial_plan(ego or _ego(), P)


def test_perceived_risk_far_side_lane():
    plan = _straight_plan()
    points = [
        _point(mu=(0.9, 0.9, 0.9), sigma=(0.05, 0.05, 0.05),
               gamma=(0.5, 0.25, 0.25), t_b=(k + 1) * 0.25,
               y_b=plan.states.y[k])
        for k in range(28)
    ]
    rb = perceived_risk(plan, points, P)
    assert rb.max_total < 0.1


def test_perceived_risk_through_mean():
    plan = _straight_plan()
    points = [
        _point(mu=(plan.states.x[k], 0.0, 0.0), sigma=(0.05, 1.0, 1.0),
               t_b=(k + 1) * 0.25, y_b=plan.states.y[k])
        for k in range(28)
    ]
    rb = perceived_risk(plan, points, P)
    assert rb.p_close.max() > 0.99
    assert rb.max_total == pytest.approx(rb.total[rb.argmax_index])


def test_perceived_risk_bounds_fields():
    ego = _ego()
    grid = build_belief_grid(ego, _obs(y_o=8.0), P)
    rb = perceived_risk(_straight_plan(ego), grid, P)
    assert np.all(rb.p_close >= 0) and np.all(rb.p_close <= 1)
    assert np.all(rb.p_bounds >= 0) and np.all(rb.p_bounds <= 1)
    assert rb.max_total <= 2.0
    assert np.allclose(rb.total, rb.p_close + rb.p_bounds)
    assert len(rb.per_point) == 28


def test_perceived_risk_mirror_invariance():
    rng = np.random.default_rng(21)
    for _ in range(20):
        x_e = float(rng.uniform(-0.8, 0.8))
        x_o = float(rng.uniform(-0.8, 0.8))
        v_orth = float(rng.uniform(-0.3, 0.3))
        u = rng.uniform(-0.5, 0.5, size=(28, 3))
        ego = _ego(x=x_e)
        mirrored_ego = _ego(x=-x_e)
        obs = _obs(x_o=x_o, y_o=9.0, v_orth_o=v_orth)
        mirrored_obs = _obs(x_o=-x_o, y_o=9.0, v_orth_o=-v_orth)
        um = u.copy()
        um[:, 1] *= -1.0
        um[:, 2] *= -1.0
        plan = Plan(controls=u, states=rollout_arrays(ego, u, 0.25), dt=0.25)
        mirrored = Plan(controls=um, states=rollout_arrays(mirrored_ego, um, 0.25),
                        dt=0.25)
        rb = perceived_risk(plan, build_belief_grid(ego, obs, P), P)
        mrb = perceived_risk(mirrored, build_belief_grid(mirrored_ego, mirrored_obs, P), P)
        assert rb.max_total == pytest.approx(mrb.max_total, abs=1e-9)
        assert np.allclose(rb.total, mrb.total, atol=1e-9)


def test_perceived_risk_accepts_grid_and_points():
    ego = _ego()
    obs = _obs(y_o=7.0)
    plan = _straight_plan(ego)
    a = perceived_risk(plan, build_belief_grid(ego, obs, P), P)
    b = perceived_risk(plan, build_belief(ego, obs, P), P)
    assert a.max_total == pytest.approx(b.max_total, abs=1e-12)


def test_perceived_risk_phase_interpolates():
    ego = _ego()
    obs = _obs(y_o=6.0)
    grid = build_belief_grid(ego, obs, P)
    plan = _straight_plan(ego)
    r0 = perceived_risk(plan, grid, P, phase=0.0).max_total
    r_half = perceived_risk(plan, grid, P, phase=0.5).max_total
    assert r_half != pytest.approx(r0, abs=1e-6)  # pairing actually shifts


def test_perceived_risk_length_contract():
    plan = _straight_plan()
    grid = build_belief_grid(_ego(), _obs(), P)
    short = pack_grid(build_belief(_ego(), _obs(), P)[:-1])
    with pytest.raises(AssertionError):
        perceived_risk(plan, short, P)
    assert perceived_risk(plan, grid, P).max_total >= 0.0
