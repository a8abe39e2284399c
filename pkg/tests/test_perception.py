import math
from dataclasses import replace

import numpy as np
import pytest

from sidewalk_salsa.core import ModelParams, PedestrianState, RandomSource
from sidewalk_salsa.perception import init_observation, update_observation


def _true(**kw):
    base = dict(x=0.0, y=15.0, phi=-math.pi / 2, v_forw=1.3, v_orth=0.0, omega=0.0)
    base.update(kw)
    return PedestrianState(**base)


NO_NOISE = ModelParams(beta=1e-12)  # parameters must stay positive


def test_init_copies_truth():
    obs = init_observation(_true())
    assert (obs.x_o, obs.y_o) == (0.0, 15.0)
    assert obs.v_forw_o == 1.3
    assert obs.v_orth_o == 0.0
    assert obs.theta_o == -math.pi / 2


def test_init_clamps_negative_forward():
    obs = init_observation(_true(v_forw=-0.4))
    assert obs.v_forw_o == 0.0


def test_update_tracks_with_rate_alpha():
    obs = init_observation(_true(v_forw=1.0))
    out = update_observation(obs, _true(v_forw=1.3), RandomSource(0), NO_NOISE)
    assert out.v_forw_o == pytest.approx(1.0 + 0.1 * 0.3, abs=1e-9)


def test_update_noise_free_fixed_point():
    obs = init_observation(_true())
    out = update_observation(obs, _true(), RandomSource(0), NO_NOISE)
    assert out.v_forw_o == pytest.approx(1.3, abs=1e-9)
    assert out.v_orth_o == pytest.approx(0.0, abs=1e-9)
    assert out.theta_o == pytest.approx(-math.pi / 2, abs=1e-9)


def test_error_decays_geometrically():
    truth = _true(v_forw=1.3)
    obs = init_observation(_true(v_forw=1.0))
    rng = RandomSource(0)
    for k in range(1, 60):
        obs = update_observation(obs, truth, rng, NO_NOISE)
        expected = 0.3 * 0.9 ** k
        assert truth.v_forw - obs.v_forw_o == pytest.approx(expected, abs=1e-9)
    # < 1% of the initial error within 2.5 s (50 steps)
    assert 0.9 ** 50 < 0.01


def test_position_always_exact():
    obs = init_observation(_true())
    rng = RandomSource(5)
    p = ModelParams()
    out = update_observation(obs, _true(x=0.37, y=12.2), rng, p)
    assert (out.x_o, out.y_o) == (0.37, 12.2)


def test_forward_velocity_never_negative():
    p = ModelParams()
    rng = RandomSource(9)
    obs = init_observation(_true(v_forw=0.0))
    for _ in range(200):
        obs = update_observation(obs, _true(v_forw=-5.0), rng, p)
        assert obs.v_forw_o >= 0.0


def test_stationary_noise_increment_std():
    # With obs == truth, per-step increments are beta * sqrt(dt) * N(0, 1).
    p = ModelParams()
    rng = RandomSource(123)
    truth = _true()
    obs = init_observation(truth)
    increments = []
    for _ in range(20_000):
        new = update_observation(replace(obs, v_orth_o=0.0), truth, rng, p)
        increments.append(new.v_orth_o)
    std = float(np.std(increments))
    assert std == pytest.approx(0.03 * math.sqrt(0.05), abs=1e-4)


def test_three_draws_per_update():
    # Consuming the same stream manually must land on the same values.
    p = ModelParams()
    rng1 = RandomSource(77)
    rng2 = RandomSource(77)
    obs = init_observation(_true())
    out = update_observation(obs, _true(), rng1, p)
    scale = p.beta * math.sqrt(p.dt_sim)
    e = [rng2.normal_draw() for _ in range(3)]
    assert out.v_forw_o == pytest.approx(1.3 + scale * e[0])
    assert out.v_orth_o == pytest.approx(scale * e[1])
    assert out.theta_o == pytest.approx(-math.pi / 2 + scale * e[2])
