import math

import numpy as np
import pytest

from sidewalk_salsa.core import (
    ModelParams,
    PedestrianState,
    RandomSource,
    apply_param_overrides,
    default_params,
    load_params,
    normal_draw,
    save_params,
    travel_direction,
)


def test_default_params_values():
    p = default_params()
    assert p.dt_sim == 0.05
    assert p.horizon == 7.0
    assert p.dt_plan == 0.25
    assert p.v_init == 1.3
    assert (p.lambda2, p.lambda3, p.lambda4) == (100.0, 2.0, 5.0)
    assert p.lambda1 == p.lambda5 == p.lambda6 == p.lambda7 == 1.0
    assert p.alpha == pytest.approx(2 * p.dt_sim)
    assert p.beta == 0.03
    assert p.r_com == 0.3
    assert p.a_e == 0.2
    assert p.gamma_c == 0.5
    assert p.zeta == 0.25
    assert p.eta == 10.0
    assert p.delta_x == 0.15
    assert p.r_collision == 0.25
    assert p.replan_factor == 0.75
    assert p.retry_factor == 0.9


def test_n_plan_is_28():
    assert default_params().n_plan == 28
    assert default_params().steps_per_plan == 5


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(dt_sim=-0.05)
    with pytest.raises(ValueError):
        ModelParams(gamma_c=1.5)
    with pytest.raises(ValueError):
        ModelParams(replan_factor=0.95)  # must stay below retry_factor
    with pytest.raises(ValueError):
        ModelParams(horizon=7.1)
    with pytest.raises(ValueError):
        ModelParams(plan_shift_mode="sometimes")


def test_state_rejects_non_finite():
    with pytest.raises(ValueError):
        PedestrianState(x=math.nan, y=0, phi=0, v_forw=0, v_orth=0, omega=0)


def test_travel_direction():
    assert travel_direction(math.pi / 2) == 1.0
    assert travel_direction(-math.pi / 2) == -1.0


def test_rng_determinism():
    a = RandomSource(42, 0)
    b = RandomSource(42, 0)
    first = [a.normal_draw() for _ in range(1000)]
    second = [b.normal_draw() for _ in range(1000)]
    assert first == second
    assert first[0] != first[1]


def test_rng_streams_differ_by_index():
    a = RandomSource(42, 0)
    b = RandomSource(42, 1)
    assert [a.normal_draw() for _ in range(4)] != [b.normal_draw() for _ in range(4)]


def test_normal_draw_moments():
    rng = RandomSource(7, 0)
    xs = np.array([normal_draw(rng) for _ in range(100_000)])
    assert abs(xs.mean()) < 0.02
    assert abs(xs.var() - 1.0) < 0.03


def test_params_config_round_trip(tmp_path):
    p = ModelParams(beta=0.016, eta=12.0, renormalize_bias=False,
                    plan_shift_mode="per_sim_step")
    path = tmp_path / "params.ini"
    save_params(p, path)
    loaded = load_params(path)
    assert loaded == p


def test_apply_overrides():
    p = apply_param_overrides(ModelParams(), {"fy_denominator": "0.18",
                                              "renormalize_bias": "false"})
    assert p.fy_denominator == 0.18
    assert p.renormalize_bias is False
    with pytest.raises(KeyError):
        apply_param_overrides(ModelParams(), {"not_a_param": "1"})
    with pytest.raises(ValueError):
        apply_param_overrides(ModelParams(), {"renormalize_bias": "maybe"})
