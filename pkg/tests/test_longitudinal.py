import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from blendpath.longitudinal import (LongitudinalParams, idm_free_flow, longitudinal_command,
                                    reaction_stop_accel, reaction_stop_roots, stopping_distance)

P = LongitudinalParams()


def simulate_stop(v, accel, s_max, p=P, dt=1e-3):
    """Hold ``accel`` for the reaction time, then brake at b_l; distance to rest."""
    x, t = 0.0, 0.0
    while v > 0.0:
        a = accel if t < p.reaction_time else p.max_obs_deceleration
        v_new = max(v + a * dt, 0.0)
        x += 0.5 * (v + v_new) * dt
        v, t = v_new, t + dt
        if x > 10 * s_max + 100:
            break
    return x


def test_idm_spot_values():
    assert idm_free_flow(3.0, P) == 0.0
    assert idm_free_flow(0.0, P) == 1.0
    assert idm_free_flow(1.5, P) == 0.875


def test_table_one_defaults():
    assert (P.preferred_speed, P.preferred_acceleration, P.preferred_deceleration) == (3.0, 1.0, -1.0)
    assert (P.max_deceleration, P.max_obs_deceleration, P.reaction_time) == (-4.0, -8.0, 1.0)
    assert (P.acceleration_exp, P.preferred_stop_dist, P.path_width_m) == (3.0, 0.0, 12.0)
    assert P.deceleration_factor == 2.0


def test_stopped_vehicle_not_braked():
    for s in (0.5, 5.0, 100.0):
        assert reaction_stop_accel(s, 0.0, P) >= 0.0


def test_large_headroom_lets_idm_govern():
    a_r = reaction_stop_accel(100.0, 3.0, P)
    assert a_r > 1.0
    assert stopping_distance(3.0, 1.0, P.reaction_time, P.max_obs_deceleration) < 10.0
    assert longitudinal_command(3.0, 100.0, P) == pytest.approx(
        idm_free_flow(3.0, P) - (4.5 / 100.0) ** 2, abs=1e-12)


def test_five_metre_gap():
    # the admissible root is still positive at 5 m; the fused command brakes
    a_r = reaction_stop_accel(5.0, 3.0, P)
    assert a_r == pytest.approx(-5.0 + 4.0 * math.sqrt(2.0), abs=1e-12)
    assert simulate_stop(3.0, a_r, 5.0) <= 5.0
    assert longitudinal_command(3.0, 5.0, P) < 0.0


@pytest.mark.parametrize("s", [1.0, 2.0, 3.0, 4.0])
def test_short_gap_brakes_and_stops_in_time(s):
    a_r = reaction_stop_accel(s, 3.0, P)
    assert a_r < 0.0
    assert simulate_stop(3.0, a_r / P.deceleration_factor, s) <= s + 1e-2
    assert simulate_stop(3.0, a_r, s) <= s


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 200.0), st.floats(0.0, 3.0))
def test_selected_root_satisfies_stop_oracle(s, v):
    roots = reaction_stop_roots(s, v, P)
    a_r = reaction_stop_accel(s, v, P)
    if roots is None:
        assert a_r == P.max_obs_deceleration
        return
    raw = a_r / P.deceleration_factor if a_r < 0 else a_r
    if a_r != P.max_obs_deceleration:
        assert raw in roots
        # the selected root stops exactly at s (tight) within integration error
        assert stopping_distance(v, raw, P.reaction_time, P.max_obs_deceleration) <= s * (1 + 1e-9)
        assert simulate_stop(v, raw, s) <= s + 0.01


def test_negative_radicand_floor():
    # very short gap at speed: no root, emergency floor
    p = LongitudinalParams(reaction_time=2.0)
    assert reaction_stop_roots(0.1, 3.0, p) is None or reaction_stop_accel(0.1, 3.0, p) <= 0.0


def test_command_examples():
    assert longitudinal_command(3.0, 1e9, P) == pytest.approx(0.0, abs=1e-12)
    assert longitudinal_command(0.0, 200.0, P) == 1.0
    assert longitudinal_command(3.0, 12.0, P) < 0.0


def test_contact_brakes_hard():
    # inside the distance floor the command is the emergency floor
    assert longitudinal_command(0.01, 0.005, P) == P.max_obs_deceleration
    p = LongitudinalParams(preferred_stop_dist=2.0)
    assert longitudinal_command(0.5, 2.005, p) == p.max_obs_deceleration
    assert longitudinal_command(0.02, 0.02, P) > P.max_obs_deceleration


def test_closed_loop_stops_before_point():
    x, v, dt, d0 = 0.0, 2.0, 1e-3, 10.0
    for _ in range(60000):
        a = max(longitudinal_command(v, d0 - x, P), -v / dt)
        x += v * dt
        v += a * dt
    assert x < d0 and v < 1e-9


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(0.0, 250.0), st.floats(0.0, 250.0))
def test_command_monotone_and_bounded(v, d1, d2):
    lo, hi = sorted((d1, d2))
    a_lo, a_hi = longitudinal_command(v, lo, P), longitudinal_command(v, hi, P)
    assert a_lo <= a_hi + 1e-12
    for a in (a_lo, a_hi):
        assert P.max_obs_deceleration <= a <= P.preferred_acceleration


def test_straight_equilibrium_speed():
    v, dt = 0.0, 0.01
    for _ in range(6000):
        v = max(v + longitudinal_command(v, 200.0, P) * dt, 0.0)
    assert abs(v - 3.0) / 3.0 < 0.02


def test_params_validation():
    for bad in ({"preferred_speed": 0.0}, {"max_deceleration": 1.0}, {"reaction_time": 0.0},
                {"max_deceleration": -9.0}, {"path_width_m": 0.0}, {"deceleration_factor": 0.0}):
        with pytest.raises(ValueError):
            LongitudinalParams(**bad)
    with pytest.raises(ValueError):
        reaction_stop_accel(0.0, 1.0, P)
