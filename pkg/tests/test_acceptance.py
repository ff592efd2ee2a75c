"""
The twelve acceptance criteria, one test each. Every test prints a single
PASS/FAIL line, and the same lines are collected into a terminal summary.

Criterion 6 of the numbering below follows the criteria list; shared scenario
runs are cached so each closed-loop run happens once per session.
"""

import math
import time
import warnings
from functools import lru_cache

import numpy as np
import pytest

from conftest import ACCEPTANCE
from blendpath.geometry import build_path
from blendpath.lateral import (LateralParams, compute_steering, curvature_feedback, pure_pursuit,
                               stanley)
from blendpath.longitudinal import (LongitudinalParams, idm_free_flow, longitudinal_command,
                                    reaction_stop_accel, reaction_stop_roots)
from blendpath.simulator import (AlphaSchedule, NeverConverged, SimConfig, compute_metrics,
                                 convergence_index, run_scenario)
from blendpath.tracks import benchmark_features, benchmark_track, straight_track
from blendpath.vehicle import VehicleParams, VehicleState, step

BAND = 0.15
NOISE = dict(noise_position=0.05, noise_heading=math.radians(0.5), actuation_delay_steps=5)


def record(num, title, ok, detail):
    ACCEPTANCE.append((num, title, bool(ok), detail))
    print(f"[{'PASS' if ok else 'FAIL'}] {num:2d}. {title}: {detail}")
    return bool(ok)


@lru_cache(maxsize=None)
def scenario(controller="proposed", alpha=0.5, direction="forward", noisy=False,
             schedule=None, duration=None, seed=0):
    """Benchmark-track run from a 4 m offset; returns (trace, wall seconds)."""
    v0 = 3.0 if direction == "forward" else 1.0
    kwargs = dict(NOISE) if noisy else {}
    if duration is not None:
        kwargs["duration"] = duration
    elif direction == "reverse":
        kwargs["duration"] = 450.0
    sched = AlphaSchedule.sinusoid(schedule) if schedule else AlphaSchedule.constant(alpha)
    cfg = SimConfig(track=benchmark_track(), initial_offset=4.0, direction=direction,
                    controller=controller, alpha_schedule=sched, rng_seed=seed,
                    longitudinal=LongitudinalParams(preferred_speed=v0), **kwargs)
    start = time.perf_counter()
    trace = run_scenario(cfg)
    return trace, time.perf_counter() - start


def metrics(trace, band=BAND):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NeverConverged)
        return compute_metrics(trace, band=band)


# 1

def test_01_circle_oracle():
    E, R, dt = 2.5, 10.0, 1e-3
    delta = math.atan(E / R)
    params = VehicleParams(wheelbase=E, steer_rate_max=1e9)
    start = time.perf_counter()
    s = VehicleState(0.0, 0.0, 0.0, 1.0, delta)
    n = int(round(2.0 * math.pi * R / dt))
    pts = np.empty((n, 2))
    for i in range(n):
        pts[i] = s.x, s.y
        s = step(s, params, delta, 0.0, dt)
    elapsed = time.perf_counter() - start
    x, y = pts[:, 0], pts[:, 1]
    c = np.linalg.lstsq(np.column_stack((x, y, np.ones(n))), x * x + y * y, rcond=None)[0]
    radius = math.sqrt(c[2] + c[0] ** 2 / 4.0 + c[1] ** 2 / 4.0)
    err = abs(radius - R) / R
    ok = record(1, "circle oracle", err < 0.01 and elapsed < 1.0,
                f"radius {radius:.6f} m (error {100 * err:.4f}% < 1%), {elapsed:.2f} s < 1 s")
    assert ok


# 2

def test_02_equilibrium():
    line = build_path([(-50.0, 0.0), (450.0, 0.0)])
    veh, lat = VehicleParams(), LateralParams()
    worst = 0.0
    for x in (0.0, 37.5, 200.0):
        for v in (0.0, 1.0, 3.0):
            worst = max(worst, abs(stanley((x + veh.wheelbase, 0.0), 0.0, v, line, lat)),
                        abs(curvature_feedback((x, 0.0), 0.0, line, veh.wheelbase, lat)),
                        abs(pure_pursuit((x, 0.0), 0.0, line, veh.wheelbase, 6.0)))
            for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
                worst = max(worst,
                            abs(compute_steering(VehicleState(x, 0.0, 0.0, v), veh, line, lat,
                                                 "forward", alpha)),
                            abs(compute_steering(VehicleState(x, 0.0, math.pi, -v), veh, line,
                                                 lat, "reverse", alpha)))
    hold = 0.0
    track = straight_track(400.0)
    for controller, alpha in (("proposed", 0.0), ("proposed", 0.5), ("proposed", 1.0),
                              ("stanley", 1.0), ("pure_pursuit", 0.0)):
        tr = run_scenario(SimConfig(track=track, duration=60.0, initial_offset=0.0,
                                    initial_speed=3.0, controller=controller,
                                    alpha_schedule=AlphaSchedule.constant(alpha)))
        hold = max(hold, float(np.max(np.abs(tr.e_cp))))
    ok = record(2, "equilibrium", worst < 1e-12 and hold < 1e-6,
                f"max |delta| {worst:.1e} < 1e-12, max |e_cp| over 60 s {hold:.1e} m < 1e-6")
    assert ok


# 3

def convergence_check(alpha, noisy, band):
    tr, wall = scenario(alpha=alpha, noisy=noisy)
    m = metrics(tr, band)
    ok = m.converged and m.mean_abs_lateral_error < 0.1 and wall < 10.0
    return ok, (f"alpha={alpha}: enters +/-{band} m at {m.convergence_time:.2f} s and holds, "
                f"mean |e| {m.mean_abs_lateral_error:.4f} m, {wall:.1f} s wall")


def test_03_convergence():
    results = [convergence_check(a, False, BAND) for a in (0.0, 0.5, 1.0)]
    ok = record(3, "convergence", all(r[0] for r in results), "; ".join(r[1] for r in results))
    assert ok


# 4

def test_04_comparison_ordering():
    prop = metrics(scenario(alpha=0.5)[0])
    stan = metrics(scenario(controller="stanley", alpha=1.0)[0])
    pp = metrics(scenario(controller="pure_pursuit", alpha=0.0)[0])
    checks = {
        "mean <= stanley": prop.mean_abs_lateral_error <= stan.mean_abs_lateral_error,
        "mean <= pure pursuit": prop.mean_abs_lateral_error <= pp.mean_abs_lateral_error,
        "overshoot < pure pursuit": prop.initial_overshoot < pp.initial_overshoot,
        "convergence < stanley": prop.convergence_time < stan.convergence_time,
    }
    detail = (f"mean |e| proposed {prop.mean_abs_lateral_error:.4f} / stanley "
              f"{stan.mean_abs_lateral_error:.4f} / pure pursuit {pp.mean_abs_lateral_error:.4f} m; "
              f"overshoot {prop.initial_overshoot:.3f} vs pure pursuit {pp.initial_overshoot:.3f} m; "
              f"convergence {prop.convergence_time:.2f} vs stanley {stan.convergence_time:.2f} s")
    failed = [k for k, v in checks.items() if not v]
    if failed:
        detail += "; failed: " + ", ".join(failed)
    assert record(4, "comparison ordering", not failed, detail)


# 5

def test_05_heading_centering():
    m = metrics(scenario(alpha=0.5)[0])
    mean_deg = math.degrees(m.mean_heading_error)
    ok = record(5, "heading centering", abs(mean_deg) <= 0.5,
                f"post-convergence mean heading error {mean_deg:+.3f} deg, |.| <= 0.5")
    assert ok


# 6

def test_06_dynamic_control_point():
    tr, _ = scenario(schedule=0.2, duration=300.0)
    k = convergence_index(tr.e_cp, BAND)
    finite = bool(np.all(np.isfinite(tr.e_cp)))
    peak = float(np.max(np.abs(tr.e_cp[k:]))) if k is not None else math.inf
    swept = tr.alpha.min() < 0.01 and tr.alpha.max() > 0.99
    ok = record(6, "dynamic control point", k is not None and finite and peak < 0.5 and swept,
                f"converged at {tr.t[k] if k is not None else math.nan:.2f} s, max |e| afterwards "
                f"{peak:.3f} m < 0.5 over {tr.t[-1]:.0f} s, alpha swept "
                f"{tr.alpha.min():.2f}..{tr.alpha.max():.2f}")
    assert ok


# 7

def test_07_robustness():
    results = [convergence_check(a, True, 0.25) for a in (0.0, 0.5, 1.0)]
    ok = record(7, "robustness (noise + 5-step delay)", all(r[0] for r in results),
                "; ".join(r[1] for r in results))
    assert ok


# 8

def test_08_reverse():
    m = {a: metrics(scenario(alpha=a, direction="reverse")[0]) for a in (0.0, 0.5, 1.0)}
    reduction = 1.0 - m[0.5].mean_abs_lateral_error / m[1.0].mean_abs_lateral_error
    ok = m[0.0].converged and m[0.5].converged and reduction >= 0.5
    detail = (f"alpha=0 converges {m[0.0].converged} at {m[0.0].convergence_time:.1f} s, "
              f"alpha=0.5 converges {m[0.5].converged} at {m[0.5].convergence_time:.1f} s; "
              f"mean |e| alpha=0.5 {m[0.5].mean_abs_lateral_error:.4f} vs alpha=1 "
              f"{m[1.0].mean_abs_lateral_error:.4f} m, reduction {100 * reduction:.1f}% >= 50%")
    assert record(8, "reverse maneuvers", ok, detail)


# 9

def stop_distance_sim(v, accel, p, dt=1e-3):
    """Brute force: hold ``accel`` for the reaction time, then brake at b_l."""
    x, t = 0.0, 0.0
    while v > 0.0:
        a = accel if t < p.reaction_time else p.max_obs_deceleration
        v_next = max(v + a * dt, 0.0)
        x += 0.5 * (v + v_next) * dt
        v, t = v_next, t + dt
    return x


def test_09_longitudinal_safety():
    p = LongitudinalParams()
    dt = 1e-3
    worst_margin = math.inf
    oracle_ok = True
    for v0 in np.linspace(0.3, 3.0, 10):
        for d0 in np.linspace(1.0, 200.0, 10):
            # stop-law root selection against the brute-force stop
            if reaction_stop_roots(d0, v0, p) is not None:
                a_r = reaction_stop_accel(d0, v0, p)
                raw = a_r / p.deceleration_factor if a_r < 0.0 else a_r
                if a_r != p.max_obs_deceleration:
                    oracle_ok &= stop_distance_sim(v0, raw, p, dt) <= d0 + 1e-6 * d0 + 5e-3
            # closed loop toward the obstacle point until standstill
            x, v = 0.0, float(v0)
            for _ in range(int(round(240.0 / dt))):
                a = longitudinal_command(v, d0 - x, p)
                a = max(a, -v / dt)
                x += v * dt
                v += a * dt
                if x >= d0:
                    break
                if v < 1e-9 and a <= 0.0:
                    break
            worst_margin = min(worst_margin, d0 - x)
    ok = record(9, "longitudinal safety", worst_margin > 0.0 and oracle_ok,
                f"10x10 grid: closest approach {worst_margin:.4f} m before the obstacle point, "
                f"root-selection oracle {'ok' if oracle_ok else 'violated'} at dt=1e-3")
    assert ok


# 10

def test_10_speed_adaptation():
    tr, _ = scenario(alpha=0.5)
    v0 = 3.0
    feats = benchmark_features()
    late = tr.t > 20.0  # skip the launch from rest
    drops, returns = [], []
    for i, f in enumerate(feats):
        if f.kind == "arc" and f.radius <= 15.0:
            prev = feats[i - 1]
            m = late & (tr.s >= prev.s_start) & (tr.s < f.s_start)
            approach_max = tr.v[m].max()
            at_entry = tr.v[m][-1]
            braking = tr.a_cmd[m].min() < 0.0
            drops.append((f.radius, approach_max, at_entry, braking and at_entry < approach_max))
        if f.kind == "straight" and f.s_end - f.s_start >= 50.0:
            m = late & (tr.s >= f.s_start) & (tr.s < f.s_end)
            returns.append((f.s_end - f.s_start, tr.v[m].max()))
    ok = all(d[3] for d in drops) and all(r[1] >= 0.95 * v0 for r in returns)
    ok = ok and len(drops) == 4 and len(returns) == 7
    detail = ("entry speed below approach max before R<=15 arcs: "
              + ", ".join(f"R{d[0]:.0f} {d[2]:.3f}<{d[1]:.3f}" for d in drops)
              + f"; straights >= 50 m reach {min(r[1] for r in returns):.3f} >= {0.95 * v0:.2f} m/s")
    assert record(10, "speed adaptation", ok, detail)


# 11

def test_11_idm_spot_values():
    p = LongitudinalParams()
    vals = (idm_free_flow(3.0, p), idm_free_flow(0.0, p), idm_free_flow(1.5, p))
    ok = (abs(vals[0]) <= 1e-12 and abs(vals[1] - 1.0) <= 1e-12 and abs(vals[2] - 0.875) <= 1e-12)
    assert record(11, "IDM spot values", ok,
                  f"a(v0)={vals[0]!r}, a(0)={vals[1]!r}, a(1.5)={vals[2]!r}")


# 12

def test_12_determinism(tmp_path):
    cfg = SimConfig(track=benchmark_track(), duration=60.0, rng_seed=7, **NOISE)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_scenario(cfg).write_csv(str(a))
    run_scenario(cfg).write_csv(str(b))
    same = a.read_bytes() == b.read_bytes()
    assert record(12, "determinism", same,
                  f"two seeded runs with noise and delay: {a.stat().st_size} bytes, "
                  f"{'identical' if same else 'different'}")
