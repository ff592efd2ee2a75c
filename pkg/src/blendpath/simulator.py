"""
Deterministic closed-loop harness.

Controllers see a noisy measurement of the state; the plant integrates the
true state. Commands pass through a FIFO delay line before reaching the plant.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from collections import deque
from dataclasses import dataclass, field, fields, replace
from typing import Literal

import numpy as np

from .geometry import Corridor, Path, point_at, project, ray_border_distance, tangent_at, wrap_angle
from .lateral import LateralParams, compute_steering, pure_pursuit
from .longitudinal import LongitudinalParams, longitudinal_command
from .tracks import benchmark_track
from .vehicle import VehicleParams, VehicleState, check_alpha, control_point, step

Controller = Literal["proposed", "stanley", "pure_pursuit"]

TRACE_COLUMNS = ("t", "x", "y", "theta", "v", "delta_cmd", "delta_actual", "a_cmd",
                 "d_obs", "e_cp", "heading_err_deg", "alpha")


class SimulationAborted(RuntimeError):
    def __init__(self, step_index: int, cause: Exception):
        super().__init__(f"simulation aborted at step {step_index}: {cause}")
        self.step_index = step_index
        self.cause = cause


class NeverConverged(UserWarning):
    pass


@dataclass(frozen=True)
class AlphaSchedule:
    """Constant control point, or ``0.5 (sin(omega t) + 1)`` sweeping rear to front."""
    kind: Literal["constant", "sinusoid"] = "constant"
    value: float = 0.5

    def __post_init__(self):
        if self.kind == "constant":
            check_alpha(self.value)
        elif self.kind != "sinusoid":
            raise ValueError(f"unknown alpha schedule {self.kind!r}")

    @classmethod
    def constant(cls, alpha: float) -> "AlphaSchedule":
        return cls("constant", alpha)

    @classmethod
    def sinusoid(cls, omega: float) -> "AlphaSchedule":
        return cls("sinusoid", omega)

    def __call__(self, t: float) -> float:
        if self.kind == "constant":
            return self.value
        return 0.5 * (math.sin(self.value * t) + 1.0)


@dataclass(frozen=True)
class SimConfig:
    track: Path = field(default_factory=benchmark_track)
    dt: float = 0.01
    duration: float = 380.0
    initial_offset: float = 4.0
    initial_heading_error: float = 0.0
    initial_speed: float = 0.0
    initial_s: float = 0.0
    direction: Literal["forward", "reverse"] = "forward"
    alpha_schedule: AlphaSchedule = field(default_factory=AlphaSchedule)
    controller: Controller = "proposed"
    pure_pursuit_lookahead: float = 6.0
    stanley_gain: float = 0.5
    stanley_softening: float = 0.1
    noise_position: float = 0.0
    noise_heading: float = 0.0
    actuation_delay_steps: int = 0
    rng_seed: int = 0
    max_range: float = 200.0
    lateral: LateralParams = field(default_factory=LateralParams)
    longitudinal: LongitudinalParams = field(default_factory=LongitudinalParams)
    vehicle: VehicleParams = field(default_factory=VehicleParams)

    def __post_init__(self):
        if not self.dt > 0.0 or not self.duration > 0.0:
            raise ValueError("dt and duration must be > 0")
        if self.actuation_delay_steps < 0:
            raise ValueError("actuation_delay_steps must be >= 0")
        if self.noise_position < 0.0 or self.noise_heading < 0.0:
            raise ValueError("noise amplitudes must be >= 0")
        if self.direction not in ("forward", "reverse"):
            raise ValueError(f"direction must be 'forward' or 'reverse', got {self.direction!r}")
        if self.controller not in ("proposed", "stanley", "pure_pursuit"):
            raise ValueError(f"unknown controller {self.controller!r}")
        if not self.pure_pursuit_lookahead > 0.0 or not self.stanley_gain > 0.0:
            raise ValueError("pure_pursuit_lookahead and stanley_gain must be > 0")
        if self.stanley_softening < 0.0:
            raise ValueError("stanley_softening must be >= 0")
        if not self.max_range > 0.0:
            raise ValueError("max_range must be > 0")

    @property
    def n_steps(self) -> int:
        return int(round(self.duration / self.dt))


@dataclass
class SimTrace:
    """Per-step log, one array per column, on a uniform time grid."""
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    x_meas: np.ndarray
    y_meas: np.ndarray
    theta_meas: np.ndarray
    v: np.ndarray
    delta_cmd: np.ndarray
    delta_actual: np.ndarray
    a_cmd: np.ndarray
    d_obs: np.ndarray
    e_cp: np.ndarray
    heading_err: np.ndarray
    alpha: np.ndarray
    s: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(TRACE_COLUMNS)
        cols = (self.t, self.x, self.y, self.theta, self.v, self.delta_cmd, self.delta_actual,
                self.a_cmd, self.d_obs, self.e_cp, np.degrees(self.heading_err), self.alpha)
        for row in zip(*cols):
            writer.writerow([f"{float(val):.9g}" for val in row])
        return buf.getvalue()

    def write_csv(self, filename: str) -> None:
        with open(filename, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())


def initial_state(config: SimConfig) -> VehicleState:
    """Rear axle ``initial_offset`` metres left of the path point at ``initial_s``."""
    track = config.track
    base = point_at(track, config.initial_s)
    th = tangent_at(track, config.initial_s)
    x = base[0] - config.initial_offset * math.sin(th)
    y = base[1] + config.initial_offset * math.cos(th)
    heading = th + config.initial_heading_error
    v = config.initial_speed
    if config.direction == "reverse":
        heading += math.pi
        v = -v
    return VehicleState(x, y, wrap_angle(heading), v, 0.0)


def _steering(config: SimConfig, state: VehicleState, alpha: float) -> float:
    veh = config.vehicle
    if config.controller == "pure_pursuit":
        heading = state.theta if config.direction == "forward" else wrap_angle(state.theta + math.pi)
        delta = pure_pursuit((state.x, state.y), heading, config.track, veh.wheelbase,
                             config.pure_pursuit_lookahead)
        if config.direction == "reverse":
            delta = -delta
        return min(max(delta, -veh.delta_max), veh.delta_max)
    if config.controller == "stanley":
        # baseline: front axle only, with its own gains
        lat = replace(config.lateral, k=config.stanley_gain, v_softening=config.stanley_softening)
        return compute_steering(state, veh, config.track, lat, config.direction, 1.0)
    return compute_steering(state, veh, config.track, config.lateral, config.direction, alpha)


def run_scenario(config: SimConfig) -> SimTrace:
    track = config.track
    veh = config.vehicle
    corridor = Corridor(track, config.longitudinal.path_width_m)
    rng = np.random.default_rng(config.rng_seed)
    sign = 1.0 if config.direction == "forward" else -1.0
    n = config.n_steps + 1

    rec = {name: np.empty(n) for name in (f.name for f in fields(SimTrace))}
    state = initial_state(config)
    delay = deque([(0.0, 0.0)] * config.actuation_delay_steps)

    for i in range(n):
        t = i * config.dt
        noise = rng.uniform(-1.0, 1.0, size=3)
        meas = replace(state,
                       x=state.x + config.noise_position * noise[0],
                       y=state.y + config.noise_position * noise[1],
                       theta=wrap_angle(state.theta + config.noise_heading * noise[2]))
        alpha = config.alpha_schedule(t)
        try:
            delta_cmd = _steering(config, meas, alpha)
            if config.controller == "proposed":
                cp_alpha = alpha
            elif config.controller == "stanley":
                cp_alpha = 1.0
            else:
                cp_alpha = 0.0
            motion_heading = meas.theta if sign > 0 else wrap_angle(meas.theta + math.pi)
            d_obs = ray_border_distance(corridor, (meas.x, meas.y), motion_heading, config.max_range)
            a_cmd = longitudinal_command(abs(meas.v), d_obs, config.longitudinal)
        except Exception as exc:  # component errors carry no step context
            raise SimulationAborted(i, exc) from exc

        cp = control_point(state, veh, cp_alpha)
        proj = project(track, cp)
        true_heading = state.theta if sign > 0 else wrap_angle(state.theta + math.pi)
        rec["t"][i] = t
        rec["x"][i], rec["y"][i], rec["theta"][i] = state.x, state.y, state.theta
        rec["x_meas"][i], rec["y_meas"][i], rec["theta_meas"][i] = meas.x, meas.y, meas.theta
        rec["v"][i] = state.v
        rec["delta_cmd"][i] = delta_cmd
        rec["delta_actual"][i] = state.delta
        rec["a_cmd"][i] = a_cmd
        rec["d_obs"][i] = d_obs
        rec["e_cp"][i] = proj.e_d
        rec["heading_err"][i] = wrap_angle(true_heading - proj.tangent_heading)
        rec["alpha"][i] = cp_alpha
        rec["s"][i] = proj.s
        if i == n - 1:
            break

        delay.append((delta_cmd, a_cmd))
        delta_apply, a_apply = delay.popleft()
        speed = abs(state.v)
        # braking never reverses the direction of travel
        a_apply = max(a_apply, -speed / config.dt)
        state = step(state, veh, delta_apply, sign * a_apply, config.dt)

    return SimTrace(**rec)


@dataclass(frozen=True)
class SummaryMetrics:
    mean_abs_lateral_error: float
    rms_lateral_error: float
    max_abs_lateral_error: float
    mean_signed_lateral_error: float
    mean_heading_error: float
    mean_abs_heading_error: float
    steering_smoothness: float
    convergence_time: float
    initial_overshoot: float
    converged: bool

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def convergence_index(e: np.ndarray, band: float) -> int | None:
    """First index after which ``|e| <= band`` holds for the rest of the series."""
    outside = np.flatnonzero(np.abs(e) > band)
    if len(outside) == 0:
        return 0
    last = int(outside[-1])
    return None if last == len(e) - 1 else last + 1


def compute_metrics(trace: SimTrace, skip_initialization: bool = True, band: float = 0.15,
                    overshoot_window: float = 20.0) -> SummaryMetrics:
    """Accuracy and smoothness statistics.

    With ``skip_initialization`` the statistics cover the trace from the
    convergence time on. A run that never settles into the band raises a
    :class:`NeverConverged` warning and is summarized over its second half.
    """
    if len(trace) == 0:
        raise ValueError("empty trace")
    e = trace.e_cp
    t = trace.t
    dt = float(t[1] - t[0]) if len(t) > 1 else 1.0
    k = convergence_index(e, band)
    converged = k is not None
    if converged:
        t_conv = float(t[k])
        start = k if skip_initialization else 0
    else:
        warnings.warn(f"lateral error never settles within +/-{band} m", NeverConverged,
                      stacklevel=2)
        t_conv = float(t[-1])
        start = len(e) // 2 if skip_initialization else 0

    w = slice(start, None)
    ew, hw = e[w], trace.heading_err[w]
    dw = trace.delta_actual[w]
    smooth = float(np.mean(np.abs(np.diff(dw))) / dt) if len(dw) > 1 else 0.0

    e0 = e[0]
    early = -np.sign(e0) * e[t <= overshoot_window] if e0 != 0.0 else np.zeros(1)
    return SummaryMetrics(
        mean_abs_lateral_error=float(np.mean(np.abs(ew))),
        rms_lateral_error=float(np.sqrt(np.mean(ew ** 2))),
        max_abs_lateral_error=float(np.max(np.abs(ew))),
        mean_signed_lateral_error=float(np.mean(ew)),
        mean_heading_error=float(np.mean(hw)),
        mean_abs_heading_error=float(np.mean(np.abs(hw))),
        steering_smoothness=smooth,
        convergence_time=t_conv,
        initial_overshoot=float(max(0.0, early.max())),
        converged=converged,
    )


COMPARISON_LAWS = {
    "proposed_a0": ("proposed", 0.0),
    "proposed_a0.5": ("proposed", 0.5),
    "proposed_a1": ("proposed", 1.0),
    "stanley": ("stanley", 1.0),
    "pure_pursuit": ("pure_pursuit", 0.0),
}


def compare_controllers(config: SimConfig, laws=None, band: float = 0.15) -> dict[str, SummaryMetrics]:
    """Run each control law on the same track, seed and timing."""
    laws = COMPARISON_LAWS if laws is None else laws
    out = {}
    for name, (controller, alpha) in laws.items():
        cfg = replace(config, controller=controller, alpha_schedule=AlphaSchedule.constant(alpha))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NeverConverged)
            out[name] = compute_metrics(run_scenario(cfg), band=band)
    return out
