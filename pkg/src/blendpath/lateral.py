"""
Steering laws and their blend over a virtual control point.

All laws return a steering angle in radians, positive to the left
(counter-clockwise yaw when driving forward).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .geometry import Path, point_at, project, tangent_at, wrap_angle
from .vehicle import VehicleParams, VehicleState, axle_positions, check_alpha

log = logging.getLogger(__name__)

Direction = Literal["forward", "reverse"]


class KappaOutOfDomain(ValueError):
    pass


@dataclass(frozen=True)
class LateralParams:
    alpha: float = 0.5
    k: float = 5.0
    v_softening: float = 2.0
    d: float = 1.3
    L: float = 5.0

    def __post_init__(self):
        check_alpha(self.alpha)
        for name in ("k", "d", "L"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0")
        if self.v_softening < 0.0:
            raise ValueError("v_softening must be >= 0")


def _clamped_lookahead_s(path: Path, s: float, lookahead: float) -> float:
    if path.closed:
        return s + lookahead
    return min(s + lookahead, path.length)


def stanley_angle(heading_error: float, cross_track: float, v: float,
                  k: float, v_softening: float) -> float:
    """``heading_error + atan(k * cross_track / (|v| + v_softening))``.

    ``cross_track`` is positive when the front axle is right of the path, so
    a positive result steers back toward it.
    """
    return heading_error + math.atan(k * cross_track / (abs(v) + v_softening))


def stanley(front_axle, heading: float, v: float, path: Path, params: LateralParams) -> float:
    proj = project(path, front_axle)
    theta_e = wrap_angle(proj.tangent_heading - heading)
    return stanley_angle(theta_e, -proj.e_d, v, params.k, params.v_softening)


def curvature_feedback_angle(e_d: float, e_t: float, kappa: float, wheelbase: float,
                             d: float, L: float) -> float:
    """Rear-axle geometric law from lateral error, heading error and the
    heading change ``kappa`` seen over the lookahead ``L``.

    The side flag and the ``d / e_d`` arctangent are folded into one
    two-argument arctangent: the first term is continuous through e_d = 0 and
    steers toward the path from either side.
    """
    if not math.isfinite(kappa):
        raise KappaOutOfDomain(f"kappa={kappa}")
    if abs(kappa) > 2.0:
        log.debug("clamping kappa=%.4f to the arcsin domain", kappa)
        kappa = math.copysign(2.0, kappa)
    l = math.hypot(e_d, d)
    feedback = -math.atan(2.0 * wheelbase * math.cos(e_t - math.atan2(d, e_d)) / l)
    feedforward = math.atan(2.0 * wheelbase / L * math.asin(kappa / 2.0))
    return feedback + feedforward


def curvature_feedback(rear_axle, heading: float, path: Path, wheelbase: float,
                       params: LateralParams) -> float:
    proj = project(path, rear_axle)
    e_t = wrap_angle(heading - proj.tangent_heading)
    kappa = wrap_angle(tangent_at(path, _clamped_lookahead_s(path, proj.s, params.L)) - heading)
    return curvature_feedback_angle(proj.e_d, e_t, kappa, wheelbase, params.d, params.L)


def blend(delta_front: float, delta_rear: float, alpha: float) -> float:
    check_alpha(alpha)
    return alpha * delta_front + (1.0 - alpha) * delta_rear


def compute_steering(state: VehicleState, vehicle: VehicleParams, path: Path,
                     lat: LateralParams, direction: Direction = "forward",
                     alpha: float | None = None) -> float:
    """Blended, saturated steering command.

    ``alpha`` overrides ``lat.alpha`` (for scheduled control points).

    Reversing at speed ``v < 0`` with heading ``theta`` is, for the bicycle
    model, forward motion of a mirror vehicle with heading ``theta + pi``,
    speed ``|v|`` and steering ``-delta`` sharing the same rear axle. Both laws
    run on that mirror vehicle and their output is negated. In a steady turn
    the mirror front axle and the physical front axle sit at the same radius,
    so ``alpha`` still weights the physical control point.
    """
    a = lat.alpha if alpha is None else alpha
    check_alpha(a)
    E = vehicle.wheelbase
    if direction == "forward":
        heading, speed, sign = state.theta, state.v, 1.0
        rear, front = axle_positions(state, vehicle)
    elif direction == "reverse":
        heading, speed, sign = wrap_angle(state.theta + math.pi), abs(state.v), -1.0
        rear = np.array([state.x, state.y])
        front = rear + E * np.array([math.cos(heading), math.sin(heading)])
    else:
        raise ValueError(f"direction must be 'forward' or 'reverse', got {direction!r}")
    d_front = stanley(front, heading, speed, path, lat) if a > 0.0 else 0.0
    d_rear = curvature_feedback(rear, heading, path, E, lat) if a < 1.0 else 0.0
    delta = sign * blend(d_front, d_rear, a)
    return min(max(delta, -vehicle.delta_max), vehicle.delta_max)


def pure_pursuit_angle(bearing: float, wheelbase: float, lookahead: float) -> float:
    return math.atan(2.0 * wheelbase * math.sin(bearing) / lookahead)


def pure_pursuit(rear_axle, heading: float, path: Path, wheelbase: float,
                 lookahead: float) -> float:
    """Pure pursuit toward the path point ``lookahead`` metres of arc beyond
    the rear-axle projection."""
    if not lookahead > 0.0:
        raise ValueError("lookahead must be positive")
    rear = np.asarray(rear_axle, dtype=float)
    proj = project(path, rear)
    target = point_at(path, _clamped_lookahead_s(path, proj.s, lookahead))
    dx, dy = target[0] - rear[0], target[1] - rear[1]
    ld = math.hypot(dx, dy)
    if ld == 0.0:
        return 0.0
    return pure_pursuit_angle(wrap_angle(math.atan2(dy, dx) - heading), wheelbase, ld)
