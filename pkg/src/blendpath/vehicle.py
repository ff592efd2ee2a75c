"""Kinematic bicycle plant. The state position is the middle of the rear axle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import wrap_angle


class AlphaOutOfRange(ValueError):
    pass


class NonPositiveDt(ValueError):
    pass


@dataclass(frozen=True)
class VehicleParams:
    wheelbase: float = 2.5
    delta_max: float = 0.6
    steer_rate_max: float = 1.0

    def __post_init__(self):
        for name in ("wheelbase", "delta_max", "steer_rate_max"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0")


@dataclass(frozen=True)
class VehicleState:
    x: float
    y: float
    theta: float
    v: float = 0.0      # signed, negative when reversing
    delta: float = 0.0

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])


def check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must lie in [0, 1], got {alpha}")


def step(state: VehicleState, params: VehicleParams, delta_cmd: float,
         accel_cmd: float, dt: float) -> VehicleState:
    """Advance the plant by one explicit Euler step.

    The steering angle first slews toward the saturated command at no more
    than ``steer_rate_max``; the pose is then integrated with the new angle.
    """
    if not dt > 0.0:
        raise NonPositiveDt(f"dt must be > 0, got {dt}")
    target = min(max(delta_cmd, -params.delta_max), params.delta_max)
    max_change = params.steer_rate_max * dt
    delta = state.delta + min(max(target - state.delta, -max_change), max_change)

    v = state.v
    x = state.x + v * math.cos(state.theta) * dt
    y = state.y + v * math.sin(state.theta) * dt
    theta = wrap_angle(state.theta + v / params.wheelbase * math.tan(delta) * dt)
    return VehicleState(x, y, theta, v + accel_cmd * dt, delta)


def axle_positions(state: VehicleState, params: VehicleParams) -> tuple[np.ndarray, np.ndarray]:
    """(rear axle, front axle) midpoints."""
    rear = np.array([state.x, state.y])
    front = rear + params.wheelbase * np.array([math.cos(state.theta), math.sin(state.theta)])
    return rear, front


def control_point(state: VehicleState, params: VehicleParams, alpha: float) -> np.ndarray:
    """Point at fraction ``alpha`` of the wheelbase: 0 is the rear axle, 1 the front."""
    check_alpha(alpha)
    r = alpha * params.wheelbase
    return np.array([state.x + r * math.cos(state.theta), state.y + r * math.sin(state.theta)])

