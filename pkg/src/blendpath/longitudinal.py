"""
Speed regulation against a stationary virtual obstacle.

The obstacle is the first virtual-border point hit by a ray cast along the
vehicle heading. Decelerations are negative numbers, as in the parameter table
this module was tuned against.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

log = logging.getLogger(__name__)

# effective-distance floor at contact
_EPS_DISTANCE = 0.01


@dataclass(frozen=True)
class LongitudinalParams:
    preferred_speed: float = 3.0
    preferred_acceleration: float = 1.0
    preferred_deceleration: float = -1.0
    acceleration_exp: float = 3.0
    preferred_stop_dist: float = 0.0
    max_deceleration: float = -4.0
    max_obs_deceleration: float = -8.0
    reaction_time: float = 1.0
    path_width_m: float = 12.0
    deceleration_factor: float = 2.0
    time_headway: float = 0.0

    def __post_init__(self):
        if not self.preferred_speed > 0.0:
            raise ValueError("preferred_speed must be > 0")
        if not self.preferred_acceleration > 0.0:
            raise ValueError("preferred_acceleration must be > 0")
        for name in ("preferred_deceleration", "max_deceleration", "max_obs_deceleration"):
            if not getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be < 0")
        if abs(self.max_obs_deceleration) < abs(self.max_deceleration):
            raise ValueError("max_obs_deceleration must be at least as strong as max_deceleration")
        if not self.reaction_time > 0.0:
            raise ValueError("reaction_time must be > 0")
        if not self.path_width_m > 0.0:
            raise ValueError("path_width_m must be > 0")
        if self.preferred_stop_dist < 0.0 or self.time_headway < 0.0:
            raise ValueError("preferred_stop_dist and time_headway must be >= 0")
        if not self.deceleration_factor > 0.0:
            raise ValueError("deceleration_factor must be > 0")


def idm_free_flow(v: float, p: LongitudinalParams) -> float:
    """Interaction-free IDM term ``a (1 - (v / v0) ** delta)``."""
    return p.preferred_acceleration * (1.0 - (v / p.preferred_speed) ** p.acceleration_exp)


def idm_obstacle_term(v: float, gap: float, p: LongitudinalParams) -> float:
    """IDM interaction term for a standing obstacle ``gap`` metres ahead (<= 0)."""
    s_star = p.preferred_stop_dist + v * p.time_headway \
        + v * v / (2.0 * math.sqrt(p.preferred_acceleration * -p.preferred_deceleration))
    return -p.preferred_acceleration * (s_star / max(gap, _EPS_DISTANCE)) ** 2


def idm_acceleration(v: float, gap: float, p: LongitudinalParams) -> float:
    return idm_free_flow(v, p) + idm_obstacle_term(v, gap, p)


def stopping_distance(v: float, accel: float, reaction_time: float, brake: float) -> float:
    """Distance covered holding ``accel`` for ``reaction_time`` then braking at
    ``brake`` (< 0) until standstill. Speed never goes negative."""
    if v <= 0.0 and accel <= 0.0:
        return 0.0
    v1 = v + accel * reaction_time
    if v1 <= 0.0:
        # stops during the reaction phase
        return v * v / (-2.0 * accel)
    return v * reaction_time + 0.5 * accel * reaction_time ** 2 + v1 * v1 / (-2.0 * brake)


def reaction_stop_roots(s: float, v: float, p: LongitudinalParams) -> tuple[float, float] | None:
    """Both roots of the reaction-time stopping law, or None for a negative radicand."""
    bf, bl, tau = p.max_deceleration, p.max_obs_deceleration, p.reaction_time
    radicand = (bf * bl * tau * tau + 4.0 * bl * v * tau - 8.0 * bl * s) / (4.0 * bf * bl)
    if radicand < 0.0:
        return None
    root = 2.0 * bf * math.sqrt(radicand)
    base = bf * tau - 2.0 * v
    return (base + root) / (2.0 * tau), (base - root) / (2.0 * tau)


def reaction_stop_accel(s_obs: float, v: float, p: LongitudinalParams) -> float:
    """Largest acceleration that still stops within ``s_obs`` after the reaction delay.

    Of the two roots, the admissible one is the one whose delayed emergency
    braking comes to rest within ``s_obs``; when both qualify the larger wins.
    Negative results are scaled by ``deceleration_factor``.
    """
    if s_obs <= 0.0:
        raise ValueError("s_obs must be > 0")
    if v < 0.0:
        raise ValueError("v must be >= 0")
    roots = reaction_stop_roots(s_obs, v, p)
    if roots is None:
        log.debug("negative radicand at s=%.3f v=%.3f: emergency braking", s_obs, v)
        return p.max_obs_deceleration
    tol = 1e-9 * max(1.0, s_obs)
    ok = [a for a in roots
          if stopping_distance(v, a, p.reaction_time, p.max_obs_deceleration) <= s_obs + tol]
    if not ok:
        log.debug("no admissible root at s=%.3f v=%.3f: emergency braking", s_obs, v)
        return p.max_obs_deceleration
    a_r = max(ok)
    if a_r < 0.0:
        a_r *= p.deceleration_factor
    return a_r


def longitudinal_command(v: float, d_obs: float, p: LongitudinalParams) -> float:
    """Acceleration command: the most restrictive of IDM and the stopping law,
    clamped to ``[max_obs_deceleration, preferred_acceleration]``. Within the
    contact floor of the stop point it brakes at ``max_obs_deceleration``."""
    v = max(v, 0.0)
    gap = d_obs - p.preferred_stop_dist
    if gap <= _EPS_DISTANCE:
        # at contact the floored distance would let the vehicle creep on
        return p.max_obs_deceleration
    a = min(reaction_stop_accel(gap, v, p), idm_acceleration(v, d_obs, p))
    return min(max(a, p.max_obs_deceleration), p.preferred_acceleration)
