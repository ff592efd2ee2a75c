"""
Flat ``key = value`` run configuration.

Reference parameter-table names are used verbatim. Everything else is an artifact key
with a default, apart from ``track_file``, which every config must name.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Any

from .geometry import Path, read_track
from .lateral import LateralParams
from .longitudinal import LongitudinalParams
from .simulator import AlphaSchedule, SimConfig
from .tracks import benchmark_track, straight_track
from .vehicle import VehicleParams

BUILTIN_TRACKS = {
    "builtin:benchmark": benchmark_track,
    "builtin:straight": straight_track,
}


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownKey(ConfigError):
    pass


@dataclass(frozen=True)
class Key:
    kind: type
    default: Any
    doc: str = ""


_lat, _lon, _veh, _sim = LateralParams(), LongitudinalParams(), VehicleParams(), SimConfig.__dataclass_fields__

KEYS: dict[str, Key] = {
    # reference parameter table
    "lat_blend_factor": Key(float, _lat.alpha, "control point, 0 = rear axle, 1 = front axle"),
    "acceleration_exp": Key(float, _lon.acceleration_exp),
    "deceleration_factor": Key(float, _lon.deceleration_factor),
    "max_deceleration": Key(float, _lon.max_deceleration),
    "max_obs_deceleration": Key(float, _lon.max_obs_deceleration),
    "path_width_m": Key(float, _lon.path_width_m),
    "preferred_acceleration": Key(float, _lon.preferred_acceleration),
    "preferred_deceleration": Key(float, _lon.preferred_deceleration),
    "preferred_speed": Key(float, _lon.preferred_speed),
    "preferred_stop_dist": Key(float, _lon.preferred_stop_dist),
    "reaction_time": Key(float, _lon.reaction_time),
    # artifact keys
    "track_file": Key(str, None, "polyline file, or builtin:benchmark / builtin:straight"),
    "dt": Key(float, _sim["dt"].default),
    "duration": Key(float, _sim["duration"].default),
    "seed": Key(int, _sim["rng_seed"].default),
    "direction": Key(str, _sim["direction"].default),
    "controller": Key(str, _sim["controller"].default),
    "alpha_schedule": Key(str, "constant", "constant or sinusoid"),
    "alpha_omega": Key(float, 0.2, "rad/s, sinusoid schedule only"),
    "initial_offset": Key(float, _sim["initial_offset"].default),
    "initial_heading_error": Key(float, _sim["initial_heading_error"].default),
    "initial_speed": Key(float, _sim["initial_speed"].default),
    "initial_s": Key(float, _sim["initial_s"].default),
    "noise_position": Key(float, _sim["noise_position"].default),
    "noise_heading": Key(float, _sim["noise_heading"].default),
    "actuation_delay_steps": Key(int, _sim["actuation_delay_steps"].default),
    "max_range": Key(float, _sim["max_range"].default),
    "stanley_k": Key(float, _lat.k),
    "v_softening": Key(float, _lat.v_softening),
    "cf_d": Key(float, _lat.d),
    "cf_lookahead": Key(float, _lat.L),
    "time_headway": Key(float, _lon.time_headway),
    "wheelbase": Key(float, _veh.wheelbase),
    "delta_max": Key(float, _veh.delta_max),
    "steer_rate_max": Key(float, _veh.steer_rate_max),
    "baseline_stanley_k": Key(float, _sim["stanley_gain"].default),
    "baseline_stanley_softening": Key(float, _sim["stanley_softening"].default),
    "pure_pursuit_lookahead": Key(float, _sim["pure_pursuit_lookahead"].default),
}

del _lat, _lon, _veh, _sim


def defaults() -> dict[str, Any]:
    return {name: key.default for name, key in KEYS.items()}


def _convert(name: str, raw: str, line: int | None) -> Any:
    kind = KEYS[name].kind
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError
            return val
    except ValueError:
        raise ConfigError(f"{name}: expected {kind.__name__}, got {raw!r}", line) from None
    if not raw:
        raise ConfigError(f"{name}: empty value", line)
    return raw


def parse_config(text: str) -> dict[str, Any]:
    """Parse config text into a complete key -> value mapping."""
    out = defaults()
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"expected 'key = value', got {body!r}", lineno)
        name, raw = (part.strip() for part in body.split("=", 1))
        if name not in KEYS:
            raise UnknownKey(f"unknown key {name!r}", lineno)
        if name in seen:
            raise ConfigError(f"duplicate key {name!r}", lineno)
        seen.add(name)
        out[name] = _convert(name, raw, lineno)
    return out


def load_config(filename: str) -> dict[str, Any]:
    with open(filename, encoding="utf-8") as fh:
        cfg = parse_config(fh.read())
    cfg["_base_dir"] = os.path.dirname(os.path.abspath(filename))
    return cfg


def serialize_config(cfg: dict[str, Any]) -> str:
    lines = []
    for name, key in KEYS.items():
        val = cfg.get(name, key.default)
        if val is None:
            continue
        lines.append(f"{name} = {val!r}" if isinstance(val, float) else f"{name} = {val}")
    return "\n".join(lines) + "\n"


def set_value(cfg: dict[str, Any], name: str, raw) -> dict[str, Any]:
    """Copy of ``cfg`` with one key overridden (raw strings are converted)."""
    if name not in KEYS:
        raise UnknownKey(f"unknown key {name!r}")
    out = dict(cfg)
    out[name] = _convert(name, raw, None) if isinstance(raw, str) else KEYS[name].kind(raw)
    return out


def load_track(cfg: dict[str, Any]) -> Path:
    name = cfg.get("track_file")
    if name is None:
        raise ConfigError("track_file is required")
    if name in BUILTIN_TRACKS:
        return BUILTIN_TRACKS[name]()
    filename = name if os.path.isabs(name) else os.path.join(cfg.get("_base_dir", "."), name)
    if not os.path.exists(filename):
        raise ConfigError(f"track_file not found: {filename}")
    return read_track(filename)


def to_sim_config(cfg: dict[str, Any], track: Path | None = None) -> SimConfig:
    """Build the simulator configuration. Invalid values raise ConfigError."""
    track = load_track(cfg) if track is None else track
    try:
        if cfg["alpha_schedule"] == "constant":
            schedule = AlphaSchedule.constant(cfg["lat_blend_factor"])
        elif cfg["alpha_schedule"] == "sinusoid":
            schedule = AlphaSchedule.sinusoid(cfg["alpha_omega"])
        else:
            raise ValueError(f"alpha_schedule must be constant or sinusoid, got {cfg['alpha_schedule']!r}")
        return SimConfig(
            track=track,
            dt=cfg["dt"],
            duration=cfg["duration"],
            initial_offset=cfg["initial_offset"],
            initial_heading_error=cfg["initial_heading_error"],
            initial_speed=cfg["initial_speed"],
            initial_s=cfg["initial_s"],
            direction=cfg["direction"],
            alpha_schedule=schedule,
            controller=cfg["controller"],
            pure_pursuit_lookahead=cfg["pure_pursuit_lookahead"],
            stanley_gain=cfg["baseline_stanley_k"],
            stanley_softening=cfg["baseline_stanley_softening"],
            noise_position=cfg["noise_position"],
            noise_heading=cfg["noise_heading"],
            actuation_delay_steps=cfg["actuation_delay_steps"],
            rng_seed=cfg["seed"],
            max_range=cfg["max_range"],
            lateral=LateralParams(
                alpha=cfg["lat_blend_factor"], k=cfg["stanley_k"],
                v_softening=cfg["v_softening"], d=cfg["cf_d"], L=cfg["cf_lookahead"]),
            longitudinal=LongitudinalParams(
                preferred_speed=cfg["preferred_speed"],
                preferred_acceleration=cfg["preferred_acceleration"],
                preferred_deceleration=cfg["preferred_deceleration"],
                acceleration_exp=cfg["acceleration_exp"],
                preferred_stop_dist=cfg["preferred_stop_dist"],
                max_deceleration=cfg["max_deceleration"],
                max_obs_deceleration=cfg["max_obs_deceleration"],
                reaction_time=cfg["reaction_time"],
                path_width_m=cfg["path_width_m"],
                deceleration_factor=cfg["deceleration_factor"],
                time_headway=cfg["time_headway"]),
            vehicle=VehicleParams(
                wheelbase=cfg["wheelbase"], delta_max=cfg["delta_max"],
                steer_rate_max=cfg["steer_rate_max"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
