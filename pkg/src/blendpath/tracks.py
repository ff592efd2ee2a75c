"""Procedural test tracks built from straights and circular arcs."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Path, build_path


@dataclass(frozen=True)
class Straight:
    length: float


@dataclass(frozen=True)
class Arc:
    radius: float
    angle: float  # signed turn in radians, positive = left


@dataclass(frozen=True)
class Feature:
    """Where a track element sits along the centerline."""
    kind: str
    s_start: float
    s_end: float
    radius: float = math.inf


def build_track(elements, spacing: float = 2.0, closed: bool = True,
                start=(0.0, 0.0), heading: float = 0.0,
                max_chord_turn: float = math.radians(2.0)) -> tuple[Path, list[Feature]]:
    """Chain ``elements`` into a polyline. Straights are single segments; arcs
    are split into chords no longer than ``spacing`` metres and turning no
    more than ``max_chord_turn``, with vertices on the true arc."""
    x, y = start
    th = heading
    pts = [(x, y)]
    features = []
    s = 0.0
    for el in elements:
        if isinstance(el, Straight):
            x, y = x + el.length * math.cos(th), y + el.length * math.sin(th)
            pts.append((x, y))
            features.append(Feature("straight", s, s + el.length))
            s += el.length
        else:
            length = abs(el.angle) * el.radius
            n = max(1, math.ceil(length / spacing), math.ceil(abs(el.angle) / max_chord_turn))
            side = math.copysign(1.0, el.angle)
            cx = x - side * el.radius * math.sin(th)
            cy = y + side * el.radius * math.cos(th)
            phi0 = th - side * math.pi / 2.0
            for i in range(1, n + 1):
                phi = phi0 + el.angle * i / n
                pts.append((cx + el.radius * math.cos(phi), cy + el.radius * math.sin(phi)))
            th += el.angle
            x, y = pts[-1]
            # chord length slightly undercuts the arc; use the polyline length
            poly = n * 2.0 * el.radius * math.sin(abs(el.angle) / n / 2.0)
            features.append(Feature("arc", s, s + poly, el.radius))
            s += poly
    if closed:
        if math.hypot(pts[-1][0] - pts[0][0], pts[-1][1] - pts[0][1]) > 1e-6:
            raise ValueError("elements do not close the loop")
        pts = pts[:-1]
    return build_path(np.array(pts), closed=closed), features


def benchmark_elements() -> list:
    """Closed counter-clockwise loop, about 1075 m, with left and right turns
    of radius 60, 30, 15 and 8 m. Two of the tight turns are S-bends."""
    q = math.pi / 2.0
    return [
        Straight(150.0), Arc(60.0, q),
        Straight(80.0), Arc(15.0, -q),
        Straight(60.0), Arc(8.0, q),
        Straight(40.0), Arc(30.0, q),
        Straight(200.0), Arc(15.0, q),
        Straight(60.0), Arc(8.0, -q),
        Straight(70.0), Arc(30.0, q),
        Straight(60.0), Arc(60.0, q),
    ]


def benchmark_track(spacing: float = 2.0) -> Path:
    return build_track(benchmark_elements(), spacing)[0]


def benchmark_features(spacing: float = 2.0) -> list[Feature]:
    return build_track(benchmark_elements(), spacing)[1]


def straight_track(length: float = 400.0, spacing: float = 1.0) -> Path:
    return build_track([Straight(length)], spacing, closed=False)[0]
