"""
Polyline paths: arc-length queries, projection, virtual borders and ray casting.

Conventions used throughout the package:

* headings are radians, counter-clockwise from +x, wrapped to (-pi, pi];
* the signed lateral distance ``e_d`` is positive when the query point lies
  to the left of the path tangent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray


class GeometryError(ValueError):
    """Base class for invalid geometric input."""


class TooFewPoints(GeometryError):
    pass


class DegenerateSegment(GeometryError):
    def __init__(self, index: int):
        super().__init__(f"zero-length segment at waypoint {index}")
        self.index = index


class OutOfRange(GeometryError):
    pass


class SelfIntersectingOffset(GeometryError):
    def __init__(self, side: str, segment_index: int):
        super().__init__(
            f"{side} border folds over at segment {segment_index}: "
            "width exceeds the local turn radius"
        )
        self.side = side
        self.segment_index = segment_index


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    a = math.fmod(angle + math.pi, 2.0 * math.pi)
    if a <= 0.0:
        a += 2.0 * math.pi
    return a - math.pi


class Path:
    """Immutable polyline with arc-length parameterization.

    Build instances with :func:`build_path`. For closed paths the segment from
    the last waypoint back to the first is implicit, and ``cumulative_s`` holds
    one value per waypoint (the closing length is :attr:`length`).
    """

    def __init__(self, waypoints: NDArray[np.float64], closed: bool):
        self.waypoints = waypoints
        self.closed = closed
        self.waypoints.setflags(write=False)

        ends = np.roll(waypoints, -1, axis=0) if closed else waypoints[1:]
        starts = waypoints if closed else waypoints[:-1]
        vec = ends - starts
        lengths = np.hypot(vec[:, 0], vec[:, 1])

        self.seg_start = starts
        self.seg_vec = vec
        self.seg_len = lengths
        self.seg_dir = vec / lengths[:, None]
        self.seg_heading = np.arctan2(vec[:, 1], vec[:, 0])
        self.seg_s0 = np.concatenate(([0.0], np.cumsum(lengths)[:-1]))
        self.length = float(np.sum(lengths))
        self.cumulative_s = (
            self.seg_s0.copy() if closed else np.concatenate((self.seg_s0, [self.length]))
        )
        for arr in (self.seg_start, self.seg_vec, self.seg_len, self.seg_dir,
                    self.seg_heading, self.seg_s0, self.cumulative_s):
            arr.setflags(write=False)

    @property
    def n_segments(self) -> int:
        return len(self.seg_len)

    @cached_property
    def _cell_size(self) -> float:
        return 2.0 * float(np.median(self.seg_len))

    @cached_property
    def _cell_cache(self) -> dict[tuple[int, int], list[int]]:
        return {}

    @cached_property
    def _segment_tuples(self) -> list[tuple[float, ...]]:
        return [tuple(map(float, row)) for row in np.column_stack(
            (self.seg_start, self.seg_dir, self.seg_len, self.seg_s0))]

    def reversed(self) -> "Path":
        """Same geometry traversed in the opposite direction."""
        pts = self.waypoints[::-1].copy()
        if self.closed:
            # keep waypoint 0 as the start so s=0 stays at the same place
            pts = np.roll(pts, 1, axis=0)
        return Path(pts, self.closed)

    def __len__(self) -> int:
        return len(self.waypoints)

    def __repr__(self) -> str:
        return f"Path(n={len(self)}, length={self.length:.3f}, closed={self.closed})"


@dataclass(frozen=True)
class PathProjection:
    s: float
    e_d: float
    tangent_heading: float
    segment_index: int


def build_path(waypoints: ArrayLike, closed: bool = False) -> Path:
    """Validate ``waypoints`` and build a :class:`Path`.

    For closed paths a final waypoint equal to the first one is dropped, since
    the closing segment is implicit.
    """
    pts = np.array(waypoints, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise GeometryError(f"expected an (N, 2) array of points, got shape {pts.shape}")
    if closed and len(pts) > 2 and np.array_equal(pts[0], pts[-1]):
        pts = pts[:-1]
    if len(pts) < 2:
        raise TooFewPoints(f"a path needs at least 2 points, got {len(pts)}")
    if closed and len(pts) < 3:
        raise TooFewPoints("a closed path needs at least 3 distinct points")
    if not np.all(np.isfinite(pts)):
        raise GeometryError("waypoints must be finite")

    nxt = np.roll(pts, -1, axis=0) if closed else pts[1:]
    seg = nxt - pts[: len(nxt)]
    zero = np.flatnonzero(np.hypot(seg[:, 0], seg[:, 1]) == 0.0)
    if len(zero):
        raise DegenerateSegment(int(zero[0]))
    return Path(pts, closed)


def read_track(path_or_lines: str | Iterable[str], closed: bool | None = None) -> Path:
    """Parse a track file: one ``x,y`` pair per line, optional ``closed=`` header.

    ``path_or_lines`` is a filename or an iterable of lines. Blank lines and
    ``#`` comments are skipped. An explicit ``closed`` argument overrides the
    header.
    """
    if isinstance(path_or_lines, str):
        with open(path_or_lines, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = list(path_or_lines)

    header_closed = False
    points = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("closed"):
            key, _, value = line.partition("=")
            value = value.strip().lower()
            if key.strip().lower() != "closed" or value not in ("true", "false"):
                raise GeometryError(f"line {lineno}: bad header {raw!r}")
            if points:
                raise GeometryError(f"line {lineno}: header must precede points")
            header_closed = value == "true"
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise GeometryError(f"line {lineno}: expected 'x,y', got {raw!r}")
        try:
            # float() is locale-independent
            points.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise GeometryError(f"line {lineno}: not a number in {raw!r}") from None
    return build_path(points, header_closed if closed is None else closed)


def write_track(path: Path, filename: str) -> None:
    with open(filename, "w", encoding="utf-8") as fh:
        fh.write(f"closed={'true' if path.closed else 'false'}\n")
        for x, y in path.waypoints:
            fh.write(f"{float(x)!r},{float(y)!r}\n")


def _normalize_s(path: Path, s: float) -> float:
    if path.closed:
        return s % path.length
    tol = 1e-9 * max(1.0, path.length)
    if s < -tol or s > path.length + tol:
        raise OutOfRange(f"s={s} outside [0, {path.length}] on an open path")
    return min(max(s, 0.0), path.length)


def _segment_at(path: Path, s: float) -> int:
    i = int(np.searchsorted(path.seg_s0, s, side="right")) - 1
    return min(max(i, 0), path.n_segments - 1)


def point_at(path: Path, s: float) -> NDArray[np.float64]:
    s = _normalize_s(path, s)
    i = _segment_at(path, s)
    return path.seg_start[i] + (s - path.seg_s0[i]) * path.seg_dir[i]


def tangent_at(path: Path, s: float) -> float:
    """Heading of the segment containing ``s``; vertices take the following segment."""
    s = _normalize_s(path, s)
    return float(path.seg_heading[_segment_at(path, s)])


def project(path: Path, point: Sequence[float]) -> PathProjection:
    """Globally nearest point of ``path`` to ``point``; ties go to the smaller s."""
    px, py = float(point[0]), float(point[1])
    segs = path._segment_tuples
    total = path.length
    closed = path.closed
    best = None  # (dist, s, index, t, cross)
    for i in _candidate_segments(path, px, py):
        ax, ay, ux, uy, ln, s0 = segs[i]
        rx, ry = px - ax, py - ay
        t = rx * ux + ry * uy
        t = 0.0 if t < 0.0 else (ln if t > ln else t)
        dist = math.hypot(px - (ax + t * ux), py - (ay + t * uy))
        s = s0 + t
        if closed and s >= total:
            s = 0.0
        if best is None or dist < best[0] * (1.0 - 1e-12) - 1e-15 or (
                dist <= best[0] * (1.0 + 1e-12) + 1e-15 and s < best[1]):
            best = (dist, s, i, t, ux * ry - uy * rx)

    dist, s, i, t, cross = best
    if abs(cross) * 1e6 < dist and (t == 0.0 or t == path.seg_len[i]):
        # foot on a vertex, query along a segment extension: side from the bisector
        cross = _vertex_side(path, i, t > 0.0, np.array((px, py)))
        if cross == 0.0 and not closed:
            # collinear with an open end: + behind the start, - past the end
            cross = 1.0 if t == 0.0 else -1.0
    e_d = math.copysign(dist, cross) if dist > 0.0 else 0.0
    return PathProjection(s, e_d, float(path.seg_heading[i]), i)


def _candidate_segments(path: Path, px: float, py: float) -> list[int]:
    """Indices of every segment that can be nearest to some point of the grid
    cell holding (px, py), memoized per cell.

    With c the cell center and r its half-diagonal, a segment farther than
    ``D(c) + 2r`` from c is farther than ``D(c) + r >= D(p)`` from every point
    p of the cell, so it cannot be (or tie) the nearest.
    """
    h = path._cell_size
    key = (math.floor(px / h), math.floor(py / h))
    cand = path._cell_cache.get(key)
    if cand is None:
        c = ((key[0] + 0.5) * h, (key[1] + 0.5) * h)
        d = _segment_distances(path, c)
        r = h * math.sqrt(0.5)
        cand = np.flatnonzero(d <= d.min() + 2.0 * r + 1e-9 * (1.0 + d.min())).tolist()
        path._cell_cache[key] = cand
    return cand


def _segment_distances(path: Path, p) -> NDArray[np.float64]:
    rel = np.asarray(p, dtype=float) - path.seg_start
    t = np.clip(np.einsum("ij,ij->i", rel, path.seg_dir), 0.0, path.seg_len)
    foot = rel - t[:, None] * path.seg_dir
    return np.hypot(foot[:, 0], foot[:, 1])


def _vertex_side(path: Path, seg: int, at_end: bool, p: NDArray[np.float64]) -> float:
    n = path.n_segments
    if at_end:
        j = seg + 1 if (path.closed or seg + 1 < n) else None
        pair = (seg, j % n) if j is not None else (seg, seg)
    else:
        j = seg - 1 if (path.closed or seg > 0) else None
        pair = (j % n, seg) if j is not None else (seg, seg)
    u = path.seg_dir[pair[0]] + path.seg_dir[pair[1]]
    v = path.seg_start[pair[1]] if at_end else path.seg_start[seg]
    rel = p - v
    return float(u[0] * rel[1] - u[1] * rel[0])


def curvature_change(path: Path, from_s: float, vehicle_heading: float, lookahead: float) -> float:
    """Wrapped heading change from the vehicle to the path tangent ``lookahead`` ahead."""
    if lookahead <= 0.0:
        raise ValueError("lookahead must be positive")
    return wrap_angle(tangent_at(path, from_s + lookahead) - vehicle_heading)


@dataclass(frozen=True, eq=False)
class Corridor:
    center: Path
    width: float

    def __post_init__(self):
        if not self.width > 0.0:
            raise GeometryError(f"corridor half-width must be > 0, got {self.width}")

    @cached_property
    def _raw_borders(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return (_miter_offset(self.center, self.width),
                _miter_offset(self.center, -self.width))

    @cached_property
    def _border_segments(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        starts, vecs = [], []
        for pts in self._raw_borders:
            nxt = np.roll(pts, -1, axis=0) if self.center.closed else pts[1:]
            starts.append(pts[: len(nxt)])
            vecs.append(nxt - pts[: len(nxt)])
        return np.concatenate(starts), np.concatenate(vecs)

    @cached_property
    def _border_arrays(self):
        a, e = self._border_segments
        with np.errstate(invalid="ignore"):
            cross_a = a[:, 0] * e[:, 1] - a[:, 1] * e[:, 0]
        return e[:, 0].copy(), e[:, 1].copy(), cross_a, a[:, 0].copy(), a[:, 1].copy()

    @cached_property
    def _border_neighbors(self) -> list[tuple[NDArray[np.float64], ...] | None]:
        """Per border segment, the centerline segments that can lie closer
        than ``width`` to some point of it, as (start, dir, len) arrays."""
        a, e = self._border_segments
        c = self.center
        out = []
        for start, vec in zip(a, e):
            if not (np.isfinite(start).all() and np.isfinite(vec).all()):
                out.append(None)
                continue
            reach = self.width + 0.5 * math.hypot(vec[0], vec[1]) + 1e-9 * self.width
            near = np.flatnonzero(_segment_distances(c, start + 0.5 * vec) <= reach)
            out.append(None if len(near) == 0 else
                       (c.seg_start[near, 0].copy(), c.seg_start[near, 1].copy(),
                        c.seg_dir[near, 0].copy(), c.seg_dir[near, 1].copy(), c.seg_len[near]))
        return out


def _left_normals(path: Path) -> NDArray[np.float64]:
    d = path.seg_dir
    return np.column_stack((-d[:, 1], d[:, 0]))


def _miter_offset(path: Path, w: float) -> NDArray[np.float64]:
    """Per-vertex offset by ``w`` along the left normal (negative w: right)."""
    n = _left_normals(path)
    pts = path.waypoints
    out = np.empty_like(pts)
    count = len(pts)
    for i in range(count):
        if path.closed:
            prev, nxt = n[(i - 1) % count], n[i % count]
        else:
            prev = n[max(i - 1, 0)]
            nxt = n[min(i, path.n_segments - 1)]
        bis = prev + nxt
        norm = math.hypot(bis[0], bis[1])
        if norm < 1e-12:
            # path doubles back on itself; the miter is unbounded
            out[i] = np.inf
            continue
        bis /= norm
        out[i] = pts[i] + (w / float(bis @ nxt)) * bis
    return out


def offset_border(corridor: Corridor, side: Literal["left", "right"]) -> Path:
    """Border offset by the corridor half-width with miter joins."""
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    center = corridor.center
    pts = corridor._raw_borders[0 if side == "left" else 1]
    nxt = np.roll(pts, -1, axis=0) if center.closed else pts[1:]
    seg = nxt - pts[: len(nxt)]
    with np.errstate(invalid="ignore"):
        along = np.einsum("ij,ij->i", seg, center.seg_dir)
    bad = np.flatnonzero(~(along > 0.0))
    if len(bad):
        raise SelfIntersectingOffset(side, int(bad[0]))
    return Path(pts.copy(), center.closed)


def ray_border_distance(
    corridor: Corridor,
    origin: Sequence[float],
    heading: float,
    max_range: float = 200.0,
) -> float:
    """Distance along the ray ``origin + t (cos heading, sin heading)`` to the
    first virtual border point, or ``max_range`` when nothing is hit.

    Border pieces that dip inside the corridor (where the width exceeds the
    local turn radius and the offset folds over) are skipped, so tight turns
    still produce a usable distance.
    """
    if not max_range > 0.0:
        raise ValueError("max_range must be positive")
    ox, oy = float(origin[0]), float(origin[1])
    dx, dy = math.cos(heading), math.sin(heading)
    ex, ey, cross_a, ax, ay = corridor._border_arrays

    denom = dx * ey - dy * ex
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        t = (cross_a - (ox * ey - oy * ex)) / denom
        u = ((ax * dy - ay * dx) - (ox * dy - oy * dx)) / denom
    hit = (t >= 0.0) & (t <= max_range) & (u >= -1e-12) & (u <= 1.0 + 1e-12)
    if not hit.any():
        return float(max_range)

    # hits on degenerate parts of the raw offset lie inside the corridor
    limit = corridor.width * (1.0 - 1e-6)
    neighbors = corridor._border_neighbors
    idx = np.flatnonzero(hit)
    for j in idx[np.argsort(t[idx], kind="stable")]:
        ti = float(t[j])
        near = neighbors[j]
        if near is None:
            return ti
        sx, sy, ux, uy, ln = near
        rx, ry = ox + ti * dx - sx, oy + ti * dy - sy
        along = np.clip(rx * ux + ry * uy, 0.0, ln)
        if np.hypot(rx - along * ux, ry - along * uy).min() >= limit:
            return ti
    return float(max_range)
