"""Walk through the benchmark track: projection, borders and the obstacle ray."""
import math

import numpy as np

from blendpath.geometry import (Corridor, SelfIntersectingOffset, offset_border, point_at, project,
                                ray_border_distance, tangent_at)
from blendpath.tracks import benchmark_features, benchmark_track

track = benchmark_track()
print(track)  # closed loop, straights plus chorded arcs

# where each piece of the loop sits along s
for f in benchmark_features():
    label = "straight" if f.kind == "straight" else f"arc R={f.radius:g}"
    print(f"  {f.s_start:7.1f} .. {f.s_end:7.1f} m  {label}")

# a point 4 m left of the start projects back with e_d = +4
pr = project(track, (10.0, 4.0))
print("projection of (10, 4):", pr)

# the virtual borders sit w = 12 m either side; with left and right R=8 turns
# each side is the inner border somewhere, and there w exceeds the radius
corridor = Corridor(track, 12.0)
for side in ("left", "right"):
    try:
        border = offset_border(corridor, side)
        print(f"{side} border length {border.length:.1f} m vs centerline {track.length:.1f} m")
    except SelfIntersectingOffset as exc:
        print(f"{side} border: {exc}")
# a 6 m corridor is narrower than every turn radius
print("w=6 left border length %.1f m" % offset_border(Corridor(track, 6.0), "left").length)

# distance to the virtual obstacle while driving down the first straight:
# it shrinks as the R=60 turn approaches, then levels off inside the turn
for s in np.arange(0.0, 200.0, 20.0):
    p = point_at(track, s)
    d = ray_border_distance(corridor, p, tangent_at(track, s), 200.0)
    print(f"  s={s:5.1f}  d_obs={d:6.1f} m")

# inside the R=8 hairpin the inner border folds over; the ray ignores that part
p = point_at(track, 414.0)
print("d_obs mid R=8 turn: %.2f m" % ray_border_distance(corridor, p, tangent_at(track, 414.0)))
