"""Corner braking from the ray-cast obstacle, and how the corridor width shifts it."""
import numpy as np

from blendpath.longitudinal import LongitudinalParams
from blendpath.simulator import SimConfig, run_scenario

# first R=15 turn starts at s = 324 m
for width in (6.0, 12.0, 24.0):
    cfg = SimConfig(duration=130.0, initial_offset=0.0, initial_speed=3.0,
                    longitudinal=LongitudinalParams(path_width_m=width))
    tr = run_scenario(cfg)
    w = (tr.s > 240.0) & (tr.s < 360.0)
    s, v = tr.s[w], tr.v[w]
    onset = s[np.argmax(v < 0.995 * 3.0)]
    print(f"w={width:4.0f} m: braking from s={onset:5.1f}, slowest {v.min():.3f} m/s at s={s[np.argmin(v)]:.1f}")

# speed along one lap at the default width, every 25 m
tr = run_scenario(SimConfig(initial_offset=0.0, initial_speed=3.0))
for s0 in np.arange(0.0, 1075.0, 25.0):
    i = np.argmax(tr.s >= s0)
    print(f"  s={s0:6.1f}  v={tr.v[i]:.3f}  a_cmd={tr.a_cmd[i]:+.3f}  d_obs={tr.d_obs[i]:6.1f}")
