"""Sweep the control point rear to front while driving: alpha(t) = 0.5 (sin(0.2 t) + 1)."""
import numpy as np

from blendpath.simulator import AlphaSchedule, SimConfig, convergence_index, run_scenario

trace = run_scenario(SimConfig(duration=300.0, alpha_schedule=AlphaSchedule.sinusoid(0.2)))
k = convergence_index(trace.e_cp, 0.15)
print(f"in the +/-0.15 m band from t = {trace.t[k]:.2f} s on")

# error of whichever point is currently controlled, in 30 s windows
for t0 in range(0, 300, 30):
    w = (trace.t >= t0) & (trace.t < t0 + 30)
    print(f"  {t0:3d}-{t0 + 30:3d} s  alpha {trace.alpha[w].min():.2f}..{trace.alpha[w].max():.2f}  "
          f"max |e| {np.abs(trace.e_cp[w]).max():.3f} m")
