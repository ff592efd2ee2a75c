"""Blended control point against Stanley and pure pursuit on identical conditions."""
from blendpath.cli import comparison_table
from blendpath.simulator import SimConfig, compare_controllers

results = compare_controllers(SimConfig())
print(comparison_table(results))

prop, stan, pp = results["proposed_a0.5"], results["stanley"], results["pure_pursuit"]
print("mean |e|: proposed %.4f  stanley %.4f  pure pursuit %.4f" % (
    prop.mean_abs_lateral_error, stan.mean_abs_lateral_error, pp.mean_abs_lateral_error))
print("overshoot: proposed %.3f  pure pursuit %.3f" % (prop.initial_overshoot, pp.initial_overshoot))
print("convergence: proposed %.2f s  stanley %.2f s" % (prop.convergence_time, stan.convergence_time))
