"""Which random terminal positions can a finite-cost strategy reach.

A strategy with square-integrable trading rate can only steer the position
toward terminal targets whose information arrives strictly before the end.
The test is an integral: accumulate the growth of the target's conditional
second moment, weighted by 1/(T - t). If the target keeps revealing itself
all the way to T, the integral diverges and no finite-cost strategy attains
it. The check below runs the integral on dyadic blocks toward T and either
reports the finite value or names the divergence.
"""

import math
from dataclasses import replace

from impact_hedge import ModelParams, TerminalConstraint, reachability_check
from impact_hedge.errors import ReachabilityError
from impact_hedge.scenarios import fig3_asian, resolve_out_dir, run_scenario

params = ModelParams(kappa=1.0, horizon=1.0, initial_position=0.0)

print("terminal target = W(T/2), the driving motion frozen at mid-horizon:")
half = TerminalConstraint.brownian_monitor(monitor_time=0.5)
report = reachability_check(params, half)
print(f"  converged: {report.converged}")
print(f"  cost integral: {report.value:.9f}")
print(f"  exact value ln 2: {math.log(2.0):.9f}")
print(f"  {report.message}\n")

print("terminal target = W(T), still moving at the horizon:")
full = TerminalConstraint.brownian_monitor(monitor_time=1.0)
report = reachability_check(params, full)
print(f"  converged: {report.converged}")
print(f"  {report.message}\n")

print("a scenario carrying the unreachable target is refused up front:")
bad = replace(fig3_asian(), name="fig3_unreachable",
              monitor_time=1.0, monitor_scale=1.0, terminal_value=None)
try:
    run_scenario(bad, resolve_out_dir(None))
except ReachabilityError as err:
    print(f"  ReachabilityError: {err}")
