"""Bounds against the degree for a random rational target with 5 poles.

From degree 5 on the target is reachable: the Hankel operator has rank 5,
so the lower bounds are exactly zero and the upper bound drops to roundoff.
"""
import numpy as np

from h2lb.bounds import ReportOptions, assemble_report
from h2lb.functions import builtin

target = builtin(2, seed=5)
print("poles:", np.round(target.rational.poles().all(), 3))

cache, sol = {}, None
print(f"{'n':>2} {'Mn':>11} {'Qn':>11} {'upper':>11}")
for n in range(1, 7):
    rep = assemble_report(target, n, ReportOptions(restarts=4), spectrum_cache=cache, upper_solution=sol)
    sol = cache["solution"]
    print(f"{n:>2} {rep.bound_Mn:11.4e} {rep.bound_Qn:11.4e} {rep.upper_bound:11.4e}")
