"""Every bound for reference examples 1 and 7 at degree 4.

Run with ``python demos/reference_rows.py``; takes about a minute.
"""
from h2lb.bounds import ReportOptions, assemble_report
from h2lb.functions import builtin

N = 4

print(f"{'example':>7} {'Mn':>11} {'Qn':>11} {'lin pi=1':>11} {'lin pi=upper':>13} {'upper':>11}")
for ident in (1, 7):
    target = builtin(ident)
    cache = {}
    rep = assemble_report(target, N, ReportOptions(linearized=True, restarts=16), spectrum_cache=cache)
    # reuse the spectrum and the upper-bound solution for the weighted run
    weighted = assemble_report(target, N, ReportOptions(linearized=True, pi="upper", restarts=0),
                               spectrum_cache=cache, upper_solution=cache["solution"])
    print(f"{ident:>7} {rep.bound_Mn:11.4e} {rep.bound_Qn:11.4e} {rep.bound_linearized['value']:11.4e} "
          f"{weighted.bound_linearized['value']:13.4e} {rep.upper_bound:11.4e}")
    for w in rep.warnings:
        print("   warning:", w)
