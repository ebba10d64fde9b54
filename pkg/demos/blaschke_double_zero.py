"""Blaschke bounds for b = ((z - 0.9)/(1 - 0.9 z))^2 at degree one.

The error of the best c/(z - w) is available in closed form for each pole
w, so a fine grid over the disk gives the best degree-one error directly.
The classical first formula overshoots it for this double zero; the
variant with exact kernel sup norms does not.
"""
import numpy as np

from h2lb.bounds import blaschke_bounds
from h2lb.functions import load_function
from h2lb.upper import solve_RAB

target = load_function({"kind": "blaschke", "zeros": [[0.9, 0], [0.9, 0]]})
f = target.rational
nf2 = target.anti.l2_norm() ** 2

step = 0.002
x = np.arange(-1 + step / 2, 1, step)
w = (x[:, None] + 1j * x[None, :]).ravel()
w = w[(np.abs(w) < 1 - step) & (np.abs(w) > 1e-9)]
wb = np.conj(w)
err = np.sqrt(np.clip(nf2 - (1 - np.abs(w) ** 2) * np.abs(f(1 / wb) / wb) ** 2, 0, None))
i = np.argmin(err)

sol = solve_RAB(target.anti, 1, rational=f)
b1, b2 = blaschke_bounds([0.9, 0.9], 1)
e1, e2 = blaschke_bounds([0.9, 0.9], 1, exact_sup=True)
print(f"grid search     {err[i]:.5f} at w = {w[i]:.3f}")
print(f"optimizer       {sol.error:.5f} at w = {complex(sol.zeros[0]):.3f}")
print(f"first formula   {b1:.5f}   exact-sup {e1:.5f}")
print(f"second formula  {b2:.5f}   exact-sup {e2:.5f}")
