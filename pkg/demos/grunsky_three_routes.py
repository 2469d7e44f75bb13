"""Grunsky coefficients three ways.

1. the linear ODE for b_{-m,-n} along the evolution,
2. the shuffle formula over iterated integrals (weight cap W >= 2M),
3. the double expansion of log((f(z) - f(w)) / (z - w)) of the solved map.
"""
import numpy as np

from loewnerkit import grunsky_explicit, grunsky_from_f, grunsky_ode, random_polynomial_drivers, solve_taylor_ode

M = 3
ds = random_polynomial_drivers(np.random.default_rng(7), K=4, G=200, T=1.0)
b_ode = grunsky_ode(ds, M, refine=16).final().b
b_ex = grunsky_explicit(ds, ds.T, M, 2 * M, refine=16).b
b_log = grunsky_from_f(solve_taylor_ode(ds, 2 * M, refine=16).series(ds.T), M).b

np.set_printoptions(precision=6, suppress=True)
print("ODE route\n", b_ode)
print("max |ODE - shuffle formula| =", np.max(np.abs(b_ode - b_ex)))
print("max |ODE - bivariate log|   =", np.max(np.abs(b_ode - b_log)))
print("symmetry defect of each:", [float(np.max(np.abs(b - b.T))) for b in (b_ode, b_ex, b_log)])
