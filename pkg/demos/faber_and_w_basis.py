"""Faber polynomials of f_t and the basis of the subspace W_f.

Q_n evolves by its own ODE from Q_n(0) = w^{-n}; the result is compared
with the principal part of (f^{-1}(w))^{-n}.  Composing with f gives
z^{-n} plus a Taylor tail whose coefficients are n b_{-n,-m}.
"""
import numpy as np

from loewnerkit import faber_checks, faber_from_f, faber_ode, grunsky_from_f, random_polynomial_drivers, solve_taylor_ode, w_basis

ds = random_polynomial_drivers(np.random.default_rng(3), K=4, G=200, T=1.0)
traj = faber_ode(ds, 3, refine=16)
f = solve_taylor_ode(ds, 8, refine=16).series(ds.T)

for n in (1, 2, 3):
    q = faber_from_f(f, n)
    print(f"Q_{n}: coefficients of w^0..w^-{n}:", np.round([q[-k] for k in range(n + 1)], 6))
    print("      ODE minus definition:", float(np.max(np.abs(traj.polynomial(-1, n).coeffs - q.coeffs))))

print("\nresiduals of the three characterisations:", faber_checks(f, 3, 3))

b = grunsky_from_f(f, 3).b
v2 = w_basis(f, 2, window=(-3, 2))
print("\nv_2(z) on z^2..z^-3:", np.round([v2[d] for d in range(2, -4, -1)], 6))
print("2 b_{-2,-m}, m=1..3:", np.round(2 * b[1], 6))
