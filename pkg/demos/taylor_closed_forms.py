"""Taylor coefficients of f_t for two drivers with known answers.

With only x1(t) = t the map is f_t(z) = z / (1 - t z), so c_n(t) = t^n.
With only x2(t) = t, c_2 = t, c_3 = 0 and c_4 = 1.5 t^2.  Both the ODE
solver and the iterated-integral formula are shown, plus the Witt-action
residue route, which cross-checks itself against the closed weights.
"""
import numpy as np

from loewnerkit import DriverSet, sol_by_witt, solve_taylor_ode, taylor_explicit

T = 0.5
ds = DriverSet.from_polynomials([0], [[0, 1]], G=400, T=T)
ode = solve_taylor_ode(ds, 6).c[-1]
ex = taylor_explicit(ds, T, 6)
print("x1 = t:  n   ODE            explicit       t^n")
for n in range(1, 7):
    print(f"        {n}   {ode[n-1].real:.10f}   {ex[n-1].real:.10f}   {T**n:.10f}")

ds2 = DriverSet.from_polynomials([0], [None, [0, 1]], G=400, T=T)
c = solve_taylor_ode(ds2, 4).c[-1]
print(f"\nx2 = t:  c2 = {c[1].real:.8f} (t), c3 = {abs(c[2]):.1e} (0), "
      f"c4 = {c[3].real:.8f} (1.5 t^2 = {1.5 * T**2})")

# a real x0 rescales everything by exp(n x0)
ds3 = DriverSet.from_polynomials([0, 0.4], [[0, 1], [0, 0, 0.3j]], G=400, T=1.0)
f = sol_by_witt(ds3, N=5)
ref = solve_taylor_ode(ds3, 4).series(1.0)
print("\nresidue route vs ODE, z^1..z^5:")
print(np.round(f.coeffs[1:], 8))
print(np.round(ref.coeffs[1:], 8))
