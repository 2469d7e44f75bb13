"""Drivers from a classical Loewner-Kufarev Herglotz function.

A density (a0 + sum_k a_k cos(k th) + b_k sin(k th)) / 2 pi becomes the
controlled equation with x0 = int a0 and x_k = int a_k - i int b_k.  Then
the usual solvers run unchanged.
"""
import numpy as np

from loewnerkit import herglotz_to_drivers, make_polynomial_driver, solve_taylor_ode, validate_convergence

G, T = 100, 1.0
a0 = make_polynomial_driver([1.0], G, T, real=True)
a = [make_polynomial_driver([0.5], G, T, real=True)]
b = [make_polynomial_driver([0.0, 0.2], G, T, real=True)]
ds = herglotz_to_drivers(a0, a, b)
print("x0(T) =", ds.x0(T).real, "  x1(T) =", ds.driver(1)(T))
print("sum n |x_n|_TV r^n at r = 0.5:", validate_convergence(ds, 0.5))
f = solve_taylor_ode(ds, 4).series(T)
print("f_T(z) coefficients z^1..z^5:", np.round(f.coeffs[1:], 6))
