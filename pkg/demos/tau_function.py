"""Truncated tau-function of the subspace attached to f_t.

A_f maps z^n to n sum_m b_{-n,-m} z^{-m}; tau(t) = det(1 + a^{-1} b A_f)
where a, b are blocks of multiplication by exp(-sum t_k z^k).  The
matrix of A_f is also recovered from the signature alone.
"""
import numpy as np

from loewnerkit import IteratedIntegrals, af_operator, afh_by_signature, grunsky_from_f, random_polynomial_drivers, solve_taylor_ode, tau_function

M = 3
ds = random_polynomial_drivers(np.random.default_rng(11), K=6, G=200, T=1.0)
traj = solve_taylor_ode(ds, 2 * M, refine=16)
A = af_operator(grunsky_from_f(traj.series(ds.T), M))

engine = IteratedIntegrals(ds, 0.0, ds.T, 16)
sig = np.column_stack([afh_by_signature(ds, ds.T, n, M, engine=engine) for n in range(1, M + 1)])
print("A_f from the Grunsky matrix vs from the signature:", float(np.max(np.abs(A[:, 1:] - sig))))

tvec = [0.2, -0.1]
print("\n  t      tau(t)")
for t in np.linspace(0, 1, 6):
    gr = grunsky_from_f(traj.series(t), M)
    print(f"  {t:.1f}   {tau_function(af_operator(gr), tvec, M + 1):.8f}")
print("\nat tvec = 0 the determinant is 1:", tau_function(A, [0, 0], M + 1))
