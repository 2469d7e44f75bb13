"""Regenerate tests/data/oracle_values.json.

Reference values come from scipy's DOP853 integrator applied directly to
the coefficient equations, one driver segment at a time (densities are
constant on each segment).  None of the package's steppers or word
machinery is used, so the frozen numbers are an independent check.

    python3 tests/make_oracles.py
"""
import json
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp

G, T = 40, 1.0
X0 = [0.0, 0.2, -0.1]
XS = [
    [0.0, 0.3, 0.1j],
    [0.0, -0.2, 0.0, 0.1],
    [0.0, 0.1 + 0.05j],
    [0.0, 0.0, 0.05j],
    [0.0, -0.05],
    [0.0, 0.02, 0.02],
]
N_TAYLOR = 6
M_GRUNSKY = 3


def densities():
    times = np.linspace(0.0, T, G + 1)
    paths = [np.polynomial.polynomial.polyval(times, np.asarray(c, dtype=complex))
             for c in [X0] + XS]
    return times, [np.diff(p) / np.diff(times) for p in paths]


def integrate(rhs, y0):
    times, dens = densities()
    y = np.asarray(y0, dtype=complex)
    for j in range(G):
        d = [dd[j] for dd in dens]

        def f(_, yy):
            return rhs(yy[: y.size] + 1j * yy[y.size:], d).view(float).reshape(-1, 2).T.ravel()

        sol = solve_ivp(f, (times[j], times[j + 1]), np.concatenate([y.real, y.imag]),
                        method="DOP853", rtol=1e-13, atol=1e-15)
        y = sol.y[: y.size, -1] + 1j * sol.y[y.size:, -1]
    return y


def taylor_rhs(c, d):
    n_max = c.size
    dx = lambda k: d[k] if k < len(d) else 0.0
    out = np.zeros(n_max, dtype=complex)
    for n in range(1, n_max + 1):
        acc = dx(n) + n * c[n - 1] * dx(0)
        for k in range(1, n):
            acc += (k + 1) * c[k - 1] * dx(n - k)
        out[n - 1] = acc
    return out


def grunsky_rhs(y, d):
    M = M_GRUNSKY
    b = y.reshape(M, M)
    dx = lambda k: d[k] if k < len(d) else 0.0
    out = np.zeros((M, M), dtype=complex)
    for n in range(1, M + 1):
        for m in range(1, M + 1):
            acc = -dx(n + m)
            for l in range(m):
                acc += (m - l) * b[n - 1, m - l - 1] * dx(l)
            for l in range(n):
                acc += (n - l) * b[m - 1, n - l - 1] * dx(l)
            out[n - 1, m - 1] = acc
    return out.ravel()


def main():
    c = integrate(taylor_rhs, np.zeros(N_TAYLOR))
    b = integrate(grunsky_rhs, np.zeros(M_GRUNSKY**2)).reshape(M_GRUNSKY, M_GRUNSKY)
    data = {
        "G": G, "T": T,
        "x0": X0,
        "xs": [[[complex(v).real, complex(v).imag] for v in p] for p in XS],
        "taylor_c": [[v.real, v.imag] for v in c],
        "grunsky_b": [[[v.real, v.imag] for v in row] for row in b],
    }
    out = Path(__file__).parent / "data" / "oracle_values.json"
    out.write_text(json.dumps(data, indent=1) + "\n")
    print(out)


if __name__ == "__main__":
    main()
