"""Time stepping for the Taylor, Grunsky and Faber evolutions, and the closed formulas.

Every evolution here is linear in its state with coefficients given by
driver increments.  On one sub-step of the refined grid the densities are
constant, so classical RK4 reduces to a fixed polynomial propagator in
``M = sum_l dx_l A_l``::

    y <- (I + M + M^2/2 + M^3/6 + M^4/24) y + (I + M/2 + M^2/6 + M^3/24) q

where ``q = sum_l dx_l e_l`` is the forcing increment.  Driver nodes are
always grid nodes, so no step straddles a density jump.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .drivers import DEFAULT_REFINE, DriverSet, FineGrid
from .series import TruncatedLaurent, TruncatedTaylor, _mul, _pow, _revert
from .witt import composition_weight, composition_weight_tilde
from .words import IteratedIntegrals, WordSeries, compositions, shuffle


def _linear_rk4(grid: FineGrid, ops: dict, y0: np.ndarray) -> np.ndarray:
    """Integrate ``dy = sum_l (A_l y + e_l) dx_l`` over the grid.

    ``ops`` maps a driver index to ``(A_l, e_l)``; ``e_l`` may be None.
    Returns the state at every grid node, shape ``(len(grid.t), dim)``.
    """
    steps = grid.t.size - 1
    dim = y0.size
    M = np.zeros((steps, dim, dim), dtype=complex)
    q = np.zeros((steps, dim), dtype=complex)
    for l, (A, e) in ops.items():
        dx = grid.increments(l)
        if dx is None:
            continue
        M += dx[:, None, None] * A[None]
        if e is not None:
            q += dx[:, None] * e[None]
    eye = np.eye(dim)
    M2 = M @ M
    M3 = M2 @ M
    M4 = M3 @ M
    P = eye + M + M2 / 2 + M3 / 6 + M4 / 24
    Q = eye + M / 2 + M2 / 6 + M3 / 24
    forcing = np.einsum("sij,sj->si", Q, q)
    out = np.empty((steps + 1, dim), dtype=complex)
    out[0] = y0
    y = y0.astype(complex)
    for j in range(steps):
        y = P[j] @ y + forcing[j]
        out[j + 1] = y
    return out


# -- Taylor coefficients -----------------------------------------------------

@dataclass(frozen=True)
class CoefficientTrajectory:
    """``f_t(z) = C(t) (z + c_1(t) z^2 + ... + c_N(t) z^{N+1})`` on a grid."""

    times: np.ndarray
    C: np.ndarray
    c: np.ndarray  # shape (len(times), N), column n-1 is c_n

    @property
    def N(self) -> int:
        return self.c.shape[1]

    def index(self, t: float) -> int:
        j = int(np.argmin(np.abs(self.times - t)))
        if not np.isclose(self.times[j], t, rtol=0, atol=1e-12):
            raise ValueError(f"t={t} is not a grid time")
        return j

    def series_array(self) -> np.ndarray:
        """Taylor coefficients of ``f_t`` for every grid time, shape ``(len(times), N+2)``."""
        out = np.zeros((self.times.size, self.N + 2), dtype=complex)
        out[:, 1] = self.C
        out[:, 2:] = self.C[:, None] * self.c
        return out

    def series(self, t: float) -> TruncatedTaylor:
        return TruncatedTaylor(self.series_array()[self.index(t)])


def solve_taylor_ode(ds: DriverSet, N: int, refine: int = DEFAULT_REFINE) -> CoefficientTrajectory:
    """RK4 for ``dC = C dx_0`` and the lower-triangular ``c_n`` system.

    ``dc_n = dx_n + sum_{k=1}^{n-1} (k+1) c_k dx_{n-k} + n c_n dx_0``.
    """
    if N < 1:
        raise ValueError("order must be >= 1")
    grid = ds.fine_grid(refine)
    ops = {}
    for l in range(0, N + 1):
        A = np.zeros((N, N))
        for n in range(1, N + 1):
            k = n - l
            if l == 0:
                A[n - 1, n - 1] = n
            elif k >= 1:
                A[n - 1, k - 1] = k + 1
        e = None
        if l >= 1:
            e = np.zeros(N)
            e[l - 1] = 1.0
        ops[l] = (A, e)
    c = _linear_rk4(grid, ops, np.zeros(N))
    C = _linear_rk4(grid, {0: (np.ones((1, 1)), None)}, np.ones(1))[:, 0]
    return CoefficientTrajectory(grid.t, C, c)


def taylor_word_series(n: int) -> WordSeries:
    """``sum_comp w~(n)_comp * comp`` (words read with the first entry latest)."""
    return WordSeries({c: composition_weight_tilde(n, c) for c in compositions(n)})


def taylor_explicit(ds: DriverSet, t: float | None = None, N: int = 8,
                    refine: int = DEFAULT_REFINE, engine: IteratedIntegrals | None = None
                    ) -> np.ndarray:
    """``[c_1(t), ..., c_N(t)]`` from weighted iterated integrals."""
    t = ds.T if t is None else t
    engine = engine or IteratedIntegrals(ds, 0.0, t, refine)
    x0t = ds.x0(t).real
    return np.array([np.exp(n * x0t) * engine.apply(taylor_word_series(n))[-1]
                     for n in range(1, N + 1)])


# -- Grunsky coefficients ----------------------------------------------------

@dataclass(frozen=True)
class GrunskyMatrix:
    """``b[m-1, n-1] = b_{-m,-n}``; ``b0[m-1] = b_{-m,0}`` when known."""

    b: np.ndarray
    b0: np.ndarray | None = None

    @property
    def M(self) -> int:
        return self.b.shape[0]

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.b - self.b.T)))

    def __getitem__(self, mn):
        m, n = mn
        return self.b[m - 1, n - 1]


@dataclass(frozen=True)
class GrunskyTrajectory:
    times: np.ndarray
    b: np.ndarray  # shape (len(times), M, M)

    def at(self, j: int) -> GrunskyMatrix:
        return GrunskyMatrix(self.b[j])

    def final(self) -> GrunskyMatrix:
        return self.at(-1)


def grunsky_ode(ds: DriverSet, M: int, refine: int = DEFAULT_REFINE) -> GrunskyTrajectory:
    """Integrate
    ``db_{-n,-m} = -dx_{n+m} + sum_{l<m} (m-l) b_{-n,-(m-l)} dx_l + sum_{l<n} (n-l) b_{-m,-(n-l)} dx_l``.
    """
    if M < 1:
        raise ValueError("order must be >= 1")
    grid = ds.fine_grid(refine)
    dim = M * M

    def idx(n, m):
        return (n - 1) * M + (m - 1)

    ops = {}
    for l in range(0, 2 * M + 1):
        A = np.zeros((dim, dim))
        e = np.zeros(dim)
        for n in range(1, M + 1):
            for m in range(1, M + 1):
                row = idx(n, m)
                if n + m == l:
                    e[row] = -1.0
                if l < m:
                    A[row, idx(n, m - l)] += m - l
                if l < n:
                    A[row, idx(m, n - l)] += n - l
        ops[l] = (A, e if e.any() else None)
    y = _linear_rk4(grid, ops, np.zeros(dim))
    return GrunskyTrajectory(grid.t, y.reshape(-1, M, M))


def grunsky_word_series(m: int, n: int) -> WordSeries:
    """Word series whose integral times ``exp((m+n) x0(t))`` is ``b_{-m,-n}(t)``.

    Words read with the first letter latest; every term ends in its
    innermost (earliest) letter ``x_k``.
    """
    terms = WordSeries({(m + n,): -1.0})
    # both sides non-empty
    for i in range(1, m):
        for j in range(1, n):
            k = i + j
            for ci in compositions(m - i):
                for cj in compositions(n - j):
                    wgt = composition_weight(i, ci, j, cj)
                    terms = terms + shuffle(ci, cj) * WordSeries.word((k,), -wgt)
    # only the n-side carries letters
    for k in range(m + 1, m + n):
        for cj in compositions(n + m - k):
            terms = terms + WordSeries.word(cj + (k,), -composition_weight(1, (), k - m, cj))
    # only the m-side carries letters
    for k in range(n + 1, m + n):
        for ci in compositions(m + n - k):
            terms = terms + WordSeries.word(ci + (k,), -composition_weight(k - n, ci, 1, ()))
    return terms


def grunsky_explicit(ds: DriverSet, t: float | None = None, M: int = 4, W: int | None = None,
                     refine: int = DEFAULT_REFINE, engine: IteratedIntegrals | None = None
                     ) -> GrunskyMatrix:
    """``b_{-m,-n}(t)`` for ``1 <= m, n <= M`` from the shuffle formula."""
    W = 2 * M if W is None else W
    if W < 2 * M:
        raise ValueError(f"weight cap {W} is below 2M = {2 * M}")
    t = ds.T if t is None else t
    engine = engine or IteratedIntegrals(ds, 0.0, t, refine)
    x0t = ds.x0(t).real
    b = np.zeros((M, M), dtype=complex)
    for m in range(1, M + 1):
        for n in range(m, M + 1):
            b[m - 1, n - 1] = np.exp((m + n) * x0t) * engine.apply(grunsky_word_series(m, n))[-1]
            b[n - 1, m - 1] = b[m - 1, n - 1]
    return GrunskyMatrix(b)


# -- Faber polynomials -------------------------------------------------------

@dataclass(frozen=True)
class FaberTrajectory:
    """``q[j, n-1, k]`` is the ``w^{-k}`` coefficient of ``Q_n`` at ``times[j]``."""

    times: np.ndarray
    q: np.ndarray

    @property
    def n_max(self) -> int:
        return self.q.shape[1]

    def polynomial(self, j: int, n: int) -> TruncatedLaurent:
        return TruncatedLaurent(-n, self.q[j, n - 1, : n + 1][::-1])


def faber_ode(ds: DriverSet, n_max: int, refine: int = DEFAULT_REFINE) -> FaberTrajectory:
    """Integrate ``dQ_n = n dx_n + n sum_{k=1}^{n} Q_k dx_{n-k}`` from ``Q_n(0) = w^{-n}``."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    grid = ds.fine_grid(refine)
    width = n_max + 1
    dim = n_max * width

    def idx(n, k):
        return (n - 1) * width + k

    ops = {}
    for l in range(0, n_max + 1):
        A = np.zeros((dim, dim))
        e = np.zeros(dim)
        for n in range(1, n_max + 1):
            if l == n:
                e[idx(n, 0)] = n
            kk = n - l
            if kk >= 1:
                for k in range(width):
                    A[idx(n, k), idx(kk, k)] += n
        ops[l] = (A, e if e.any() else None)
    y0 = np.zeros(dim)
    for n in range(1, n_max + 1):
        y0[idx(n, n)] = 1.0
    y = _linear_rk4(grid, ops, y0)
    return FaberTrajectory(grid.t, y.reshape(-1, n_max, width))


# -- inverse map -------------------------------------------------------------

def inverse_ode_residual(ds: DriverSet, traj: CoefficientTrajectory,
                         refine: int = DEFAULT_REFINE) -> float:
    """Max coefficient of the discrete residual of ``dg = -g (dx_0 + sum_k g^k dx_k)``.

    ``g_t`` is the reversion of ``f_t`` at every grid node; each step is
    checked with the trapezoid rule and divided by the step length, so the
    value is ``O(h^2)`` for a smooth exact trajectory.
    """
    grid = ds.fine_grid(refine)
    if grid.t.size != traj.times.size or not np.allclose(grid.t, traj.times):
        raise ValueError("trajectory must live on the refined grid of ds")
    g = _revert(traj.series_array())
    order = g.shape[-1]

    def rhs(gg):
        out = np.zeros(gg.shape, dtype=complex)
        if 0 in grid.dx:
            out[:, 0] += grid.dx[0]
        for k in range(1, min(ds.K, order) + 1):
            dx = grid.increments(k)
            if dx is not None:
                out += dx[:, None] * _pow(gg, k)
        return _mul(gg, out)

    g_lo, g_hi = g[:-1], g[1:]
    res = (g_hi - g_lo + 0.5 * (rhs(g_lo) + rhs(g_hi))) / np.diff(grid.t)[:, None]
    return float(np.max(np.abs(res)))
