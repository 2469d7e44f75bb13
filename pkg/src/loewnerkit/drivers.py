"""Driving paths for the controlled Loewner-Kufarev equation.

Every driver is a continuous piecewise-linear path on a shared grid
``0 = t_0 < t_1 < ... < t_G = T``.  Between nodes the Stieltjes measure
``dx`` has the constant density ``(x(t_{j+1}) - x(t_j)) / (t_{j+1} - t_j)``,
so integrals against ``dx`` reduce to ordinary quadrature.

Quadrature is the composite trapezoid rule on a *refinement* of the
driver grid: each driver segment is split into ``refine`` equal sub-steps,
so no sub-step ever straddles a kink of the path.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

DEFAULT_REFINE = 8


def _as_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 2:
        raise ValueError("a driver grid needs at least two nodes")
    if times[0] != 0.0:
        raise ValueError("driver grid must start at t=0")
    if not np.all(np.diff(times) > 0):
        raise ValueError("driver grid must be strictly increasing")
    return times


@dataclass(frozen=True, eq=False)
class DriverPath:
    """A continuous piecewise-linear path sampled at grid nodes."""

    times: np.ndarray
    values: np.ndarray
    real: bool = False

    def __post_init__(self):
        times = _as_times(self.times)
        values = np.asarray(self.values, dtype=complex)
        if values.shape != times.shape:
            raise ValueError(
                f"{values.size} samples given for a grid of {times.size} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("driver samples must be finite")
        if self.real and np.any(values.imag != 0.0):
            raise ValueError("a real driver must have zero imaginary part")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def T(self) -> float:
        return float(self.times[-1])

    def __call__(self, t):
        """Evaluate the path by linear interpolation between nodes."""
        t = np.asarray(t, dtype=float)
        re = np.interp(t, self.times, self.values.real)
        if self.real:
            return re + 0j
        return re + 1j * np.interp(t, self.times, self.values.imag)

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    @property
    def slopes(self) -> np.ndarray:
        """Piecewise-constant density of ``dx`` on each segment."""
        return self.increments / np.diff(self.times)

    def total_variation(self) -> float:
        return float(np.abs(self.increments).sum())

    def is_zero(self) -> bool:
        return not np.any(self.values)

    @classmethod
    def zeros(cls, times, real: bool = False) -> "DriverPath":
        times = np.asarray(times, dtype=float)
        return cls(times, np.zeros(times.size, dtype=complex), real=real)


@dataclass(frozen=True, eq=False)
class DriverSet:
    """The control data ``x0`` (real) and ``x1, ..., xK`` (complex).

    Drivers with index above ``K`` are identically zero.
    """

    x0: DriverPath
    xs: tuple = field(default_factory=tuple)

    def __post_init__(self):
        xs = tuple(self.xs)
        object.__setattr__(self, "xs", xs)
        if not self.x0.real:
            raise ValueError("x0 must be a real driver")
        if self.x0.values[0] != 0.0:
            raise ValueError("x0(0) must vanish")
        for n, x in enumerate(xs, start=1):
            if x.times.shape != self.x0.times.shape or not np.array_equal(
                x.times, self.x0.times
            ):
                raise ValueError(f"driver x{n} is not on the grid of x0")

    @property
    def K(self) -> int:
        return len(self.xs)

    @property
    def T(self) -> float:
        return self.x0.T

    @property
    def times(self) -> np.ndarray:
        return self.x0.times

    def driver(self, n: int) -> DriverPath:
        if n < 0:
            raise ValueError("driver index must be non-negative")
        if n == 0:
            return self.x0
        if n <= self.K:
            return self.xs[n - 1]
        return DriverPath.zeros(self.times)

    def is_zero(self, n: int) -> bool:
        return n > self.K or self.driver(n).is_zero()

    def max_active_index(self) -> int:
        """Largest ``n >= 1`` whose driver is not identically zero (0 if none)."""
        for n in range(self.K, 0, -1):
            if not self.xs[n - 1].is_zero():
                return n
        return 0

    def fine_grid(self, refine: int = DEFAULT_REFINE, s: float = 0.0, t: float | None = None):
        return FineGrid.build(self, refine, s, t)

    @classmethod
    def zero(cls, G: int = 1, T: float = 1.0, K: int = 0) -> "DriverSet":
        times = np.linspace(0.0, T, G + 1)
        return cls(
            DriverPath.zeros(times, real=True),
            tuple(DriverPath.zeros(times) for _ in range(K)),
        )

    @classmethod
    def from_polynomials(cls, x0_coeffs, x_coeffs: Sequence, G: int, T: float = 1.0):
        """Drivers sampled from polynomials ``t -> sum c_j t^j``.

        ``x_coeffs[n-1]`` holds the coefficients of ``x_n``; ``None`` entries
        are zero drivers.
        """
        x0 = make_polynomial_driver(x0_coeffs if x0_coeffs is not None else [0], G, T, real=True)
        xs = []
        for c in x_coeffs:
            xs.append(make_polynomial_driver(c if c is not None else [0], G, T))
        return cls(x0, tuple(xs))


@dataclass(frozen=True, eq=False)
class FineGrid:
    """Refined time grid with per-sub-step driver increments.

    Spans ``[s, t]``; every driver node inside the interval is a node of
    the refined grid, and each driver segment (or cut piece of one) is
    split into ``refine`` equal sub-steps.
    """

    t: np.ndarray
    refine: int
    x0: np.ndarray
    dx: dict

    @classmethod
    def build(
        cls, ds: DriverSet, refine: int = DEFAULT_REFINE, s: float = 0.0, t: float | None = None
    ) -> "FineGrid":
        if refine < 1:
            raise ValueError("refinement factor must be >= 1")
        t = ds.T if t is None else t
        _check_interval(s, t, ds.T)
        u = _cut_grid(ds.x0, s, t, refine)
        dx = {}
        for n in range(0, ds.K + 1):
            path = ds.driver(n)
            if n > 0 and path.is_zero():
                continue
            dx[n] = np.diff(path(u))
        return cls(u, refine, ds.x0(u).real, dx)

    def increments(self, n: int) -> np.ndarray | None:
        """Per-sub-step increments of ``x_n``; ``None`` for a zero driver."""
        return self.dx.get(n)

    def index_of(self, t: float) -> int:
        """Index of the fine node equal to ``t`` (within round-off)."""
        j = int(np.searchsorted(self.t, t - 1e-12 * max(1.0, abs(t))))
        if j >= self.t.size or not np.isclose(self.t[j], t, rtol=1e-12, atol=1e-12):
            raise ValueError(f"t={t} is not a node of the refined grid")
        return j


def refine_times(times, refine: int) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    frac = np.arange(refine) / refine
    inner = (times[:-1, None] + np.diff(times)[:, None] * frac[None, :]).ravel()
    return np.append(inner, times[-1])


def make_polynomial_driver(coeffs, G: int, T: float = 1.0, real: bool | None = None) -> DriverPath:
    """Sample ``t -> sum_j coeffs[j] t**j`` on a uniform grid of ``G`` segments."""
    if G < 1:
        raise ValueError("grid must have at least one segment")
    if T <= 0:
        raise ValueError("horizon T must be positive")
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim != 1 or coeffs.size == 0 or not np.all(np.isfinite(coeffs)):
        raise ValueError("polynomial coefficients must be a non-empty finite sequence")
    if real is None:
        real = not np.any(coeffs.imag)
    elif real and np.any(coeffs.imag):
        raise ValueError("complex coefficients given for a real driver")
    times = np.linspace(0.0, T, G + 1)
    values = np.polynomial.polynomial.polyval(times, coeffs)
    return DriverPath(times, values, real=real)


def _check_interval(s: float, t: float, T: float) -> None:
    if s > t:
        raise ValueError("integration interval must satisfy s <= t")
    if s < 0 or t > T * (1 + 1e-14):
        raise ValueError(f"interval [{s}, {t}] is outside [0, {T}]")


def _cut_grid(path: DriverPath, s: float, t: float, refine: int) -> np.ndarray:
    if s == t:
        return np.array([s])
    inner = path.times[(path.times > s) & (path.times < t)]
    knots = np.concatenate([[s], inner, [t]])
    return refine_times(knots, refine)


def stieltjes_integral(
    phi: Callable | Sequence,
    x: DriverPath,
    s: float,
    t: float,
    refine: int = DEFAULT_REFINE,
) -> complex:
    """Trapezoid approximation of ``int_s^t phi(u) dx(u)``.

    ``phi`` is either a callable or its samples at the nodes of ``x``
    (interpolated linearly in between).  Endpoints inside a segment cut
    the path by linear interpolation.
    """
    _check_interval(s, t, x.T)
    if s == t:
        return 0j
    u = _cut_grid(x, s, t, refine)
    if callable(phi):
        vals = np.asarray(phi(u), dtype=complex)
    else:
        samples = np.asarray(phi, dtype=complex)
        if samples.shape != x.times.shape:
            raise ValueError("phi must be sampled at every node of the driver grid")
        vals = np.interp(u, x.times, samples.real) + 1j * np.interp(u, x.times, samples.imag)
    dx = np.diff(x(u))
    return complex(np.sum(0.5 * (vals[:-1] + vals[1:]) * dx))


def cumulative_stieltjes(phi: np.ndarray, dx: np.ndarray) -> np.ndarray:
    """Running trapezoid sums of ``int phi dx`` on a fine grid (starts at 0)."""
    out = np.empty(phi.shape[-1], dtype=complex)
    out[0] = 0.0
    np.cumsum(0.5 * (phi[:-1] + phi[1:]) * dx, out=out[1:])
    return out


def herglotz_to_drivers(a0: DriverPath, a: Sequence[DriverPath], b: Sequence[DriverPath]) -> DriverSet:
    """Controlled-equation drivers from Fourier coefficients of a Herglotz density.

    With density ``(a0 + sum a_k cos(k th) + b_k sin(k th)) / 2 pi`` the drivers
    are ``x0 = int a0``, ``x_k = int a_k - i int b_k``.
    """
    if len(a) != len(b):
        raise ValueError("need as many sine as cosine coefficient paths")
    times = a0.times
    for p in (*a, *b):
        if not np.array_equal(p.times, times):
            raise ValueError("Fourier coefficient paths must share one grid")
    for p in (a0, *a, *b):
        if np.any(p.values.imag):
            raise ValueError("Fourier coefficient paths must be real")

    def primitive(p: DriverPath) -> np.ndarray:
        # exact for piecewise-linear integrands
        out = np.zeros(times.size)
        out[1:] = np.cumsum(0.5 * (p.values.real[:-1] + p.values.real[1:]) * np.diff(times))
        return out

    x0 = DriverPath(times, primitive(a0), real=True)
    xs = tuple(
        DriverPath(times, primitive(ak) - 1j * primitive(bk)) for ak, bk in zip(a, b)
    )
    return DriverSet(x0, xs)


def validate_convergence(ds: DriverSet, r: float) -> float:
    """``sum_n n * |dx_n|([0,T]) * r**n`` over the finitely many drivers."""
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    return float(sum(n * ds.driver(n).total_variation() * r**n for n in range(1, ds.K + 1)))


def random_polynomial_drivers(
    rng: np.random.Generator,
    K: int,
    G: int,
    T: float = 1.0,
    degree: int = 3,
    scale: float = 0.3,
) -> DriverSet:
    """Seeded random polynomial drivers, ``x_n(0) = 0`` and real ``x0``."""
    x0c = np.concatenate([[0.0], scale * rng.uniform(-1, 1, degree)])
    xcs = []
    for _ in range(K):
        c = scale * (rng.uniform(-1, 1, degree) + 1j * rng.uniform(-1, 1, degree))
        xcs.append(np.concatenate([[0.0], c]))
    return DriverSet.from_polynomials(x0c, xcs, G, T)
