"""Truncated power series: univariate Taylor, Laurent, and bivariate Taylor.

All truncation orders are explicit.  Mixing two orders truncates to the
smaller one; nothing is ever silently promoted.  The private ``_xxx``
helpers work on the last axis of coefficient arrays so they also apply to
stacks of series (one per time step, say).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d


# -- array kernels -----------------------------------------------------------

def _mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = min(a.shape[-1], b.shape[-1])
    a, b = a[..., :n], b[..., :n]
    out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=complex)
    for k in range(n):
        out[..., k:] += a[..., k : k + 1] * b[..., : n - k]
    return out


def _inv(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    out = np.zeros_like(a, dtype=complex)
    out[..., 0] = 1.0 / a[..., 0]
    for j in range(1, n):
        acc = np.einsum("...k,...k->...", a[..., 1 : j + 1], out[..., j - 1 :: -1][..., :j])
        out[..., j] = -acc * out[..., 0]
    return out


def _log(a: np.ndarray) -> np.ndarray:
    # b' = a'/a solved degree by degree
    n = a.shape[-1]
    out = np.zeros_like(a, dtype=complex)
    out[..., 0] = np.log(a[..., 0])
    for j in range(1, n):
        acc = j * a[..., j]
        for k in range(1, j):
            acc = acc - k * out[..., k] * a[..., j - k]
        out[..., j] = acc / (j * a[..., 0])
    return out


def _exp(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    out = np.zeros_like(a, dtype=complex)
    out[..., 0] = np.exp(a[..., 0])
    for j in range(1, n):
        acc = 0
        for k in range(1, j + 1):
            acc = acc + k * a[..., k] * out[..., j - k]
        out[..., j] = acc / j
    return out


def _pow(a: np.ndarray, p: int) -> np.ndarray:
    """Integer power; negative powers need a nonzero constant term."""
    if p < 0:
        a, p = _inv(a), -p
    out = np.zeros_like(a, dtype=complex)
    out[..., 0] = 1.0
    base = a
    while p:
        if p & 1:
            out = _mul(out, base)
        p >>= 1
        if p:
            base = _mul(base, base)
    return out


def _compose(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``a(b(z))`` by Horner's rule; ``b`` has zero constant term."""
    n = min(a.shape[-1], b.shape[-1])
    out = np.zeros(np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (n,), dtype=complex)
    for k in range(n - 1, -1, -1):
        out = _mul(out, b[..., :n])
        out[..., 0] += a[..., k]
    return out


def _revert(a: np.ndarray) -> np.ndarray:
    """Series reversion by coefficient matching.

    The coefficient of ``z^j`` in ``a(g(z))`` is ``a_1 g_j`` plus terms that
    only involve ``g_1 .. g_{j-1}``, so ``g_j`` follows from forcing it to 0.
    """
    n = a.shape[-1]
    g = np.zeros_like(a, dtype=complex)
    if n < 2:
        return g
    g[..., 1] = 1.0 / a[..., 1]
    for j in range(2, n):
        power = g.copy()  # g**1
        acc = 0
        for k in range(2, j + 1):
            power = _mul(power, g)
            acc = acc + a[..., k] * power[..., j]
        g[..., j] = -acc * g[..., 1]
    return g


# -- univariate Taylor -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class TruncatedTaylor:
    """``sum_j c_j z^j`` modulo ``z^(N+1)``."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex, ndmin=1)
        if c.ndim != 1:
            raise ValueError("Taylor coefficients must be one-dimensional")
        if not np.all(np.isfinite(c)):
            raise ValueError("series coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_coeffs(cls, coeffs, order: int) -> "TruncatedTaylor":
        c = np.zeros(order + 1, dtype=complex)
        coeffs = np.asarray(coeffs, dtype=complex)[: order + 1]
        c[: coeffs.size] = coeffs
        return cls(c)

    @classmethod
    def identity(cls, order: int) -> "TruncatedTaylor":
        return cls.from_coeffs([0, 1], order)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __getitem__(self, j):
        return self.coeffs[j]

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def truncate(self, order: int) -> "TruncatedTaylor":
        if order > self.order:
            raise ValueError("cannot raise the truncation order")
        return TruncatedTaylor(self.coeffs[: order + 1])

    def __add__(self, other):
        if isinstance(other, TruncatedTaylor):
            n = min(self.order, other.order) + 1
            return TruncatedTaylor(self.coeffs[:n] + other.coeffs[:n])
        c = self.coeffs.copy()
        c[0] += other
        return TruncatedTaylor(c)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedTaylor(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TruncatedTaylor):
            return TruncatedTaylor(_mul(self.coeffs, other.coeffs))
        return TruncatedTaylor(self.coeffs * other)

    __rmul__ = __mul__

    def __pow__(self, p: int):
        if p < 0 and self.coeffs[0] == 0:
            raise ValueError("negative power of a series without constant term")
        return TruncatedTaylor(_pow(self.coeffs, int(p)))

    def allclose(self, other, atol=1e-12) -> bool:
        n = min(self.order, other.order) + 1
        return bool(np.allclose(self.coeffs[:n], other.coeffs[:n], rtol=0, atol=atol))

    def __repr__(self):
        return f"TruncatedTaylor({np.array2string(self.coeffs, precision=6)})"


def series_arith(a: TruncatedTaylor, b, op: str) -> TruncatedTaylor:
    """``op`` is ``"add"``, ``"mul"``, or ``"scale"`` (``b`` a scalar)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "scale":
        return a * complex(b)
    raise ValueError(f"unknown operation {op!r}")


def log_series(a: TruncatedTaylor) -> TruncatedTaylor:
    if a.coeffs[0] == 0:
        raise ValueError("log of a series with vanishing constant term")
    return TruncatedTaylor(_log(a.coeffs))


def exp_series(a: TruncatedTaylor) -> TruncatedTaylor:
    return TruncatedTaylor(_exp(a.coeffs))


def compose(a: TruncatedTaylor, b: TruncatedTaylor) -> TruncatedTaylor:
    """``a(b(z))``, truncated at the smaller order."""
    if b.coeffs[0] != 0:
        raise ValueError("inner series of a composition must vanish at 0")
    return TruncatedTaylor(_compose(a.coeffs, b.coeffs))


def revert(a: TruncatedTaylor) -> TruncatedTaylor:
    """Compositional inverse ``g`` with ``a(g(z)) = z``."""
    if a.order < 1 or a.coeffs[0] != 0 or a.coeffs[1] == 0:
        raise ValueError("reversion needs a(0) = 0 and a'(0) != 0")
    return TruncatedTaylor(_revert(a.coeffs))


# -- Laurent -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TruncatedLaurent:
    """``sum_{j=low}^{high} c_j z^j``; ``coeffs[i]`` is the coefficient of ``z^(low+i)``."""

    low: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex, ndmin=1)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("Laurent coefficients must be a non-empty vector")
        if not np.all(np.isfinite(c)):
            raise ValueError("series coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "low", int(self.low))
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_dict(cls, terms: dict, low: int | None = None, high: int | None = None):
        low = min(terms) if low is None else low
        high = max(terms) if high is None else high
        c = np.zeros(high - low + 1, dtype=complex)
        for d, v in terms.items():
            if low <= d <= high:
                c[d - low] = v
        return cls(low, c)

    @property
    def high(self) -> int:
        return self.low + self.coeffs.size - 1

    def __getitem__(self, d: int) -> complex:
        if self.low <= d <= self.high:
            return self.coeffs[d - self.low]
        return 0j

    def to_dict(self) -> dict:
        return {self.low + i: c for i, c in enumerate(self.coeffs) if c != 0}

    def window(self, low: int, high: int) -> "TruncatedLaurent":
        return TruncatedLaurent(low, [self[d] for d in range(low, high + 1)])

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return sum(c * z ** (self.low + i) for i, c in enumerate(self.coeffs))

    def __repr__(self):
        terms = " + ".join(f"({c:.6g})z^{d}" for d, c in self.to_dict().items()) or "0"
        return f"TruncatedLaurent[{self.low},{self.high}]({terms})"


def residue(a: TruncatedLaurent) -> complex:
    """Coefficient of ``z^-1``."""
    if not a.low <= -1 <= a.high:
        raise ValueError(f"degree -1 is outside the window [{a.low}, {a.high}]")
    return complex(a[-1])


def project_nonpositive(a: TruncatedLaurent) -> TruncatedLaurent:
    """Principal plus constant part: degrees above 0 are dropped."""
    if a.low > 0:
        return TruncatedLaurent(0, [0])
    return a.window(a.low, 0)


def laurent_from_taylor(a: TruncatedTaylor, shift: int = 0) -> TruncatedLaurent:
    """``z^shift * a(z)`` as a Laurent series."""
    return TruncatedLaurent(shift, a.coeffs)


def inverse_power(g: TruncatedTaylor, n: int) -> TruncatedLaurent:
    """``g(z)^(-n)`` for ``g = g_1 z + g_2 z^2 + ...`` with ``g_1 != 0``.

    Degrees ``-n .. order - 1 - n`` are exact.
    """
    if g.order < 1 or g.coeffs[0] != 0 or g.coeffs[1] == 0:
        raise ValueError("need g(0) = 0 and g'(0) != 0")
    unit = g.coeffs[1:]
    return TruncatedLaurent(-n, _pow(unit, -n))


# -- bivariate ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BivariateTruncated:
    """``sum d[m, n] z^m zeta^n`` for ``0 <= m, n <= M``."""

    coeffs: np.ndarray

    def __post_init__(self):
        d = np.array(self.coeffs, dtype=complex, ndmin=2)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("bivariate coefficients must form a square array")
        if not np.all(np.isfinite(d)):
            raise ValueError("series coefficients must be finite")
        d.setflags(write=False)
        object.__setattr__(self, "coeffs", d)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    def __getitem__(self, idx):
        return self.coeffs[idx]

    def at_zeta_zero(self) -> TruncatedTaylor:
        return TruncatedTaylor(self.coeffs[:, 0])

    def __mul__(self, other: "BivariateTruncated") -> "BivariateTruncated":
        M = min(self.order, other.order)
        full = convolve2d(self.coeffs[: M + 1, : M + 1], other.coeffs[: M + 1, : M + 1])
        return BivariateTruncated(full[: M + 1, : M + 1])


def divided_difference(f: TruncatedTaylor, M: int | None = None) -> BivariateTruncated:
    """``(f(z) - f(zeta)) / (z - zeta)`` as a bivariate series.

    The ``z^m zeta^n`` coefficient is ``f_{m+n+1}``, so a series of order
    ``N`` supports ``M <= (N - 1) // 2``.
    """
    if f.coeffs[0] != 0:
        raise ValueError("divided difference needs f(0) = 0")
    if f.order < 1 or f.coeffs[1] == 0:
        raise ValueError("divided difference needs f'(0) != 0")
    max_M = (f.order - 1) // 2
    M = max_M if M is None else M
    if M > max_M:
        raise ValueError(f"order {f.order} only determines the box up to M={max_M}")
    idx = np.add.outer(np.arange(M + 1), np.arange(M + 1)) + 1
    return BivariateTruncated(f.coeffs[idx])


def bivariate_log(d: BivariateTruncated) -> BivariateTruncated:
    """Logarithm modulo ``(z^(M+1), zeta^(M+1))``."""
    d00 = d.coeffs[0, 0]
    if d00 == 0:
        raise ValueError("log of a bivariate series with vanishing constant term")
    M = d.order
    u = d.coeffs / d00
    u[0, 0] = 0.0
    u = BivariateTruncated(u)
    out = np.zeros((M + 1, M + 1), dtype=complex)
    out[0, 0] = np.log(d00)
    power = u
    # u has no constant term, so u**k vanishes in the box once k > 2M
    for k in range(1, 2 * M + 1):
        out += (-1) ** (k + 1) / k * power.coeffs
        power = power * u
    return BivariateTruncated(out)


def bivariate_exp(d: BivariateTruncated) -> BivariateTruncated:
    M = d.order
    c = d.coeffs.copy()
    scale = np.exp(c[0, 0])
    c[0, 0] = 0
    u = BivariateTruncated(c)
    out = np.zeros((M + 1, M + 1), dtype=complex)
    out[0, 0] = 1.0
    power = BivariateTruncated(out.copy())
    fact = 1.0
    for k in range(1, 2 * M + 1):
        power = power * u
        fact *= k
        out += power.coeffs / fact
    return BivariateTruncated(scale * out)
