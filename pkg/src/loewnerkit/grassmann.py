"""Faber polynomials, Grunsky coefficients, the graph operator ``A_f`` and the tau-function.

Bases: ``H_+`` is ordered ``1, z, z^2, ...`` and ``H_-`` is ordered
``z^{-1}, z^{-2}, ...``.  Every matrix here is indexed by these orderings.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .series import (
    TruncatedLaurent,
    TruncatedTaylor,
    _exp,
    _log,
    _pow,
    bivariate_log,
    divided_difference,
    inverse_power,
    project_nonpositive,
    revert,
)
from .solver import GrunskyMatrix

SYMMETRY_TOL = 1e-6


def _check_map(f: TruncatedTaylor) -> None:
    if abs(f.coeffs[0]) != 0 or f.order < 1 or f.coeffs[1] == 0:
        raise ValueError("need f(0) = 0 and f'(0) != 0")


def faber_from_f(f: TruncatedTaylor, n: int) -> TruncatedLaurent:
    """``Q_n(w)``: principal plus constant part of ``(f^{-1}(w))^{-n}``, window ``[-n, 0]``."""
    _check_map(f)
    if n < 1:
        raise ValueError("n must be >= 1")
    if f.order < n + 1:
        raise ValueError(f"order {f.order} is too low for Q_{n}; need >= {n + 1}")
    g = revert(f.truncate(n + 1))
    return project_nonpositive(inverse_power(g, n))


def _faber_at_f(q: TruncatedLaurent, f: TruncatedTaylor, high: int) -> TruncatedLaurent:
    """``Q(f(z)) = sum_k q_{-k} f(z)^{-k}`` on degrees ``q.low .. high``."""
    low = q.low
    out = np.zeros(high - low + 1, dtype=complex)
    unit = f.coeffs[1:]
    for k in range(0, -low + 1):
        qk = q[-k]
        if qk == 0:
            continue
        width = high + k + 1
        if width > unit.size:
            raise ValueError("map order too low for the requested window")
        # f^{-k} = z^{-k} (f/z)^{-k}
        p = _pow(unit[:width], -k)
        out[-k - low: -k - low + width] += qk * p
    return TruncatedLaurent(low, out)


def grunsky_from_f(f: TruncatedTaylor, M: int) -> GrunskyMatrix:
    """``b_{-m,-n}`` from ``log((f(z) - f(zeta)) / (z - zeta)) = -sum b_{-m,-n} z^m zeta^n``.

    Returns the ``m, n >= 1`` block (upper triangle mirrored, so it is
    exactly symmetric) and the column ``b_{-m,0}``.
    """
    _check_map(f)
    d = bivariate_log(divided_difference(f, M)).coeffs
    block = -d[1:, 1:]
    upper = np.triu(block)
    b = upper + np.triu(block, 1).T
    return GrunskyMatrix(b, -d[1:, 0].copy())


def faber_checks(f: TruncatedTaylor, n_max: int, M: int) -> dict:
    """Max coefficient residuals of three characterisations of ``Q_n``.

    ``ii``:  ``log((w - f(z))/w) = log(f(z)/(f'(0) z)) - sum_n Q_n(w) z^n / n``
    ``iii``: ``Q_n(f(z)) = z^{-n} + n sum_{m>=1} b_{-n,-m} z^m``
    ``iv``:  ``Q_n(f(z)) - z^{-n}`` has no terms of degree ``<= 0``
    """
    _check_map(f)
    K = max(M, n_max)
    if f.order < n_max + M + 1 or f.order < 2 * K + 1:
        raise ValueError("map order too low for the requested checks")
    faber = {n: faber_from_f(f, n) for n in range(1, n_max + 1)}
    gr = grunsky_from_f(f, K)
    C = f.coeffs[1]
    unit = f.coeffs[1 : n_max + 2] / C
    log_ratio = _log(unit)  # log(f(z) / (C z))

    # (ii): [z^n] of -sum_k f^k / (k w^k), as a vector over w^0 .. w^{-n}
    res_ii = 0.0
    fk = np.zeros(n_max + 1, dtype=complex)
    fk[0] = 1.0
    powers = []
    fz = f.coeffs[: n_max + 1]
    for k in range(1, n_max + 1):
        fk = np.convolve(fk, fz)[: n_max + 1]
        powers.append(fk)
    for n in range(1, n_max + 1):
        lhs = np.zeros(n + 1, dtype=complex)
        for k in range(1, n + 1):
            lhs[k] = -powers[k - 1][n] / k
        rhs = np.array([-faber[n][-k] / n for k in range(n + 1)])
        rhs[0] += log_ratio[n]
        res_ii = max(res_ii, float(np.max(np.abs(lhs - rhs))))

    res_iii = res_iv = 0.0
    for n in range(1, n_max + 1):
        comp = _faber_at_f(faber[n], f, M)
        expect = np.zeros(comp.coeffs.size, dtype=complex)
        expect[0] = 1.0
        for m in range(1, M + 1):
            expect[m + n] = n * gr.b[n - 1, m - 1]
        res_iii = max(res_iii, float(np.max(np.abs(comp.coeffs - expect))))
        tail = comp.coeffs[1 : n + 1]  # degrees -n+1 .. 0
        res_iv = max(res_iv, float(np.max(np.abs(tail), initial=0.0)))
    return {"ii": res_ii, "iii": res_iii, "iv": res_iv}


def w_basis(f: TruncatedTaylor, n: int, window: tuple[int, int] | None = None) -> TruncatedLaurent:
    """``v_n(z) = Q_n(f(1/z)) = z^n + n sum_m b_{-n,-m} z^{-m}`` on ``window = (low, high)``."""
    low, high = (-(f.order - n - 1), n) if window is None else window
    if high < n or low > 0:
        raise ValueError("window must contain degrees 0 .. n")
    q = faber_from_f(f, n)
    in_zeta = _faber_at_f(q, f, -low)
    flipped = {-d: c for d, c in in_zeta.to_dict().items()}
    return TruncatedLaurent.from_dict(flipped, low, high)


def af_operator(b: GrunskyMatrix) -> np.ndarray:
    """Matrix of ``A_f: H_+ -> H_-``: shape ``(M, M+1)``, ``A[m-1, n] = n b_{-n,-m}``.

    Column 0 (the constant function) is zero.
    """
    if b.symmetry_defect() > SYMMETRY_TOL:
        raise ValueError(f"Grunsky matrix is not symmetric (defect {b.symmetry_defect():.3g})")
    M = b.M
    A = np.zeros((M, M + 1), dtype=complex)
    n = np.arange(1, M + 1)
    A[:, 1:] = b.b.T * n[None, :]
    return A


@dataclass(frozen=True)
class TauOperator:
    """Blocks of ``e^{-xi(t, z)}`` on ``H_+ (+) H_-`` together with ``A``, all ``N x N``."""

    N: int
    a: np.ndarray
    b: np.ndarray
    A: np.ndarray

    @classmethod
    def build(cls, A, tvec, N: int) -> "TauOperator":
        A = np.atleast_2d(np.asarray(A, dtype=complex))
        tvec = np.asarray(tvec, dtype=complex).ravel()
        if N < 1:
            raise ValueError("truncation must be >= 1")
        if A.shape[0] > N or A.shape[1] > N:
            raise ValueError(f"A of shape {A.shape} does not fit truncation {N}")
        if tvec.size > N:
            raise ValueError(f"tvec has {tvec.size} entries; at most N={N} are supported")
        if not np.all(np.isfinite(tvec)) or not np.all(np.isfinite(A)):
            raise ValueError("tvec and A must be finite")
        xi = np.zeros(2 * N + 1, dtype=complex)
        xi[1 : tvec.size + 1] = -tvec
        h = _exp(xi)
        i = np.arange(N)
        diff = i[:, None] - i[None, :]
        a = np.where(diff >= 0, h[np.clip(diff, 0, None)], 0)
        b = h[i[:, None] + i[None, :] + 1]
        padded = np.zeros((N, N), dtype=complex)
        padded[: A.shape[0], : A.shape[1]] = A
        return cls(N, a, b, padded)

    def matrix(self) -> np.ndarray:
        # a is unit lower triangular
        return np.eye(self.N) + scipy.linalg.solve_triangular(self.a, self.b @ self.A, lower=True,
                                                              unit_diagonal=True)

    def tau(self) -> complex:
        lu, piv = scipy.linalg.lu_factor(self.matrix())
        sign = (-1) ** int(np.sum(piv != np.arange(self.N)))
        return complex(sign * np.prod(np.diag(lu)))


def tau_function(A, tvec, N: int) -> complex:
    """``det(1 + a^{-1} b A)`` at truncation ``N``, normalised so that ``tau(0) = 1``."""
    return TauOperator.build(A, tvec, N).tau()
