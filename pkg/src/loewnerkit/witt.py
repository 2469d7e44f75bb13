"""Negative Witt generators acting on word-valued Laurent series.

``L_k = -z^{k+1} d/dz`` sends ``z^m`` to ``-m z^{m+k}``.  A word acts on the
right::

    T(f, x_{i_p} ... x_{i_1}) = (L_{-i_1} ... L_{-i_p} f) x_{i_p} ... x_{i_1}

so the leftmost letter's generator is applied first.  This ordering is the
one that makes ``T(T(f, u), v) == T(f, uv)``.

Words produced by the action carry their earliest letter on the *left*,
opposite to the reading used by :mod:`loewnerkit.words`, so every residue
formula reverses its word series before integrating.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

from .drivers import DEFAULT_REFINE, DriverSet
from .series import TruncatedTaylor
from .words import (
    IteratedIntegrals,
    Word,
    WordSeries,
    _check_word,
    compositions,
    s_element,
    weight,
)


class ConsistencyError(RuntimeError):
    """Two independent evaluation routes disagreed."""


@dataclass
class LaurentWordSeries:
    """``sum_{L <= m <= H} a_m z^m`` with :class:`WordSeries` coefficients."""

    low: int
    high: int
    coeffs: dict = field(default_factory=dict)
    cap: int | None = None
    truncated: bool = False

    def __post_init__(self):
        if self.low > self.high:
            raise ValueError("empty Laurent window")
        clean = {}
        for m, ws in self.coeffs.items():
            if not self.low <= m <= self.high:
                raise ValueError(f"degree {m} outside window [{self.low}, {self.high}]")
            if not isinstance(ws, WordSeries):
                ws = WordSeries.unit(self.cap).scale(ws)
            if len(ws):
                clean[int(m)] = ws
        self.coeffs = clean

    @classmethod
    def monomial(cls, m: int, low: int, high: int, coeff=1.0, cap=None) -> "LaurentWordSeries":
        return cls(low, high, {m: WordSeries.unit(cap).scale(coeff)}, cap)

    def __getitem__(self, m: int) -> WordSeries:
        return self.coeffs.get(m, WordSeries(cap=self.cap))

    def __add__(self, other: "LaurentWordSeries") -> "LaurentWordSeries":
        low, high = min(self.low, other.low), max(self.high, other.high)
        out = dict(self.coeffs)
        for m, ws in other.coeffs.items():
            out[m] = out[m] + ws if m in out else ws
        return LaurentWordSeries(low, high, out, self.cap, self.truncated or other.truncated)

    def scale(self, c) -> "LaurentWordSeries":
        return LaurentWordSeries(
            self.low, self.high, {m: ws.scale(c) for m, ws in self.coeffs.items()},
            self.cap, self.truncated)

    def times_word(self, w: Word) -> "LaurentWordSeries":
        """Right-multiply every coefficient by ``w`` (weight cap prunes)."""
        right = WordSeries.word(w, cap=self.cap)
        return LaurentWordSeries(
            self.low, self.high, {m: ws * right for m, ws in self.coeffs.items()},
            self.cap, self.truncated)

    def isclose(self, other: "LaurentWordSeries", atol=1e-12) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(self[m].isclose(other[m], atol) for m in keys)


def witt_apply(k: int, a: LaurentWordSeries) -> LaurentWordSeries:
    """``L_k a`` for ``k <= -1``; degrees pushed below the window set ``truncated``."""
    if k > -1:
        raise ValueError("only the negative generators L_k, k <= -1, are supported")
    out = {}
    truncated = a.truncated
    for m, ws in a.coeffs.items():
        if m == 0:
            continue
        if m + k < a.low:
            truncated = True
            continue
        out[m + k] = ws.scale(-m)
    return LaurentWordSeries(a.low, a.high, out, a.cap, truncated)


def word_action(f: LaurentWordSeries, w: Word) -> LaurentWordSeries:
    """``T(f, w)``: apply ``L_{-w[0]}`` first, then ``L_{-w[1]}``, ..., then right-multiply by ``w``."""
    w = _check_word(w)
    for i in w:
        f = witt_apply(-i, f)
    return f.times_word(w)


def act(f: LaurentWordSeries, ws: WordSeries) -> LaurentWordSeries:
    """Linear extension of :func:`word_action` over a word series."""
    out = LaurentWordSeries(f.low, f.high, {}, f.cap)
    for w, c in ws.items():
        out = out + word_action(f, w).scale(c)
    return out


# -- weights -----------------------------------------------------------------

def composition_weight_tilde(n: int, comp) -> int:
    """``prod_{r=1}^{p-1} (n - (i_1 + ... + i_r) + 1)`` for ``comp = (i_1, ..., i_p)``."""
    comp = _check_word(comp)
    if sum(comp) != n:
        raise ValueError(f"composition {comp} does not sum to {n}")
    partial = np.cumsum(comp)[:-1]
    return int(prod(int(n - p + 1) for p in partial))


def _one_sided(r: int, comp) -> int:
    comp = _check_word(comp)
    if r < 1:
        raise ValueError("r must be positive")
    m = sum(comp) + r
    return int(prod(int(m - p) for p in np.cumsum(comp))) if comp else 1


def composition_weight(r: int, comp_i=(), s: int = 1, comp_j=()) -> int:
    """``w(r, s) = w(r)_{comp_i; -} * w(s)_{-; comp_j}``.

    ``w(r)_{i_1..i_p}`` is ``prod_l (m - (i_1 + ... + i_l))`` with
    ``m = i_1 + ... + i_p + r`` (so its last factor is ``r``); an empty
    composition contributes 1.
    """
    return _one_sided(r, comp_i) * _one_sided(s, comp_j)


# -- residue formulas --------------------------------------------------------

def _s_series(W: int, lam: complex) -> WordSeries:
    out = WordSeries(cap=W)
    for piece in s_element(W, lam).values():
        out = out + piece
    return out


def witt_solution_words(N: int, lam: complex = 1.0) -> dict:
    """Word series of ``z^{n+1}`` in ``Res_w (lam z / (1 - z w)) (w^{-1} ._w S)``, n < N.

    Words are returned in the action's order (earliest letter on the left).
    """
    W = N - 1
    f = LaurentWordSeries.monomial(-1, -(W + 1), 0, cap=W)
    g = act(f, _s_series(W, lam))
    if g.truncated:
        raise ConsistencyError("Laurent window too small for the requested order")
    # sum_k z^k w^k picks the w^{-(k+1)} coefficient for z^{k+1}
    return {k + 1: g[-(k + 1)].scale(lam) for k in range(N)}


def _closed_form_words(N: int, lam: complex = 1.0) -> dict:
    out = {1: WordSeries.unit(N - 1).scale(lam)}
    for n in range(1, N):
        terms = {c: composition_weight_tilde(n, c) * lam ** (n + 1) for c in compositions(n)}
        out[n + 1] = WordSeries(terms, N - 1)
    return out


def sol_by_witt(ds: DriverSet, t: float | None = None, N: int = 8,
                refine: int = DEFAULT_REFINE, engine: IteratedIntegrals | None = None
                ) -> TruncatedTaylor:
    """``f_t`` up to ``z^N`` from the signature, by two routes that must agree.

    Route A runs the Witt action and the residue; route B uses the closed
    composition weights.  Mismatch above 1e-9 raises :class:`ConsistencyError`.
    """
    if N < 1:
        raise ValueError("order must be >= 1")
    t = ds.T if t is None else t
    lam = float(np.exp(ds.x0(t).real))
    engine = engine or IteratedIntegrals(ds, 0.0, t, refine)
    route_a = witt_solution_words(N, lam)
    route_b = _closed_form_words(N, lam)
    coeffs = np.zeros(N + 1, dtype=complex)
    for n in range(1, N + 1):
        a = complex(engine.apply(route_a[n].reversed())[-1])
        b = complex(engine.apply(route_b[n])[-1])
        if abs(a - b) > 1e-9 * max(1.0, abs(b)):
            raise ConsistencyError(f"z^{n}: residue route {a} vs closed form {b}")
        coeffs[n] = b
    return TruncatedTaylor(coeffs)


def afh_words(n: int, m: int) -> WordSeries:
    """Word series (action order, ``lam = 1``) for ``n * b_{-n,-m}``.

    Coefficient of ``z^{-m}`` of ``A_f u^n``: the ``u^{-n}`` and ``w^{-m}``
    residue parts of ``x_{r+s} (w^{-r}._w S) ⧢ (u^{-s}._u S)`` summed over
    ``r, s >= 1`` and multiplied by ``-n``.
    """
    if n < 1 or m < 1:
        raise ValueError("n and m must be positive")
    out = WordSeries()
    for r in range(1, m + 1):
        fw = act(LaurentWordSeries.monomial(-r, -m, 0, cap=m - r), _s_series(m - r, 1.0))[-m]
        for s in range(1, n + 1):
            fu = act(LaurentWordSeries.monomial(-s, -n, 0, cap=n - s), _s_series(n - s, 1.0))[-n]
            # drop the per-side caps before shuffling
            out = out + WordSeries.word((r + s,)) * WordSeries(fw).shuffle(WordSeries(fu))
    return out.scale(-n)


def afh_by_signature(ds: DriverSet, t: float | None = None, n: int = 1, M: int = 3,
                     refine: int = DEFAULT_REFINE, engine: IteratedIntegrals | None = None
                     ) -> np.ndarray:
    """``[(A_{f_t} u^n)]_{z^{-m}}`` for ``m = 1..M``; equals ``n * b_{-n,-m}(t)``."""
    if not 1 <= n <= M:
        raise ValueError("need 1 <= n <= M")
    t = ds.T if t is None else t
    x0t = ds.x0(t).real
    engine = engine or IteratedIntegrals(ds, 0.0, t, refine)
    out = np.zeros(M, dtype=complex)
    for m in range(1, M + 1):
        ws = afh_words(n, m).reversed()
        out[m - 1] = np.exp((m + n) * x0t) * engine.apply(ws)[-1]
    return out
