"""Words over the alphabet {x1, x2, ...}, shuffles, and weighted iterated integrals.

A word is stored as a tuple of positive integers in *written* order,
``(i_p, ..., i_2, i_1)`` for the monomial ``x_{i_p} ... x_{i_2} x_{i_1}``.
For the signature the rightmost letter is integrated at the earliest
time::

    I[(i_p, ..., i_1)](s, t) = int_{s <= u_1 < ... < u_p <= t}
        prod_r exp(-i_r x0(u_r)) dx_{i_r}(u_r)

Formulas that produce words with the opposite reading (leftmost letter
earliest) must pass through :func:`reverse_word` / :meth:`WordSeries.reversed`
before integration.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Iterable, Mapping

import numpy as np

from .drivers import DEFAULT_REFINE, DriverSet, FineGrid, cumulative_stieltjes

Word = tuple

EMPTY: Word = ()


def weight(w: Word) -> int:
    return sum(w)


def reverse_word(w: Word) -> Word:
    return tuple(reversed(w))


def word_str(w: Word) -> str:
    return "1" if not w else "".join(f"x{i}" for i in w)


def _check_word(w) -> Word:
    w = tuple(int(i) for i in w)
    if any(i < 1 for i in w):
        raise ValueError(f"letters must be positive integers, got {w}")
    return w


class WordSeries(Mapping):
    """Finite linear combination of words with complex coefficients.

    Words heavier than ``cap`` are dropped; ``cap=None`` means no cap.
    Zero coefficients are pruned and iteration is in sorted word order.
    """

    __slots__ = ("_terms", "cap")

    def __init__(self, terms=None, cap: int | None = None):
        self.cap = cap
        data = {}
        for w, c in (terms.items() if isinstance(terms, Mapping) else terms or ()):
            w = _check_word(w)
            if cap is not None and weight(w) > cap:
                continue
            c = data.get(w, 0) + complex(c)
            data[w] = c
        self._terms = {w: data[w] for w in sorted(data, key=lambda w: (len(w), w)) if data[w] != 0}

    @classmethod
    def unit(cls, cap=None):
        return cls({EMPTY: 1.0}, cap)

    @classmethod
    def word(cls, w, coeff=1.0, cap=None):
        return cls({tuple(w): coeff}, cap)

    def __getitem__(self, w):
        return self._terms.get(tuple(w), 0j)

    def __iter__(self):
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def _merge_cap(self, other):
        caps = [c for c in (self.cap, getattr(other, "cap", None)) if c is not None]
        return min(caps) if caps else None

    def __add__(self, other: "WordSeries") -> "WordSeries":
        terms = dict(self._terms)
        for w, c in other.items():
            terms[w] = terms.get(w, 0) + c
        return WordSeries(terms, self._merge_cap(other))

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c) -> "WordSeries":
        return WordSeries({w: c * v for w, v in self.items()}, self.cap)

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, other):
        """Concatenation product (or scalar multiple)."""
        if not isinstance(other, WordSeries):
            return self.scale(other)
        terms: dict = {}
        for u, a in self.items():
            for v, b in other.items():
                terms[u + v] = terms.get(u + v, 0) + a * b
        return WordSeries(terms, self._merge_cap(other))

    def shuffle(self, other: "WordSeries") -> "WordSeries":
        terms: dict = {}
        cap = self._merge_cap(other)
        for u, a in self.items():
            for v, b in other.items():
                if cap is not None and weight(u) + weight(v) > cap:
                    continue
                for w, m in _shuffle_counts(u, v).items():
                    terms[w] = terms.get(w, 0) + a * b * m
        return WordSeries(terms, cap)

    def reversed(self) -> "WordSeries":
        return WordSeries({reverse_word(w): c for w, c in self.items()}, self.cap)

    def max_weight(self) -> int:
        return max((weight(w) for w in self), default=0)

    def isclose(self, other, atol=1e-12) -> bool:
        keys = set(self) | set(other)
        return all(abs(self[w] - other[w]) <= atol for w in keys)

    def __eq__(self, other):
        if not isinstance(other, WordSeries):
            return NotImplemented
        return self._terms == other._terms

    def __repr__(self):
        if not self._terms:
            return "WordSeries(0)"
        parts = [f"({c:.6g}){word_str(w)}" for w, c in self.items()]
        return "WordSeries(" + " + ".join(parts) + ")"


# -- combinatorics -----------------------------------------------------------

@lru_cache(maxsize=None)
def compositions(n: int) -> tuple:
    """All ordered compositions of ``n``, sorted by length then entries."""
    if n < 1:
        raise ValueError("compositions are defined for n >= 1")
    out = []
    for p in range(1, n + 1):
        for cuts in combinations(range(1, n), p - 1):
            bounds = (0, *cuts, n)
            out.append(tuple(bounds[i + 1] - bounds[i] for i in range(p)))
    return tuple(sorted(out, key=lambda c: (len(c), c)))


@lru_cache(maxsize=4096)
def _shuffle_counts(u: Word, v: Word) -> dict:
    if not u:
        return {v: 1}
    if not v:
        return {u: 1}
    out: dict = {}
    for w, m in _shuffle_counts(u[1:], v).items():
        key = (u[0],) + w
        out[key] = out.get(key, 0) + m
    for w, m in _shuffle_counts(u, v[1:]).items():
        key = (v[0],) + w
        out[key] = out.get(key, 0) + m
    return out


def shuffle(u: Word, v: Word, cap: int | None = None) -> WordSeries:
    """Sum of all interleavings of ``u`` and ``v`` (with multiplicity)."""
    u, v = _check_word(u), _check_word(v)
    out = WordSeries(_shuffle_counts(u, v), cap)
    assert cap is not None or sum(abs(c) for c in out.values()) == comb(len(u) + len(v), len(u))
    return out


def s_element(W: int, z: complex = 1.0) -> dict:
    """The z-graded element ``S(xi(x, z))`` up to degree ``W``.

    Returns ``{n: WordSeries}``; degree ``n`` holds every composition of
    ``n`` as a word, each with coefficient ``z**n``.  Passing a scalar
    ``z`` substitutes it for the formal variable.
    """
    if W < 0:
        raise ValueError("weight cap must be non-negative")
    graded = {0: WordSeries.unit(W)}
    for n in range(1, W + 1):
        graded[n] = WordSeries({c: z**n for c in compositions(n)}, W)
    return graded


# -- iterated integrals ------------------------------------------------------

class IteratedIntegrals:
    """Trapezoid evaluation of ``I[w](s, u)`` for every node ``u`` of a fine grid.

    Peels the leftmost (latest) letter::

        I[a w'](s, u) = int_s^u exp(-a x0(r)) I[w'](s, r) dx_a(r)

    Results are memoised per word, so shared suffixes are integrated once.
    """

    def __init__(self, ds: DriverSet, s: float = 0.0, t: float | None = None,
                 refine: int = DEFAULT_REFINE):
        self.ds = ds
        self.grid: FineGrid = ds.fine_grid(refine, s, t)
        self._cache: dict = {}
        self._zero = np.zeros(self.grid.t.size, dtype=complex)
        self._weights: dict = {}

    @property
    def times(self) -> np.ndarray:
        return self.grid.t

    def _letter_weight(self, a: int) -> np.ndarray:
        if a not in self._weights:
            self._weights[a] = np.exp(-a * self.grid.x0)
        return self._weights[a]

    def path(self, w: Word) -> np.ndarray:
        w = tuple(w)
        if w in self._cache:
            return self._cache[w]
        if not w:
            out = np.ones(self.grid.t.size, dtype=complex)
        else:
            a = w[0]
            dx = self.grid.increments(a)
            if dx is None:
                out = self._zero
            else:
                inner = self.path(w[1:])
                if inner is self._zero:
                    out = self._zero
                else:
                    out = cumulative_stieltjes(self._letter_weight(a) * inner, dx)
        self._cache[w] = out
        return out

    def value(self, w: Word) -> complex:
        return complex(self.path(w)[-1])

    def apply(self, ws: WordSeries) -> np.ndarray:
        """``sum_w coeff(w) I[w]`` along the grid."""
        out = np.zeros(self.grid.t.size, dtype=complex)
        for w, c in ws.items():
            out += c * self.path(w)
        return out


def iterated_integral(w: Word, ds: DriverSet, s: float = 0.0, t: float | None = None,
                      refine: int = DEFAULT_REFINE) -> complex:
    """``[int x_{i_p} ... x_{i_1}]_{s,t}``; the rightmost letter is earliest."""
    return IteratedIntegrals(ds, s, t, refine).value(_check_word(w))


def apply_integral(ws, ds: DriverSet, s: float = 0.0, t: float | None = None,
                   refine: int = DEFAULT_REFINE, engine: IteratedIntegrals | None = None):
    """Linear extension of :func:`iterated_integral`.

    ``ws`` is a :class:`WordSeries` (returns a complex number) or a graded
    dict ``{degree: WordSeries}`` (returns ``{degree: complex}``).
    """
    engine = engine or IteratedIntegrals(ds, s, t, refine)
    if isinstance(ws, WordSeries):
        return complex(engine.apply(ws)[-1])
    return {n: complex(engine.apply(piece)[-1]) for n, piece in ws.items()}


# -- independent oracle ------------------------------------------------------

def brute_force_oracle(w: Word, ds: DriverSet, s: float = 0.0, t: float | None = None,
                       nodes: int = 12) -> complex:
    """Nested Gauss-Legendre quadrature over the simplex ``s <= u_1 < ... < u_p <= t``.

    Every nested integral is split at the driver nodes, where the
    integrands are smooth (``dx`` has constant density and ``x0`` is
    linear), and each piece gets its own Legendre rule.  Shares no code
    with :class:`IteratedIntegrals`.  Words of length at most 3 only.
    """
    w = _check_word(w)
    if len(w) > 3:
        raise ValueError("the brute-force oracle only supports words of length <= 3")
    t = ds.T if t is None else t
    if not 0 <= s <= t <= ds.T:
        raise ValueError(f"interval [{s}, {t}] is outside [0, {ds.T}]")
    if not w:
        return 1 + 0j
    xi, wq = np.polynomial.legendre.leggauss(nodes)
    xi, wq = 0.5 * (xi + 1.0), 0.5 * wq
    inner = ds.times[(ds.times > s) & (ds.times < t)]
    knots = np.concatenate([[s], inner, [t]])

    def density(a: int, u: np.ndarray) -> np.ndarray:
        path = ds.driver(a)
        seg = np.clip(np.searchsorted(path.times, u, side="right") - 1, 0, path.times.size - 2)
        return path.slopes[seg] * np.exp(-a * ds.x0(u).real)

    # letters from earliest to latest
    letters = list(reversed(w))

    def F(level: int, upper: np.ndarray) -> np.ndarray:
        """int_s^upper density(letters[level]) * F(level-1, .) for each entry of upper."""
        if level < 0:
            return np.ones_like(upper, dtype=complex)
        a = letters[level]
        upper = np.asarray(upper, dtype=float)
        # whole pieces below each upper limit
        lo, hi = knots[:-1], knots[1:]
        u_full = lo[:, None] + (hi - lo)[:, None] * xi[None, :]
        g_full = density(a, u_full.ravel()) * F(level - 1, u_full.ravel())
        piece = (g_full.reshape(u_full.shape) * wq[None, :]).sum(axis=1) * (hi - lo)
        prefix = np.concatenate([[0.0], np.cumsum(piece)])
        k = np.clip(np.searchsorted(knots, upper, side="right") - 1, 0, knots.size - 2)
        base = knots[k]
        u_part = base[:, None] + (upper - base)[:, None] * xi[None, :]
        g_part = density(a, u_part.ravel()) * F(level - 1, u_part.ravel())
        part = (g_part.reshape(u_part.shape) * wq[None, :]).sum(axis=1) * (upper - base)
        return prefix[k] + part

    return complex(F(len(letters) - 1, np.array([t]))[0])
