"""Weighted iterated integrals and the shuffle identity.

The signature engine integrates word by word on a refined grid.  Products
of two integrals equal the integral of the shuffle, and the
nested-quadrature oracle gives an independent value for short words.
"""
import numpy as np

from loewnerkit import IteratedIntegrals, brute_force_oracle, random_polynomial_drivers, shuffle
from loewnerkit.words import word_str

ds = random_polynomial_drivers(np.random.default_rng(1), K=3, G=200, T=1.0)
engine = IteratedIntegrals(ds, 0.0, ds.T, refine=16)

u, v = (1,), (2, 1)
lhs = engine.value(u) * engine.value(v)
sh = shuffle(u, v)
print("shuffle", word_str(u), "and", word_str(v), "=", sh)
print(f"I_u I_v      = {lhs:.12f}")
print(f"I_(u sh v)   = {engine.apply(sh)[-1]:.12f}")

print("\nword   engine                          oracle")
for w in [(1,), (2,), (1, 1), (2, 1), (1, 2), (1, 1, 1), (3, 2, 1)]:
    print(f"{word_str(w):6s} {engine.value(w):.10f}   {brute_force_oracle(w, ds):.10f}")
