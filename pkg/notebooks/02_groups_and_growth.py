# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Word metrics and growth
#
# Balls in the Cayley graph are grown by breadth-first search from the
# identity.  Their sizes give a growth function, which we compare between
# groups up to rescaling.

# %%
import numpy as np

from coarsekit import (compare_growth, free_abelian, free_group, growth_series, heisenberg,
                       poldeg_estimate, word_length)

z2 = growth_series(free_abelian(2), r_max=10)
f2 = growth_series(free_group(2), r_max=7)
print(z2.counts)
print(f2.counts)

# %% [markdown]
# The plane grows quadratically while the free group grows exponentially.
# A log-log fit over the tail recovers the degree in the first case and flags
# the second.

# %%
print(poldeg_estimate(growth_series(free_abelian(2), r_max=16)))
print(poldeg_estimate(growth_series(free_group(2), r_max=10)))

# %% [markdown]
# The comparison searches a small grid of constants for a witness that one
# growth function is dominated by a rescaling of the other.  A witness is only
# checked at radii where both series are known, so the free group looks
# dominated by the plane on its first few radii.  That is an artefact of the
# short window.

# %%
print(compare_growth(z2, f2))
print(compare_growth(f2, z2))

# %% [markdown]
# ## Distortion in the Heisenberg group
#
# In the integer Heisenberg group the central generator `u` is the
# commutator of `s` and `t`.  If only `s` and `t` are allowed, powers of `u`
# are reached with roughly square-root length.  Adding `u` as a generator
# makes its powers cost close to their exponent for small radii, so the fitted
# exponent over a short window is much larger.

# %%
from coarsekit import GroupOracle

h = heisenberg()
two = GroupOracle(h.family, h.params, h.identity, h.multiply, h.inverse, h.encode,
                  [(a, g) for a, g in h.generators if a in "sStT"], h.decode)
u = h.generator("u")
ns = np.arange(1, 37)
for name, oracle in (("s, t", two), ("s, t, u", h)):
    lengths = [word_length(oracle, oracle.power(u, int(n)), 40) for n in ns]
    slope = np.polyfit(np.log(ns), np.log(lengths), 1)[0]
    print(f"{name}: slope {slope:.3f}, lengths {lengths[:10]} ...")

# %% [markdown]
# ## Følner sets
#
# Amenable groups have finite sets whose boundary is small compared to their
# size.  On the integers an interval of four points already has ratio 3/2.
# In the free group no connected set does better than 3 + 2/|F|.

# %%
from fractions import Fraction

from coarsekit import folner_search

print(folner_search(free_abelian(1), 1, Fraction(1, 2), "exhaustive"))
print(folner_search(free_group(2), 1, Fraction(1, 10), "exhaustive", max_size=10))
