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
# # Scales on a finite metric space
#
# A finite space looks different depending on the step size we allow.
# Here we take six points on a line, ask which of them chain together at a
# given scale, and collapse the space to the ultrametric that records the
# smallest connecting scale for every pair.

# %%
from fractions import Fraction

from coarsekit import FiniteMetricSpace, c_components, is_c_geodesic, ultrametrize

space = FiniteMetricSpace.from_line([0, 1, 2, 5, 6, 20], list("abcdef"), label="six points")
for c in (1, 3, 14):
    print(c, c_components(space, c))

# %% [markdown]
# The ultrametric distance between two points is the minimal scale at which
# they fall in the same component.  Applying the construction twice changes
# nothing.

# %%
u = ultrametrize(space)
print([[u.dist(p, q) for q in space.points] for p in space.points])
assert ultrametrize(u) == u

# %% [markdown]
# Exact arithmetic is kept throughout: rational inputs stay rational.

# %%
third = FiniteMetricSpace.from_line([0, Fraction(1, 3), Fraction(2, 3), 1])
print(is_c_geodesic(third, Fraction(1, 3)), is_c_geodesic(third, Fraction(1, 4)))

# %% [markdown]
# ## Control functions of a map
#
# For a map sampled on finitely many points we can read off the tightest
# step envelopes bounding how distances in the image depend on distances in
# the source.  The doubling map of the integers doubles every distance.

# %%
from coarsekit import MapSample, empirical_controls

line = FiniteMetricSpace.from_line(range(5))
doubled = FiniteMetricSpace.from_line([0, 2, 4, 6, 8])
lower, upper = empirical_controls(MapSample(line, doubled, {i: i for i in range(5)}))
print("upper", upper.breakpoints)
print("lower", lower.breakpoints)
