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
# # Loops in Rips complexes
#
# At scale `c` we join points within distance `c` and fill in every triangle
# whose sides are all edges.  A loop in this complex either contracts through
# triangle moves or carries a nonzero class in first homology.

# %%
from coarsekit import build_rips, contract_loop, fixture, h1_class, rotation_number, sc_probe

hexagon = fixture("circle", {"R": 1, "m": 6})
cx = build_rips(hexagon, 1)
print(cx.pi1().betti1)
print(h1_class(cx, [0, 1, 2, 3, 4, 5, 0]))

# %% [markdown]
# On a segment of the integers every loop is null-homotopic.  The probe
# samples random loops at a small scale and tries to contract each of them at
# a larger one.

# %%
line = fixture("line", {"radius": 8})
report = sc_probe(line, 0, 1, 1, loop_sample_size=8, seed=1)
print(report.status, [v.verdict for v in report.verdicts])

# %% [markdown]
# A contraction comes with its full trace of moves, so it can be replayed.

# %%
square = fixture("line", {"radius": 3})
verdict = contract_loop(build_rips(square, 2), [0, 1, 2, 1, 0])
print(verdict.verdict, verdict.trace)

# %% [markdown]
# ## Rotation numbers on the circle
#
# Cut the unit circle into three arcs.  Counting how often a loop steps
# from one arc to the next, minus the backward steps, gives an integer that
# survives small moves.  Going once around a regular 12-gon counts three arc
# crossings.

# %%
print(rotation_number(list(range(12)) + [0], m=12).rho)
print(rotation_number(list(range(12, -1, -1)), m=12).rho)

# %% [markdown]
# ## A highway that is not simply connected at a coarse scale
#
# Points of the integers with an extra short edge from `10^n` to `10^n + 3n`.
# At scale just above `n` the new edge lies in no triangle, so the loop that
# walks along the integers and returns by the shortcut is not a boundary.

# %%
hw = fixture("highway", {"n_max": 2})
a, b = 100, 106
cxh = build_rips(hw, 2)
print(hw.dist(a, b), h1_class(cxh, list(range(a, b + 1)) + [a]).is_zero)
