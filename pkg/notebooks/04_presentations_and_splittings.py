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
# # Presentations and valuation classifiers
#
# A finite presentation comes with a concrete evaluation of its letters, so
# relators can be checked by multiplying matrices or group elements.

# %%
from coarsekit import defining_subset_presentation, relators_hold, steinberg_presentation
from coarsekit.splitting import dihedral_presentation, todd_coxeter

st3 = steinberg_presentation(3)
print(len(st3.letters), len(st3.relators), st3.max_relator_length, relators_hold(st3))

# %% [markdown]
# Taking every element of a large enough ball as a letter turns any
# presentation into one whose relators have length at most three.  The dihedral
# group of order eight is small enough to confirm by coset enumeration that the
# group is unchanged.

# %%
d8 = dihedral_presentation(4)
t = defining_subset_presentation(d8)
q = t.presentation
print(t.m, len(q.letters), q.max_relator_length, todd_coxeter(d8), todd_coxeter(q))

# %% [markdown]
# ## Metabelian examples from valuations
#
# For a rational unit `lam` and a finite set of primes we record the valuation
# of `lam` at each prime.  The signs decide whether the corresponding
# semidirect product is finitely generated and finitely presented.

# %%
from fractions import Fraction

from coarsekit import ValuationVector, classify_gamma_lambda, engulfs

for lam in (Fraction(1, 6), Fraction(2, 3), Fraction(3, 2), Fraction(3)):
    v = ValuationVector.of(lam, [2, 3])
    print(lam, v.valuations, engulfs(v), engulfs(v.inverse()), classify_gamma_lambda(v).name)

# %% [markdown]
# The same verdict comes out of a geometric test on vectors: whether zero lies
# on the segment between two of them.

# %%
from coarsekit import HomVector, classify_semidirect, zero_in_segment

print(zero_in_segment((1, 2), (-2, -4)), zero_in_segment((1, 0), (0, 1)))
print(classify_semidirect(HomVector(((1,), (-1,)))).name)
