# %% [markdown]
# # Gauges, supports and regions
#
# Every body here is a centrally symmetric convex set described by its gauge
# `g(x) = inf{t > 0 : x ∈ tB}`. Regions are built from bodies by intersection,
# translation, scaling and Minkowski averaging, and all of them answer the same
# question: what is the level of a point (≤ 1 means inside)?

# %%
import math

import numpy as np

from spectral_balls.geometry import (Intersect, PBall, Scale, Translate, SymPolytope, boundary_sample,
                                     cube, inclusion_check, minkowski_average, region_gauge,
                                     replay_witness, unit_disk)

disk, square = unit_disk(), cube()
diamond = SymPolytope([[1 / 1.2, 1 / 1.2], [1 / 1.2, -1 / 1.2]])  # |x1| + |x2| <= 1.2

x = np.array([0.9, 0.9])
print("disk gauge     ", disk.gauge(x))
print("square gauge   ", square.gauge(x))
print("intersection   ", region_gauge(Intersect(disk, square), x), "(max of the two)")
print("support of the square along the diagonal:", square.support(np.array([1, 1]) / math.sqrt(2)))

# %% [markdown]
# Translated regions have no gauge about the origin, but membership still works
# through the level function.

# %%
shifted = Intersect(disk, Translate(disk, [1.5, 0.0]))
print("(0.75, 0) inside the lens:", shifted.level(np.array([0.75, 0.0])) <= 1)
print("(0, 0.9) inside the lens: ", shifted.level(np.array([0.0, 0.9])) <= 1)

# %% [markdown]
# ## Minkowski averages
#
# `(1 - λ)A + λB` is represented by its outer polytope: half-spaces
# `<x, u> <= (1 - λ) h_A(u) + λ h_B(u)` over evenly spaced directions. With 720
# directions the average of a disk with itself is a disk to within 1e-3.

# %%
avg = minkowski_average(disk, disk, 0.5, 720)
u = boundary_sample(disk, 1000, seed=1)
print("max |gauge - 1| for avg(disk, disk):", np.abs(avg.gauge(u) - 1).max())
mixed = minkowski_average(square, diamond, 0.5, 720)
print("average of square and diamond has", len(mixed.polytope.normals), "symmetric half-space pairs")

# %% [markdown]
# ## Inclusion by sampling
#
# `inclusion_check(A, B)` tries to refute `A ⊂ B`. A violation comes with a
# witness that can be re-checked on its own.

# %%
v = inclusion_check(Scale(2, disk), disk)
print(v.status.value, "witness", np.round(v.witness, 4), "replays:", replay_witness(disk, v.witness))
print(inclusion_check(square, Scale(math.sqrt(2), disk)).status.value, "(corners touch the circle)")
