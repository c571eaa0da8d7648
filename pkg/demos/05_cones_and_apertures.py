# %% [markdown]
# # Difference cones and the √2 inclusion
#
# For planar pairs the directions where one gauge exceeds the other form arcs.
# The descriptive check samples `B1 \ B2` on those arcs and asks whether it lies
# in `√2 (B1 ∩ B2)`; it does for mildly different bodies and fails for
# elongated ones.

# %%
import math

from spectral_balls import verifier
from spectral_balls.geometry import box_polytope, component_apertures, component_diagnostics, cube, unit_disk

square, disk12 = cube(), unit_disk(1.2)
rep = component_apertures(square, disk12)
print("square \\ disk arcs:", [round(a.aperture, 6) for a in rep.b1_minus_b2])
print("analytic:          ", round(2 * (math.pi / 4 - math.acos(5 / 6)), 6))

d = component_diagnostics(square, disk12, rep.b1_minus_b2[0])
print("x' =", d.x_prime.round(4), " x1# =", d.x1_sharp.round(4), " x2# =", d.x2_sharp.round(4))

# %%
for b1, b2, name in ((square, disk12, "square / disk(1.2)"), (box_polytope([10, 0.1]), unit_disk(), "rectangle / disk")):
    r = verifier.check_sqrt2_inclusion(b1, b2)
    labs = r.details["labelings"]
    print(name)
    for k, lab in labs.items():
        print(f"   {k:7s} alpha={lab['alpha']:.3f} {lab['verdict']['status']}  witness={lab['verdict']['witness']}")
