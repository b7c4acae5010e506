"""
Where a constant entropy density breaks the area bound
======================================================

A ball of radius R in flat 3-space holding entropy at density sigma0 has
S = sigma0 * 4/3 pi R^3, while its boundary only allows Area/4 = pi R^2.
The two cross at R = 3 / (4 sigma0).
"""

import numpy as np

from holoparabolic import ModelManifold
from holoparabolic.entropy_bound import ConstantDensity, check_bound, check_volume_floor

space = ModelManifold.euclidean(3)

# scan a few densities; the product R* sigma0 should not move
for sigma0 in (0.1, 0.5, 1.0, 2.0, 10.0):
    rep = check_bound(ConstantDensity(sigma0), space, 0.01 / sigma0, 20.0 / sigma0)
    print(f"sigma0 = {sigma0:5.1f}   R* = {rep.first_violation:.12f}   R* sigma0 = {rep.first_violation * sigma0:.15f}")

###############################################################################
# In the plane the crossing is at 1/(2 sigma0), and in 5-space at 5/(4 sigma0).

for n in (2, 5):
    rep = check_bound(ConstantDensity(1.0), ModelManifold.euclidean(n), 0.1, 2.0)
    print(f"n = {n}: R* = {rep.first_violation:.15f}")

###############################################################################
# Integrating 4 sigma0 <= Area/Vol gives Vol(B_R) >= exp(4 sigma0 R) up to the
# integration constant.  The literal floor fails near R = 0 on any manifold,
# so the report shows both forms.  The profile sinh(2r)/2 has Area/Vol -> 4.

wide = ModelManifold(3, "sinh(2*r)/2")
radii = np.linspace(0.5, 8.0, 16)
floor = check_volume_floor(wide, 0.9, radii)
print("\n    R        Vol      exp(3.6 R)  literal  differential")
for R, V, F, lit, diff in zip(floor.radii, floor.volume, floor.floor, floor.holds_floor, floor.holds_differential):
    print(f"{R:5.2f} {V:11.4g} {F:11.4g}   {str(lit):7s}  {diff}")
print("literal floor holds from R =", floor.crossover)
