"""
Hypersurfaces in an expanding universe
======================================

In the spacetime -dt^2 + f(t)^2 g_F, a spacelike hypersurface with mean
curvature H satisfies

    Ric(Y, Y) >= (n-1) h^2 - (log f)'' |grad tau|^2 - n^2 H^2 / 4,   h = f'/f,

once the nonnegative terms are dropped.  The dropped umbilic term is
reported separately, so for a slice t = const the exact value comes back.
"""

import numpy as np

from holoparabolic import ModelManifold
from holoparabolic.grw import (
    GRWSpacetime,
    HypersurfacePointData,
    check_log_concavity,
    pipeline_prop44,
    pipeline_thm43,
    ricci_lower_bound,
    slice_point,
)

de_sitter = GRWSpacetime("exp(t)", 3)
for tau in (0.0, 1.0):
    rb = ricci_lower_bound(de_sitter, slice_point(de_sitter, tau))
    print(f"slice t = {tau}: conservative {rb.conservative:+.3f}, umbilic term {rb.umbilic_exact_extra:+.3f}, "
          f"sum {rb.conservative + rb.umbilic_exact_extra:+.3f}")

###############################################################################
# Maximal hypersurfaces (H = 0) in the matter-dominated scale factor t^(2/3).

eds = GRWSpacetime({"expr": "t^(2/3)", "domain": "(0, inf)"}, 3)
print("\nlog-concave:", check_log_concavity(eds, np.linspace(0.1, 10, 100)).ok)
samples = [HypersurfacePointData(t, 0.0, g) for t, g in ((0.5, 0.3), (1.0, 0.0), (2.0, 1.2))]
for p in samples:
    print(f"  tau = {p.tau}: Ric >= {ricci_lower_bound(eds, p).conservative:.4f}")

rep = pipeline_thm43(eds, samples, ModelManifold.euclidean(3), 1e-4, bound_range=(1.0, 1024.0))
print("density floor 1e-4 on flat 3-space:", rep.conclusion.value)
rep = pipeline_thm43(eds, samples, ModelManifold.euclidean(3), 1.0)
print("density floor 1 on flat 3-space:", rep.conclusion.value, "at R =", rep.violation_radius)

###############################################################################
# Surfaces are parabolic once their Gauss curvature is nonnegative, so no
# positive density floor survives.  On the flat slice of exp(t) over a flat
# surface the violating radius is 1/(2 sigma0).

surface = GRWSpacetime("exp(t)", 2)
for sigma0 in (1.0, 0.01):
    rep = pipeline_prop44(surface, [slice_point(surface, 0.0)], sigma0, m=ModelManifold.euclidean(2))
    print(f"sigma0 = {sigma0}: {rep.conclusion.value} at R = {rep.violation_radius}")
