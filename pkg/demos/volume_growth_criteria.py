"""
Volume growth, the entropy bound and transience on the built-in catalog
=======================================================================

Run every criterion on each catalog manifold and put the capacity verdict
next to it.  A Transient conclusion should only ever appear next to a
NonParabolic capacity verdict.
"""

from holoparabolic import catalog
from holoparabolic.cli import Scenario
from holoparabolic.parabolicity import (
    capacity_oracle,
    criterion_thm31,
    criterion_thm33,
    saturating_entropy,
)

seen = set()
for raw in catalog.catalog():
    m = Scenario(raw).manifold
    if m is None or (m.n, str(m.sigma)) in seen:
        continue
    seen.add((m.n, str(m.sigma)))
    cap = capacity_oracle(m, 1.0)
    inv_area = criterion_thm33(m, saturating_entropy(m))
    floor = criterion_thm31(m, 1e-4, bound_range=(1.0, 1024.0))
    ric = floor.hypothesis("ricci_nonneg").passed
    print(f"{m.name:20s} n={m.n} sigma={str(m.sigma):14s} capacity={cap.status.value:13s} "
          f"1/Area: {inv_area.conclusion.value:13s} floor 1e-4: {floor.conclusion.value:17s} "
          f"Ric>=0: {ric}", end="")
    print(f"  (bound fails at R = {floor.violation_radius:.6g})" if floor.violation_radius else "")

###############################################################################
# The plane passes the bound on [1, 1024] for sigma0 = 1e-4, yet the volume
# integral int R dR / (pi R^2) diverges, so the bound has to fail further
# out: at R = 1 / (2 sigma0) = 5000.
