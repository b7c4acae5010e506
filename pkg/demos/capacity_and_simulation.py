"""
Recurrence from the capacity integral and from simulated paths
==============================================================

On a model manifold dr^2 + sigma(r)^2 dOmega^2 Brownian motion is transient
exactly when int^inf sigma^(1-n) is finite.  The radial part is a 1-d
diffusion, so the same integral gives the probability of reaching an outer
sphere before an inner one.  Here both are checked against Monte Carlo.
"""

import math

from holoparabolic import ModelManifold
from holoparabolic.brownian_sim import (
    SimConfig,
    escape_probability,
    exact_hitting_probability,
    recurrence_monte_carlo,
    simulate_annulus,
)
from holoparabolic.parabolicity import capacity_oracle

manifolds = [ModelManifold.euclidean(2), ModelManifold.euclidean(3), ModelManifold.hyperbolic(2)]

for m in manifolds:
    cap = capacity_oracle(m, 1.0)
    esc = escape_probability(m, 1.0, 2.0)
    print(f"{m.name:14s} capacity: {cap.status.value:13s} escape from r=2: {esc.verdict} {esc.probability}")

###############################################################################
# A single annulus: start at r = 2, stop at 1 or 3.

m = ModelManifold.euclidean(3)
stats = simulate_annulus(SimConfig(m, 2.0, 1.0, 3.0, dt=1e-4, paths=20_000, seed=1))
exact = exact_hitting_probability(m, 1.0, 2.0, 3.0)
print(f"\nP(hit 3 before 1): simulated {stats.p_outer:.4f} +- {stats.stderr:.4f}, exact {exact}")

###############################################################################
# Pushing the outer sphere away.  In the plane the chance of escaping to b
# before returning to 1 is ln 2 / ln b, which keeps falling; in 3-space it
# settles at 1/2.  Steps grow like r^2 so the wide annuli stay cheap.

for n, bs in ((2, [4.0, 16.0, 256.0]), (3, [4.0, 8.0, 16.0])):
    cfg = SimConfig(ModelManifold.euclidean(n), 2.0, 1.0, bs[-1], dt=1e-3, paths=20_000,
                    seed=2, scale_steps=True)
    rep = recurrence_monte_carlo(cfg, bs)
    print(f"\nn = {n}: verdict {rep.verdict} (capacity says {rep.oracle})")
    for row in rep.rows:
        b = row["b"]
        exact = math.log(2) / math.log(b) if n == 2 else (1 - 1 / 2) / (1 - 1 / b)
        print(f"  b = {b:6.0f}  p_outer = {row['p_outer']:.4f} +- {row['stderr']:.4f}  exact {exact:.4f}")
