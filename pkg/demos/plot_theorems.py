"""
Sectional curvature of q-sections
=================================

On a V2 manifold the planes {x, qx}, {qx, q^2 x} and {q^2 x, x} share one
sectional curvature, and the curvature of {u, qu} depends on u only through
the angle phi between u and qu.  The cyclic example (A, B functions of
X1 + X2 + X3) is V2, so both statements can be seen numerically.
"""

import numpy as np

from geomq import load_spec
from geomq.sectional import monotonicity_scan, theorem1_check, theorem2_check

metric = load_spec("cyclic-example").metric()
p = (0.1, 0.2, -0.3)

rep = theorem1_check(metric, p, (1.0, 0.3, -0.2))
print("three q-section curvatures:", rep.mu)
print("angle phi:", rep.phi)

rng = np.random.default_rng(0)
worst = 0.0
for _ in range(200):
    t2 = theorem2_check(metric, p, rng.normal(size=3))
    worst = max(worst, t2.residuals["mu_r2"])
print("angle formula, worst relative error over 200 vectors:", worst)

# mu(u, qu) against phi, binned.
scan = monotonicity_scan(metric, p, samples=2000, bins=10)
for phi, mu, count in scan.table:
    print(f"phi={phi:.3f}  mu={mu: .6f}  n={count}")
print("direction:", scan.direction)
