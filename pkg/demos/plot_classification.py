"""
Sorting manifolds into classes
==============================

Each point gets four flags: parallel structure, V1, V2 and flat.
We classify a sample of each built-in manifold and print the fractions.
"""

from geomq import load_spec
from geomq.classification import class_check, classify_region

for name in ("flat", "parallel-example", "cyclic-example", "paper-example"):
    spec = load_spec(name)
    region = classify_region(spec.metric(), spec.sample_box, count=200, seed=0)
    fractions = ", ".join(f"{k}={v:.2f}" for k, v in sorted(region.fractions.items()))
    print(f"{name:18s} {fractions}")

# The worked example fails the V2 test: the off-diagonal components
# R1213 and R1323 differ, which no q-invariant tensor allows.
rep = class_check(load_spec("paper-example").metric(), (1.0, -1.0, -0.5))
print("example residuals:", {k: round(v, 6) for k, v in rep.residuals.items()})
