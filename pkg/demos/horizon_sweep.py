"""How the bounds grow with the horizon.

Sweeps T over [0.1, 5] for the compound Poisson pair of
demos/compound_poisson_distance.py. The sinh bound explodes like
e^{T L1}/2 while the Hellinger-rate bound saturates at sqrt(8) ~ 2.83,
and the trivial ceiling 2 cuts in between. The Monte Carlo estimate stays
below the best bound at every horizon.
"""

import numpy as np

from addgap.bounds import compute_report
from addgap.measures import CompoundPoissonMeasure, UniformDensity
from addgap.montecarlo import estimate_tv
from addgap.processes import ConstantFunction, ProblemSpec, ProcessSpec

SEED = 2
N_PATHS = 50_000

jumps = UniformDensity(0.0, 1.0)


def pair(horizon):
    return ProblemSpec(
        ProcessSpec(ConstantFunction(1.0), ConstantFunction(0.0), CompoundPoissonMeasure(2.0, jumps)),
        ProcessSpec(ConstantFunction(0.5), ConstantFunction(0.0), CompoundPoissonMeasure(1.0, jumps)),
        horizon=horizon,
    )


print(f"{'T':>5}  {'hellinger':>10}  {'sinh':>10}  {'sqrt':>8}  {'best':>8}  {'estimate':>9}  {'hw':>8}")
for horizon in np.linspace(0.1, 5.0, 11):
    spec = pair(float(horizon))
    report = compute_report(spec)
    tv = estimate_tv(spec, N_PATHS, 0.0, SEED)
    print(
        f"{horizon:5.1f}  {report.thm1:10.4f}  {report.thm2:10.4f}  "
        f"{report.simple_sqrt:8.4f}  {report.best:8.4f}  {tv.mean:9.4f}  {tv.half_width_95:8.4f}"
    )

print()
print("the sinh column is already useless (> 2) beyond T ~ 1.1;")
print("the hellinger column stays informative until it saturates near sqrt(8).")
