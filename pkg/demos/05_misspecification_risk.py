"""What goes wrong when a Gaussian copula is forced onto Archimedean data.

A tempting shortcut for interval estimation of Kendall's tau: synchronize
the ticks, compute a correlation confidence interval as if the data were a
Gaussian copula, and map it through tau = (2/pi) arcsin(rho). This script
measures the coverage of that shortcut on Clayton data - it collapses,
which is the argument for the calibration route of demo 04.
"""

import numpy as np
from scipy import stats

from tickcopula import (
    SimSpec,
    interval_misspecified,
    pair_refresh_time,
    param_of_tau,
    simulate,
)

TAU_TRUE = 0.5
N_REP = 100
model = param_of_tau("clayton", TAU_TRUE)
MARGINS = (stats.norm(), stats.norm())

hits = 0
points = []
for rep in range(N_REP):
    sim = simulate(
        SimSpec(model=model, margins=MARGINS, lambda1=1.0, lambda2=1.0,
                n1=350, n2=350, seed=[13, rep])
    )
    # the naive analyst treats refresh-time samples as synchronous data
    refreshed = pair_refresh_time(sim.a, sim.b)
    iv = interval_misspecified(refreshed, level=0.95)
    hits += iv.contains(TAU_TRUE)
    points.append(iv.point)

print(f"clayton data, true tau {TAU_TRUE}, {N_REP} replicates")
print(f"misspecified-Gaussian interval point estimate: mean {np.mean(points):.3f}")
print(f"nominal 95% coverage, realized: {hits / N_REP:.2f}")
print("\nthe intervals center near the attenuated tau and almost never contain the")
print("truth; model misspecification plus asynchronicity compound instead of cancel.")
