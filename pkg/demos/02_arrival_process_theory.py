"""Closed-form arrival quantities vs their empirical counterparts.

For independent Poisson tick streams the expected paired interarrivals and
the expected overlap have closed forms built from Beta(1,k) distribution
functions, which reduce to geometric series. This script sums them, checks
the equal-rate analytic values, and compares against measurements on a long
simulated stream.

Note the deliberate contrast printed at the end: the closed-form gamma is
not the same quantity as the empirical correction factor w (which is always
>= 1). Estimator corrections use w; the series values describe the arrival
process itself.
"""

import numpy as np
from scipy import stats

from tickcopula import (
    CopulaModel,
    PoissonPair,
    SimSpec,
    diagnostics,
    estimate_rates,
    pair_ticks,
    pq_terms,
    simulate,
    theory_report,
)

# --- equal rates: everything is analytic -----------------------------------
pp = PoissonPair(1.0, 1.0)
rep = theory_report(pp, tol=1e-12)
print("equal rates lambda1 = lambda2 = 1:")
print(f"  series terms used      : {rep.truncation_n} (tail bound {rep.truncation_error_bound:.2e})")
print(f"  expected overlap       : {rep.expected_overlap:.12f}  (analytic 2)")
print(f"  expected paired dt     : {rep.expected_dt1:.12f}  (analytic 1.5)")
print(f"  gamma                  : {rep.gamma:.12f}  (analytic 0.75)")
p1, q1 = pq_terms(pp, 1)
print(f"  first splitting terms  : p1 = q1 = {p1:.6f} (analytic 0.25)\n")

# --- unequal rates: compare the series with a simulated stream -------------
pp = PoissonPair(1.0, 3.0)
rep = theory_report(pp)
sim = simulate(
    SimSpec(
        model=CopulaModel("gaussian", 0.4),
        margins=(stats.norm(), stats.norm()),
        lambda1=pp.lambda1,
        lambda2=pp.lambda2,
        horizon=200_000.0,
        seed=11,
    )
)
rates = estimate_rates(sim.a, sim.b)
paired = pair_ticks(sim.a, sim.b)
diag = diagnostics(paired)
geo = np.sqrt(rep.expected_dt1 * rep.expected_dt2)
print("unequal rates lambda1 = 1, lambda2 = 3 (200k-second simulated session):")
print(f"  estimated rates        : {rates.lambda1:.3f}, {rates.lambda2:.3f}")
print(f"  series dt1, dt2        : {rep.expected_dt1:.4f}, {rep.expected_dt2:.4f}")
print(f"  geometric mean of those: {geo:.4f}   measured m1 {diag.m1:.4f}, m2 {diag.m2:.4f}")
print(f"  series overlap value   : {rep.expected_overlap:.4f}   measured mean overlap {diag.m_overlap:.4f}")
print(f"  series gamma           : {rep.gamma:.4f}   empirical w {diag.w:.4f}")
print("\nmeasured paired interarrivals are necessarily equal across assets (pairs")
print("advance together); the two series values differ individually but their")
print("geometric mean - the only way they enter gamma - matches the measurement.")
print("the overlap series and hence gamma do not track the sample: corrections")
print("always use the empirical w (>= 1 by construction), never this gamma.")
