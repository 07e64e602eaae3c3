"""Pairing nonsynchronous ticks and correcting the attenuated correlation.

Two assets trade at independent Poisson times, so their returns are never
observed over identical windows. Estimating correlation on naively
synchronized samples shrinks it toward zero; the correction factor
w = sqrt(m1*m2)/m(overlap), computed purely from the paired timestamps,
undoes the shrinkage.
"""

import numpy as np
from scipy import stats

from tickcopula import (
    CopulaModel,
    SimSpec,
    corrected_correlation,
    diagnostics,
    pair_previous_tick,
    pair_refresh_time,
    pair_ticks,
    simulate,
)

RHO_TRUE = 0.8
N_TICKS = 2000

print(f"true correlation: {RHO_TRUE}, {N_TICKS} ticks per asset\n")

sim = simulate(
    SimSpec(
        model=CopulaModel("gaussian", RHO_TRUE),
        margins=(stats.norm(), stats.norm()),
        lambda1=1.0,
        lambda2=1.0,
        n1=N_TICKS,
        n2=N_TICKS,
        seed=7,
    )
)

# The tick-retaining pairing keeps each asset's true transaction times.
paired = pair_ticks(sim.a, sim.b)
diag = diagnostics(paired)
print(f"pairs formed: {len(paired)} (from {N_TICKS} ticks per asset)")
print(f"data loss:    {diag.loss1:.1%} of asset 1, {diag.loss2:.1%} of asset 2")
print(f"mean interarrivals m1={diag.m1:.3f}s m2={diag.m2:.3f}s, mean overlap={diag.m_overlap:.3f}s")
print(f"correction factor w = sqrt(m1*m2)/m_overlap = {diag.w:.3f}\n")

# Three estimates of the same correlation:
cc = corrected_correlation(paired, level=0.95)
refresh = pair_refresh_time(sim.a, sim.b)
rx, ry = refresh.returns()
refresh_est = np.corrcoef(rx, ry)[0, 1]
prev = pair_previous_tick(sim.a, sim.b, delta=2.0)
px, py = prev.returns()
prev_est = np.corrcoef(px, py)[0, 1]

print(f"previous-tick estimate : {prev_est:.4f}   (worst: grid sampling stales prices)")
print(f"refresh-time estimate  : {refresh_est:.4f}   (better, still attenuated)")
print(f"corrected estimate     : {cc.theta_hat:.4f}   (w * rho_hat)")
print(f"95% interval           : [{cc.ci[0]:.4f}, {cc.ci[1]:.4f}]")
print(f"\nthe corrected estimate recovers the true {RHO_TRUE} while the naive ones sit near "
      f"{refresh_est:.2f}; the attenuation ratio matches 1/w = {1 / diag.w:.3f}")
