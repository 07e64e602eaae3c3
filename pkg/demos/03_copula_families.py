"""Copula families: tau maps, sampling, model selection and the plug-in CDF.

Walks the four supported families through their closed-form Kendall-tau
relations, draws samples to confirm them, then runs AIC selection on
pseudo-observations from paired nonsynchronous returns and assembles the
plug-in joint CDF from empirical margins plus the fitted parameter.
"""

import numpy as np
from scipy import stats

from tickcopula import (
    CopulaModel,
    SimSpec,
    corrected_correlation,
    fit_aic,
    pair_ticks,
    param_of_tau,
    plugin_copula,
    pseudo_observations,
    sample_uniform,
    simulate,
    tau_of,
)

# --- tau <-> parameter maps -------------------------------------------------
print("tau implied by each family's parameter:")
for model in (
    CopulaModel("gaussian", 0.5),
    CopulaModel("student_t", 0.5, df=8),
    CopulaModel("clayton", 2.0),
    CopulaModel("gumbel", 2.0),
):
    tau = tau_of(model)
    uv = sample_uniform(model, 50_000, np.random.default_rng(1))
    emp = stats.kendalltau(uv[:, 0], uv[:, 1]).statistic
    print(f"  {model.family:<10} param {model.param:>4}: tau {tau:.4f}, sampled {emp:.4f}")
print()

# the maps invert exactly
m = param_of_tau("clayton", 0.5)
print(f"param_of_tau('clayton', 0.5) -> theta = {m.param} (tau_of back: {tau_of(m)})\n")

# --- family selection on nonsynchronous data --------------------------------
truth = CopulaModel("clayton", 2.0)
sim = simulate(
    SimSpec(
        model=truth,
        margins=(stats.norm(), stats.norm()),
        lambda1=1.0,
        lambda2=1.0,
        n1=3000,
        n2=3000,
        seed=5,
    )
)
paired = pair_ticks(sim.a, sim.b)
rx, ry = paired.returns()
uv = pseudo_observations(rx, ry)
fits = fit_aic(uv, t_df_grid=(4, 8, 16))
print(f"AIC ranking for data generated from {truth.family}(theta={truth.param}):")
for rank, fit in enumerate(fits, start=1):
    df = f" df={fit.model.df}" if fit.model.df else ""
    print(f"  {rank}. {fit.model.family:<10} param {fit.model.param:7.3f}{df}  "
          f"loglik {fit.loglik:9.2f}  aic {fit.aic:9.2f}")
print("(pairing attenuates and reshapes the dependence, so the fitted parameters")
print(" describe the paired returns, not the generator; on intraday-style paired")
print(" data the t copula often edges out the true family, as here)\n")

# --- plug-in copula ----------------------------------------------------------
# corrected parameter + empirical margins give an evaluable joint CDF
cc = corrected_correlation(paired)
best = fits[0].model
plug = plugin_copula(paired, best.param, best.family, df=best.df)
r1 = np.quantile(rx, [0.25, 0.5, 0.75])
r2 = np.quantile(ry, [0.25, 0.5, 0.75])
print("plug-in joint CDF on return-space quartiles:")
for a in r1:
    row = plug.evaluate(np.full(3, a), r2)
    print("  " + "  ".join(f"C({a:+.5f},{b:+.5f})={v:.3f}" for b, v in zip(r2, row)))
