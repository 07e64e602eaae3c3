import numpy as np
import pytest
from scipy import stats

from tickcopula import (
    CopulaModel,
    DegeneratePairing,
    InsufficientData,
    InvalidParameter,
    PairedSeries,
    corrected_correlation,
    dependence_checks,
    kendall_tau,
    kendall_tau_brute,
    pair_previous_tick,
    pair_ticks,
)

from conftest import poisson_ticks


def paired_from_returns(rx, ry, times=None):
    """Synchronous paired series whose returns are exactly (rx, ry)."""
    rx = np.asarray(rx, dtype=float)
    n = rx.size + 1
    t = np.arange(n, dtype=float) if times is None else np.asarray(times, float)
    x = np.concatenate([[0.0], np.cumsum(rx)])
    y = np.concatenate([[0.0], np.cumsum(ry)])
    return PairedSeries(t1=t, x=x, t2=t, y=y, scheme="a0", n_raw1=n, n_raw2=n)


class TestCorrectedCorrelation:
    def test_synchronous_data_needs_no_correction(self, rng):
        rx = rng.standard_normal(60)
        ry = 0.6 * rx + 0.8 * rng.standard_normal(60)
        p = paired_from_returns(rx, ry)
        cc = corrected_correlation(p)
        assert cc.w == pytest.approx(1.0)
        assert cc.theta_hat == pytest.approx(cc.rho_hat)
        assert not cc.clamped

    def test_zero_correlation_stays_zero(self):
        rx = np.tile([1.0, -1.0, 1.0, -1.0], 4)
        ry = np.tile([1.0, 1.0, -1.0, -1.0], 4)
        p = paired_from_returns(rx, ry)
        cc = corrected_correlation(p)
        assert cc.rho_hat == pytest.approx(0.0, abs=1e-15)
        assert cc.theta_hat == pytest.approx(0.0, abs=1e-15)

    def test_theta_is_w_times_rho_unclamped(self, rng):
        a = poisson_ticks(rng, 1.0, 400)
        b = poisson_ticks(rng, 1.0, 400)
        cc = corrected_correlation(pair_ticks(a, b))
        if not cc.clamped:
            assert cc.theta_hat == pytest.approx(cc.w * cc.rho_hat, rel=1e-12)

    def test_clamping_flag(self):
        # perfectly correlated returns + staggered stamps force w * rho > 1
        rx = np.linspace(0.1, 1.0, 40)
        ry = rx * 2.0
        t1 = np.arange(41, dtype=float)
        t2 = t1 + 0.45  # constant stagger shrinks every overlap to 0.55
        x = np.concatenate([[0.0], np.cumsum(rx)])
        y = np.concatenate([[0.0], np.cumsum(ry)])
        p = PairedSeries(t1=t1, x=x, t2=t2, y=y, scheme="a0", n_raw1=41, n_raw2=41)
        cc = corrected_correlation(p)
        assert cc.w == pytest.approx(1.0 / 0.55, rel=1e-9)
        assert cc.clamped
        assert cc.theta_hat == 1.0

    def test_needs_ten_pairs(self, rng):
        p = paired_from_returns(rng.standard_normal(5), rng.standard_normal(5))
        with pytest.raises(InsufficientData):
            corrected_correlation(p)

    def test_degenerate_pairing_rejected(self, rng):
        a = poisson_ticks(rng, 0.3, 40)
        b = poisson_ticks(rng, 8.0, 800)
        pt = pair_previous_tick(a, b, delta=0.25)
        if (np.diff(pt.t1) == 0).any():
            with pytest.raises(DegeneratePairing):
                corrected_correlation(pt)

    def test_interval_contains_point_and_monotone_in_level(self, rng):
        a = poisson_ticks(rng, 1.0, 600)
        b = poisson_ticks(rng, 1.0, 600)
        p = pair_ticks(a, b)
        ccs = [corrected_correlation(p, level=lv) for lv in (0.5, 0.9, 0.99)]
        for cc in ccs:
            assert cc.ci[0] <= cc.theta_hat <= cc.ci[1]
        widths = [cc.ci[1] - cc.ci[0] for cc in ccs]
        assert widths[0] < widths[1] < widths[2]
        lows = [cc.ci[0] for cc in ccs]
        highs = [cc.ci[1] for cc in ccs]
        assert lows[0] >= lows[1] >= lows[2]
        assert highs[0] <= highs[1] <= highs[2]

    def test_invalid_level(self, rng):
        p = paired_from_returns(rng.standard_normal(20), rng.standard_normal(20))
        with pytest.raises(InvalidParameter):
            corrected_correlation(p, level=1.0)

    def test_correction_never_flips_sign(self, rng):
        # w > 0, so corrected and uncorrected estimates always share a sign;
        # verified over MC replicates at both dependence signs
        from tickcopula import CopulaModel, SimSpec, simulate

        for rho in (0.6, -0.6):
            for s in range(100):
                sim = simulate(
                    SimSpec(
                        model=CopulaModel("gaussian", rho),
                        margins=(stats.norm(), stats.norm()),
                        lambda1=1.0,
                        lambda2=1.0,
                        n1=150,
                        n2=150,
                        seed=[55, s],
                    )
                )
                cc = corrected_correlation(pair_ticks(sim.a, sim.b))
                assert np.sign(cc.theta_hat) == np.sign(cc.rho_hat)


class TestKendallTau:
    def test_perfect_concordance(self):
        p = paired_from_returns(np.arange(1.0, 11.0), np.arange(2.0, 12.0))
        assert kendall_tau(p).tau_hat == 1.0

    def test_one_swapped_rank_pair(self):
        # x ranks 1..4, y ranks 1,2 then 4,3: a single discordant pair of 6
        p = paired_from_returns([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 4.0, 3.5])
        est = kendall_tau(p)
        assert est.tau_hat == pytest.approx(2.0 / 3.0)
        assert est.n_pairs_compared == 6

    def test_fast_path_equals_brute_force(self, rng):
        for trial in range(300):
            n = int(rng.integers(2, 201))
            if rng.random() < 0.5:
                rx = rng.standard_normal(n)
                ry = rng.standard_normal(n)
            else:
                # discrete values force ties in both coordinates
                rx = rng.integers(-3, 4, n).astype(float)
                ry = (0.5 * rx + rng.integers(-2, 3, n)).astype(float)
            sx = np.sign(rx[:, None] - rx[None, :])
            sy = np.sign(ry[:, None] - ry[None, :])
            iu = np.triu_indices(n, k=1)
            untied = ((sx[iu] != 0) & (sy[iu] != 0)).sum()
            if untied == 0:
                continue
            p = paired_from_returns(rx, ry)
            fast = kendall_tau(p)
            assert fast.tau_hat == pytest.approx(kendall_tau_brute(rx, ry), abs=1e-12)
            assert fast.n_pairs_compared == untied

    def test_matches_scipy_on_untied_data(self, rng):
        rx = rng.standard_normal(500)
        ry = 0.5 * rx + rng.standard_normal(500)
        est = kendall_tau(paired_from_returns(rx, ry))
        ref = stats.kendalltau(rx, ry).statistic
        assert est.tau_hat == pytest.approx(ref, abs=1e-12)

    def test_tie_counting(self):
        p = paired_from_returns([1.0, 1.0, 2.0], [1.0, 2.0, 3.0])
        est = kendall_tau(p)
        # pair (0,1) tied in x; remaining two pairs concordant
        assert est.n_tied == 1
        assert est.n_pairs_compared == 2
        assert est.tau_hat == 1.0

    def test_same_config_filters_comparisons(self, rng):
        a = poisson_ticks(rng, 1.0, 800)
        b = poisson_ticks(rng, 1.0, 800)
        p = pair_ticks(a, b)
        full = kendall_tau(p, basis="same-config", configs=(1, 2, 3, 4))
        default = kendall_tau(p, basis="same-config")
        assert default.n_used < full.n_used
        assert full.n_used == len(p) - 1
        allp = kendall_tau(p, basis="all-pairs")
        assert full.n_pairs_compared < allp.n_pairs_compared

    def test_same_config_equals_groupwise_brute_force(self, rng):
        from tickcopula import diagnostics

        a = poisson_ticks(rng, 1.0, 120)
        b = poisson_ticks(rng, 1.3, 150)
        p = pair_ticks(a, b)
        rx, ry = p.returns()
        labels = diagnostics(p).configs
        num = 0
        den = 0
        for c in (1, 4):
            mask = labels == c
            if mask.sum() < 2:
                continue
            sx = np.sign(rx[mask][:, None] - rx[mask][None, :])
            sy = np.sign(ry[mask][:, None] - ry[mask][None, :])
            iu = np.triu_indices(int(mask.sum()), k=1)
            ok = (sx[iu] != 0) & (sy[iu] != 0)
            num += int((sx[iu] * sy[iu])[ok].sum())
            den += int(ok.sum())
        est = kendall_tau(p, basis="same-config")
        assert est.tau_hat == pytest.approx(num / den, abs=1e-12)

    def test_insufficient(self):
        p = paired_from_returns([1.0], [2.0])
        with pytest.raises(InsufficientData):
            kendall_tau(p)


class TestDependenceChecks:
    def test_independence_is_symmetric(self, std_normal_margins):
        rep = dependence_checks(
            4, CopulaModel("gaussian", 0.0), std_normal_margins, 50_000, seed=0
        )
        assert abs(rep.sign_common) <= 3 * rep.sign_common_se
        assert abs(rep.sign_observed) <= 3 * rep.sign_observed_se

    def test_gaussian_common_sign_matches_tau(self, std_normal_margins):
        # with Gaussian margins the common-interval sign product has mean tau
        model = CopulaModel("gaussian", 0.6)
        rep = dependence_checks(4, model, std_normal_margins, 200_000, seed=1)
        from tickcopula import tau_of

        assert rep.sign_common == pytest.approx(tau_of(model), abs=3 * rep.sign_common_se)

    @pytest.mark.parametrize("config", [1, 4])
    def test_conditional_identity_and_shrinkage(self, config, std_normal_margins):
        rep = dependence_checks(
            config, CopulaModel("gaussian", 0.6), std_normal_margins, 100_000, seed=2
        )
        assert abs(rep.conditional_diff) <= 3 * rep.conditional_diff_se
        assert rep.underestimates
        assert rep.same_sign
        assert abs(rep.identity_lhs - rep.identity_rhs) <= 3 * rep.identity_se

    def test_requires_config_one_or_four(self, std_normal_margins):
        with pytest.raises(InvalidParameter):
            dependence_checks(2, CopulaModel("gaussian", 0.5), std_normal_margins, 20_000)

    def test_requires_minimum_draws(self, std_normal_margins):
        with pytest.raises(InvalidParameter):
            dependence_checks(4, CopulaModel("gaussian", 0.5), std_normal_margins, 100)
