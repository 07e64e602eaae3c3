import csv
import json

import numpy as np
import pytest

from tickcopula.cli import main, parse_margin, read_paired_csv, write_paired_csv
from tickcopula import InvalidParameter, pair_ticks
from tickcopula.market_data import load_ticks

from conftest import poisson_ticks


def run(args):
    return main([str(a) for a in args])


@pytest.fixture
def sim_prefix(tmp_path):
    prefix = tmp_path / "sim"
    rc = run(
        ["simulate", "--family", "gaussian", "--param", "0.6", "--n1", "400",
         "--n2", "400", "--seed", "9", "--out", prefix]
    )
    assert rc == 0
    return prefix


class TestSimulateCommand:
    def test_writes_ticks_and_truth(self, sim_prefix):
        a = load_ticks(f"{sim_prefix}_a.csv")
        b = load_ticks(f"{sim_prefix}_b.csv")
        assert len(a) == 400 and len(b) == 400
        truth = json.loads((sim_prefix.parent / "sim_truth.json").read_text())
        assert truth["family"] == "gaussian"
        assert truth["param"] == 0.6
        assert truth["meta"]["seed"] == 9
        assert truth["meta"]["rng"] == "numpy-PCG64"

    def test_reproducible_across_runs(self, tmp_path):
        for name in ("r1", "r2"):
            rc = run(["simulate", "--family", "clayton", "--tau", "0.4", "--n1", "100",
                      "--n2", "100", "--seed", "3", "--out", tmp_path / name])
            assert rc == 0
        assert (tmp_path / "r1_a.csv").read_bytes() == (tmp_path / "r2_a.csv").read_bytes()
        assert (tmp_path / "r1_b.csv").read_bytes() == (tmp_path / "r2_b.csv").read_bytes()

    def test_tau_param_exclusivity_error(self, tmp_path, capsys):
        rc = run(["simulate", "--family", "gaussian", "--n1", "50", "--n2", "50",
                  "--out", tmp_path / "x"])
        assert rc == 1
        err = json.loads(capsys.readouterr().err)
        assert err["error"] == "InvalidParameter"


class TestPairCommand:
    def test_pair_and_estimate_pipeline(self, sim_prefix, tmp_path, capsys):
        paired_path = tmp_path / "paired.csv"
        rc = run(["pair", f"{sim_prefix}_a.csv", f"{sim_prefix}_b.csv",
                  "--scheme", "a0", "--out", paired_path])
        assert rc == 0
        rc = run(["estimate", "--paired", paired_path, "--method", "corrected-corr",
                  "--level", "0.95"])
        assert rc == 0
        report = json.loads(capsys.readouterr().out)
        assert report["method"] == "corrected-corr"
        assert -1.0 <= report["point"] <= 1.0
        d = report["diagnostics"]
        assert d["w"] >= 1.0
        assert report["interval"]["lo"] <= report["point"] <= report["interval"]["hi"]
        assert 0 <= d["loss1"] < 1

    def test_paired_csv_round_trip(self, tmp_path, rng):
        a = poisson_ticks(rng, 1.0, 150)
        b = poisson_ticks(rng, 1.0, 150)
        p = pair_ticks(a, b)
        path = tmp_path / "p.csv"
        write_paired_csv(path, p, {"seed": 1})
        back = read_paired_csv(path)
        assert np.array_equal(back.t1, p.t1)
        assert np.array_equal(back.x, p.x)
        assert back.scheme == p.scheme
        assert back.n_raw1 == p.n_raw1 == 150

    def test_prev_tick_requires_delta(self, sim_prefix, tmp_path, capsys):
        rc = run(["pair", f"{sim_prefix}_a.csv", f"{sim_prefix}_b.csv",
                  "--scheme", "prev-tick", "--out", tmp_path / "p.csv"])
        assert rc == 1
        assert "delta" in capsys.readouterr().err

    def test_refresh_scheme_stamps_collapse(self, sim_prefix, tmp_path):
        path = tmp_path / "r.csv"
        rc = run(["pair", f"{sim_prefix}_a.csv", f"{sim_prefix}_b.csv",
                  "--scheme", "refresh", "--out", path])
        assert rc == 0
        back = read_paired_csv(path)
        assert np.array_equal(back.t1, back.t2)


class TestTheoryCommand:
    def test_equal_rates_json(self, capsys):
        rc = run(["theory", "--lambda1", "1", "--lambda2", "1"])
        assert rc == 0
        out = json.loads(capsys.readouterr().out)
        assert out["gamma"] == pytest.approx(0.75, abs=1e-10)
        assert out["expected_overlap"] == pytest.approx(2.0, abs=1e-10)

    def test_usage_error_exit_code(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run(["theory", "--lambda1", "1"])
        assert exc.value.code == 2


class TestKendallAndSelection:
    def test_kendall_estimate(self, sim_prefix, tmp_path, capsys):
        paired_path = tmp_path / "paired.csv"
        run(["pair", f"{sim_prefix}_a.csv", f"{sim_prefix}_b.csv", "--out", paired_path])
        rc = run(["estimate", "--paired", paired_path, "--method", "kendall"])
        assert rc == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["basis"] == "all-pairs"
        assert -1 <= rep["point"] <= 1

    def test_select_copula_table(self, sim_prefix, tmp_path, capsys):
        paired_path = tmp_path / "paired.csv"
        run(["pair", f"{sim_prefix}_a.csv", f"{sim_prefix}_b.csv", "--out", paired_path])
        rc = run(["select-copula", "--paired", paired_path, "--t-df", "8"])
        assert rc == 0
        lines = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
        reader = csv.DictReader(lines)
        rows = list(reader)
        assert {r["family"] for r in rows} == {"gaussian", "student_t", "clayton", "gumbel"}
        aics = [float(r["aic"]) for r in rows]
        assert aics == sorted(aics)

    def test_plugin_eval_grid(self, sim_prefix, tmp_path, capsys):
        paired_path = tmp_path / "paired.csv"
        run(["pair", f"{sim_prefix}_a.csv", f"{sim_prefix}_b.csv", "--out", paired_path])
        rc = run(["plugin-eval", "--paired", paired_path, "--family", "gaussian",
                  "--param", "0.6", "--r1=-0.5,0,0.5", "--r2=-0.5,0.5"])
        assert rc == 0
        lines = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
        rows = list(csv.DictReader(lines))
        assert len(rows) == 6
        vals = np.array([float(r["value"]) for r in rows])
        assert ((0 <= vals) & (vals <= 1)).all()


class TestCalibrateIntervals:
    def test_calibrate_then_intervals(self, tmp_path, capsys):
        curve_path = tmp_path / "curve.json"
        rc = run(["calibrate", "--family", "clayton", "--k", "6", "--n-rep", "50",
                  "--n-ticks", "150", "--grid-lo", "0.05", "--grid-hi", "0.6",
                  "--seed", "4", "--out", curve_path])
        assert rc == 0
        capsys.readouterr()
        rc = run(["intervals", "--method", "quad", "--curve", curve_path,
                  "--tau-hat", "0.2", "--level", "0.95"])
        assert rc == 0
        iv = json.loads(capsys.readouterr().out)
        assert iv["lo"] <= iv["point"] <= iv["hi"]
        rc = run(["intervals", "--method", "quantile", "--curve", curve_path,
                  "--tau-hat", "0.2"])
        assert rc == 0
        iv2 = json.loads(capsys.readouterr().out)
        assert iv2["method"] == "quantile-inversion"

    def test_elliptical_interval_needs_paired(self, capsys):
        rc = run(["intervals", "--method", "elliptical", "--level", "0.9"])
        assert rc == 1
        assert "paired" in capsys.readouterr().err

    def test_elliptical_interval(self, sim_prefix, tmp_path, capsys):
        paired_path = tmp_path / "paired.csv"
        run(["pair", f"{sim_prefix}_a.csv", f"{sim_prefix}_b.csv", "--out", paired_path])
        rc = run(["intervals", "--method", "elliptical", "--paired", paired_path])
        assert rc == 0
        iv = json.loads(capsys.readouterr().out)
        assert iv["method"] == "misspecified-elliptical"


class TestReproduceCommand:
    def test_structure_of_table1(self, tmp_path):
        out = tmp_path / "t1.csv"
        rc = run(["reproduce", "table1", "--n-rep", "3", "--seed", "0", "--out", out])
        assert rc == 0
        text = out.read_text().splitlines()
        meta = [l for l in text if l.startswith("#")]
        assert any("seed=0" in l for l in meta)
        assert any("rng=numpy-PCG64" in l for l in meta)
        rows = list(csv.DictReader([l for l in text if not l.startswith("#")]))
        assert len(rows) == 12  # 4 rho values x 3 sizes
        assert set(rows[0]) == {
            "rho", "n", "prev_tick_mean", "prev_tick_sd", "refresh_mean",
            "refresh_sd", "corrected_mean", "corrected_sd",
        }

    def test_unknown_table_rejected(self):
        with pytest.raises(SystemExit) as exc:
            run(["reproduce", "table9"])
        assert exc.value.code == 2


class TestParseMargin:
    def test_normal_default_and_parametrized(self):
        m = parse_margin("normal")
        assert m.ppf(0.5) == pytest.approx(0.0)
        m2 = parse_margin("normal:1,2")
        assert m2.ppf(0.5) == pytest.approx(1.0)

    def test_student_t(self):
        m = parse_margin("t:5")
        assert m.ppf(0.5) == pytest.approx(0.0)

    def test_rejects_bad_specs(self):
        for bad in ("t", "t:1.5", "normal:1", "cauchy"):
            with pytest.raises(InvalidParameter):
                parse_margin(bad)
