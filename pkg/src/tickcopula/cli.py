"""Command-line surface: simulate, pair, estimate, calibrate, reproduce.

Every artifact is CSV (tick data, tables) or JSON (reports, curves). Numeric
artifacts are bit-reproducible for a fixed ``--seed``; each one records the
RNG algorithm and seed in its header so a run can be repeated exactly.
Domain errors exit with status 1 and a machine-readable JSON error on
stderr; usage errors exit with status 2.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np
from scipy import stats

from . import __version__
from .arrival_theory import PoissonPair, theory_report
from .calibration import (
    CorrectionCurve,
    build_curve,
    interval_misspecified,
    interval_quad,
    interval_quantile,
)
from .copulas import (
    FAMILIES,
    CopulaModel,
    fit_aic,
    param_of_tau,
    plugin_copula,
    pseudo_observations,
    tau_of,
)
from .errors import InvalidParameter, TickCopulaError
from .estimators import corrected_correlation, kendall_tau
from .market_data import load_ticks, save_ticks
from .pairing import (
    PairedSeries,
    configuration_labels,
    overlap_intervals,
    pair_previous_tick,
    pair_refresh_time,
    pair_ticks,
)
from .synthesis import SimSpec, simulate
from .tables import coverage_study, gaussian_estimator_study, t_copula_margin_study

_RNG_NAME = "numpy-PCG64"


def _meta(args, **extra) -> dict:
    meta = {"tool": "tickcopula", "version": __version__, "rng": _RNG_NAME}
    if getattr(args, "seed", None) is not None:
        meta["seed"] = args.seed
    meta.update(extra)
    return meta


def _write_json(path, payload: dict) -> None:
    text = json.dumps(payload, indent=2)
    if path in (None, "-"):
        print(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _write_csv(path, fieldnames, rows, meta: dict) -> None:
    def emit(fh):
        for k, v in meta.items():
            fh.write(f"# {k}={v}\n")
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)

    if path in (None, "-"):
        emit(sys.stdout)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            emit(fh)


def parse_margin(text: str):
    """Parse a margin spec: ``normal[:mu,sigma]`` or ``t:df``."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind in ("normal", "n", "gaussian"):
        if rest:
            parts = [float(p) for p in rest.split(",")]
            if len(parts) != 2 or parts[1] <= 0:
                raise InvalidParameter(f"bad normal margin spec {text!r}")
            return stats.norm(parts[0], parts[1])
        return stats.norm(0.0, 1.0)
    if kind in ("t", "student_t", "student-t"):
        if not rest:
            raise InvalidParameter(f"t margin needs degrees of freedom: {text!r}")
        df = float(rest)
        if df <= 2:
            raise InvalidParameter("t margin needs df > 2 for a finite variance")
        return stats.t(df)
    raise InvalidParameter(f"unknown margin spec {text!r}")


def _model_from_args(args) -> CopulaModel:
    if args.tau is not None:
        return param_of_tau(args.family, args.tau, df=args.df)
    if args.param is None:
        raise InvalidParameter("one of --param or --tau is required")
    return CopulaModel(args.family, args.param, df=args.df)


def write_paired_csv(path, paired: PairedSeries, meta: dict) -> None:
    """Columns t1,x,t2,y,overlap,config; the first row has no overlap yet."""
    overlaps = overlap_intervals(paired) if len(paired) >= 2 else np.array([])
    configs = configuration_labels(paired) if len(paired) >= 2 else np.array([])
    meta = dict(meta)
    meta.update(
        scheme=paired.scheme, n_raw1=paired.n_raw1, n_raw2=paired.n_raw2,
        delta=("" if paired.delta is None else paired.delta),
    )
    rows = []
    for i in range(len(paired)):
        rows.append(
            {
                "t1": f"{paired.t1[i]:.17g}",
                "x": f"{paired.x[i]:.17g}",
                "t2": f"{paired.t2[i]:.17g}",
                "y": f"{paired.y[i]:.17g}",
                "overlap": f"{overlaps[i - 1]:.17g}" if i >= 1 else "",
                "config": int(configs[i - 1]) if i >= 1 else "",
            }
        )
    _write_csv(path, ["t1", "x", "t2", "y", "overlap", "config"], rows, meta)


def read_paired_csv(path) -> PairedSeries:
    """Load a paired CSV written by :func:`write_paired_csv`."""
    meta: dict[str, str] = {}
    rows = []
    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        header = None
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                meta[key.strip()] = value.strip()
                continue
            reader = csv.reader([line])
            fields = next(reader)
            if header is None:
                header = [f.strip().lower() for f in fields]
                continue
            if fields and any(f.strip() for f in fields):
                rows.append(fields)
    if header is None or header[:4] != ["t1", "x", "t2", "y"]:
        raise InvalidParameter(f"{path}: expected paired CSV with columns t1,x,t2,y")
    data = np.array([[float(r[i]) for i in range(4)] for r in rows], dtype=float)
    if data.size == 0:
        raise InvalidParameter(f"{path}: no data rows")
    scheme = meta.get("scheme", "a0")
    n1 = int(meta["n_raw1"]) if "n_raw1" in meta else int(np.unique(data[:, 0]).size)
    n2 = int(meta["n_raw2"]) if "n_raw2" in meta else int(np.unique(data[:, 2]).size)
    delta = float(meta["delta"]) if meta.get("delta") else None
    return PairedSeries(
        t1=data[:, 0], x=data[:, 1], t2=data[:, 2], y=data[:, 3],
        scheme=scheme, n_raw1=n1, n_raw2=n2, delta=delta,
    )


# ---------------------------------------------------------------------------
# subcommand implementations


def _cmd_simulate(args) -> int:
    model = _model_from_args(args)
    margins = (parse_margin(args.margin1), parse_margin(args.margin2))
    spec = SimSpec(
        model=model, margins=margins, lambda1=args.lambda1, lambda2=args.lambda2,
        horizon=args.horizon, n1=args.n1, n2=args.n2, seed=args.seed,
    )
    sim = simulate(spec)
    save_ticks(sim.a, f"{args.out}_a.csv")
    save_ticks(sim.b, f"{args.out}_b.csv")
    truth = sim.truth.as_dict()
    truth["meta"] = _meta(args, lambda1=args.lambda1, lambda2=args.lambda2,
                          margin1=args.margin1, margin2=args.margin2)
    _write_json(f"{args.out}_truth.json", truth)
    print(f"wrote {args.out}_a.csv ({len(sim.a)} ticks), {args.out}_b.csv "
          f"({len(sim.b)} ticks), {args.out}_truth.json")
    return 0


def _cmd_pair(args) -> int:
    a = load_ticks(args.ticks_a, asset_id="asset1")
    b = load_ticks(args.ticks_b, asset_id="asset2")
    if args.scheme == "a0":
        paired = pair_ticks(a, b)
    elif args.scheme == "refresh":
        paired = pair_refresh_time(a, b)
    else:
        if args.delta is None:
            raise InvalidParameter("--delta is required for the prev-tick scheme")
        paired = pair_previous_tick(a, b, args.delta)
    write_paired_csv(args.out, paired, _meta(args))
    return 0


def _cmd_theory(args) -> int:
    report = theory_report(PoissonPair(args.lambda1, args.lambda2), tol=args.tol)
    payload = {
        "expected_overlap": report.expected_overlap,
        "expected_dt1": report.expected_dt1,
        "expected_dt2": report.expected_dt2,
        "gamma": report.gamma,
        "truncation_n": report.truncation_n,
        "truncation_error_bound": report.truncation_error_bound,
        "meta": _meta(args, lambda1=args.lambda1, lambda2=args.lambda2, tol=args.tol),
    }
    _write_json(args.out, payload)
    return 0


def _cmd_estimate(args) -> int:
    paired = read_paired_csv(args.paired)
    if args.method == "corrected-corr":
        cc = corrected_correlation(paired, level=args.level)
        payload = {
            "method": "corrected-corr",
            "point": cc.theta_hat,
            "interval": {"lo": cc.ci[0], "hi": cc.ci[1], "level": cc.ci[2]},
            "diagnostics": {
                "rho_uncorrected": cc.rho_hat,
                "w": cc.w,
                "m1": cc.diag.m1,
                "m2": cc.diag.m2,
                "m_overlap": cc.diag.m_overlap,
                "n": cc.n,
                "loss1": cc.diag.loss1,
                "loss2": cc.diag.loss2,
                "clamped": cc.clamped,
            },
        }
    else:
        basis = "same-config" if args.same_config else "all-pairs"
        est = kendall_tau(paired, basis=basis)
        payload = {
            "method": "kendall",
            "point": est.tau_hat,
            "basis": est.basis,
            "n_used": est.n_used,
            "n_pairs_compared": est.n_pairs_compared,
            "n_tied": est.n_tied,
        }
    payload["meta"] = _meta(args, paired=str(args.paired))
    _write_json(args.out, payload)
    return 0


def _cmd_select_copula(args) -> int:
    paired = read_paired_csv(args.paired)
    rx, ry = paired.returns()
    uv = pseudo_observations(rx, ry)
    fits = fit_aic(uv, families=args.families, t_df=args.t_df)
    rows = []
    for rank, fit in enumerate(fits, start=1):
        rows.append(
            {
                "rank": rank,
                "family": fit.model.family,
                "param": f"{fit.model.param:.6g}",
                "df": fit.model.df if fit.model.df is not None else "",
                "tau": f"{tau_of(fit.model):.6g}",
                "loglik": f"{fit.loglik:.6g}",
                "aic": f"{fit.aic:.6g}",
                "n_params": fit.n_params,
                "boundary": int(fit.boundary),
            }
        )
    _write_csv(args.out, list(rows[0].keys()), rows, _meta(args, paired=str(args.paired)))
    return 0


def _cmd_plugin_eval(args) -> int:
    paired = read_paired_csv(args.paired)
    plugin = plugin_copula(paired, args.param, args.family, df=args.df)
    rx, ry = paired.returns()
    if args.r1:
        grid1 = np.array([float(v) for v in args.r1.split(",")])
    else:
        grid1 = np.quantile(rx, np.linspace(0.1, 0.9, 9))
    if args.r2:
        grid2 = np.array([float(v) for v in args.r2.split(",")])
    else:
        grid2 = np.quantile(ry, np.linspace(0.1, 0.9, 9))
    rows = []
    for r1 in grid1:
        vals = plugin.evaluate(np.full_like(grid2, r1), grid2)
        for r2, val in zip(grid2, np.atleast_1d(vals)):
            rows.append({"r1": f"{r1:.10g}", "r2": f"{r2:.10g}", "value": f"{val:.10g}"})
    _write_csv(args.out, ["r1", "r2", "value"], rows,
               _meta(args, family=args.family, param=args.param))
    return 0


def _cmd_calibrate(args) -> int:
    arrival = PoissonPair(args.lambda1, args.lambda2)
    margins = (parse_margin(args.margin1), parse_margin(args.margin2))
    grid = np.linspace(args.grid_lo, args.grid_hi, args.k)
    curve = build_curve(
        args.family, arrival, margins, grid=grid, n_rep=args.n_rep,
        n_ticks=args.n_ticks, seed=args.seed, df=args.df,
    )
    curve.to_json(args.out)
    a, b, c = curve.quad_coeffs
    print(f"wrote {args.out}: fit = {a:.4f} + {b:.4f} tau + {c:.4f} tau^2, "
          f"residual scale {curve.resid_scale:.4f}")
    return 0


def _cmd_intervals(args) -> int:
    if args.method == "elliptical":
        if args.paired is None:
            raise InvalidParameter("--paired is required for the elliptical method")
        iv = interval_misspecified(read_paired_csv(args.paired), level=args.level)
    else:
        if args.curve is None or args.tau_hat is None:
            raise InvalidParameter("--curve and --tau-hat are required for this method")
        curve = CorrectionCurve.from_json(args.curve)
        fn = interval_quad if args.method == "quad" else interval_quantile
        iv = fn(curve, args.tau_hat, level=args.level)
    payload = {
        "method": iv.method,
        "point": iv.point,
        "lo": iv.lo,
        "hi": iv.hi,
        "level": iv.level,
        "meta": _meta(args),
    }
    _write_json(args.out, payload)
    return 0


def _cmd_reproduce(args) -> int:
    if args.table in ("table1", "table2"):
        rows = gaussian_estimator_study(n_rep=args.n_rep, seed=args.seed)
        if args.table == "table1":
            fields = ["rho", "n", "prev_tick_mean", "prev_tick_sd", "refresh_mean",
                      "refresh_sd", "corrected_mean", "corrected_sd"]
        else:
            fields = ["rho", "n", "prev_tick_mse", "refresh_mse", "corrected_mse"]
        out_rows = [{k: row[k] for k in fields} for row in rows]
    elif args.table == "table3":
        rows = t_copula_margin_study(n_rep=args.n_rep, seed=args.seed)
        fields = list(rows[0].keys())
        out_rows = rows
    elif args.table == "coverage":
        rows = coverage_study(n_rep=args.n_rep, seed=args.seed)
        fields = list(rows[0].keys())
        out_rows = rows
    else:  # pragma: no cover - argparse blocks this
        raise InvalidParameter(f"unknown table {args.table!r}")
    _write_csv(args.out, fields, out_rows, _meta(args, table=args.table, n_rep=args.n_rep))
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tickcopula",
        description="Dependence estimation for nonsynchronously observed tick data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a nonsynchronous two-asset sample")
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--param", type=float, help="copula parameter (rho or theta)")
    p.add_argument("--tau", type=float, help="alternatively, Kendall's tau")
    p.add_argument("--df", type=int, help="degrees of freedom (student_t only)")
    p.add_argument("--lambda1", type=float, default=1.0)
    p.add_argument("--lambda2", type=float, default=1.0)
    p.add_argument("--n1", type=int, help="target tick count, asset 1")
    p.add_argument("--n2", type=int, help="target tick count, asset 2")
    p.add_argument("--horizon", type=float, help="session length in seconds")
    p.add_argument("--margin1", default="normal")
    p.add_argument("--margin2", default="normal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("pair", help="synchronize two tick CSVs")
    p.add_argument("ticks_a")
    p.add_argument("ticks_b")
    p.add_argument("--scheme", choices=["a0", "prev-tick", "refresh"], default="a0")
    p.add_argument("--delta", type=float, help="grid width for prev-tick (seconds)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_pair)

    p = sub.add_parser("theory", help="closed-form arrival quantities for Poisson rates")
    p.add_argument("--lambda1", type=float, required=True)
    p.add_argument("--lambda2", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_theory)

    p = sub.add_parser("estimate", help="estimate dependence from a paired CSV")
    p.add_argument("--paired", required=True)
    p.add_argument("--method", choices=["corrected-corr", "kendall"], default="corrected-corr")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--same-config", action="store_true",
                   help="kendall only: compare same-configuration returns")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("select-copula", help="rank copula families by AIC")
    p.add_argument("--paired", required=True)
    p.add_argument("--families", nargs="+", default=list(FAMILIES))
    p.add_argument("--t-df", type=int, help="fix the student_t degrees of freedom")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_select_copula)

    p = sub.add_parser("plugin-eval", help="evaluate the plug-in copula on a grid")
    p.add_argument("--paired", required=True)
    p.add_argument("--family", choices=FAMILIES, required=True)
    p.add_argument("--param", type=float, required=True)
    p.add_argument("--df", type=int)
    p.add_argument("--r1", help="comma-separated return grid, asset 1")
    p.add_argument("--r2", help="comma-separated return grid, asset 2")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_plugin_eval)

    p = sub.add_parser("calibrate", help="build a tau correction curve by simulation")
    p.add_argument("--family", choices=["clayton", "gumbel", "gaussian", "student_t"], required=True)
    p.add_argument("--df", type=int)
    p.add_argument("--k", type=int, default=12, help="grid size")
    p.add_argument("--grid-lo", type=float, default=0.02)
    p.add_argument("--grid-hi", type=float, default=0.75)
    p.add_argument("--n-rep", type=int, default=100)
    p.add_argument("--lambda1", type=float, default=1.0)
    p.add_argument("--lambda2", type=float, default=1.0)
    p.add_argument("--n-ticks", type=int, default=350)
    p.add_argument("--margin1", default="normal")
    p.add_argument("--margin2", default="normal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("intervals", help="interval estimate for the true tau")
    p.add_argument("--method", choices=["quad", "quantile", "elliptical"], required=True)
    p.add_argument("--curve", help="curve JSON (quad/quantile)")
    p.add_argument("--tau-hat", type=float, help="observed uncorrected tau (quad/quantile)")
    p.add_argument("--paired", help="paired CSV (elliptical)")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_intervals)

    p = sub.add_parser("reproduce", help="run a scripted Monte Carlo study")
    p.add_argument("table", choices=["table1", "table2", "table3", "coverage"])
    p.add_argument("--n-rep", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TickCopulaError as exc:
        error = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(error), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
