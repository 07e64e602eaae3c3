"""Bivariate copula families: CDF, density, sampling, tau maps and fitting.

Four families are supported: Gaussian and Student-t (elliptical,
parametrized by a correlation ``rho``), Clayton (``theta > 0``) and Gumbel
(``theta >= 1``). Each family exposes Kendall's tau as a closed-form,
strictly increasing function of its parameter, so one-dimensional fitting
works on the tau scale with plain bracketing.

The module also houses rank-based pseudo-observations, AIC model selection
by pseudo-likelihood, empirical margins and the plug-in copula that combines
empirical margins with a fitted parameter into an evaluable joint CDF on
return space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize, special, stats

from .errors import FitFailure, InsufficientData, InvalidParameter

FAMILIES = ("gaussian", "student_t", "clayton", "gumbel")

_TAU_EPS = 1e-4  # smallest |tau| used when bracketing fits


@dataclass(frozen=True)
class CopulaModel:
    """A copula family plus its dependence parameter.

    ``param`` is the correlation for the elliptical families and the
    generator parameter for the Archimedean ones. ``df`` is the Student-t
    degrees of freedom (integer >= 3) and ignored elsewhere.
    """

    family: str
    param: float
    df: int | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidParameter(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        p = float(self.param)
        if self.family in ("gaussian", "student_t"):
            if not -1.0 < p < 1.0:
                raise InvalidParameter(f"{self.family} correlation must lie in (-1, 1), got {p}")
        elif self.family == "clayton":
            if not p > 0:
                raise InvalidParameter(f"clayton theta must be positive, got {p}")
        elif self.family == "gumbel":
            if not p >= 1.0:
                raise InvalidParameter(f"gumbel theta must be >= 1, got {p}")
        if self.family == "student_t":
            if self.df is None or int(self.df) < 3:
                raise InvalidParameter("student_t needs integer df >= 3")
            object.__setattr__(self, "df", int(self.df))
        object.__setattr__(self, "param", p)

    @property
    def n_params(self) -> int:
        return 1


def tau_of(model: CopulaModel) -> float:
    """Kendall's tau implied by the model parameter.

    Elliptical: ``(2/pi) * arcsin(rho)``. Clayton: ``theta/(theta+2)``.
    Gumbel: ``1 - 1/theta``. The Archimedean values are the closed forms of
    the generator integral ``1 + 4*int phi/phi'``.
    """
    p = model.param
    if model.family in ("gaussian", "student_t"):
        return float(2.0 / math.pi * math.asin(p))
    if model.family == "clayton":
        return float(p / (p + 2.0))
    return float(1.0 - 1.0 / p)


def param_of_tau(family: str, tau: float, df: int | None = None) -> CopulaModel:
    """Exact inverse of :func:`tau_of` within each family.

    Raises :class:`InvalidParameter` when ``tau`` is outside the family's
    attainable range (Clayton and Gumbel cover positive dependence only).
    """
    if family in ("gaussian", "student_t"):
        if not -1.0 < tau < 1.0:
            raise InvalidParameter(f"elliptical tau must lie in (-1, 1), got {tau}")
        return CopulaModel(family, math.sin(math.pi * tau / 2.0), df=df)
    if family == "clayton":
        if not 0.0 < tau < 1.0:
            raise InvalidParameter(f"clayton tau must lie in (0, 1), got {tau}")
        return CopulaModel(family, 2.0 * tau / (1.0 - tau))
    if family == "gumbel":
        if not 0.0 <= tau < 1.0:
            raise InvalidParameter(f"gumbel tau must lie in [0, 1), got {tau}")
        return CopulaModel(family, 1.0 / (1.0 - tau))
    raise InvalidParameter(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# CDFs


def _bvn_cdf(h, k, rho: float) -> np.ndarray:
    """Bivariate standard normal CDF via Owen's T function."""
    h = np.asarray(h, dtype=float)
    k = np.asarray(k, dtype=float)
    if abs(rho) < 1e-14:
        return stats.norm.cdf(h) * stats.norm.cdf(k)
    r = math.sqrt(1.0 - rho * rho)
    eps = 1e-300
    hh = np.where(np.abs(h) < eps, eps, h)
    kk = np.where(np.abs(k) < eps, eps, k)
    with np.errstate(invalid="ignore", divide="ignore"):
        ah = (kk - rho * hh) / (hh * r)
        ak = (hh - rho * kk) / (kk * r)
        t1 = special.owens_t(hh, ah)
        t2 = special.owens_t(kk, ak)
    # infinite arguments contribute no Owen term
    t1 = np.where(np.isfinite(h), t1, 0.0)
    t2 = np.where(np.isfinite(k), t2, 0.0)
    hk = h * k
    adj = np.where((hk > 0) | ((hk == 0) & (h + k >= 0)), 0.0, 0.5)
    out = 0.5 * (stats.norm.cdf(h) + stats.norm.cdf(k)) - t1 - t2 - adj
    return np.clip(out, 0.0, 1.0)


def cdf(model: CopulaModel, u, v) -> np.ndarray:
    """Copula CDF C(u, v), vectorized, grounded at the boundaries."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    u, v = np.broadcast_arrays(u, v)
    if (u < 0).any() or (u > 1).any() or (v < 0).any() or (v > 1).any():
        raise InvalidParameter("copula arguments must lie in [0, 1]")
    out = np.zeros(u.shape, dtype=float)
    interior = (u > 0) & (v > 0)
    # C is 1-Lipschitz in each argument, so clipping costs at most 1e-15
    ui = np.clip(np.where(interior, u, 0.5), 1e-15, 1.0 - 1e-15)
    vi = np.clip(np.where(interior, v, 0.5), 1e-15, 1.0 - 1e-15)
    if model.family == "gaussian":
        val = _bvn_cdf(stats.norm.ppf(ui), stats.norm.ppf(vi), model.param)
    elif model.family == "student_t":
        val = _student_t_cdf(ui, vi, model.param, model.df)
    elif model.family == "clayton":
        th = model.param
        with np.errstate(over="ignore"):
            val = (ui**-th + vi**-th - 1.0) ** (-1.0 / th)
        val = np.where(np.isfinite(val), val, 0.0)
    else:  # gumbel
        th = model.param
        lu = -np.log(ui)
        lv = -np.log(vi)
        val = np.exp(-((lu**th + lv**th) ** (1.0 / th)))
    out[interior] = val[interior]
    # exact upper boundaries: C(u, 1) = u, C(1, v) = v
    out = np.where(u >= 1.0, v, out)
    out = np.where(v >= 1.0, np.where(u >= 1.0, 1.0, u), out)
    out = np.where((u <= 0.0) | (v <= 0.0), 0.0, out)
    return out if out.ndim else float(out)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(160)
_GL_P = 0.5 * (_GL_NODES + 1.0)  # nodes mapped onto (0, 1)
_GL_W = 0.5 * _GL_WEIGHTS


def _student_t_cdf(u, v, rho: float, df: int) -> np.ndarray:
    """Bivariate t CDF as a deterministic scale mixture of normal CDFs.

    With W ~ chi2(df)/df, (T1, T2) = (Z1, Z2)/sqrt(W), so
    P(T1<=x, T2<=y) = E[Phi2(x*sqrt(W), y*sqrt(W); rho)]; the expectation is
    taken by Gauss-Legendre quadrature in the probability scale of W, which
    keeps every call reproducible (no Monte Carlo integration).
    """
    x = stats.t.ppf(u, df)
    y = stats.t.ppf(v, df)
    w_quant = stats.chi2.ppf(_GL_P, df) / df  # quantiles of the mixing variable
    sq = np.sqrt(w_quant)
    xs = x[..., None] * sq
    ys = y[..., None] * sq
    vals = _bvn_cdf(xs, ys, rho) @ _GL_W
    return vals


# ---------------------------------------------------------------------------
# densities


def log_pdf(model: CopulaModel, u, v) -> np.ndarray:
    """Log copula density, vectorized over points strictly inside (0,1)^2."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if (u <= 0).any() or (u >= 1).any() or (v <= 0).any() or (v >= 1).any():
        raise InvalidParameter("density requires arguments strictly inside (0, 1)")
    if model.family == "gaussian":
        rho = model.param
        x = stats.norm.ppf(u)
        y = stats.norm.ppf(v)
        om = 1.0 - rho * rho
        return -0.5 * math.log(om) - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * om)
    if model.family == "student_t":
        rho, df = model.param, model.df
        x = stats.t.ppf(u, df)
        y = stats.t.ppf(v, df)
        om = 1.0 - rho * rho
        q = (x * x - 2.0 * rho * x * y + y * y) / om
        const = (
            special.gammaln((df + 2.0) / 2.0)
            + special.gammaln(df / 2.0)
            - 2.0 * special.gammaln((df + 1.0) / 2.0)
            - 0.5 * math.log(om)
        )
        return (
            const
            - (df + 2.0) / 2.0 * np.log1p(q / df)
            + (df + 1.0) / 2.0 * (np.log1p(x * x / df) + np.log1p(y * y / df))
        )
    if model.family == "clayton":
        th = model.param
        log_u = np.log(u)
        log_v = np.log(v)
        # log(u^-th + v^-th - 1) in log space; safe for large th
        big = np.logaddexp(-th * log_u, -th * log_v)
        log_s = big + np.log1p(-np.exp(-big))
        return math.log1p(th) - (th + 1.0) * (log_u + log_v) - (2.0 + 1.0 / th) * log_s
    # gumbel
    th = model.param
    lu = -np.log(u)
    lv = -np.log(v)
    log_w = np.logaddexp(th * np.log(lu), th * np.log(lv))
    a = np.exp(log_w / th)
    return (
        -a
        + lu
        + lv
        + (th - 1.0) * (np.log(lu) + np.log(lv))
        + (1.0 / th - 2.0) * log_w
        + np.log(a + th - 1.0)
    )


def pdf(model: CopulaModel, u, v) -> np.ndarray:
    """Copula density c(u, v)."""
    return np.exp(log_pdf(model, u, v))


# ---------------------------------------------------------------------------
# sampling


def _positive_stable(alpha: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Positive alpha-stable draws with Laplace transform exp(-t**alpha)."""
    v = rng.uniform(0.0, math.pi, n)
    w = rng.standard_exponential(n)
    return (np.sin(alpha * v) / np.sin(v) ** (1.0 / alpha)) * (
        np.sin((1.0 - alpha) * v) / w
    ) ** ((1.0 - alpha) / alpha)


def sample_uniform(model: CopulaModel, n: int, rng: np.random.Generator) -> np.ndarray:
    """n draws (U, V) from the copula as an (n, 2) array."""
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    if model.family in ("gaussian", "student_t"):
        rho = model.param
        g = rng.standard_normal((n, 2))
        z1 = g[:, 0]
        z2 = rho * g[:, 0] + math.sqrt(1.0 - rho * rho) * g[:, 1]
        if model.family == "gaussian":
            return np.column_stack([stats.norm.cdf(z1), stats.norm.cdf(z2)])
        scale = np.sqrt(rng.chisquare(model.df, n) / model.df)
        return np.column_stack(
            [stats.t.cdf(z1 / scale, model.df), stats.t.cdf(z2 / scale, model.df)]
        )
    if model.family == "clayton":
        th = model.param
        frailty = rng.gamma(1.0 / th, 1.0, n)
        e = rng.standard_exponential((n, 2))
        return (1.0 + e / frailty[:, None]) ** (-1.0 / th)
    # gumbel: positive-stable frailty
    th = model.param
    if th == 1.0:
        return rng.random((n, 2))
    frailty = _positive_stable(1.0 / th, n, rng)
    e = rng.standard_exponential((n, 2))
    return np.exp(-((e / frailty[:, None]) ** (1.0 / th)))


def sample(
    model: CopulaModel,
    n: int,
    *,
    margins: Sequence | None = None,
    seed=None,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """n bivariate draws from the copula with optional margins applied.

    ``margins`` is a pair of objects exposing ``ppf`` (e.g. frozen scipy
    distributions) or plain quantile callables; ``None`` returns the
    uniform pair. Output is deterministic for a fixed ``seed``.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    uv = sample_uniform(model, n, rng)
    if margins is None:
        return uv
    if len(margins) != 2:
        raise InvalidParameter("margins must be a pair")
    cols = []
    for m, col in zip(margins, uv.T):
        q = m.ppf if hasattr(m, "ppf") else m
        cols.append(np.asarray(q(col), dtype=float))
    return np.column_stack(cols)


# ---------------------------------------------------------------------------
# pseudo-observations and fitting


def pseudo_observations(x, y) -> np.ndarray:
    """Rank-transform two samples into (0,1)^2 using rank/(n+1) scaling."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidParameter("x and y must be 1-d arrays of equal length")
    n = x.size
    u = stats.rankdata(x, method="average") / (n + 1.0)
    v = stats.rankdata(y, method="average") / (n + 1.0)
    return np.column_stack([u, v])


@dataclass(frozen=True)
class CopulaFit:
    """One family's pseudo-likelihood fit."""

    model: CopulaModel
    loglik: float
    aic: float
    n_params: int
    boundary: bool


def _tau_bracket(family: str) -> tuple[float, float]:
    if family in ("gaussian", "student_t"):
        return (-1.0 + 1e-3, 1.0 - 1e-3)
    return (_TAU_EPS, 1.0 - 1e-3)


def _neg_loglik_factory(uv: np.ndarray, family: str, df: int | None) -> Callable[[float], float]:
    """Negative pseudo-log-likelihood as a function of tau.

    The marginal quantile transforms do not depend on the parameter, so they
    are computed once per dataset; each evaluation is then plain vector math.
    """
    u, v = uv[:, 0], uv[:, 1]
    n = u.size
    if family in ("gaussian", "student_t"):
        if family == "gaussian":
            x = stats.norm.ppf(u)
            y = stats.norm.ppf(v)
        else:
            x = stats.t.ppf(u, df)
            y = stats.t.ppf(v, df)
        sxx = float(x @ x)
        syy = float(y @ y)
        sxy = float(x @ y)
        if family == "gaussian":

            def neg(tau: float) -> float:
                rho = math.sin(math.pi * tau / 2.0)
                om = 1.0 - rho * rho
                ll = -0.5 * n * math.log(om) - (rho * rho * (sxx + syy) - 2.0 * rho * sxy) / (
                    2.0 * om
                )
                return -ll

        else:
            base = float(
                n
                * (
                    special.gammaln((df + 2.0) / 2.0)
                    + special.gammaln(df / 2.0)
                    - 2.0 * special.gammaln((df + 1.0) / 2.0)
                )
                + (df + 1.0) / 2.0 * np.sum(np.log1p(x * x / df) + np.log1p(y * y / df))
            )
            xx_yy = x * x + y * y
            xy = x * y

            def neg(tau: float) -> float:
                rho = math.sin(math.pi * tau / 2.0)
                om = 1.0 - rho * rho
                q = (xx_yy - 2.0 * rho * xy) / om
                ll = base - 0.5 * n * math.log(om) - (df + 2.0) / 2.0 * float(
                    np.sum(np.log1p(q / df))
                )
                return -ll

    elif family == "clayton":
        log_u = np.log(u)
        log_v = np.log(v)
        sum_logs = float(log_u.sum() + log_v.sum())

        def neg(tau: float) -> float:
            th = 2.0 * tau / (1.0 - tau)
            big = np.logaddexp(-th * log_u, -th * log_v)
            log_s = big + np.log1p(-np.exp(-big))
            ll = (
                n * math.log1p(th)
                - (th + 1.0) * sum_logs
                - (2.0 + 1.0 / th) * float(log_s.sum())
            )
            return -ll

    else:  # gumbel
        llu = np.log(-np.log(u))
        llv = np.log(-np.log(v))
        lu_plus_lv = float(np.sum(-np.log(u) - np.log(v)))
        sum_llogs = float(llu.sum() + llv.sum())

        def neg(tau: float) -> float:
            th = 1.0 / (1.0 - tau)
            log_w = np.logaddexp(th * llu, th * llv)
            a = np.exp(log_w / th)
            ll = (
                float(np.sum(-a + np.log(a + th - 1.0)))
                + lu_plus_lv
                + (th - 1.0) * sum_llogs
                + (1.0 / th - 2.0) * float(log_w.sum())
            )
            return -ll

    def guarded(tau: float) -> float:
        val = neg(tau)
        return val if np.isfinite(val) else np.inf

    return guarded


def _fit_family_tau(
    uv: np.ndarray, family: str, df: int | None
) -> tuple[float, float, bool]:
    """Maximize the copula log-likelihood over tau; returns (tau, loglik, boundary)."""
    lo, hi = _tau_bracket(family)
    neg_loglik = _neg_loglik_factory(uv, family, df)
    res = optimize.minimize_scalar(
        neg_loglik, bounds=(lo, hi), method="bounded", options={"xatol": 1e-6}
    )
    if not np.isfinite(res.fun):
        raise FitFailure(family, "log-likelihood not finite over the bracket")
    tau = float(res.x)
    boundary = (tau - lo) < 1e-4 * (hi - lo) or (hi - tau) < 1e-4 * (hi - lo)
    return tau, -float(res.fun), boundary


def fit_aic(
    uv: np.ndarray,
    families: Sequence[str] = FAMILIES,
    *,
    t_df: int | None = None,
    t_df_grid: Sequence[int] = tuple(range(3, 31)),
) -> list[CopulaFit]:
    """Fit each family by pseudo-likelihood and rank by AIC (ascending).

    ``uv`` holds pseudo-observations in (0,1)^2, at least 30 of them. The
    Student-t degrees of freedom are profiled over ``t_df_grid`` unless
    ``t_df`` pins them, in which case the family counts one parameter
    instead of two. Families whose optimum sits on the bracket boundary are
    flagged rather than dropped; a family whose likelihood cannot be
    evaluated raises :class:`FitFailure` unless another family succeeds.
    """
    uv = np.asarray(uv, dtype=float)
    if uv.ndim != 2 or uv.shape[1] != 2:
        raise InvalidParameter("uv must be an (n, 2) array of pseudo-observations")
    if uv.shape[0] < 30:
        raise InsufficientData(f"need at least 30 pseudo-observations, got {uv.shape[0]}")
    if (uv <= 0).any() or (uv >= 1).any():
        raise InvalidParameter("pseudo-observations must lie strictly inside (0, 1)")

    fits: list[CopulaFit] = []
    failures: list[FitFailure] = []
    for family in families:
        if family not in FAMILIES:
            raise InvalidParameter(f"unknown family {family!r}")
        try:
            if family == "student_t":
                dfs = [int(t_df)] if t_df is not None else [int(d) for d in t_df_grid]
                best = None
                for d in dfs:
                    tau, ll, bnd = _fit_family_tau(uv, family, d)
                    if best is None or ll > best[1]:
                        best = (tau, ll, bnd, d)
                tau, ll, bnd, d = best
                k = 1 if t_df is not None else 2
                model = param_of_tau(family, tau, df=d)
            else:
                tau, ll, bnd = _fit_family_tau(uv, family, None)
                k = 1
                model = param_of_tau(family, tau)
            fits.append(
                CopulaFit(model=model, loglik=ll, aic=2.0 * k - 2.0 * ll, n_params=k, boundary=bnd)
            )
        except FitFailure as exc:
            failures.append(exc)
    if not fits:
        raise FitFailure("all", "; ".join(str(f) for f in failures))
    fits.sort(key=lambda f: f.aic)
    return fits


# ---------------------------------------------------------------------------
# empirical margins and the plug-in copula


@dataclass(frozen=True)
class EmpiricalMargin:
    """Right-continuous ECDF scaled by n/(n+1) so values stay inside (0,1)."""

    sorted_sample: np.ndarray

    def __post_init__(self):
        s = np.sort(np.asarray(self.sorted_sample, dtype=float))
        if s.size < 1 or not np.isfinite(s).all():
            raise InvalidParameter("margin sample must be non-empty and finite")
        object.__setattr__(self, "sorted_sample", s)

    def __len__(self) -> int:
        return self.sorted_sample.size

    def ecdf(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        n = self.sorted_sample.size
        out = np.searchsorted(self.sorted_sample, r, side="right") / (n + 1.0)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class PluginCopula:
    """Fitted copula composed with empirical margins, evaluable on returns."""

    margin1: EmpiricalMargin
    margin2: EmpiricalMargin
    model: CopulaModel

    def evaluate(self, r1, r2) -> np.ndarray:
        """Joint CDF estimate C(F1(r1), F2(r2)) at return-space points."""
        u = self.margin1.ecdf(np.where(np.isneginf(r1), -np.inf, r1))
        v = self.margin2.ecdf(np.where(np.isneginf(r2), -np.inf, r2))
        u = np.where(np.isneginf(r1), 0.0, u)
        v = np.where(np.isneginf(r2), 0.0, v)
        return cdf(self.model, u, v)


def plugin_copula(paired, param: float, family: str, df: int | None = None) -> PluginCopula:
    """Assemble the plug-in copula from paired returns and a fitted parameter.

    The margins are the ECDFs of the two paired return columns; ``param``
    must be admissible for ``family`` (checked by :class:`CopulaModel`).
    """
    rx, ry = paired.returns()
    if rx.size < 1:
        raise InsufficientData("need at least one paired return")
    model = CopulaModel(family, param, df=df)
    return PluginCopula(EmpiricalMargin(rx), EmpiricalMargin(ry), model)
