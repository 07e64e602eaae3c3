"""Synchronization schemes for two nonsynchronous tick series.

Three schemes are provided:

``pair_ticks``
    Matches ticks across the two assets while *retaining their original
    transaction times*. The matched timestamps coincide with those produced
    by refresh-time sampling, so no interpolation or uprooting takes place;
    each pair is made of one actual tick of each asset.
``pair_refresh_time``
    Classic refresh-time synchronization: same price pairs as
    ``pair_ticks`` but both members are stamped at the refresh time, as if
    observed simultaneously.
``pair_previous_tick``
    Fixed grid of width ``delta``; each grid point samples the last tick of
    each asset at or before it. Pairs that repeat both ticks are collapsed;
    pairs repeating a single tick are kept (their return is zero), which is
    what makes this scheme degrade fastest at high sampling frequency.

``diagnostics`` computes the per-pair overlap intervals, the four-way
ordering configuration of consecutive pairs, interarrival means and the
fraction of raw ticks lost to the synchronization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePairing, InsufficientData, InvalidParameter, NoOverlap
from .market_data import TickSeries

SCHEME_PAIRED = "a0"
SCHEME_REFRESH = "refresh"
SCHEME_PREV_TICK = "prev-tick"


@dataclass(frozen=True)
class PairedSeries:
    """n synchronized pairs of (timestamp, log-price) for two assets.

    ``t1``/``x`` belong to the first asset, ``t2``/``y`` to the second.
    ``n_raw1``/``n_raw2`` record the tick counts of the source series so the
    data-loss fraction stays computable after pairing.
    """

    t1: np.ndarray
    x: np.ndarray
    t2: np.ndarray
    y: np.ndarray
    scheme: str
    n_raw1: int
    n_raw2: int
    delta: float | None = None

    def __post_init__(self):
        t1 = np.asarray(self.t1, dtype=float)
        t2 = np.asarray(self.t2, dtype=float)
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if not (t1.shape == t2.shape == x.shape == y.shape) or t1.ndim != 1:
            raise InvalidParameter("paired arrays must be 1-d and equally long")
        if t1.size == 0:
            raise InsufficientData("empty pairing")
        # prev-tick may legitimately repeat a tick; backward jumps are never valid
        if (np.diff(t1) < 0).any() or (np.diff(t2) < 0).any():
            raise InvalidParameter("paired timestamps must be nondecreasing")
        object.__setattr__(self, "t1", t1)
        object.__setattr__(self, "t2", t2)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return self.t1.size

    def returns(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-asset log-returns between consecutive pairs (length n-1)."""
        return np.diff(self.x), np.diff(self.y)


@dataclass(frozen=True)
class PairDiagnostics:
    """Overlap intervals, configurations and interarrival summaries.

    ``overlaps[i]`` is the time span common to the two interarrivals behind
    return pair ``i+1``; ``configs[i]`` labels the ordering of the four
    timestamps involved (1..4). ``loss1``/``loss2`` are the fractions of raw
    ticks of each asset that ended up in no pair.
    """

    overlaps: np.ndarray
    configs: np.ndarray
    m1: float
    m2: float
    m_overlap: float
    loss1: float
    loss2: float

    @property
    def w(self) -> float:
        """Empirical correction factor sqrt(m1*m2)/m_overlap."""
        return float(np.sqrt(self.m1 * self.m2) / self.m_overlap)


def _check_overlap(a: TickSeries, b: TickSeries) -> None:
    if a.times[0] > b.times[-1] or b.times[0] > a.times[-1]:
        raise NoOverlap(
            f"time supports are disjoint: [{a.times[0]}, {a.times[-1]}] vs "
            f"[{b.times[0]}, {b.times[-1]}]"
        )


def _paired_indices(t1: np.ndarray, t2: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs of the tick-retaining scheme.

    Walks both series once. Each round the later of the two pending ticks
    closes a pair; the other asset contributes its last tick not after that
    time. Equal timestamps are paired together.
    """
    n1, n2 = t1.size, t2.size
    out1: list[int] = []
    out2: list[int] = []
    i = j = 0
    while i < n1 and j < n2:
        v = max(t1[i], t2[j])
        while i + 1 < n1 and t1[i + 1] <= v:
            i += 1
        while j + 1 < n2 and t2[j + 1] <= v:
            j += 1
        out1.append(i)
        out2.append(j)
        i += 1
        j += 1
    return np.asarray(out1, dtype=np.intp), np.asarray(out2, dtype=np.intp)


def pair_ticks(a: TickSeries, b: TickSeries) -> PairedSeries:
    """Pair the two series keeping original transaction times.

    The pair timestamps are exactly the refresh-time sample points'
    previous ticks, so the price pairs agree with refresh-time sampling
    while the per-asset timestamps stay strictly increasing actual ticks.

    Raises
    ------
    NoOverlap
        If the series' time supports are disjoint.
    """
    _check_overlap(a, b)
    i1, i2 = _paired_indices(a.times, b.times)
    return PairedSeries(
        t1=a.times[i1],
        x=a.log_prices[i1],
        t2=b.times[i2],
        y=b.log_prices[i2],
        scheme=SCHEME_PAIRED,
        n_raw1=len(a),
        n_raw2=len(b),
    )


def pair_refresh_time(a: TickSeries, b: TickSeries) -> PairedSeries:
    """Refresh-time synchronization: both assets stamped at the refresh time.

    Price pairs are identical to :func:`pair_ticks`; the timestamps are the
    refresh times themselves, which is what a correlation estimator sees when
    it treats the sample as genuinely synchronous.
    """
    _check_overlap(a, b)
    i1, i2 = _paired_indices(a.times, b.times)
    v = np.maximum(a.times[i1], b.times[i2])
    return PairedSeries(
        t1=v,
        x=a.log_prices[i1],
        t2=v.copy(),
        y=b.log_prices[i2],
        scheme=SCHEME_REFRESH,
        n_raw1=len(a),
        n_raw2=len(b),
    )


def pair_previous_tick(a: TickSeries, b: TickSeries, delta: float) -> PairedSeries:
    """Previous-tick synchronization on the fixed grid ``delta, 2*delta, ...``.

    Grid points before either asset has traded are skipped. Consecutive grid
    points sampling the same two ticks are collapsed; if only one asset moved
    the pair is kept and contributes a zero return for the stale asset. If
    ``delta`` exceeds the whole session a single pair of last ticks results.
    """
    if not np.isfinite(delta) or delta <= 0:
        raise InvalidParameter(f"delta must be positive, got {delta}")
    _check_overlap(a, b)
    end = max(a.times[-1], b.times[-1])
    grid = np.arange(delta, end * (1 + 1e-12), delta)
    if grid.size == 0:
        grid = np.array([end])
    i1 = np.searchsorted(a.times, grid, side="right") - 1
    i2 = np.searchsorted(b.times, grid, side="right") - 1
    ok = (i1 >= 0) & (i2 >= 0)
    i1, i2 = i1[ok], i2[ok]
    if i1.size == 0:
        raise NoOverlap("no grid point has an eligible tick in both assets")
    keep = np.ones(i1.size, dtype=bool)
    keep[1:] = (np.diff(i1) != 0) | (np.diff(i2) != 0)
    i1, i2 = i1[keep], i2[keep]
    return PairedSeries(
        t1=a.times[i1],
        x=a.log_prices[i1],
        t2=b.times[i2],
        y=b.log_prices[i2],
        scheme=SCHEME_PREV_TICK,
        n_raw1=len(a),
        n_raw2=len(b),
        delta=float(delta),
    )


def overlap_intervals(p: PairedSeries) -> np.ndarray:
    """Per-pair overlap intervals min(t1_i, t2_i) - max(t1_{i-1}, t2_{i-1})."""
    return np.minimum(p.t1[1:], p.t2[1:]) - np.maximum(p.t1[:-1], p.t2[:-1])


def configuration_labels(p: PairedSeries) -> np.ndarray:
    """Four-way ordering label of each consecutive pair of pairs.

    The label is determined by which asset's tick comes later at the start
    and at the end of the overlap:

    ========  ==========================  =========================
    label     start of overlap            end of overlap
    ========  ==========================  =========================
    1         asset 2 later               asset 2 earlier
    2         asset 1 later               asset 2 earlier
    3         asset 2 later               asset 1 earlier
    4         asset 1 later               asset 1 earlier
    ========  ==========================  =========================

    Label 1 means asset 2's interarrival sits inside asset 1's, label 4 the
    reverse, labels 2 and 3 the two staggered arrangements. Timestamp ties
    resolve to label 1 deterministically (they have probability zero under
    continuous arrival models).
    """
    s_prev = p.t1[:-1] - p.t2[:-1]
    s_cur = p.t1[1:] - p.t2[1:]
    start_asset1_later = s_prev > 0  # ties -> asset 2 treated as later
    end_asset1_earlier = s_cur < 0  # ties -> asset 2 treated as earlier
    labels = np.ones(s_prev.size, dtype=np.int64)
    labels[start_asset1_later & ~end_asset1_earlier] = 2
    labels[~start_asset1_later & end_asset1_earlier] = 3
    labels[start_asset1_later & end_asset1_earlier] = 4
    return labels


def diagnostics(p: PairedSeries) -> PairDiagnostics:
    """Overlaps, configurations, interarrival means and loss fractions.

    Raises
    ------
    DegeneratePairing
        If any overlap interval is non-positive (e.g. previous-tick output
        with repeated ticks).
    InsufficientData
        If fewer than two pairs are available.
    """
    if len(p) < 2:
        raise InsufficientData("diagnostics need at least 2 pairs")
    overlaps = overlap_intervals(p)
    if (overlaps <= 0).any():
        bad = int(np.argmax(overlaps <= 0)) + 1
        raise DegeneratePairing(f"non-positive overlap at pair {bad}")
    configs = configuration_labels(p)
    m1 = float(np.diff(p.t1).mean())
    m2 = float(np.diff(p.t2).mean())
    m_overlap = float(overlaps.mean())
    loss1 = 1.0 - np.unique(p.t1).size / p.n_raw1
    loss2 = 1.0 - np.unique(p.t2).size / p.n_raw2
    return PairDiagnostics(
        overlaps=overlaps,
        configs=configs,
        m1=m1,
        m2=m2,
        m_overlap=m_overlap,
        loss1=float(loss1),
        loss2=float(loss2),
    )
