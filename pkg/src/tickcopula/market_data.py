"""Tick-data containers, CSV ingestion and log-return computation.

A tick file is a UTF-8 CSV with header ``time,price`` where ``time`` is
seconds since session open (decimal, strictly increasing) and ``price`` is a
positive decimal. Both LF and CRLF line endings are accepted.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, MalformedInput


@dataclass(frozen=True)
class TickSeries:
    """One asset's (time, log-price) sequence.

    Parameters
    ----------
    times : array
        Transaction times in seconds since session open, strictly increasing.
    log_prices : array
        Natural log of the traded price, same length as ``times``.
    asset_id : str
        Opaque label carried through the pipeline.
    """

    times: np.ndarray
    log_prices: np.ndarray
    asset_id: str = ""

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.log_prices, dtype=float)
        if t.ndim != 1 or p.ndim != 1 or t.shape != p.shape:
            raise MalformedInput("times and log_prices must be 1-d arrays of equal length")
        if t.size < 2:
            raise InsufficientData("a tick series needs at least 2 observations")
        if not (np.isfinite(t).all() and np.isfinite(p).all()):
            raise MalformedInput("tick series contains non-finite values")
        if not (np.diff(t) > 0).all():
            raise MalformedInput("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "log_prices", p)

    def __len__(self) -> int:
        return self.times.size

    @property
    def span(self) -> float:
        """Observed time span in seconds."""
        return float(self.times[-1] - self.times[0])

    def head(self, n: int) -> "TickSeries":
        """First ``n`` ticks as a new series (handy for nested-sample studies)."""
        return TickSeries(self.times[:n], self.log_prices[:n], self.asset_id)


@dataclass(frozen=True)
class ReturnSeries:
    """Log-returns over the consecutive interarrivals of a tick series."""

    interval_starts: np.ndarray
    interval_ends: np.ndarray
    returns: np.ndarray
    asset_id: str = ""

    def __post_init__(self):
        s = np.asarray(self.interval_starts, dtype=float)
        e = np.asarray(self.interval_ends, dtype=float)
        r = np.asarray(self.returns, dtype=float)
        if not (s.shape == e.shape == r.shape):
            raise MalformedInput("interval and return arrays must have equal length")
        if not (e > s).all():
            raise MalformedInput("interval_ends must exceed interval_starts")
        object.__setattr__(self, "interval_starts", s)
        object.__setattr__(self, "interval_ends", e)
        object.__setattr__(self, "returns", r)

    def __len__(self) -> int:
        return self.returns.size


def load_ticks(path, asset_id: str = "") -> TickSeries:
    """Read a ``time,price`` CSV into a :class:`TickSeries`.

    Prices are stored as natural logs. Rows must already be in strictly
    increasing time order; a duplicate or backward timestamp raises
    :class:`MalformedInput` naming the offending data row (1-based).
    """
    times: list[float] = []
    prices: list[float] = []
    with open(path, "r", encoding="utf-8-sig", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedInput(f"{path}: empty file") from None
        cols = [c.strip().lower() for c in header]
        if cols[:2] != ["time", "price"]:
            raise MalformedInput(f"{path}: expected header 'time,price', got {header!r}")
        for i, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) < 2:
                raise MalformedInput(f"{path}: row {i}: expected 2 fields")
            try:
                t = float(row[0])
                p = float(row[1])
            except ValueError:
                raise MalformedInput(f"{path}: row {i}: non-numeric field") from None
            if not (np.isfinite(t) and np.isfinite(p)):
                raise MalformedInput(f"{path}: row {i}: non-finite value")
            if p <= 0.0:
                raise MalformedInput(f"{path}: row {i}: non-positive price {p}")
            if times:
                if t == times[-1]:
                    raise MalformedInput(f"{path}: duplicate time at row {i}")
                if t < times[-1]:
                    raise MalformedInput(f"{path}: non-monotone time at row {i}")
            times.append(t)
            prices.append(p)
    if len(times) < 2:
        raise InsufficientData(f"{path}: need at least 2 ticks, found {len(times)}")
    return TickSeries(np.asarray(times), np.log(prices), asset_id=asset_id)


def save_ticks(series: TickSeries, path) -> None:
    """Write a series back to ``time,price`` CSV with 17 significant digits.

    Round-trips bit-for-bit through :func:`load_ticks` up to the exp/log pair
    applied to the price column.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["time", "price"])
        for t, lp in zip(series.times, series.log_prices):
            writer.writerow([f"{t:.17g}", f"{np.exp(lp):.17g}"])


def to_returns(series: TickSeries) -> ReturnSeries:
    """Log-returns over consecutive interarrivals of ``series``."""
    if len(series) < 2:
        raise InsufficientData("need at least 2 ticks to form returns")
    return ReturnSeries(
        interval_starts=series.times[:-1],
        interval_ends=series.times[1:],
        returns=np.diff(series.log_prices),
        asset_id=series.asset_id,
    )
