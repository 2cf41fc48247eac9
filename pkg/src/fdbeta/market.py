"""Price/return ingestion and the derived series used by the Beta metrics.

Drawdown conventions
--------------------
Cumulative returns are uncompounded, ``w_t = r_1 + ... + r_t``, seeded with
``w_0 = 0`` so that a loss on the first step is already a drawdown.  Peak
indices refer to positions in the seeded series ``(w_0, w_1, ..., w_T)``;
index 0 is the seed and ties resolve to the earliest maximizer.  The asset
drawdown over the market's drawdown window sums returns strictly after the
peak, ``dd^i_t = -(r^i_{tau(t)+1} + ... + r^i_t)``, which makes the market's
own asset drawdown coincide with its drawdown.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DataError, DomainError, ShapeError


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Date-indexed table of prices (or returns when ``is_returns``)."""

    dates: np.ndarray
    values: np.ndarray
    tickers: tuple[str, ...]
    dropped: int = 0
    is_returns: bool = False

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape != (dates.size, len(self.tickers)):
            raise ShapeError(f"values shape {values.shape} does not match {dates.size} dates x {len(self.tickers)} tickers")
        if dates.size > 1 and np.any(np.diff(dates) <= np.timedelta64(0, "D")):
            raise DataError("dates must be strictly increasing")
        if not self.is_returns and np.any(values <= 0):
            raise DomainError("prices must be positive")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "tickers", tuple(self.tickers))

    @property
    def T(self) -> int:
        return self.dates.size

    def column(self, ticker: str) -> np.ndarray:
        try:
            return self.values[:, self.tickers.index(ticker)]
        except ValueError:
            raise DataError(f"no column {ticker!r}; have {', '.join(self.tickers)}") from None

    def between(self, start=None, end=None) -> "PriceSeries":
        """Rows with start <= date <= end (either bound optional)."""
        mask = np.ones(self.T, dtype=bool)
        if start is not None:
            mask &= self.dates >= np.datetime64(start, "D")
        if end is not None:
            mask &= self.dates <= np.datetime64(end, "D")
        if not mask.any():
            raise DataError(f"no rows between {start} and {end}")
        return PriceSeries(self.dates[mask], self.values[mask], self.tickers, self.dropped, self.is_returns)


def load_csv(path, returns_input: bool = False, date_column: str = "date") -> PriceSeries:
    """Read ``date,TICKER1,TICKER2,...`` with ISO-8601 dates.

    Rows with an empty cell are dropped and counted in ``dropped``; a cell
    that is present but not a number (or a bad date) raises DataError naming
    the 1-based file line.  Rows are sorted by date.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if len(header) < 2 or header[0].lower() != date_column:
            raise DataError(f"{path}: header must start with '{date_column}' followed by ticker columns")
        tickers = header[1:]
        if len(set(tickers)) != len(tickers):
            raise DataError(f"{path}: duplicate ticker columns")
        dates, rows, dropped = [], [], 0
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"{path}: row {line_no} has {len(row)} fields, expected {len(header)}")
            try:
                day = dt.date.fromisoformat(row[0].strip())
            except ValueError:
                raise DataError(f"{path}: row {line_no}: bad date {row[0]!r}") from None
            cells = [c.strip() for c in row[1:]]
            if any(c == "" or c.lower() in ("na", "nan", "null") for c in cells):
                dropped += 1
                continue
            try:
                vals = [float(c) for c in cells]
            except ValueError:
                raise DataError(f"{path}: row {line_no}: non-numeric value in {cells}") from None
            dates.append(day)
            rows.append(vals)
    if not rows:
        raise DataError(f"{path}: no complete rows after dropping missing values")
    order = np.argsort(np.array(dates, dtype="datetime64[D]"), kind="stable")
    d = np.array(dates, dtype="datetime64[D]")[order]
    if np.any(np.diff(d) == np.timedelta64(0, "D")):
        raise DataError(f"{path}: duplicate dates")
    values = np.array(rows, dtype=float)[order]
    if not returns_input and np.any(values <= 0):
        bad = int(np.argwhere(values <= 0)[0, 0])
        raise DomainError(f"{path}: nonpositive price on {d[bad]}")
    return PriceSeries(d, values, tuple(tickers), dropped, returns_input)


def align(*series: PriceSeries) -> PriceSeries:
    """Inner-join several tables on their dates."""
    if not series:
        raise DataError("nothing to align")
    if len({s.is_returns for s in series}) > 1:
        raise DataError("cannot align prices with returns")
    common = series[0].dates
    for s in series[1:]:
        common = np.intersect1d(common, s.dates)
    if common.size == 0:
        raise DataError("date ranges do not intersect")
    tickers: list[str] = []
    blocks = []
    for s in series:
        idx = np.searchsorted(s.dates, common)
        blocks.append(s.values[idx])
        tickers.extend(s.tickers)
    if len(set(tickers)) != len(tickers):
        raise DataError("duplicate tickers across inputs")
    return PriceSeries(common, np.hstack(blocks), tuple(tickers), sum(s.dropped for s in series), series[0].is_returns)


def to_returns(prices) -> np.ndarray:
    """Simple returns P_t / P_{t-1} - 1 along the first axis."""
    p = np.asarray(prices, dtype=float)
    if p.shape[0] < 2:
        raise ShapeError("need at least two prices")
    if np.any(p <= 0):
        raise DomainError("prices must be positive")
    return p[1:] / p[:-1] - 1.0


def deviations(returns) -> np.ndarray:
    """Mean return minus each observation (columnwise for 2-D input)."""
    r = np.asarray(returns, dtype=float)
    if r.shape[0] < 1:
        raise ShapeError("need at least one observation")
    return r.mean(axis=0) - r


def drawdown_market(returns) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Uncompounded cumulative returns, drawdowns and peak indices.

    Returns ``(w, dd, peaks)`` each of length T; ``peaks[t]`` indexes the
    seeded cumulative series, so 0 means the pre-sample level ``w_0 = 0``.
    """
    r = np.asarray(returns, dtype=float)
    if r.ndim != 1 or r.size < 1:
        raise ShapeError("market returns must be a non-empty vector")
    W = np.concatenate(([0.0], np.cumsum(r)))
    peaks = np.empty(r.size, dtype=int)
    best = 0
    for t in range(1, W.size):
        if W[t] > W[best]:
            best = t
        peaks[t - 1] = best
    w = W[1:]
    dd = W[peaks] - w
    return w, dd, peaks


def drawdown_asset(asset_returns, peaks) -> np.ndarray:
    """Negative asset return accumulated since the market's running peak.

    Works columnwise when ``asset_returns`` is T x I.
    """
    r = np.asarray(asset_returns, dtype=float)
    peaks = np.asarray(peaks, dtype=int)
    if r.shape[0] != peaks.size:
        raise ShapeError(f"{r.shape[0]} returns but {peaks.size} peak indices")
    if peaks.size and (peaks.min() < 0 or np.any(peaks > np.arange(1, peaks.size + 1))):
        raise DataError("peak index out of range")
    zero = np.zeros((1,) + r.shape[1:])
    W = np.concatenate((zero, np.cumsum(r, axis=0)))
    return W[peaks] - W[1:]


@dataclass(frozen=True, eq=False)
class MarketFrame:
    """Aligned asset and market returns plus derived series (all length T)."""

    dates: np.ndarray
    tickers: tuple[str, ...]
    returns: np.ndarray
    market_returns: np.ndarray
    market: str = "market"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        r = np.asarray(self.returns, dtype=float)
        if r.ndim == 1:
            r = r[:, None]
        m = np.asarray(self.market_returns, dtype=float)
        if m.ndim != 1 or r.shape != (m.size, len(self.tickers)):
            raise ShapeError("returns must be T x I matching market_returns and tickers")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(m))):
            raise DataError("non-finite returns")
        object.__setattr__(self, "returns", r)
        object.__setattr__(self, "market_returns", m)
        object.__setattr__(self, "tickers", tuple(self.tickers))

    @property
    def T(self) -> int:
        return self.market_returns.size

    @cached_property
    def losses(self) -> np.ndarray:
        return -self.returns

    @cached_property
    def market_losses(self) -> np.ndarray:
        return -self.market_returns

    @cached_property
    def deviations(self) -> np.ndarray:
        return deviations(self.returns)

    @cached_property
    def market_deviations(self) -> np.ndarray:
        return deviations(self.market_returns)

    @cached_property
    def _market_dd(self):
        return drawdown_market(self.market_returns)

    @property
    def cum_returns(self) -> np.ndarray:
        return self._market_dd[0]

    @property
    def market_drawdowns(self) -> np.ndarray:
        return self._market_dd[1]

    @property
    def peaks(self) -> np.ndarray:
        return self._market_dd[2]

    @cached_property
    def asset_drawdowns(self) -> np.ndarray:
        return drawdown_asset(self.returns, self.peaks)

    def between(self, start=None, end=None) -> "MarketFrame":
        mask = np.ones(self.T, dtype=bool)
        if start is not None:
            mask &= self.dates >= np.datetime64(start, "D")
        if end is not None:
            mask &= self.dates <= np.datetime64(end, "D")
        if not mask.any():
            raise DataError(f"no returns between {start} and {end}")
        return MarketFrame(self.dates[mask], self.tickers, self.returns[mask], self.market_returns[mask], self.market)


def make_frame(series: PriceSeries, market: str, assets=None) -> MarketFrame:
    """Split a table into the market column and asset columns and convert
    prices to returns (dates are those of the return observations)."""
    if market not in series.tickers:
        raise DataError(f"market column {market!r} not found; have {', '.join(series.tickers)}")
    if assets is None:
        assets = [t for t in series.tickers if t != market]
    if not assets:
        raise DataError("no asset columns besides the market")
    cols = [series.tickers.index(t) if t in series.tickers else None for t in assets]
    if None in cols:
        missing = [t for t, c in zip(assets, cols) if c is None]
        raise DataError(f"asset columns not found: {missing}")
    mcol = series.tickers.index(market)
    if series.is_returns:
        R, rm, dates = series.values[:, cols], series.values[:, mcol], series.dates
    else:
        if series.T < 2:
            raise DataError("need at least two price rows")
        R = to_returns(series.values[:, cols])
        rm = to_returns(series.values[:, mcol])
        dates = series.dates[1:]
    return MarketFrame(dates, tuple(assets), R, rm, market, {"dropped": series.dropped})
