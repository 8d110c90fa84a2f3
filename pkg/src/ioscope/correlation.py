"""Cross-covariance/correlation, autocorrelation, and pattern-correlation fields."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateVariance, InvalidArgument
from .series import ScaleField, TimeSeries

__all__ = [
    "LagCurve",
    "cross_covariance",
    "cross_correlation",
    "autocorrelation",
    "pattern_correlation_field",
]


@dataclass(frozen=True)
class LagCurve:
    """Per-lag correlation (or covariance) estimates with an optional
    scalar standard-error band."""

    lags: np.ndarray
    values: np.ndarray
    se_band: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "lags", np.asarray(self.lags, dtype=int))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.lags.size != self.values.size:
            raise InvalidArgument("lags and values length mismatch")

    @property
    def argmax_lag(self) -> int:
        return int(self.lags[int(np.argmax(self.values))])


def _gamma_xy(x: np.ndarray, y: np.ndarray, k: int) -> float:
    """Lag-k cross-covariance estimate with divisor T (as printed)."""
    T = x.size
    xm, ym = x.mean(), y.mean()
    if k >= 0:
        return float(np.sum((x[: T - k] - xm) * (y[k:] - ym)) / T)
    return _gamma_xy(y, x, -k)


def cross_covariance(x: TimeSeries, y: TimeSeries, max_lag: int) -> LagCurve:
    xs, ys = x.values, y.values
    if xs.size != ys.size:
        raise InvalidArgument("series length mismatch")
    if not (0 <= max_lag < xs.size):
        raise InvalidArgument("max_lag must satisfy 0 <= max_lag < T")
    lags = np.arange(-max_lag, max_lag + 1)
    vals = np.array([_gamma_xy(xs, ys, int(k)) for k in lags])
    return LagCurve(lags, vals)


def cross_correlation(x: TimeSeries, y: TimeSeries, max_lag: int,
                      normalization: str = "geometric") -> LagCurve:
    """Cross-correlation over lags -max_lag..max_lag.

    ``normalization="geometric"`` divides by sqrt(var(x) var(y)) so the
    estimates stay in [-1, 1]. ``"self"`` divides by the lag-0
    cross-covariance (the literal printed estimator), which does not
    bound the result.
    """
    xs, ys = x.values, y.values
    if xs.size != ys.size:
        raise InvalidArgument("series length mismatch")
    if np.ptp(xs) == 0 or np.ptp(ys) == 0:
        raise DegenerateVariance("constant series has no correlation")
    cov = cross_covariance(x, y, max_lag)
    if normalization == "geometric":
        gxx = _gamma_xy(xs, xs, 0)
        gyy = _gamma_xy(ys, ys, 0)
        denom = np.sqrt(gxx * gyy)
    elif normalization == "self":
        denom = _gamma_xy(xs, ys, 0)
        if denom == 0:
            raise DegenerateVariance("zero lag-0 cross-covariance")
    else:
        raise InvalidArgument(f"unknown normalization {normalization!r}")
    return LagCurve(cov.lags, cov.values / denom)


def autocorrelation(x: TimeSeries, max_lag: Optional[int] = None) -> LagCurve:
    """Autocorrelation with default lag range T/4 and the 1/sqrt(T) band."""
    xs = x.values
    T = xs.size
    if T < 8:
        raise InvalidArgument("series too short for autocorrelation")
    if max_lag is None:
        max_lag = T // 4
    if not (0 <= max_lag < T):
        raise InvalidArgument("max_lag must satisfy 0 <= max_lag < T")
    if np.ptp(xs) == 0:
        raise DegenerateVariance("constant series has no autocorrelation")
    g0 = _gamma_xy(xs, xs, 0)
    lags = np.arange(0, max_lag + 1)
    vals = np.array([_gamma_xy(xs, xs, int(k)) for k in lags]) / g0
    return LagCurve(lags, vals, se_band=1.0 / np.sqrt(T))


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    am = a - a.mean()
    bm = b - b.mean()
    na = np.sqrt(np.sum(am * am))
    nb = np.sqrt(np.sum(bm * bm))
    if na == 0 or nb == 0:
        return np.nan
    return float(np.sum(am * bm) / (na * nb))


def pattern_correlation_field(x: TimeSeries, pattern,
                              k_range: Sequence[int]) -> ScaleField:
    """Correlation C(l, k) between series windows and a pattern resampled
    to each window length k.

    Cells are undefined where the window overruns the series or either
    side is constant. ``pattern`` is a Template from the templates module
    (anything with a ``samples`` attribute and resample support works).
    """
    from .templates import resample_template

    ks = [int(k) for k in k_range]
    if not ks:
        raise InvalidArgument("empty window-length range")
    if sorted(set(ks)) != ks:
        ks = sorted(set(ks))
    T = len(x)
    xs = x.values
    cells = np.full((len(ks), T), np.nan)
    mask = np.zeros((len(ks), T), dtype=bool)
    for r, k in enumerate(ks):
        if k < 3:
            raise InvalidArgument("window length must be >= 3")
        if k > T:
            continue
        p = resample_template(pattern, k).samples
        pm = p - p.mean()
        npnorm = np.sqrt(np.sum(pm * pm))
        if npnorm == 0:
            continue
        win = np.lib.stride_tricks.sliding_window_view(xs, k)
        wc = win - win.mean(axis=1, keepdims=True)
        wnorm = np.sqrt(np.sum(wc * wc, axis=1))
        dot = wc @ pm
        denom = wnorm * npnorm
        with np.errstate(invalid="ignore", divide="ignore"):
            corr = np.where(denom > 0, dot / denom, np.nan)
        starts = np.arange(T - k + 1)
        cells[r, starts] = corr
        mask[r, starts] = np.isfinite(corr)
    cells = np.where(mask, cells, np.nan)
    return ScaleField(rows=np.asarray(ks, dtype=float),
                      cols=np.arange(T, dtype=float),
                      cells=cells, mask=mask, kind="corr-diagram")
