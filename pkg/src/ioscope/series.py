"""Time-series container, smoothing operators, and basic sample statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InvalidArgument

__all__ = [
    "TimeSeries",
    "ScaleField",
    "smooth",
    "smoothing_field",
    "deseasonalize_weekly",
    "sample_stats",
]


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled real-valued sequence.

    ``step`` is the sampling interval in abstract ticks (default one day);
    ``origin`` is an optional start timestamp carried as metadata only.
    """

    values: np.ndarray
    step: float = 1.0
    origin: Optional[str] = None
    label: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise InvalidArgument("series must be a non-empty 1-D sequence")
        if not np.all(np.isfinite(v)):
            raise InvalidArgument("series contains NaN or infinite samples")
        if not (self.step > 0):
            raise InvalidArgument("step must be positive")
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.values.size) * self.step

    def with_values(self, values: np.ndarray, label: Optional[str] = None,
                    allow_undefined: bool = False) -> "TimeSeries":
        if not allow_undefined:
            return TimeSeries(values, step=self.step, origin=self.origin,
                              label=self.label if label is None else label)
        return TimeSeries._with_undefined(
            values, step=self.step, origin=self.origin,
            label=self.label if label is None else label)

    @classmethod
    def _with_undefined(cls, values: np.ndarray, step: float = 1.0,
                        origin: Optional[str] = None,
                        label: str = "") -> "TimeSeries":
        """Build a series whose NaN samples mark undefined positions.

        Reserved for operator outputs (centered smoothing windows); user
        input still goes through the strict constructor.
        """
        v = np.asarray(values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise InvalidArgument("series must be a non-empty 1-D sequence")
        if np.any(np.isinf(v)):
            raise InvalidArgument("series contains infinite samples")
        if not (step > 0):
            raise InvalidArgument("step must be positive")
        obj = object.__new__(cls)
        object.__setattr__(obj, "values", v)
        object.__setattr__(obj, "step", float(step))
        object.__setattr__(obj, "origin", origin)
        object.__setattr__(obj, "label", label)
        return obj


@dataclass
class ScaleField:
    """Real or complex matrix indexed by (scale/parameter, location).

    ``mask`` is True where a cell is defined. ``kind`` tags the producing
    operation (smoothing | cwt | scalogram | deltaL | corr-diagram |
    coherence | crwt | gabor | diffmod | ratiomod | phase-diff).
    """

    rows: np.ndarray
    cols: np.ndarray
    cells: np.ndarray
    mask: np.ndarray = field(default=None)
    kind: str = ""

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=float)
        self.cols = np.asarray(self.cols, dtype=float)
        self.cells = np.asarray(self.cells)
        if self.mask is None:
            self.mask = np.ones(self.cells.shape, dtype=bool)
        else:
            self.mask = np.asarray(self.mask, dtype=bool)
        if np.any(np.diff(self.rows) <= 0):
            raise InvalidArgument("field rows must be strictly increasing")
        if np.any(np.diff(self.cols) <= 0):
            raise InvalidArgument("field cols must be strictly increasing")
        if self.cells.shape != (self.rows.size, self.cols.size):
            raise InvalidArgument("cell matrix shape does not match axes")
        if self.mask.shape != self.cells.shape:
            raise InvalidArgument("mask shape does not match cells")

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.cells)

    def same_grid(self, other: "ScaleField") -> bool:
        return (self.rows.size == other.rows.size
                and self.cols.size == other.cols.size
                and np.allclose(self.rows, other.rows)
                and np.allclose(self.cols, other.cols))


def _sma(x: np.ndarray, w: int) -> tuple[np.ndarray, np.ndarray]:
    """Centered simple moving average; returns (values, defined-mask)."""
    T = x.size
    out = np.full(T, np.nan)
    mask = np.zeros(T, dtype=bool)
    kernel = np.ones(w) / w
    valid = np.convolve(x, kernel, mode="valid")  # length T - w + 1
    # value for window starting at i sits at its center i + floor(w/2)
    centers = np.arange(T - w + 1) + w // 2
    out[centers] = valid
    mask[centers] = True
    return out, mask


def _wma(x: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w = weights.size
    T = x.size
    out = np.full(T, np.nan)
    mask = np.zeros(T, dtype=bool)
    # weights apply as a_i * x_{t-i}: index runs backwards over the window
    valid = np.convolve(x, weights, mode="valid")
    centers = np.arange(T - w + 1) + w // 2
    out[centers] = valid
    mask[centers] = True
    return out, mask


def _ewma(x: np.ndarray, alpha: float) -> np.ndarray:
    y = np.empty_like(x)
    y[0] = x[0]
    for t in range(1, x.size):
        y[t] = alpha * x[t] + (1.0 - alpha) * y[t - 1]
    return y


def smooth(series: TimeSeries, method: str,
           param: Union[int, float, Sequence[float]]) -> TimeSeries:
    """Smooth a series by SMA, WMA, or exponential weighting.

    SMA/WMA output is centered: the window average is written at the
    window's middle sample and edge positions where the full window does
    not fit are NaN. EWMA keeps the full length with y0 = x0.
    """
    x = series.values
    T = x.size
    if method == "sma":
        w = int(param)
        if w < 1:
            raise InvalidArgument("window width must be >= 1")
        if w > T:
            raise InvalidArgument(f"window {w} larger than series length {T}")
        out, _ = _sma(x, w)
        return series.with_values(out, allow_undefined=True)
    if method == "wma":
        weights = np.asarray(param, dtype=float)
        if weights.ndim != 1 or weights.size < 1:
            raise InvalidArgument("WMA weights must be a non-empty vector")
        if weights.size > T:
            raise InvalidArgument("weight vector longer than series")
        if abs(weights.sum() - 1.0) > 1e-9:
            raise InvalidArgument("WMA weights must sum to 1")
        out, _ = _wma(x, weights)
        return series.with_values(out, allow_undefined=True)
    if method == "ewma":
        alpha = float(param)
        if not (0.0 < alpha <= 1.0):
            raise InvalidArgument("EWMA coefficient must lie in (0, 1]")
        return series.with_values(_ewma(x, alpha))
    raise InvalidArgument(f"unknown smoothing method {method!r}")


def smoothing_field(series: TimeSeries, method: str,
                    param_grid: Sequence) -> ScaleField:
    """Stack smoothed versions of one series over a parameter grid."""
    grid = list(param_grid)
    if not grid:
        raise InvalidArgument("parameter grid must be non-empty")
    rows = []
    masks = []
    for p in grid:
        sm = smooth(series, method, p)
        rows.append(sm.values)
        masks.append(np.isfinite(sm.values))
    cells = np.vstack(rows)
    mask = np.vstack(masks)
    cells = np.where(mask, cells, np.nan)
    return ScaleField(rows=np.asarray(grid, dtype=float),
                      cols=series.times, cells=cells, mask=mask,
                      kind="smoothing")


def deseasonalize_weekly(series: TimeSeries) -> TimeSeries:
    """Remove the weekly period by a centered 7-sample moving average."""
    if len(series) < 7:
        raise InvalidArgument("series shorter than one week")
    return smooth(series, "sma", 7)


def sample_stats(series: TimeSeries) -> tuple[float, float]:
    """Sample mean and biased sample variance (divisor T)."""
    x = series.values
    mean = float(x.mean())
    var = float(np.mean((x - mean) ** 2))
    return mean, var
