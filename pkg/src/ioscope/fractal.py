"""Self-similarity estimators: rescaled-range Hurst exponent, local
roughness fields, and three multifractal spectrum pipelines (fluctuation
analysis, modulus-maxima partition functions, wavelet leaders)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (DegenerateSignal, DegenerateVariance, InsufficientScales,
                     InsufficientStructure, InvalidArgument)
from .series import ScaleField, TimeSeries
from .wavelet import cwt, default_scale_grid, get_wavelet

__all__ = [
    "HurstResult",
    "MultifractalResult",
    "Skeleton",
    "hurst_rs",
    "hurst_profile",
    "delta_l_field",
    "mfdfa",
    "find_skeleton",
    "wtmm",
    "wavelet_leaders",
    "brownian",
    "binomial_cascade",
    "binomial_cascade_tau",
]


@dataclass(frozen=True)
class HurstResult:
    exponent: float
    window_sizes: np.ndarray
    rs_values: np.ndarray
    intercept: float

    def __post_init__(self):
        if not np.isfinite(self.exponent):
            raise DegenerateSignal("non-finite Hurst exponent")


def _concave_majorant(q: np.ndarray, tau: np.ndarray) -> np.ndarray:
    """Least concave majorant of the points (q, tau): the upper convex
    hull, evaluated back on the grid. Regression noise makes raw tau
    estimates wobble; the projection restores exact concavity while
    moving values by at most the noise amplitude."""
    idx = [0]
    for i in range(1, q.size):
        while len(idx) >= 2:
            i0, i1 = idx[-2], idx[-1]
            cross = ((q[i1] - q[i0]) * (tau[i] - tau[i0])
                     - (tau[i1] - tau[i0]) * (q[i] - q[i0]))
            if cross >= 0:  # middle point lies on/below the chord: drop it
                idx.pop()
            else:
                break
        idx.append(i)
    return np.interp(q, q[idx], tau[idx])


def _chord_hurst(q: np.ndarray, tau: np.ndarray,
                 h_raw: np.ndarray) -> np.ndarray:
    """Generalized Hurst exponents consistent with the concave tau.

    Off q = 0 these are the chord slopes (tau(q) + 1) / q, which are
    non-increasing for a concave tau through (0, -1); the q = 0 value is
    the raw estimate clamped between its neighbors.
    """
    h = np.array(h_raw, dtype=float)
    nz = q != 0
    h[nz] = (tau[nz] + 1.0) / q[nz]
    zi = np.flatnonzero(~nz)
    for i in zi:
        lo = h[i + 1] if i + 1 < h.size else -np.inf
        hi = h[i - 1] if i > 0 else np.inf
        h[i] = min(max(h[i], lo), hi)
    return np.minimum.accumulate(h)


def _legendre(q: np.ndarray, tau: np.ndarray):
    """Concavify, then alpha = dtau/dq and f = q alpha - tau."""
    tau_c = _concave_majorant(q, tau)
    alpha = np.gradient(tau_c, q)
    return tau_c, alpha, q * alpha - tau_c


@dataclass(frozen=True)
class MultifractalResult:
    """Scaling exponents tau(q) with the Legendre-transformed spectrum."""

    q: np.ndarray
    tau: np.ndarray
    alpha: np.ndarray
    f_alpha: np.ndarray
    h: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("q", "tau", "alpha", "f_alpha"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if arr.shape != self.q.shape:
                raise InvalidArgument("mismatching multifractal arrays")
        if np.any(np.diff(self.tau, 2) > 1e-6):
            raise InvalidArgument("tau estimate is not concave")

    def generalized_hurst(self) -> np.ndarray:
        """h(q) = (tau(q) + 1) / q, undefined (nan) at q = 0."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.q != 0, (self.tau + 1) / self.q, np.nan)


def _loglog_slope(x: np.ndarray, y: np.ndarray) -> Tuple[float, float]:
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept)


def _rs_ladder(n: int, min_window: int, n_scales: int) -> np.ndarray:
    if n < 2 * min_window:
        raise InsufficientScales("series too short for rescaled-range ladder")
    sizes = np.unique(np.geomspace(min_window, n // 2, n_scales).round().astype(int))
    return sizes[sizes >= min_window]


def hurst_rs(x: TimeSeries, min_window: int = 8,
             n_scales: int = 16) -> HurstResult:
    """Rescaled-range Hurst exponent of a series of increments.

    For each window size the series is cut into non-overlapping segments;
    per segment the range of the mean-adjusted cumulative sum is divided
    by the segment standard deviation, and the exponent is the slope of
    log mean(R/S) against log window size.
    """
    vals = np.asarray(x.values, dtype=float)
    if np.ptp(vals) == 0:
        raise DegenerateVariance("constant series has no rescaled range")
    sizes = _rs_ladder(vals.size, min_window, n_scales)
    if sizes.size < 4:
        raise InsufficientScales("need at least 4 window sizes")
    rs = np.empty(sizes.size)
    for i, w in enumerate(sizes):
        nseg = vals.size // w
        seg = vals[: nseg * w].reshape(nseg, w)
        dev = seg - seg.mean(axis=1, keepdims=True)
        walk = np.cumsum(dev, axis=1)
        rng = walk.max(axis=1) - walk.min(axis=1)
        std = seg.std(axis=1)
        ok = std > 0
        if not np.any(ok):
            raise DegenerateSignal("all segments constant at window "
                                   f"size {w}")
        rs[i] = np.mean(rng[ok] / std[ok])
    slope, intercept = _loglog_slope(sizes.astype(float), rs)
    return HurstResult(slope, sizes.astype(float), rs, intercept)


def hurst_profile(x: TimeSeries, min_prefix: int = 32,
                  min_window: int = 8) -> TimeSeries:
    """Hurst exponent of every growing prefix x[:t], t >= min_prefix.

    Prefixes whose ladder degenerates yield nan.
    """
    vals = np.asarray(x.values, dtype=float)
    if vals.size < min_prefix:
        raise InvalidArgument("series shorter than the minimum prefix")
    out = np.full(vals.size, np.nan)
    for t in range(min_prefix, vals.size + 1):
        try:
            out[t - 1] = hurst_rs(x.with_values(vals[:t]),
                                  min_window=min_window).exponent
        except (InsufficientScales, DegenerateSignal, DegenerateVariance):
            pass
    return TimeSeries._with_undefined(
        out, step=x.step, origin=x.origin,
        label=f"hurst({x.label})" if x.label else "hurst")


def delta_l_field(x: TimeSeries, max_window: Optional[int] = None) -> ScaleField:
    """Local linear-trend deviation Delta L(s, l): the RMS residual of a
    least-squares line over the window of length s starting at l."""
    vals = np.asarray(x.values, dtype=float)
    n = vals.size
    if max_window is None:
        max_window = n // 4
    if max_window < 3:
        raise InsufficientScales("series too short for roughness field")
    sizes = np.arange(3, max_window + 1)
    cells = np.zeros((sizes.size, n))
    mask = np.zeros((sizes.size, n), dtype=bool)
    for r, s in enumerate(sizes):
        win = np.lib.stride_tricks.sliding_window_view(vals, s)
        t = np.arange(s, dtype=float)
        tc = t - t.mean()
        denom = float(tc @ tc)
        wc = win - win.mean(axis=1, keepdims=True)
        slope = (wc @ tc) / denom
        resid = wc - slope[:, None] * tc[None, :]
        rms = np.sqrt(np.mean(resid * resid, axis=1))
        centers = np.arange(rms.size) + s // 2  # value sits at window center
        cells[r, centers] = rms
        mask[r, centers] = True
    rows = sizes.astype(float) * x.step
    return ScaleField(rows, x.times, cells, mask=mask, kind="deltaL")


def _mfdfa_scales(n: int) -> np.ndarray:
    smin = max(10, n // 100)
    smax = min(20 * smin, n // 10)
    if smax <= smin:
        raise InsufficientScales("series too short for fluctuation analysis")
    return np.unique(np.geomspace(smin, smax, 100).round().astype(int))


def mfdfa(x: TimeSeries, q: Sequence[float], order: int = 1,
          scales: Optional[Sequence[int]] = None,
          aggregated: bool = False) -> MultifractalResult:
    """Multifractal detrended fluctuation analysis of an increment series.

    The profile is the cumulative sum of the mean-subtracted values; a
    series flagged ``aggregated`` is already a profile and is used as-is.
    Segments of each scale are detrended (both sweep directions) and the
    q-th order fluctuation functions give h(q) by log-log regression,
    with tau(q) = q h(q) - 1 and the spectrum by a numerical Legendre
    transform.
    """
    qs = np.asarray(q, dtype=float)
    if qs.size < 3 or np.any(np.diff(qs) <= 0):
        raise InvalidArgument("q must be increasing with at least 3 values")
    if not np.any(qs == 0):
        raise InvalidArgument("q grid must contain 0")
    vals = np.asarray(x.values, dtype=float)
    n = vals.size
    if np.ptp(vals) == 0:
        raise DegenerateSignal("constant series")
    profile = vals if aggregated else np.cumsum(vals - vals.mean())
    sizes = np.asarray(scales, dtype=int) if scales is not None else _mfdfa_scales(n)
    if sizes.size < 4:
        raise InsufficientScales("need at least 4 scales")
    hq = np.empty(qs.size)
    logF = np.empty((qs.size, sizes.size))
    for j, s in enumerate(sizes):
        ns = n // s
        segs = np.concatenate([
            profile[: ns * s].reshape(ns, s),
            profile[n - ns * s:].reshape(ns, s),
        ])
        t = np.arange(s, dtype=float)
        V = np.vander(t, order + 1)
        coef, *_ = np.linalg.lstsq(V, segs.T, rcond=None)
        resid = segs.T - V @ coef
        f2 = np.mean(resid * resid, axis=0)  # length 2*ns
        f2 = np.maximum(f2, 1e-300)
        for i, qv in enumerate(qs):
            if qv == 0:
                logF[i, j] = 0.5 * np.mean(np.log(f2))
            else:
                logF[i, j] = np.log(np.mean(f2 ** (qv / 2.0))) / qv
    ls = np.log(sizes.astype(float))
    for i in range(qs.size):
        hq[i] = np.polyfit(ls, logF[i], 1)[0]
    tau, alpha, f_alpha = _legendre(qs, qs * hq - 1.0)
    return MultifractalResult(qs, tau, alpha, f_alpha,
                              h=_chord_hurst(qs, tau, hq))


@dataclass(frozen=True)
class Skeleton:
    """Chained modulus-maxima lines of a wavelet transform field."""

    scales: np.ndarray
    lines: Tuple[Tuple[Tuple[int, int], ...], ...]  # each: ((row, col), ...)
    moduli: Tuple[np.ndarray, ...]

    @property
    def n_lines(self) -> int:
        return len(self.lines)


def _modulus_maxima(row: np.ndarray) -> np.ndarray:
    """Indices l with |W(l-1)| < |W(l)| >= |W(l+1)| (or the mirrored
    strictness), the standard plateau-safe local-maximum test."""
    m = row
    left = m[1:-1] > m[:-2]
    right = m[1:-1] >= m[2:]
    left2 = m[1:-1] >= m[:-2]
    right2 = m[1:-1] > m[2:]
    keep = (left & right) | (left2 & right2)
    return np.nonzero(keep)[0] + 1


def find_skeleton(fld: ScaleField, min_length: int = 3) -> Skeleton:
    """Chain modulus maxima across scales into maxima lines.

    Lines start from maxima at the smallest scale and, row by row, link
    to the nearest maximum of the next scale within one scale-width;
    lines spanning fewer than ``min_length`` rows are discarded.
    """
    mod = np.abs(fld.cells)
    step = float(fld.cols[1] - fld.cols[0]) if fld.cols.size > 1 else 1.0
    maxima = [_modulus_maxima(mod[r]) for r in range(fld.rows.size)]
    lines: List[List[Tuple[int, int]]] = [[(0, int(c))] for c in maxima[0]]
    open_lines = list(range(len(lines)))
    for r in range(1, fld.rows.size):
        cand = maxima[r]
        radius = max(1.0, fld.rows[r] / step)
        taken = set()
        still_open = []
        for li in open_lines:
            _, last_c = lines[li][-1]
            if cand.size == 0:
                continue
            j = int(np.argmin(np.abs(cand - last_c)))
            c = int(cand[j])
            if abs(c - last_c) <= radius and c not in taken:
                lines[li].append((r, c))
                taken.add(c)
                still_open.append(li)
        for c in cand:
            if int(c) not in taken:
                lines.append([(r, int(c))])
                still_open.append(len(lines) - 1)
        open_lines = still_open
    kept = [ln for ln in lines if len(ln) >= min_length]
    if not kept:
        raise InsufficientStructure("no maxima lines of the required length")
    moduli = tuple(np.array([mod[r, c] for r, c in ln]) for ln in kept)
    return Skeleton(fld.rows.copy(), tuple(tuple(ln) for ln in kept), moduli)


def _l1_modulus_field(x: TimeSeries, wavelet: str,
                      scales: Optional[Sequence[float]],
                      coi: float = 0.0) -> ScaleField:
    w = get_wavelet(wavelet)
    if scales is None:
        scales = default_scale_grid(x)
    fld = cwt(x, w, scales)
    # renormalize from energy (1/sqrt(s)) to amplitude (1/s) convention so
    # a pure singularity of exponent h scales as s**h along its line
    mod = np.abs(fld.cells) / np.sqrt(fld.rows)[:, None]
    if coi > 0:
        # zero out the cone of influence: cells whose wavelet reaches
        # past either end of the series carry truncated (biased) moduli
        n = fld.cols.size
        for r, sc in enumerate(fld.rows):
            pad = min(n // 2, int(np.ceil(coi * sc / x.step)))
            mod[r, :pad] = 0.0
            mod[r, n - pad:] = 0.0
    return ScaleField(fld.rows, fld.cols, mod, mask=fld.mask, kind="wtmm-mod")


def wtmm(x: TimeSeries, q: Sequence[float], wavelet: str = "mexican-hat",
         scales: Optional[Sequence[float]] = None,
         min_line_length: int = 5, coi: float = 4.0) -> MultifractalResult:
    """Multifractal exponents from wavelet-transform modulus maxima.

    Builds partition functions Z(q, s) over the maxima skeleton with the
    sup-over-finer-scales stabilization and reads tau(q) off the log-log
    slope, then applies the numerical Legendre transform. Maxima inside
    the boundary cone of influence (``coi`` scale-widths from either
    edge) are excluded.
    """
    qs = np.asarray(q, dtype=float)
    if qs.size < 3 or np.any(np.diff(qs) <= 0):
        raise InvalidArgument("q must be increasing with at least 3 values")
    if scales is None:
        n = len(x)
        smax = max(8.0, n / 33.0) * x.step
        scales = np.geomspace(2.0 * x.step, smax, 24)
    fld = _l1_modulus_field(x, wavelet, scales, coi=coi)
    skel = find_skeleton(fld, min_length=min_line_length)
    nr = fld.rows.size
    # per line, the running supremum of the modulus along the line; a line
    # contributes only at the scales it actually crosses
    sup_at_row = np.full((skel.n_lines, nr), np.nan)
    for i, (ln, mods) in enumerate(zip(skel.lines, skel.moduli)):
        running = -np.inf
        k = 0
        for r in range(ln[0][0], ln[-1][0] + 1):
            while k < len(ln) and ln[k][0] <= r:
                running = max(running, mods[k])
                k += 1
            sup_at_row[i, r] = running
    logZ = np.full((qs.size, nr), np.nan)
    counts = np.zeros(nr, dtype=int)
    for r in range(nr):
        col = sup_at_row[:, r]
        col = col[np.isfinite(col) & (col > 0)]
        counts[r] = col.size
        if col.size == 0:
            continue
        lg = np.log(col)
        for i, qv in enumerate(qs):
            m = np.max(qv * lg)
            logZ[i, r] = m + np.log(np.sum(np.exp(qv * lg - m)))
    usable = counts >= 3
    if np.count_nonzero(usable) < 4:
        raise InsufficientStructure("too few scales carry maxima lines")
    ls = np.log(fld.rows[usable])
    tau = np.empty(qs.size)
    for i in range(qs.size):
        tau[i] = np.polyfit(ls, logZ[i, usable], 1)[0]
    tau, alpha, f_alpha = _legendre(qs, tau)
    return MultifractalResult(qs, tau, alpha, f_alpha)


def wavelet_leaders(x: TimeSeries, q: Sequence[float],
                    wavelet: str = "mexican-hat") -> MultifractalResult:
    """Multifractal exponents from wavelet leaders on dyadic scales.

    Leaders are neighborhood maxima of the amplitude-normalized modulus;
    structure functions use the scale-proportional weight s/T and tau(q)
    is the log-log slope minus one.
    """
    qs = np.asarray(q, dtype=float)
    if qs.size < 3 or np.any(np.diff(qs) <= 0):
        raise InvalidArgument("q must be increasing with at least 3 values")
    n = len(x)
    span = n * x.step
    scales = []
    s = 2.0 * x.step
    while s <= span / 8.0:
        scales.append(s)
        s *= 2.0
    if len(scales) < 4:
        raise InsufficientScales("series too short for dyadic leader scales")
    fld = _l1_modulus_field(x, wavelet, scales)
    mod = fld.cells
    tau = np.empty(qs.size)
    logZ = np.empty((qs.size, len(scales)))
    for j, sj in enumerate(scales):
        half = max(1, int(round(sj / x.step)))
        centers = np.arange(half, n - half, max(1, half))
        if centers.size < 2:
            logZ[:, j] = np.nan
            continue
        leaders = np.empty(centers.size)
        rows_upto = slice(0, j + 1)
        for i, c in enumerate(centers):
            lo, hi = max(0, c - half), min(n, c + half + 1)
            leaders[i] = np.max(mod[rows_upto, lo:hi])
        leaders = np.maximum(leaders, 1e-300)
        lg = np.log(leaders)
        for i, qv in enumerate(qs):
            m = np.max(qv * lg)
            logZ[i, j] = (np.log(sj / span) + m
                          + np.log(np.sum(np.exp(qv * lg - m))))
    ok = np.all(np.isfinite(logZ), axis=0)
    if np.count_nonzero(ok) < 3:
        raise InsufficientScales("too few usable dyadic scales")
    ls = np.log(np.asarray(scales)[ok])
    for i in range(qs.size):
        tau[i] = np.polyfit(ls, logZ[i, ok], 1)[0] - 1.0
    tau, alpha, f_alpha = _legendre(qs, tau)
    return MultifractalResult(qs, tau, alpha, f_alpha)


def brownian(n: int, seed: Optional[int] = None, step: float = 1.0) -> TimeSeries:
    """Standard Brownian path: zero start, cumulative sum of unit
    Gaussian increments."""
    if n < 2:
        raise InvalidArgument("need at least 2 samples")
    rng = np.random.default_rng(seed)
    incr = rng.standard_normal(n)
    incr[0] = 0.0
    return TimeSeries(np.cumsum(incr), step=step, label="brownian")


def binomial_cascade(levels: int = 14, p: float = 0.3,
                     seed: Optional[int] = None,
                     shuffle: bool = False) -> TimeSeries:
    """Deterministic binomial measure on 2**levels cells: each cell's mass
    splits into fractions p (left) and 1-p (right) at every level."""
    if not (0.0 < p < 1.0):
        raise InvalidArgument("p must lie in (0, 1)")
    if levels < 4:
        raise InvalidArgument("need at least 4 levels")
    mass = np.ones(1)
    for _ in range(levels):
        mass = np.concatenate([(mass * p)[:, None],
                               (mass * (1.0 - p))[:, None]], axis=1).ravel()
    if shuffle:
        rng = np.random.default_rng(seed)
        rng.shuffle(mass)
    return TimeSeries(mass, label="binomial-cascade")


def binomial_cascade_tau(q: Sequence[float], p: float = 0.3) -> np.ndarray:
    """Closed-form scaling exponents of the binomial measure,
    tau(q) = -log2(p**q + (1-p)**q)."""
    qs = np.asarray(q, dtype=float)
    return -np.log2(p ** qs + (1.0 - p) ** qs)
