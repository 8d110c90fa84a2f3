"""Continuous wavelet transform machinery and two-series comparison metrics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.signal import fftconvolve

from .errors import InvalidArgument, UnsupportedWavelet
from .series import ScaleField, TimeSeries

__all__ = [
    "Wavelet",
    "get_wavelet",
    "default_scale_grid",
    "cwt",
    "icwt",
    "scalogram",
    "energy_by_scale",
    "compare_fields",
    "wcc_measure",
    "wavelet_coherence",
]

_MORLET_OMEGA0 = 6.0


def _gaussian_wave(t):
    # first derivative of a Gaussian
    return -t * np.exp(-t * t / 2.0)


def _mexican_hat(t):
    return (1.0 - t * t) * np.exp(-t * t / 2.0)


def _haar(t):
    out = np.zeros_like(np.asarray(t, dtype=float))
    out[(t >= 0) & (t < 0.5)] = 1.0
    out[(t >= 0.5) & (t < 1.0)] = -1.0
    return out


def _morlet(t):
    w0 = _MORLET_OMEGA0
    corr = np.exp(-w0 * w0 / 2.0)  # zero-mean correction
    return np.pi ** -0.25 * (np.exp(1j * w0 * t) - corr) * np.exp(-t * t / 2.0)


@dataclass
class Wavelet:
    """A mother wavelet with numerically precomputed admissibility
    constant and center frequency (for scale-to-period conversion)."""

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    vanishing_moments: int
    is_complex: bool
    support: float  # effective half-width of the support
    analytic: bool = False  # spectrum concentrated on positive frequencies
    invertible: bool = True
    _cg: Optional[float] = field(default=None, repr=False)
    _fc: Optional[float] = field(default=None, repr=False)

    def _spectrum(self):
        # zero-padded span (64x the support) for fine frequency resolution
        n = 1 << 19
        dt = 64.0 * 2.0 * self.support / n
        t = (np.arange(n) - n // 2) * dt
        psi = self.evaluate(t)
        # continuous FT approximation; only |psi_hat| is ever used, so the
        # time-origin phase factor is irrelevant
        psi_hat = dt * np.fft.fft(psi)
        omega = 2.0 * np.pi * np.fft.fftfreq(n, d=dt)
        return omega, psi_hat

    def _precompute(self):
        omega, psi_hat = self._spectrum()
        pos = omega > 0
        w = omega[pos]
        p2 = np.abs(psi_hat[pos]) ** 2
        dw = w[1] - w[0] if w.size > 1 else 1.0
        cg_pos = float(np.sum(p2 / w) * dw)
        if self.analytic:
            self._cg = cg_pos
        else:
            neg = omega < 0
            cg_neg = float(np.sum(np.abs(psi_hat[neg]) ** 2 / np.abs(omega[neg])) * dw)
            # real wavelets are symmetric; keep the one-sided value as C_g
            self._cg = 0.5 * (cg_pos + cg_neg)
        self._fc = float(w[np.argmax(p2)] / (2.0 * np.pi))

    @property
    def admissibility(self) -> float:
        """One-sided admissibility constant integral |psi_hat|^2 / omega."""
        if self._cg is None:
            self._precompute()
        return self._cg

    @property
    def center_frequency(self) -> float:
        """Spectral-peak frequency in cycles per unit time at scale 1."""
        if self._fc is None:
            self._precompute()
        return self._fc

    def pseudo_period(self, scale: float) -> float:
        return scale / self.center_frequency


_WAVELETS = {
    "gaussian-wave": lambda: Wavelet("gaussian-wave", _gaussian_wave, 1, False, 8.0),
    "mexican-hat": lambda: Wavelet("mexican-hat", _mexican_hat, 2, False, 8.0),
    "haar": lambda: Wavelet("haar", _haar, 1, False, 1.5, invertible=False),
    "morlet": lambda: Wavelet("morlet", _morlet, 1, True, 8.0, analytic=True),
}


def get_wavelet(name: str) -> Wavelet:
    try:
        return _WAVELETS[name]()
    except KeyError:
        raise InvalidArgument(f"unknown wavelet {name!r}") from None


def default_scale_grid(series: TimeSeries, n: int = 64) -> np.ndarray:
    """Log-spaced scales from 2*step to (T/4)*step."""
    T = len(series)
    return np.geomspace(2.0 * series.step, max(2.5, T / 4.0) * series.step, n)


def _kernel(w: Wavelet, scale: float, step: float) -> np.ndarray:
    half = int(np.ceil(w.support * scale / step))
    u = np.arange(-half, half + 1) * step
    return w.evaluate(u / scale) / np.sqrt(scale)


def cwt(x: TimeSeries, w: Wavelet, scales: Sequence[float]) -> ScaleField:
    """Continuous wavelet transform W(s, l) = (1/sqrt(s)) sum_t x_t
    psi*((t - l)/s) dt evaluated at every sample location."""
    s = np.asarray(list(scales), dtype=float)
    if s.size == 0:
        raise InvalidArgument("empty scale grid")
    if np.any(s <= 0):
        raise InvalidArgument("scales must be positive")
    if len(x) < 8:
        raise InvalidArgument("series too short for a wavelet transform")
    xs = x.values
    dtype = complex if w.is_complex else float
    cells = np.empty((s.size, xs.size), dtype=dtype)
    for i, si in enumerate(s):
        kern = np.conj(_kernel(w, si, x.step))
        # W(l) = sum_m x[m] * conj(psi)((m - l) dt / s) dt
        row = fftconvolve(xs, kern[::-1], mode="same") * x.step
        cells[i] = row if w.is_complex else row.real
    return ScaleField(rows=s, cols=x.times, cells=cells, kind="cwt")


def cwt_direct(x: TimeSeries, w: Wavelet, scales: Sequence[float]) -> ScaleField:
    """Direct quadratic-time evaluation of the transform definition.

    Reference path for correctness checks; O(T^2 |S|).
    """
    s = np.asarray(list(scales), dtype=float)
    xs = x.values
    t = x.times
    dtype = complex if w.is_complex else float
    cells = np.empty((s.size, xs.size), dtype=dtype)
    for i, si in enumerate(s):
        for j, l in enumerate(t):
            v = np.sum(xs * np.conj(w.evaluate((t - l) / si))) * x.step / np.sqrt(si)
            cells[i, j] = v if w.is_complex else v.real
    return ScaleField(rows=s, cols=t, cells=cells, kind="cwt")


def icwt(fld: ScaleField, w: Wavelet) -> TimeSeries:
    """Approximate inverse transform via the admissibility double integral."""
    if fld.kind != "cwt":
        raise InvalidArgument("inverse transform requires a cwt field")
    if not w.invertible:
        raise UnsupportedWavelet(f"{w.name} has no usable admissibility constant")
    scales = fld.rows
    step = float(fld.cols[1] - fld.cols[0]) if fld.cols.size > 1 else 1.0
    ds = np.gradient(scales)
    acc = np.zeros(fld.cols.size, dtype=complex)
    for i, si in enumerate(scales):
        kern = _kernel(w, si, step)
        row = fftconvolve(fld.cells[i], kern, mode="same") * step
        acc += row * ds[i] / si ** 2
    cg = w.admissibility
    if w.analytic:
        values = 2.0 * acc.real / cg
    else:
        values = acc.real / cg
    return TimeSeries(values, step=step)


def scalogram(fld: ScaleField) -> ScaleField:
    """Signal energy |W(s, l)|^2 per (scale, location) cell."""
    if fld.kind != "cwt":
        raise InvalidArgument("scalogram requires a cwt field")
    return ScaleField(rows=fld.rows, cols=fld.cols,
                      cells=np.abs(fld.cells) ** 2, mask=fld.mask.copy(),
                      kind="scalogram")


def energy_by_scale(fld: ScaleField, w: Wavelet) -> np.ndarray:
    """Energy distribution by scale E(s) = (1/C_g) sum_l |W(s,l)|^2 dl."""
    if fld.kind != "cwt":
        raise InvalidArgument("energy distribution requires a cwt field")
    step = float(fld.cols[1] - fld.cols[0]) if fld.cols.size > 1 else 1.0
    return np.sum(np.abs(fld.cells) ** 2, axis=1) * step / w.admissibility


def compare_fields(wx: ScaleField, wy: ScaleField, metric: str) -> ScaleField:
    """Cellwise comparison of two transform fields.

    Metrics: ``diffmod`` |Wx|-|Wy|; ``ratiomod`` |Wx|/|Wy| (undefined where
    |Wy| < 1e-12); ``phase-diff`` (complex fields only, wrapped to
    (-pi, pi]); ``crwt`` the cross-wavelet product Wx* Wy.
    """
    if not wx.same_grid(wy):
        raise InvalidArgument("fields are on different (scale, location) grids")
    mask = wx.mask & wy.mask
    if metric == "diffmod":
        cells = np.abs(wx.cells) - np.abs(wy.cells)
        kind = "diffmod"
    elif metric == "ratiomod":
        denom = np.abs(wy.cells)
        ok = denom >= 1e-12
        mask = mask & ok
        with np.errstate(divide="ignore", invalid="ignore"):
            cells = np.where(ok, np.abs(wx.cells) / np.where(ok, denom, 1.0), np.nan)
        kind = "ratiomod"
    elif metric == "phase-diff":
        if not (wx.is_complex and wy.is_complex):
            raise InvalidArgument("phase comparison requires complex fields")
        d = np.angle(wx.cells) - np.angle(wy.cells)
        cells = np.angle(np.exp(1j * d))  # wrap into (-pi, pi]
        # np.angle wraps into [-pi, pi); fold -pi onto +pi
        cells = np.where(cells == -np.pi, np.pi, cells)
        kind = "phase-diff"
    elif metric == "crwt":
        cells = np.conj(wx.cells) * wy.cells
        kind = "crwt"
    else:
        raise InvalidArgument(f"unknown comparison metric {metric!r}")
    return ScaleField(rows=wx.rows, cols=wx.cols, cells=cells, mask=mask, kind=kind)


def wcc_measure(wx: ScaleField, wy: ScaleField, shift: int = 0) -> np.ndarray:
    """Per-scale wavelet cross-correlation measure in [0, 1].

    ``shift`` slides the second field's location axis; the overlap is
    truncated. Scales with zero energy on either side come back NaN.
    """
    if not wx.same_grid(wy):
        raise InvalidArgument("fields are on different (scale, location) grids")
    n = wx.cols.size
    if abs(shift) >= n:
        raise InvalidArgument("shift exceeds the location axis")
    a = wx.cells
    b = wy.cells
    if shift > 0:
        a_ov, b_ov = a[:, shift:], b[:, : n - shift]
    elif shift < 0:
        a_ov, b_ov = a[:, :  n + shift], b[:, -shift:]
    else:
        a_ov, b_ov = a, b
    num = np.abs(np.sum(np.conj(a_ov) * b_ov, axis=1))
    ex = np.sum(np.abs(a_ov) ** 2, axis=1)
    ey = np.sum(np.abs(b_ov) ** 2, axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where((ex > 0) & (ey > 0), num / np.sqrt(ex * ey), np.nan)
    return out


def _smooth_local(cells: np.ndarray, scales: np.ndarray, step: float,
                  time_widths: Optional[np.ndarray] = None,
                  scale_width: int = 3) -> np.ndarray:
    """Boxcar smoothing over time (scale-dependent width) then over
    adjacent scale rows."""
    n_s, n_l = cells.shape
    out = np.empty_like(cells)
    if time_widths is None:
        time_widths = np.maximum(1, np.ceil(scales / step).astype(int))
    for i in range(n_s):
        w = int(min(time_widths[i], n_l))
        kern = np.ones(w) / w
        norm = fftconvolve(np.ones(n_l), kern, mode="same")
        out[i] = fftconvolve(cells[i], kern, mode="same") / norm
    if scale_width > 1 and n_s > 1:
        sm = np.empty_like(out)
        half = scale_width // 2
        for i in range(n_s):
            lo, hi = max(0, i - half), min(n_s, i + half + 1)
            sm[i] = out[lo:hi].mean(axis=0)
        out = sm
    return out


def wavelet_coherence(wx: ScaleField, wy: ScaleField,
                      time_widths: Optional[Sequence[int]] = None,
                      scale_width: int = 3) -> ScaleField:
    """Squared wavelet coherence with local boxcar smoothing in time
    (width ~ scale by default) and across 3 adjacent scales."""
    if not wx.same_grid(wy):
        raise InvalidArgument("fields are on different (scale, location) grids")
    step = float(wx.cols[1] - wx.cols[0]) if wx.cols.size > 1 else 1.0
    tw = None if time_widths is None else np.asarray(time_widths, dtype=int)
    if tw is not None and np.any(tw > wx.cols.size):
        raise InvalidArgument("smoothing window larger than the grid")
    cross = np.conj(wx.cells) * wy.cells
    sx = _smooth_local(np.abs(wx.cells) ** 2 + 0j, wx.rows, step, tw, scale_width).real
    sy = _smooth_local(np.abs(wy.cells) ** 2 + 0j, wx.rows, step, tw, scale_width).real
    sc = _smooth_local(cross.astype(complex), wx.rows, step, tw, scale_width)
    denom = sx * sy
    ok = denom > 1e-300
    with np.errstate(divide="ignore", invalid="ignore"):
        coh = np.where(ok, np.abs(sc) ** 2 / np.where(ok, denom, 1.0), np.nan)
    coh = np.clip(coh, 0.0, 1.0)
    return ScaleField(rows=wx.rows, cols=wx.cols, cells=coh,
                      mask=wx.mask & wy.mask & ok, kind="coherence")
