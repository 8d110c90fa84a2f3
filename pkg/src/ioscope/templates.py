"""IO-phase template bank, resampling, correlation-diagram detection, and
polynomial template recognition with an efficiency score."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import (DegenerateSignal, IllConditionedBasis, InvalidArgument)
from .series import ScaleField, TimeSeries

__all__ = [
    "Template",
    "KuntchenkoBasis",
    "io_phase_template",
    "snake_template",
    "builtin_bank",
    "resample_template",
    "correlation_diagram",
    "kuntchenko_fit",
    "kuntchenko_efficiency",
    "scan_detect",
    "Detection",
]

PHASE_LABELS = ("background", "calm", "shelling", "calm2", "attack",
                "peak", "disillusion", "realization", "productivity")


@dataclass(frozen=True)
class Template:
    """A sampled detection pattern with optional lifecycle phase marks."""

    samples: np.ndarray
    name: str = ""
    phase_marks: Tuple[Tuple[int, str], ...] = ()

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.size < 3:
            raise InvalidArgument("template needs at least 3 samples")
        if not np.all(np.isfinite(s)):
            raise InvalidArgument("template samples must be finite")
        if np.ptp(s) == 0:
            raise InvalidArgument("template must not be constant")
        object.__setattr__(self, "samples", s)
        for idx, label in self.phase_marks:
            if label not in PHASE_LABELS:
                raise InvalidArgument(f"unknown phase label {label!r}")
            if not (0 <= idx < s.size):
                raise InvalidArgument("phase mark index out of range")

    def __len__(self) -> int:
        return self.samples.size


def _phase_curve(x: np.ndarray, a: float, b: float, x_peak: float,
                 tail_damping: float) -> np.ndarray:
    """A + B x sin(x), continued past the peak with an exponentially
    damped arc of the same family."""
    y = a + b * x * np.sin(x)
    tail = x > x_peak
    if np.any(tail):
        damp = np.exp(-tail_damping * (x[tail] - x_peak))
        y[tail] = a + b * x[tail] * np.sin(x[tail]) * damp
    return y


def io_phase_template(length: int, variant: str = "attack-front",
                      a: float = 0.0, b: float = 1.0,
                      tail_damping: float = 0.5) -> Template:
    """Publication-dynamics template y = A + B x sin(x).

    ``attack-front`` spans x in [0, 5pi/2] and ends on the rising attack
    arc; ``full-lifecycle`` continues through the decline/recovery arcs
    with exponential damping (tail amplitude is a parameter, not a claim).
    """
    if length < 5:
        raise InvalidArgument("template length must be >= 5")
    if b == 0:
        raise InvalidArgument("slope parameter B must be nonzero")
    x_peak = 2.5 * np.pi
    if variant == "attack-front":
        x = np.linspace(0.0, x_peak, length)
        y = a + b * x * np.sin(x)
        mark_xs = [(0.0, "background"), (np.pi, "calm"), (1.5 * np.pi, "shelling"),
                   (2.0 * np.pi, "calm2"), (2.25 * np.pi, "attack")]
    elif variant == "full-lifecycle":
        x = np.linspace(0.0, 4.5 * np.pi, length)
        y = _phase_curve(x, a, b, x_peak, tail_damping)
        mark_xs = [(0.0, "background"), (np.pi, "calm"), (1.5 * np.pi, "shelling"),
                   (2.0 * np.pi, "calm2"), (2.25 * np.pi, "attack"),
                   (2.5 * np.pi, "peak"), (3.5 * np.pi, "disillusion"),
                   (4.0 * np.pi, "realization"), (4.5 * np.pi, "productivity")]
    else:
        raise InvalidArgument(f"unknown template variant {variant!r}")
    marks = tuple((int(np.argmin(np.abs(x - mx))), label) for mx, label in mark_xs)
    # dedupe indices (short templates collapse neighboring marks)
    seen = set()
    uniq = []
    for idx, label in marks:
        if idx not in seen:
            uniq.append((idx, label))
            seen.add(idx)
    return Template(y, name=f"io-{variant}", phase_marks=tuple(uniq))


def snake_template(length: int = 20) -> Template:
    """Oscillating pattern on a rising trend (the multi-point wiggle used
    for multi-scale scanning)."""
    if length < 5:
        raise InvalidArgument("template length must be >= 5")
    x = np.linspace(0.0, 4.0 * np.pi, length)
    return Template(0.25 * x + np.sin(x), name="snake")


def builtin_bank(length: int = 45) -> List[Template]:
    return [io_phase_template(length, "attack-front"),
            io_phase_template(length, "full-lifecycle"),
            snake_template(length)]


def resample_template(t: Template, k: int) -> Template:
    """Linear interpolation onto k equally spaced points over the
    template's index span; k == len(t) returns the samples unchanged."""
    if k < 3:
        raise InvalidArgument("resampled length must be >= 3")
    L = len(t)
    if k == L:
        return t
    xi = np.linspace(0.0, L - 1.0, k)
    samples = np.interp(xi, np.arange(L, dtype=float), t.samples)
    marks = tuple((int(round(idx * (k - 1) / (L - 1))), label)
                  for idx, label in t.phase_marks)
    return Template(samples, name=t.name, phase_marks=marks)


def correlation_diagram(x: TimeSeries, t: Template,
                        k_range: Sequence[int]) -> ScaleField:
    """Correlation coefficients of the series against the template
    resampled to every window length in ``k_range``."""
    from .correlation import pattern_correlation_field

    return pattern_correlation_field(x, t, k_range)


@dataclass(frozen=True)
class KuntchenkoBasis:
    """Linearly independent transforms over a fixed window length.

    ``transforms[0]`` must be the constant-one sequence; the remaining
    rows are the non-constant transforms the signal is projected onto.
    """

    transforms: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.transforms, dtype=float)
        if f.ndim != 2 or f.shape[0] < 2:
            raise InvalidArgument("basis needs the constant transform plus "
                                  "at least one non-constant transform")
        if not np.allclose(f[0], f[0][0]) or f[0][0] == 0:
            raise InvalidArgument("transforms[0] must be a constant sequence")
        norms = np.linalg.norm(f, axis=1)
        if np.any(norms == 0):
            raise InvalidArgument("zero transform in basis")
        gram = (f / norms[:, None]) @ (f / norms[:, None]).T
        if abs(np.linalg.det(gram)) <= 1e-12:
            raise InvalidArgument("basis transforms are linearly dependent")
        object.__setattr__(self, "transforms", f)

    @property
    def window_length(self) -> int:
        return self.transforms.shape[1]

    @property
    def order(self) -> int:
        return self.transforms.shape[0] - 1

    @classmethod
    def from_template(cls, t: Template, window_length: int) -> "KuntchenkoBasis":
        """Default detection basis: the template resampled to the window
        plus its first difference."""
        p = resample_template(t, window_length).samples
        dp = np.gradient(p)
        rows = [np.ones(window_length), p]
        if np.ptp(dp) > 0:
            rows.append(dp)
        return cls(np.vstack(rows))


def _correlants(basis: KuntchenkoBasis, signal: np.ndarray):
    """Centered correlants F[i, k] for i, k >= 1 and the right-hand side
    F[i, s] against the signal."""
    f = basis.transforms
    f0 = f[0]
    d00 = float(f0 @ f0)
    proj = (f @ f0) / d00  # mean-like component of each transform
    sproj = float(signal @ f0) / d00
    n = basis.order
    F = np.empty((n, n))
    rhs = np.empty(n)
    for i in range(1, n + 1):
        for k in range(1, n + 1):
            F[i - 1, k - 1] = f[i] @ f[k] - proj[i] * proj[k] * d00
        rhs[i - 1] = f[i] @ signal - proj[i] * sproj * d00
    return F, rhs, d00, proj, sproj


def kuntchenko_fit(signal: np.ndarray, basis: KuntchenkoBasis) -> np.ndarray:
    """Least-distance polynomial coefficients c_0..c_n.

    c_1..c_n solve the centered-correlant system; c_0 follows from the
    closed form with the Euclidean inner product over the window.
    """
    sig = np.asarray(signal, dtype=float)
    if sig.size != basis.window_length:
        raise InvalidArgument("signal length does not match basis window")
    F, rhs, d00, proj, sproj = _correlants(basis, sig)
    if np.linalg.cond(F) > 1e12:
        raise IllConditionedBasis("correlant system is numerically singular")
    c = np.linalg.solve(F, rhs)
    f = basis.transforms
    c0 = (sig @ f[0] - c @ (f[1:] @ f[0])) / d00
    return np.concatenate(([c0], c))


def kuntchenko_efficiency(signal: np.ndarray, basis: KuntchenkoBasis) -> float:
    """Approximation-quality indicator d_n in [0, 1].

    Computed from the centered correlants (the fraction of the signal's
    centered energy captured by the fitted polynomial), which makes the
    in-span value exactly 1 and the centered-orthogonal value exactly 0.
    """
    sig = np.asarray(signal, dtype=float)
    if sig.size != basis.window_length:
        raise InvalidArgument("signal length does not match basis window")
    f0 = basis.transforms[0]
    d00 = float(f0 @ f0)
    s_energy = float(sig @ sig) - (float(sig @ f0) ** 2) / d00
    if s_energy <= 0:
        raise DegenerateSignal("signal has zero energy after centering")
    F, rhs, *_ = _correlants(basis, sig)
    if np.linalg.cond(F) > 1e12:
        raise IllConditionedBasis("correlant system is numerically singular")
    c = np.linalg.solve(F, rhs)
    return float(c @ rhs / s_energy)


@dataclass(frozen=True)
class Detection:
    template: str
    scale: int
    location: int
    score: float


def scan_detect(x: TimeSeries, bank: Sequence[Template],
                k_range: Sequence[int], threshold: float) -> List[Detection]:
    """Scan a series against a template bank over multiple scales.

    Returns every (template, k, l) with correlation >= threshold after
    non-maximum suppression within a (k/2, k/2) neighborhood, sorted by
    score descending with earlier-location then smaller-scale tie-breaks.
    """
    if not (0.0 < threshold <= 1.0):
        raise InvalidArgument("threshold must lie in (0, 1]")
    if not bank:
        raise InvalidArgument("template bank is empty")
    detections: List[Detection] = []
    for tpl in bank:
        fld = correlation_diagram(x, tpl, k_range)
        cand = []
        for r, k in enumerate(fld.rows):
            for c in np.nonzero(fld.mask[r])[0]:
                score = fld.cells[r, c]
                if score >= threshold:
                    cand.append((float(score), int(c), int(k)))
        cand.sort(key=lambda item: (-item[0], item[1], item[2]))
        kept: List[Tuple[float, int, int]] = []
        for score, loc, k in cand:
            suppressed = False
            for s2, l2, k2 in kept:
                if abs(loc - l2) <= k / 2 and abs(k - k2) <= k / 2:
                    suppressed = True
                    break
            if not suppressed:
                kept.append((score, loc, k))
        detections.extend(Detection(tpl.name, k, loc, score)
                          for score, loc, k in kept)
    detections.sort(key=lambda d: (-d.score, d.location, d.scale))
    return detections
