"""Slope and power-law fits of survival curves."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInput, InsufficientPoints

SHORT_TIME_WINDOW = (1e-3, 1e-2)
LONG_TIME_WINDOW = (150.0, 250.0)
LONG_TIME_POINTS = 21


@dataclass
class SurvivalCurve:
    """Samples (t, P(t)) plus the parameters that produced them."""

    ts: np.ndarray
    ps: np.ndarray
    meta: dict = field(default_factory=dict)
    converged: np.ndarray | None = None

    def __post_init__(self):
        self.ts = np.asarray(self.ts, dtype=float)
        self.ps = np.asarray(self.ps, dtype=float)
        if self.ts.shape != self.ps.shape or self.ts.ndim != 1:
            raise ValueError("ts and ps must be 1-D arrays of equal length")
        if self.ts.size < 2:
            raise InsufficientPoints("a survival curve needs at least 2 samples")
        if np.any(np.diff(self.ts) <= 0):
            raise ValueError("ts must be strictly increasing")
        if self.converged is None:
            self.converged = np.ones(self.ts.size, dtype=bool)
        else:
            self.converged = np.asarray(self.converged, dtype=bool)


@dataclass(frozen=True)
class FitReport:
    slope: float
    intercept: float
    residual_rms: float
    window: tuple[float, float]


def _in_window(curve: SurvivalCurve, window):
    t_lo, t_hi = window
    if not t_lo < t_hi:
        raise ValueError(f"empty window {window}")
    mask = (curve.ts >= t_lo) & (curve.ts <= t_hi)
    if mask.sum() < 3:
        raise InsufficientPoints(f"need >= 3 samples in window {window}, got {int(mask.sum())}")
    return curve.ts[mask], curve.ps[mask]


def _line(x, y):
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    rms = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(slope), float(intercept), rms


def fit_linear(curve: SurvivalCurve, window=SHORT_TIME_WINDOW) -> FitReport:
    """Least-squares line through (t, 1 - P(t)) for t inside ``window``."""
    t, p = _in_window(curve, window)
    slope, intercept, rms = _line(t, 1.0 - p)
    return FitReport(slope, intercept, rms, (float(window[0]), float(window[1])))


def decay_law_exponent(curve: SurvivalCurve, window=SHORT_TIME_WINDOW) -> float:
    """Local power-law exponent of the decay onset: slope of ln(1 - P) vs ln t."""
    t, p = _in_window(curve, window)
    if np.any(p >= 1.0) or np.any(t <= 0):
        raise DegenerateInput("ln(1 - P) undefined: P >= 1 (or t <= 0) inside the window")
    slope, _, _ = _line(np.log(t), np.log1p(-p))
    return slope
