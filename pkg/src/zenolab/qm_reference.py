"""Non-relativistic reference: survival probability from the energy distribution of |psi>.

Only distributions with finite energy dispersion are supported; for these
1 - P(t) starts quadratically in t.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import SurvivalCurve
from .quadrature import DEFAULT_SETTINGS, QuadratureSettings, integrate_adaptive


class DensityKind(enum.Enum):
    GAUSSIAN = "gaussian"
    POINT_MASS = "point"
    TWO_POINT = "twopoint"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class SpectralDensity:
    """Distribution of H in the initial state.

    ``width`` is sigma for a Gaussian and the half-splitting delta for the
    two-point case (levels at center -+ delta, weight 1/2 each). Tabulated
    densities are piecewise linear on ``energies`` and normalized on
    construction.
    """

    kind: DensityKind
    center: float = 0.0
    width: float = 0.0
    energies: tuple = ()
    weights: tuple = ()

    @classmethod
    def gaussian(cls, center: float, sigma: float) -> "SpectralDensity":
        if not sigma > 0:
            raise ValueError("Gaussian width must be positive")
        return cls(DensityKind.GAUSSIAN, center, sigma)

    @classmethod
    def point_mass(cls, center: float) -> "SpectralDensity":
        return cls(DensityKind.POINT_MASS, center)

    @classmethod
    def two_point(cls, center: float, delta: float) -> "SpectralDensity":
        if delta < 0:
            raise ValueError("splitting must be non-negative")
        return cls(DensityKind.TWO_POINT, center, delta)

    @classmethod
    def tabulated(cls, energies, weights) -> "SpectralDensity":
        e = np.asarray(energies, dtype=float)
        w = np.asarray(weights, dtype=float)
        if e.ndim != 1 or e.shape != w.shape or e.size < 2:
            raise ValueError("need matching 1-D energy and weight columns with >= 2 rows")
        if np.any(np.diff(e) <= 0):
            raise ValueError("energies must be strictly increasing")
        if np.any(w < 0):
            raise ValueError("tabulated weights must be non-negative")
        norm = np.trapezoid(w, e)
        if not norm > 0:
            raise ValueError("tabulated density has zero total weight")
        return cls(DensityKind.TABULATED, energies=tuple(e), weights=tuple(w / norm))

    @classmethod
    def from_file(cls, path) -> "SpectralDensity":
        """Read whitespace-separated (energy, weight) rows; '#' starts a comment."""
        data = np.loadtxt(Path(path), comments="#", ndmin=2)
        if data.shape[1] != 2:
            raise ValueError(f"{path}: expected two columns, got {data.shape[1]}")
        return cls.tabulated(data[:, 0], data[:, 1])

    def _table(self):
        return np.asarray(self.energies), np.asarray(self.weights)


def _tabulated_integral(d: SpectralDensity, g, settings: QuadratureSettings, panels: int = 1):
    e, w = d._table()

    def f(x):
        return np.interp(x, e, w) * g(x)

    return integrate_adaptive(f, e[0], e[-1], settings, breakpoints=e[1:-1],
                              initial_panels=panels).unwrap("tabulated spectral integral")


def _moments(d: SpectralDensity, settings: QuadratureSettings = DEFAULT_SETTINGS):
    if d.kind is DensityKind.TABULATED:
        mean = _tabulated_integral(d, lambda x: x, settings)
        var = _tabulated_integral(d, lambda x: (x - mean) ** 2, settings)
        return mean, var
    if d.kind is DensityKind.POINT_MASS:
        return d.center, 0.0
    return d.center, d.width**2


def energy_dispersion(d: SpectralDensity, settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Delta E = sqrt(<H^2> - <H>^2)."""
    return math.sqrt(_moments(d, settings)[1])


def survival_probability_qm(d: SpectralDensity, t: float,
                            settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """|<psi| exp(-iHt) |psi>|^2 = (int w cos Et)^2 + (int w sin Et)^2."""
    if d.kind is DensityKind.GAUSSIAN:
        return math.exp(-((d.width * t) ** 2))
    if d.kind is DensityKind.POINT_MASS:
        return 1.0
    if d.kind is DensityKind.TWO_POINT:
        return math.cos(d.width * t) ** 2
    e, _ = d._table()
    # measure phases from the mean energy; |amplitude| is unchanged
    mean = _moments(d, settings)[0]
    panels = int(abs(t) * (e[-1] - e[0]) / (math.pi * (e.size - 1))) + 1
    re = _tabulated_integral(d, lambda x: np.cos((x - mean) * t), settings, panels)
    im = _tabulated_integral(d, lambda x: np.sin((x - mean) * t), settings, panels)
    return min(re * re + im * im, 1.0)


def survival_deficit(d: SpectralDensity, t: float,
                     settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """1 - P(t), without cancellation for the closed-form kinds."""
    if d.kind is DensityKind.GAUSSIAN:
        return -math.expm1(-((d.width * t) ** 2))
    if d.kind is DensityKind.POINT_MASS:
        return 0.0
    if d.kind is DensityKind.TWO_POINT:
        return math.sin(d.width * t) ** 2
    return 1.0 - survival_probability_qm(d, t, settings)


def zeno_coefficient(d: SpectralDensity, t_probe: float | None = None,
                     settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """(1 - P(t_probe)) / t_probe^2, which tends to (Delta E)^2 as t_probe -> 0.

    The default probe time is 1e-3 / Delta E.
    """
    if t_probe is None:
        spread = energy_dispersion(d, settings)
        if spread == 0.0:
            return 0.0
        t_probe = 1e-3 / spread
    if not t_probe > 0:
        raise ValueError("t_probe must be positive")
    return survival_deficit(d, t_probe, settings) / t_probe**2


def survival_curve(d: SpectralDensity, ts, settings: QuadratureSettings = DEFAULT_SETTINGS):
    meta = {"model": "qm", "density": d.kind.value, "center": d.center, "width": d.width,
            "rel_tol": settings.rel_tol, "abs_tol": settings.abs_tol}
    return SurvivalCurve(np.asarray(ts, dtype=float),
                         np.array([survival_probability_qm(d, float(t), settings) for t in ts]),
                         meta)
