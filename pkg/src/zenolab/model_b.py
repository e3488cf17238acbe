"""Scalar boson i -> two Dirac fermions (a, b), at order lambda^2, rest frame.

The real part Xi_3 of the survival amplitude grows linearly with a radial
momentum cutoff for every t > 0, so it is only ever evaluated regulated.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from . import model_a
from .analysis import SurvivalCurve
from .errors import InsufficientPoints
from .kinematics import DecayModelSpec, Variant, breakup_momentum, on_shell_energy, pair_momentum
from .quadrature import (
    DEFAULT_SETTINGS,
    QuadratureResult,
    QuadratureSettings,
    cosm1_over_q2,
    integrate_cosm1_spectrum,
)

# Large-k limit of dXi_3/dLambda.
ASYMPTOTIC_CUTOFF_SLOPE = -1.0 / (8 * math.pi**2)

MIN_SCAN_POINTS = 6


class Classification(enum.Enum):
    CONVERGENT = "Convergent"
    LOGARITHMIC = "Logarithmic"
    LINEAR = "Linear"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class CutoffScan:
    t: float
    cutoffs: np.ndarray
    values: np.ndarray
    doubled_values: np.ndarray
    fitted_slope: float
    classification: Classification

    @property
    def cauchy_differences(self) -> np.ndarray:
        """Xi(2 Lambda) - Xi(Lambda) for every scanned cutoff."""
        return self.doubled_values - self.values


def _require_boson(spec: DecayModelSpec) -> None:
    if spec.variant is not Variant.BOSON_DECAY:
        raise ValueError(f"model B needs a BosonDecay spec, got {spec.variant.value}")
    if spec.p_i_mag != 0.0:
        raise ValueError("model B is implemented in the parent rest frame only")


def radial_integrand(spec: DecayModelSpec, t: float):
    """Integrand in k: k^2/(2 pi^2) (m_a m_b + E_a E_b + k^2)/(4 E_a E_b) [g(S - m_i) + g(S + m_i)]."""
    _require_boson(spec)
    m_i, m_a, m_b = spec.m_i, spec.m_a, spec.m_b

    def f(k):
        k = np.asarray(k, dtype=float)
        e_a = np.hypot(m_a, k)
        e_b = np.hypot(m_b, k)
        s = e_a + e_b
        weight = (m_a * m_b + e_a * e_b + k * k) / (4 * e_a * e_b)
        return k * k / (2 * math.pi**2) * weight * (cosm1_over_q2(s - m_i, t) + cosm1_over_q2(s + m_i, t))

    return f


def pair_densities(spec: DecayModelSpec):
    """Weights in the pair energy S, identical for the g(S - m_i) and g(S + m_i) terms."""
    _require_boson(spec)
    m_a, m_b = spec.m_a, spec.m_b

    def rho(s):
        s = np.asarray(s, dtype=float)
        k = pair_momentum(s, m_a, m_b)
        e_b = (s * s + m_b * m_b - m_a * m_a) / (2 * s)
        e_a = s - e_b
        r = k * (m_a * m_b + e_a * e_b + k * k) / (8 * math.pi**2 * s)
        return np.stack([r, r])

    return rho


def xi3_result(spec: DecayModelSpec, t: float, cutoff: float,
               settings: QuadratureSettings = DEFAULT_SETTINGS) -> QuadratureResult:
    _require_boson(spec)
    if not cutoff > 0:
        raise ValueError("cutoff must be positive")
    upper = on_shell_energy(spec.m_a, cutoff) + on_shell_energy(spec.m_b, cutoff)
    return integrate_cosm1_spectrum(pair_densities(spec), [spec.m_i, -spec.m_i],
                                    spec.m_a + spec.m_b, t, settings, upper=upper)


def xi3_regulated(spec: DecayModelSpec, t: float, cutoff: float,
                  settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Xi_3 with the radial momentum integral cut off sharply at ``cutoff``."""
    return xi3_result(spec, t, cutoff, settings).unwrap("xi3_regulated")


def survival_probability_regulated(spec: DecayModelSpec, t: float, cutoff: float,
                                   settings: QuadratureSettings = DEFAULT_SETTINGS):
    """(P, converged) with P = 1 + (lambda^2 / m_i) Xi_3 at the given cutoff."""
    if t < 0:
        raise ValueError("t must be non-negative")
    r = xi3_result(spec, t, cutoff, settings)
    return 1.0 + spec.lam**2 / spec.m_i * r.value, r.converged


def survival_curve(spec: DecayModelSpec, ts, cutoff: float,
                   settings: QuadratureSettings = DEFAULT_SETTINGS) -> SurvivalCurve:
    pairs = [survival_probability_regulated(spec, float(t), cutoff, settings) for t in ts]
    return SurvivalCurve(
        ts=np.asarray(ts, dtype=float),
        ps=np.array([p for p, _ in pairs]),
        meta={"model": "b", "m_i": spec.m_i, "m_a": spec.m_a, "m_b": spec.m_b,
              "lambda": spec.lam, "cutoff": cutoff,
              "rel_tol": settings.rel_tol, "abs_tol": settings.abs_tol},
        converged=np.array([ok for _, ok in pairs]),
    )


def formal_decay_rate(spec: DecayModelSpec) -> float:
    """Rest-frame width from the t -> inf delta limit: lambda^2 k* (m_i^2 - (m_a - m_b)^2) / (16 pi m_i^2)."""
    _require_boson(spec)
    point = breakup_momentum(spec)
    m_i = spec.m_i
    return spec.lam**2 * point.k_star * (m_i**2 - (spec.m_a - spec.m_b) ** 2) / (16 * math.pi * m_i**2)


def formal_decay_rate_numeric(spec: DecayModelSpec,
                              settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Same width with the energy delta resolved numerically.

    Applies (1 - cos tq)/q^2 -> pi t delta(q) to the radial integrand: the
    root of E_a(k) + E_b(k) = m_i is found by bisection-type search and the
    delta contributes 1/|dS/dk| = E_a E_b / (k m_i).
    """
    _require_boson(spec)
    spec.require_open()
    m_i, m_a, m_b = spec.m_i, spec.m_a, spec.m_b
    k = brentq(lambda x: math.hypot(m_a, x) + math.hypot(m_b, x) - m_i, 0.0, m_i,
               xtol=1e-15 * m_i, rtol=4 * np.finfo(float).eps, maxiter=500)
    e_a, e_b = math.hypot(m_a, k), math.hypot(m_b, k)
    density = k * k / (2 * math.pi**2) * (m_a * m_b + e_a * e_b + k * k) / (4 * e_a * e_b)
    xi3_slope = -math.pi * density * e_a * e_b / (k * m_i)
    return -spec.lam**2 / m_i * xi3_slope


def _normalized_rms(design, y):
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    scale = np.std(y)
    if scale == 0:
        return 0.0, coef
    return float(np.sqrt(np.mean(resid**2)) / scale), coef


def classify_cutoff_sequence(
    t: float,
    cutoffs: Sequence[float],
    evaluate: Callable[[float], float],
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    *,
    residual_limit: float = 0.1,
) -> CutoffScan:
    """Evaluate a regulated quantity at each cutoff and at twice it, then classify.

    Cauchy differences d = Xi(2L) - Xi(L) decide convergence: their running
    upper envelope (max over all larger cutoffs) must fall with L (log-log
    slope below -1/2), or all |d| are within ``abs_tol``. Otherwise the
    values are fitted by c0 + c1 L and c0 + c1 ln L and the smaller
    normalized residual wins; if neither fits, the scan is Unknown. The
    slope is the octave average of d / L (linear) or d / ln 2 (logarithmic).
    """
    cutoffs = np.asarray(cutoffs, dtype=float)
    if cutoffs.size < MIN_SCAN_POINTS:
        raise InsufficientPoints(f"need >= {MIN_SCAN_POINTS} cutoffs, got {cutoffs.size}")
    if np.any(np.diff(cutoffs) <= 0) or cutoffs[0] <= 0:
        raise ValueError("cutoffs must be positive and strictly increasing")
    if cutoffs[-1] < 10 * cutoffs[0]:
        raise InsufficientPoints("cutoffs must span at least one decade")

    values = np.array([evaluate(c) for c in cutoffs])
    doubled = np.array([evaluate(2 * c) for c in cutoffs])
    diffs = doubled - values
    octave_slope = float(np.mean(diffs / cutoffs))

    envelope = np.maximum.accumulate(np.abs(diffs)[::-1])[::-1]
    if np.all(np.abs(diffs) <= settings.abs_tol):
        kind, slope = Classification.CONVERGENT, octave_slope
    elif np.polyfit(np.log(cutoffs), np.log(envelope), 1)[0] < -0.5:
        kind, slope = Classification.CONVERGENT, octave_slope
    else:
        ones = np.ones_like(cutoffs)
        lin_res, _ = _normalized_rms(np.column_stack([ones, cutoffs]), values)
        log_res, _ = _normalized_rms(np.column_stack([ones, np.log(cutoffs)]), values)
        if min(lin_res, log_res) > residual_limit:
            kind, slope = Classification.UNKNOWN, octave_slope
        elif lin_res <= log_res:
            kind, slope = Classification.LINEAR, octave_slope
        else:
            kind, slope = Classification.LOGARITHMIC, float(np.mean(diffs) / math.log(2.0))
    return CutoffScan(float(t), cutoffs, values, doubled, slope, kind)


def divergence_scan(spec: DecayModelSpec, t: float, cutoffs: Sequence[float],
                    settings: QuadratureSettings = DEFAULT_SETTINGS) -> CutoffScan:
    """Cutoff scan of Xi_3 (model B) or of the rest-frame u-bar Xi_3 u (model A)."""
    cutoffs = np.asarray(cutoffs, dtype=float)
    if cutoffs.size < MIN_SCAN_POINTS:
        raise InsufficientPoints(f"need >= {MIN_SCAN_POINTS} cutoffs, got {cutoffs.size}")
    if cutoffs.min() <= 10 * spec.m_i:
        raise ValueError("scan cutoffs must all exceed 10 m_i")
    if spec.variant is Variant.BOSON_DECAY:
        def evaluate(c):
            return xi3_regulated(spec, t, c, settings)
    else:
        def evaluate(c):
            return model_a.xi3_bar_regulated(spec, t, c, settings)
    return classify_cutoff_sequence(t, cutoffs, evaluate, settings)
