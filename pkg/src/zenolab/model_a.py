"""Unstable spin-1/2 fermion i -> fermion b + scalar a, at order lambda^2.

The spinor algebra is reduced analytically with u-bar u = 1 and
u-bar gamma^mu u = p_i^mu / m_i, so every quantity here is a scalar
integral. The radial momentum integral is evaluated over the pair energy
S = E_a + E_b; this turns the oscillating factor into cos(t (S - E_i)), with
a phase linear in the integration variable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .analysis import SurvivalCurve
from .kinematics import DecayModelSpec, Variant, breakup_momentum, on_shell_energy, pair_momentum
from .quadrature import (
    DEFAULT_SETTINGS,
    QuadratureResult,
    QuadratureSettings,
    cosm1_over_q2,
    integrate_2d,
    integrate_cosm1_spectrum,
)

# The pair-frame numerator is linear in the direction cosine, so a 2-point
# Gauss rule is already exact; 4 points leaves margin.
_PAIR_COSINE_ORDER = 4


@dataclass(frozen=True)
class FermionSurvivalPoint:
    t: float
    xi3_bar: float
    p: float
    converged: bool = True


def _require_fermion(spec: DecayModelSpec) -> None:
    if spec.variant is not Variant.FERMION_DECAY:
        raise ValueError(f"model A needs a FermionDecay spec, got {spec.variant.value}")


def _at_rest(spec: DecayModelSpec) -> DecayModelSpec:
    if spec.p_i_mag == 0.0:
        return spec
    return DecayModelSpec(spec.m_i, spec.m_a, spec.m_b, spec.lam, spec.variant, 0.0)


def radial_integrand(spec: DecayModelSpec, t: float):
    """Rest-frame integrand in the radial momentum k (vectorized callable).

    k^2/(2 pi^2) / (4 E_a E_b) * [(E_b + m_b) g(E_a + E_b - m_i)
    + (m_b - E_b) g(E_a + E_b + m_i)], with g = cosm1_over_q2(., t).
    """
    _require_fermion(spec)
    m_i, m_a, m_b = spec.m_i, spec.m_a, spec.m_b

    def f(k):
        k = np.asarray(k, dtype=float)
        e_a = np.hypot(m_a, k)
        e_b = np.hypot(m_b, k)
        s = e_a + e_b
        bracket = (e_b + m_b) * cosm1_over_q2(s - m_i, t) + (m_b - e_b) * cosm1_over_q2(s + m_i, t)
        return k * k / (2 * math.pi**2) / (4 * e_a * e_b) * bracket

    return f


def pair_densities(spec: DecayModelSpec):
    """Spectral weights rho_res(S), rho_anti(S) multiplying g(S -+ E_i).

    Lab-frame momenta are obtained by boosting the pair rest frame (pair
    invariant mass M = sqrt(S^2 - p_i^2)) and the spinor sandwich is averaged
    over the pair-frame direction cosine with a Gauss rule.
    """
    _require_fermion(spec)
    m_i, m_a, m_b, p = spec.m_i, spec.m_a, spec.m_b, spec.p_i_mag
    e_i = spec.e_i
    c, w = np.polynomial.legendre.leggauss(_PAIR_COSINE_ORDER)
    w = w / 2.0

    def rho(s):
        s = np.asarray(s, dtype=float)
        mass = np.sqrt(s - p) * np.sqrt(s + p)
        k = pair_momentum(mass, m_a, m_b)
        e_b_pair = 0.5 * mass + (m_b * m_b - m_a * m_a) / (2 * mass)
        gamma = (s / mass)[:, None]
        beta = (p / s)[:, None]
        e_b = gamma * (e_b_pair[:, None] - beta * k[:, None] * c[None, :])
        # p_i . k_2 (three-vector product) with k_2 = p_i - k_1
        p_dot_k2 = p * gamma * (beta * e_b_pair[:, None] - k[:, None] * c[None, :])
        resonant = ((e_i * e_b - p_dot_k2) / m_i + m_b) @ w
        anti = ((-e_i * e_b - p_dot_k2) / m_i + m_b) @ w
        jac = k / (8 * math.pi**2 * mass)
        return np.stack([jac * resonant, jac * anti])

    return rho


def xi3_bar_result(
    spec: DecayModelSpec,
    t: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    *,
    cutoff: float | None = None,
) -> QuadratureResult:
    """u-bar Xi_3 u in the frame of ``spec`` as a flagged quadrature result.

    ``cutoff`` bounds the radial daughter momentum |k_1| (rest frame only).
    """
    _require_fermion(spec)
    e_i = spec.e_i
    lower = math.hypot(spec.m_a + spec.m_b, spec.p_i_mag)
    upper = math.inf
    if cutoff is not None:
        if spec.p_i_mag != 0.0:
            raise ValueError("radial cutoff is only defined in the rest frame")
        upper = on_shell_energy(spec.m_a, cutoff) + on_shell_energy(spec.m_b, cutoff)
    return integrate_cosm1_spectrum(pair_densities(spec), [e_i, -e_i], lower, t, settings,
                                    upper=upper)


def xi3_bar_rest(spec: DecayModelSpec, t: float,
                 settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Rest-frame u-bar Xi_3 u at time t; raises NotConverged if flagged."""
    return xi3_bar_result(_at_rest(spec), t, settings).unwrap("xi3_bar_rest")


def xi3_bar_regulated(spec: DecayModelSpec, t: float, cutoff: float,
                      settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Rest-frame u-bar Xi_3 u with the radial integral truncated at ``cutoff``."""
    return xi3_bar_result(_at_rest(spec), t, settings, cutoff=cutoff).unwrap("xi3_bar_regulated")


def xi3_bar_lab_regulated(
    spec: DecayModelSpec,
    t: float,
    cutoff: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    *,
    c_order: int = 48,
) -> float:
    """Lab-frame (k, cos theta) evaluation of u-bar Xi_3 u for |k_1| <= cutoff.

    A direct tensor-product cross-check for the pair-frame reduction; slow
    for large t because the resonance shell moves with the angle.
    """
    _require_fermion(spec)
    m_i, m_a, m_b, p, e_i = spec.m_i, spec.m_a, spec.m_b, spec.p_i_mag, spec.e_i

    def f(k, c):
        e_a = np.hypot(m_a, k)
        e_b = np.sqrt(m_b * m_b + p * p + k * k - 2 * p * k * c)
        s = e_a + e_b
        k1_minus_p_dot_p = p * k * c - p * p
        resonant = (e_b * e_i + k1_minus_p_dot_p) / m_i + m_b
        anti = (-e_b * e_i + k1_minus_p_dot_p) / m_i + m_b
        bracket = resonant * cosm1_over_q2(s - e_i, t) + anti * cosm1_over_q2(s + e_i, t)
        return k * k / (4 * math.pi**2) / (4 * e_a * e_b) * bracket

    n_init = int(abs(t) * 2 * cutoff / math.pi) + 4
    return integrate_2d(f, settings, k_upper=cutoff, c_order=c_order,
                        initial_panels=n_init).unwrap("xi3_bar_lab_regulated")


def _point(spec: DecayModelSpec, t: float, result: QuadratureResult) -> FermionSurvivalPoint:
    p = 1.0 + 2.0 * spec.lam**2 * result.value * (spec.m_i / spec.e_i)
    return FermionSurvivalPoint(t, result.value, p, result.converged)


def survival_probability(spec: DecayModelSpec, t: float,
                         settings: QuadratureSettings = DEFAULT_SETTINGS) -> FermionSurvivalPoint:
    """P(t) = 1 + 2 lambda^2 u-bar Xi_3 u for a parent at rest."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if spec.p_i_mag != 0.0:
        raise ValueError("survival_probability is rest-frame only; use survival_probability_moving")
    return _point(spec, t, xi3_bar_result(spec, t, settings))


def survival_probability_moving(spec: DecayModelSpec, t: float,
                                settings: QuadratureSettings = DEFAULT_SETTINGS
                                ) -> FermionSurvivalPoint:
    """P(t) = 1 + 2 lambda^2 (m_i/E_i) u-bar Xi_3 u for a parent with momentum p_i_mag."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return _point(spec, t, xi3_bar_result(spec, t, settings))


def survival_curve(spec: DecayModelSpec, ts, settings: QuadratureSettings = DEFAULT_SETTINGS
                   ) -> SurvivalCurve:
    points = [survival_probability_moving(spec, float(t), settings) for t in ts]
    return SurvivalCurve(
        ts=np.array([pt.t for pt in points]),
        ps=np.array([pt.p for pt in points]),
        meta={"model": "a", "m_i": spec.m_i, "m_a": spec.m_a, "m_b": spec.m_b,
              "lambda": spec.lam, "p_i_mag": spec.p_i_mag,
              "rel_tol": settings.rel_tol, "abs_tol": settings.abs_tol},
        converged=np.array([pt.converged for pt in points]),
    )


def short_time_slope(spec: DecayModelSpec) -> float:
    """|dP/dt| at t -> 0+ in the rest frame: lambda^2 (2 m_b + m_i) / (16 pi)."""
    _require_fermion(spec)
    return spec.lam**2 * (2 * spec.m_b + spec.m_i) / (16 * math.pi)


def decay_rate_closed(spec: DecayModelSpec) -> float:
    """Rest-frame total width lambda^2 k* ((m_i + m_b)^2 - m_a^2) / (8 pi m_i^2)."""
    point = breakup_momentum(spec)
    m_i = spec.m_i
    return spec.lam**2 * point.k_star * ((m_i + spec.m_b) ** 2 - spec.m_a**2) / (8 * math.pi * m_i**2)


def decay_rate_numeric(spec: DecayModelSpec,
                       settings: QuadratureSettings = DEFAULT_SETTINGS) -> float:
    """Width from the golden-rule phase-space integral, delta functions resolved numerically.

    The three-momentum delta fixes k_2 = -k_1; the energy delta is located by
    root finding on E_a(k) + E_b(k) = m_i and contributes the Jacobian
    E_a E_b / (k m_i).
    """
    spec.require_open()
    m_i, m_a, m_b = spec.m_i, spec.m_a, spec.m_b
    k = brentq(lambda x: math.hypot(m_a, x) + math.hypot(m_b, x) - m_i, 0.0, m_i,
               xtol=1e-15 * m_i, rtol=4 * np.finfo(float).eps, maxiter=500)
    e_a, e_b = math.hypot(m_a, k), math.hypot(m_b, k)
    p_dot_k2 = m_i * e_b
    integrand = 4 * math.pi * k * k * (p_dot_k2 + m_i * m_b) / (e_a * e_b)
    jacobian = e_a * e_b / (k * m_i)
    return spec.lam**2 / (16 * math.pi**2 * m_i) * integrand * jacobian


def golden_rule_slope(spec: DecayModelSpec) -> float:
    """Long-time slope of 1 - P in the lab frame: (m_i / E_i) * Gamma."""
    return spec.m_i / spec.e_i * decay_rate_closed(spec)
