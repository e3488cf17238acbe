"""Independent reference computations shared by the test modules."""

import math

import numpy as np
from scipy.optimize import brentq


def boson_xi3_cartesian_grid(m_i, m_a, m_b, t, cutoff, n):
    """Midpoint-rule Xi_3 of the boson model over the ball |k| <= cutoff.

    Direct evaluation on an n^3 grid of the positive octant (the integrand is
    isotropic), with the naive (cos(tq) - 1)/q^2 guarded only at q = 0.
    """
    h = cutoff / n
    axis = (np.arange(n) + 0.5) * h
    total = 0.0
    ky, kz = np.meshgrid(axis, axis, indexing="ij")
    kyz2 = ky * ky + kz * kz
    for kx in axis:
        k2 = kx * kx + kyz2
        inside = k2 <= cutoff * cutoff
        k2 = k2[inside]
        e_a = np.sqrt(m_a * m_a + k2)
        e_b = np.sqrt(m_b * m_b + k2)
        s = e_a + e_b
        weight = (m_a * m_b + e_a * e_b + k2) / (4 * e_a * e_b)
        bracket = 0.0
        for q in (s - m_i, s + m_i):
            safe = np.where(q == 0, 1.0, q)
            bracket = bracket + np.where(q == 0, -0.5 * t * t, (np.cos(t * q) - 1) / (safe * safe))
        total += np.sum(weight * bracket)
    return 8 * total * h**3 / (2 * math.pi) ** 3


def delta_resolved_rate(m_i, m_a, m_b, lam):
    k = brentq(lambda x: math.hypot(m_a, x) + math.hypot(m_b, x) - m_i, 0, m_i, xtol=1e-16)
    e_a, e_b = math.hypot(m_a, k), math.hypot(m_b, k)
    measure = k * k / (2 * math.pi**2) * (m_a * m_b + e_a * e_b + k * k) / (4 * e_a * e_b)
    # (1 - cos tq)/q^2 -> pi t delta(q); delta(S(k) - m_i) = delta(k - k*) E_a E_b / (k m_i)
    return lam**2 / m_i * math.pi * measure * e_a * e_b / (k * m_i)
