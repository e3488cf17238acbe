"""Deterministic quadrature for smooth, oscillatory and semi-infinite integrands.

Every integrand is called with a 1-D float array and must return an array of
the same shape. Subdivision order is fixed, so identical inputs give
bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .errors import NotConverged

# 21-point Kronrod / embedded 10-point Gauss rule (QUADPACK qk21 constants).
_XGK = np.array([
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0,
])
_WGK = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208292139949, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG10 = np.array([
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651271,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS_WEIGHTS = np.zeros(21)
GAUSS_WEIGHTS[1:10:2] = _WG10
GAUSS_WEIGHTS[19:10:-2] = _WG10

_EPS = np.finfo(float).eps
_MAX_ACTIVE_PANELS = 400_000
_SPLITTER = 134217729.0  # 2**27 + 1

# Below this |t*q| the even Taylor series is used.
EPS_SWITCH = 1e-4

# Smallest |t| * (mass scale) accepted by the spectral integrator.
MIN_PHASE_RATE = 1e-100

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_depth: int = 60
    split_point: float = 10.0
    tail_panels_max: int = 200

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not self.split_point > 0:
            raise ValueError("split_point must be positive")
        if self.tail_panels_max < 1:
            raise ValueError("tail_panels_max must be >= 1")

    def tolerance(self, value: float) -> float:
        return max(self.rel_tol * abs(value), self.abs_tol)

    def with_(self, **changes) -> "QuadratureSettings":
        return replace(self, **changes)


DEFAULT_SETTINGS = QuadratureSettings()


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    panels_used: int
    converged: bool

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        return QuadratureResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.panels_used + other.panels_used,
            self.converged and other.converged,
        )

    def scaled(self, factor: float) -> "QuadratureResult":
        return QuadratureResult(
            self.value * factor, self.error_estimate * abs(factor), self.panels_used, self.converged
        )

    def unwrap(self, what: str = "integral") -> float:
        """Return the value, raising :class:`NotConverged` if flagged."""
        if not self.converged:
            raise NotConverged(
                f"{what} not converged (value={self.value!r}, error~{self.error_estimate:.3g})",
                self,
            )
        return self.value


ZERO = QuadratureResult(0.0, 0.0, 0, True)


def _gk21(f: Integrand, lo: np.ndarray, hi: np.ndarray):
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = center[:, None] + half[:, None] * NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    if not np.all(np.isfinite(fx)):
        raise ValueError("integrand returned non-finite values")
    kronrod = half * (fx @ KRONROD_WEIGHTS)
    gauss = half * (fx @ GAUSS_WEIGHTS)
    resabs = np.abs(half) * (np.abs(fx) @ KRONROD_WEIGHTS)
    mean = (fx @ KRONROD_WEIGHTS) * 0.5
    resasc = np.abs(half) * (np.abs(fx - mean[:, None]) @ KRONROD_WEIGHTS)
    err = np.abs(kronrod - gauss)
    scaled = resasc > 0
    err[scaled] = resasc[scaled] * np.minimum(1.0, (200.0 * err[scaled] / resasc[scaled]) ** 1.5)
    return kronrod, err, resabs


def integrate_adaptive(
    f: Integrand,
    a: float,
    b: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    *,
    breakpoints: Sequence[float] = (),
    initial_panels: int = 1,
) -> QuadratureResult:
    """Globally adaptive Gauss-Kronrod (21-point) integration of f over [a, b].

    All panels still above their share of the tolerance are bisected together,
    one sweep per depth level, so each sweep costs a single vectorized call.
    """
    if a > b:
        raise ValueError(f"require a <= b, got [{a}, {b}]")
    if a == b:
        return ZERO
    edges = np.unique(np.clip(np.asarray([a, *breakpoints, b], dtype=float), a, b))
    n = max(int(initial_panels), 1)
    frac = np.arange(n + 1) / n
    grid = (edges[:-1, None] + (edges[1:] - edges[:-1])[:, None] * frac[None, :])
    lo = grid[:, :-1].ravel()
    hi = grid[:, 1:].ravel()
    length = b - a

    accepted_val = 0.0
    accepted_err = 0.0
    panels = 0
    for _ in range(settings.max_depth):
        val, err, resabs = _gk21(f, lo, hi)
        panels += lo.size
        total = accepted_val + val.sum()
        tol = settings.tolerance(total)
        if accepted_err + err.sum() <= tol:
            return QuadratureResult(float(total), float(accepted_err + err.sum()), panels, True)
        share = tol * (hi - lo) / length
        done = (err <= share) | (err <= 50 * _EPS * resabs)
        accepted_val += val[done].sum()
        accepted_err += err[done].sum()
        lo, hi = lo[~done], hi[~done]
        if lo.size == 0:
            return QuadratureResult(float(accepted_val), float(accepted_err), panels,
                                    accepted_err <= tol)
        if 2 * lo.size > _MAX_ACTIVE_PANELS:
            break
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]
    val, err, _ = _gk21(f, lo, hi)
    panels += lo.size
    return QuadratureResult(float(accepted_val + val.sum()), float(accepted_err + err.sum()),
                            panels, False)


def integrate_semi_infinite(
    f: Integrand,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    *,
    lower: float = 0.0,
) -> QuadratureResult:
    """Integrate f over [lower, inf) for |f| = O(x^-2) beyond ``split_point``.

    Adaptive core on [lower, K0], then octave panels [K0 2^n, K0 2^(n+1)]
    until a panel is below ``abs_tol`` and twice its magnitude (the bound
    on the remaining tail for an x^-2 integrand) is within tolerance.
    """
    k0 = max(settings.split_point, lower)
    result = integrate_adaptive(f, lower, k0, settings) if k0 > lower else ZERO
    lo = k0
    bound = math.inf
    for _ in range(settings.tail_panels_max):
        panel = integrate_adaptive(f, lo, 2.0 * lo, settings)
        result = result + panel
        bound = 2.0 * abs(panel.value)
        if abs(panel.value) < settings.abs_tol and bound <= settings.tolerance(result.value):
            return QuadratureResult(result.value, result.error_estimate + bound,
                                    result.panels_used, result.converged)
        lo *= 2.0
    return QuadratureResult(result.value, result.error_estimate + bound, result.panels_used, False)


def wynn_epsilon(partial_sums: Sequence[float]) -> tuple[float, float]:
    """Extrapolate a sequence of partial sums with Wynn's epsilon algorithm.

    Returns (limit, error estimate); the estimate is the smallest gap between
    successive even-column extrapolants.
    """
    s = np.asarray(partial_sums, dtype=float)
    if s.size == 0:
        raise ValueError("empty sequence")
    if s.size < 3:
        return float(s[-1]), (abs(s[-1] - s[-2]) if s.size == 2 else math.inf)
    scale = np.max(np.abs(s))
    prev = np.zeros(s.size + 1)
    cur = s.copy()
    estimates = [cur[-1]]
    for k in range(1, s.size):
        diff = cur[1:] - cur[:-1]
        if np.any(np.abs(diff) <= 4 * _EPS * scale):
            break
        prev, cur = cur, prev[1:cur.size] + 1.0 / diff
        if k % 2 == 0:
            estimates.append(cur[-1])
        if cur.size < 2:
            break
    if len(estimates) == 1:
        return float(s[-1]), float(abs(s[-1] - s[-2]))
    gaps = np.abs(np.diff(estimates))
    best = int(np.argmin(gaps))
    return float(estimates[best + 1]), float(gaps[best] + 8 * _EPS * scale)


def integrate_oscillatory_tail(
    f: Integrand,
    lower: float,
    omega: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    *,
    n_half_periods: int = 48,
) -> QuadratureResult:
    """Integrate f over [lower, inf) when f oscillates at angular frequency omega.

    f must have a smooth amplitude decaying algebraically. Half-period
    integrals form a (near) alternating series whose partial sums are
    extrapolated with the epsilon algorithm.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    half_period = math.pi / omega
    starts = lower + half_period * np.arange(n_half_periods)
    subdiv = 2
    while True:
        frac = np.arange(subdiv + 1) / subdiv
        edges = starts[:, None] + half_period * frac[None, :]
        val, err, _ = _gk21(f, edges[:, :-1].ravel(), edges[:, 1:].ravel())
        pieces = val.reshape(n_half_periods, subdiv).sum(axis=1)
        quad_err = err.sum()
        if quad_err <= settings.tolerance(pieces.sum()) / 10 or subdiv >= 256:
            break
        subdiv *= 2
    limit, extrap_err = wynn_epsilon(np.cumsum(pieces))
    error = float(extrap_err + quad_err)
    return QuadratureResult(float(limit), error, n_half_periods * subdiv,
                            bool(error <= settings.tolerance(limit)))


def integrate_2d(
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    *,
    k_lower: float = 0.0,
    k_upper: float = math.inf,
    c_order: int = 16,
    k_breakpoints: Sequence[float] = (),
    initial_panels: int = 1,
) -> QuadratureResult:
    """Integrate f(k, c) over k in [k_lower, k_upper], c in [-1, 1].

    Fixed-order Gauss-Legendre in c composed with the adaptive (finite k
    range) or semi-infinite scheme in k. f is called with broadcastable
    arrays k[:, None] and c[None, :].
    """
    c, w = np.polynomial.legendre.leggauss(c_order)

    def reduced(k):
        return np.asarray(f(k[:, None], c[None, :]), dtype=float) @ w

    if math.isinf(k_upper):
        return integrate_semi_infinite(reduced, settings, lower=k_lower)
    return integrate_adaptive(reduced, k_lower, k_upper, settings,
                              breakpoints=k_breakpoints, initial_panels=initial_panels)


def _two_product(a, b):
    """Exact product a*b = p + e (Dekker/Veltkamp)."""
    p = a * b
    ca = _SPLITTER * a
    a_hi = ca - (ca - a)
    a_lo = a - a_hi
    cb = _SPLITTER * b
    b_hi = cb - (cb - b)
    b_lo = b - b_hi
    e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, e


def cosm1_over_q2(q, t):
    """(cos(t q) - 1) / q**2, finite and accurate for every q and t.

    Uses -2 sin^2(tq/2)/q^2 with the rounding error of the product t*q
    carried separately, and the even Taylor series -t^2/2 + t^4 q^2/24 -
    t^6 q^4/720 for |t q| < EPS_SWITCH (including q = 0).
    """
    q_arr, t_arr = np.broadcast_arrays(np.asarray(q, dtype=float), np.asarray(t, dtype=float))
    x, x_err = _two_product(t_arr, q_arr)
    small = np.abs(x) < EPS_SWITCH
    with np.errstate(divide="ignore", invalid="ignore"):
        h = 0.5 * x
        s = np.sin(h) + np.cos(h) * (0.5 * x_err)
        direct = -2.0 * (s / q_arr) ** 2
    x2 = x * x
    series = t_arr * t_arr * (-0.5 + x2 * (1.0 / 24.0 - x2 / 720.0))
    out = np.where(small, series, direct)
    return float(out) if out.ndim == 0 else out


def integrate_cosm1_spectrum(
    densities: Callable[[np.ndarray], np.ndarray],
    centers: Sequence[float],
    lower: float,
    t: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
    *,
    upper: float = math.inf,
) -> QuadratureResult:
    """Integrate sum_j rho_j(x) (cos(t(x - c_j)) - 1)/(x - c_j)^2 over [lower, upper].

    ``densities(x)`` returns an array of shape (len(centers), len(x)). The
    densities may vanish like sqrt(x - lower) at the threshold; the core
    range is integrated in u = sqrt(x - lower), which removes that endpoint
    singularity. For ``upper = inf`` the non-oscillatory tail
    -sum_j rho_j/(x - c_j)^2 must decay like x^-2; the oscillatory tail only
    needs algebraically decaying amplitudes.
    """
    t = abs(float(t))
    centers = np.asarray(centers, dtype=float)
    if t == 0.0 or upper <= lower:
        return ZERO
    scale = max(float(np.abs(centers).max()), abs(lower), 1e-300)
    if t * scale < MIN_PHASE_RATE:
        # the oscillation period would exceed the float range before the tail is reached
        raise ValueError(f"|t| * mass scale = {t * scale:.3g} is below {MIN_PHASE_RATE:g}")

    def full(x):
        return np.sum(densities(x) * cosm1_over_q2(x[None, :] - centers[:, None], t), axis=0)

    c_hi = max(float(centers.max()), lower)
    split = c_hi + max(8.0 * math.pi / t, abs(float(centers.max())), 1e-300)
    core_end = min(split, upper)

    def core(u):
        return 2.0 * u * full(lower + u * u)

    u_end = math.sqrt(core_end - lower)
    u_breaks = [math.sqrt(c - lower) for c in centers if lower < c < core_end]
    n_init = max(8, int(t * (core_end - lower) / math.pi) + 1)
    result = integrate_adaptive(core, 0.0, u_end, settings, breakpoints=u_breaks,
                                initial_panels=min(n_init, 4096))
    if core_end == upper:
        return result
    if math.isfinite(upper):
        n_mid = int(t * (upper - split) / math.pi) + 1
        return result + integrate_adaptive(full, split, upper, settings, initial_panels=n_mid)

    def smooth_tail(x):
        return -np.sum(densities(x) / (x[None, :] - centers[:, None]) ** 2, axis=0)

    def oscillating_tail(x):
        q = x[None, :] - centers[:, None]
        return np.sum(densities(x) * np.cos(t * q) / q**2, axis=0)

    result = result + integrate_semi_infinite(smooth_tail, settings, lower=split)
    return result + integrate_oscillatory_tail(oscillating_tail, split, t, settings)
