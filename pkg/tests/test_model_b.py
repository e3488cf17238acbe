import math

import numpy as np
import pytest
from hypothesis import given, settings as hsettings, strategies as st
from scipy import integrate

from oracles import boson_xi3_cartesian_grid, delta_resolved_rate
from zenolab import BelowThreshold, DecayModelSpec, InsufficientPoints, Variant
from zenolab import model_b
from zenolab.model_b import ASYMPTOTIC_CUTOFF_SLOPE, Classification

SCAN_CUTOFFS = np.geomspace(1e3, 1e4, 8)


def boson(m_i=1.0, m_a=0.2, m_b=0.2, lam=1.0):
    return DecayModelSpec(m_i, m_a, m_b, lam, Variant.BOSON_DECAY)


def fermion(m_i=1.0, m_a=0.3, m_b=0.5):
    return DecayModelSpec(m_i, m_a, m_b)


def test_zero_time():
    for cutoff in (1.0, 50.0, 1e4):
        assert model_b.xi3_regulated(boson(), 0.0, cutoff) == 0.0
        assert model_b.survival_probability_regulated(boson(), 0.0, cutoff) == (1.0, True)


def test_against_cartesian_grid():
    ours = model_b.xi3_regulated(boson(), 1.0, 50.0)
    grid = boson_xi3_cartesian_grid(1.0, 0.2, 0.2, 1.0, 50.0, 200)
    assert ours == pytest.approx(grid, rel=5e-3)


def test_against_radial_quad():
    s = boson(m_a=0.1, m_b=0.35)
    f = model_b.radial_integrand(s, 3.0)
    ref = integrate.quad(lambda k: float(f(k)), 0, 20.0, limit=2000, epsabs=1e-14, epsrel=1e-12)[0]
    assert model_b.xi3_regulated(s, 3.0, 20.0) == pytest.approx(ref, rel=1e-9)


def test_linear_divergence_slope():
    s = boson()
    diffs = [(model_b.xi3_regulated(s, 1.0, 2 * c) - model_b.xi3_regulated(s, 1.0, c)) / c
             for c in 1e3 * 2.0 ** np.arange(5)]
    assert np.mean(diffs) == pytest.approx(ASYMPTOTIC_CUTOFF_SLOPE, rel=0.05)


def test_cauchy_differences_bounded_away_from_zero():
    s = boson()
    for c in 250.0 * 2.0 ** np.arange(6):
        d = model_b.xi3_regulated(s, 1.0, 2 * c) - model_b.xi3_regulated(s, 1.0, c)
        assert abs(d) >= c / (32 * math.pi**2)


def test_scan_linear():
    scan = model_b.divergence_scan(boson(), 1.0, SCAN_CUTOFFS)
    assert scan.classification is Classification.LINEAR
    assert scan.fitted_slope == pytest.approx(ASYMPTOTIC_CUTOFF_SLOPE, rel=0.05)
    assert np.allclose(scan.cauchy_differences, scan.doubled_values - scan.values)


def test_scan_model_a_convergent():
    scan = model_b.divergence_scan(fermion(), 1.0, SCAN_CUTOFFS)
    assert scan.classification is Classification.CONVERGENT


def test_scan_at_zero_time():
    scan = model_b.divergence_scan(boson(), 0.0, SCAN_CUTOFFS)
    assert scan.classification is Classification.CONVERGENT
    assert not scan.values.any()


def test_synthetic_logarithmic():
    cutoffs = np.geomspace(10, 1e4, 8)
    scan = model_b.classify_cutoff_sequence(1.0, cutoffs, math.log)
    assert scan.classification is Classification.LOGARITHMIC
    assert scan.fitted_slope == pytest.approx(1.0, abs=1e-3)


def test_synthetic_unknown():
    cutoffs = np.geomspace(10, 1e4, 8)
    scan = model_b.classify_cutoff_sequence(1.0, cutoffs, lambda c: math.sin(3 * math.log(c)) * c**0.3)
    assert scan.classification is Classification.UNKNOWN


def test_synthetic_convergent():
    scan = model_b.classify_cutoff_sequence(1.0, np.geomspace(10, 1e4, 8), lambda c: 2.0 - 1.0 / c)
    assert scan.classification is Classification.CONVERGENT


def test_scan_preconditions():
    with pytest.raises(InsufficientPoints):
        model_b.divergence_scan(boson(), 1.0, [1e3, 3e3, 1e4])
    with pytest.raises(InsufficientPoints):
        model_b.divergence_scan(boson(), 1.0, np.geomspace(1e3, 5e3, 8))
    with pytest.raises(ValueError):
        model_b.divergence_scan(boson(), 1.0, np.geomspace(5, 5e3, 8))
    with pytest.raises(ValueError):
        model_b.classify_cutoff_sequence(1.0, [10, 9, 20, 30, 40, 200], math.log)


@pytest.mark.parametrize("masses, expected", [((1, 0.2, 0.2), 0.0091167), ((1, 0, 0), 1 / (32 * math.pi))])
def test_formal_rate(masses, expected):
    s = boson(*masses)
    closed = model_b.formal_decay_rate(s)
    assert closed == pytest.approx(expected, abs=1e-6)
    assert closed == pytest.approx(delta_resolved_rate(*masses, 1.0), rel=1e-10)
    assert model_b.formal_decay_rate_numeric(s) == pytest.approx(closed, rel=1e-10)


def test_formal_rate_below_threshold():
    with pytest.warns(UserWarning):
        s = boson(1, 0.6, 0.5)
    with pytest.raises(BelowThreshold):
        model_b.formal_decay_rate(s)


def test_formal_rate_positive_and_vanishes_at_threshold():
    rates = [model_b.formal_decay_rate(boson(1, f, f)) for f in (0.1, 0.3, 0.45, 0.499, 0.4999999)]
    assert all(r > 0 for r in rates)
    assert all(b < a for a, b in zip(rates, rates[1:]))
    assert rates[-1] < 1e-5


@hsettings(max_examples=20, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(0.05, 5.0))
def test_dimensional_scaling(s, t):
    base = boson(m_a=0.1, m_b=0.35)
    cutoff = 30.0
    a = model_b.xi3_regulated(base, t, cutoff)
    b = model_b.xi3_regulated(base.scaled(s), t / s, s * cutoff)
    assert b == pytest.approx(s * a, rel=1e-8)


def test_guards():
    with pytest.raises(ValueError):
        model_b.xi3_regulated(fermion(), 1.0, 10.0)
    with pytest.raises(ValueError):
        model_b.xi3_regulated(boson(), 1.0, 0.0)
    with pytest.raises(ValueError):
        model_b.survival_probability_regulated(boson(), -1.0, 10.0)


def test_curve_meta():
    curve = model_b.survival_curve(boson(), [0.0, 0.5, 1.0], 50.0)
    assert curve.ps[0] == 1.0
    assert curve.meta["cutoff"] == 50.0 and curve.converged.all()
