"""Finite-time survival probabilities of unstable particles at order lambda^2.

Two renormalizable field-theory decays (fermion -> fermion + scalar, and
scalar -> two fermions) plus a non-relativistic reference, with the
quadrature needed to evaluate their oscillatory momentum integrals.
"""

__version__ = "0.1.0"

from .errors import BelowThreshold, DegenerateInput, InsufficientPoints, NotConverged
from .kinematics import DecayModelSpec, TwoBodyPoint, Variant, breakup_momentum, kallen_lambda, on_shell_energy
from .quadrature import QuadratureResult, QuadratureSettings

__all__ = [
    "BelowThreshold", "DecayModelSpec", "DegenerateInput", "InsufficientPoints", "NotConverged",
    "QuadratureResult", "QuadratureSettings", "TwoBodyPoint", "Variant", "breakup_momentum",
    "kallen_lambda", "on_shell_energy",
]
