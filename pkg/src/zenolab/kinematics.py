"""Two-body decay kinematics in natural units (hbar = c = 1)."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BelowThreshold


class Variant(enum.Enum):
    FERMION_DECAY = "FermionDecay"
    BOSON_DECAY = "BosonDecay"


@dataclass(frozen=True)
class DecayModelSpec:
    """One physical setup: parent mass, daughter masses, coupling, frame.

    Masses set the unit scale; times are in inverse-mass units.
    ``p_i_mag`` is the parent's three-momentum magnitude in the lab frame.
    """

    m_i: float
    m_a: float
    m_b: float
    lam: float = 1.0
    variant: Variant = Variant.FERMION_DECAY
    p_i_mag: float = 0.0

    def __post_init__(self):
        if not self.m_i > 0:
            raise ValueError(f"m_i must be positive, got {self.m_i}")
        for name in ("m_a", "m_b", "lam", "p_i_mag"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)}")
        if not self.is_open:
            warnings.warn(
                f"closed decay channel: m_i={self.m_i} <= m_a + m_b = {self.m_a + self.m_b}",
                stacklevel=3,
            )

    @property
    def is_open(self) -> bool:
        return self.m_i > self.m_a + self.m_b

    @property
    def e_i(self) -> float:
        """Parent energy in the lab frame."""
        return math.hypot(self.m_i, self.p_i_mag)

    def scaled(self, s: float) -> "DecayModelSpec":
        """Same setup with every mass and momentum multiplied by ``s``."""
        return DecayModelSpec(
            self.m_i * s, self.m_a * s, self.m_b * s, self.lam, self.variant, self.p_i_mag * s
        )

    def require_open(self) -> None:
        if not self.is_open:
            raise BelowThreshold(
                f"decay channel closed: m_i={self.m_i} <= m_a + m_b = {self.m_a + self.m_b}"
            )


@dataclass(frozen=True)
class TwoBodyPoint:
    k_star: float
    e_a_star: float
    e_b_star: float


def kallen_lambda(x, y, z):
    """Triangle function x^2 + y^2 + z^2 - 2xy - 2yz - 2zx."""
    return x * x + y * y + z * z - 2 * x * y - 2 * y * z - 2 * z * x


def on_shell_energy(m, k):
    """Relativistic energy sqrt(m^2 + k^2); accepts arrays."""
    e = np.hypot(m, k)
    return float(e) if np.ndim(e) == 0 else e


def pair_momentum(mass, m_a, m_b):
    """Breakup momentum of a pair with invariant mass ``mass`` (vectorized).

    Factorized form of sqrt(lambda(M^2, m_a^2, m_b^2)) / (2M); it avoids the
    cancellation in the expanded triangle function near threshold.
    """
    mass = np.asarray(mass, dtype=float)
    root = np.sqrt(np.maximum(mass - (m_a + m_b), 0.0)) * np.sqrt(mass + (m_a + m_b))
    root = root * np.sqrt(np.maximum(mass - abs(m_a - m_b), 0.0)) * np.sqrt(mass + abs(m_a - m_b))
    return root / (2.0 * mass)


def breakup_momentum(spec: DecayModelSpec) -> TwoBodyPoint:
    """Daughter momentum and energies in the parent rest frame."""
    spec.require_open()
    m_i, m_a, m_b = spec.m_i, spec.m_a, spec.m_b
    k_star = math.sqrt(kallen_lambda(m_i**2, m_a**2, m_b**2)) / (2.0 * m_i)
    return TwoBodyPoint(
        k_star=k_star,
        e_a_star=(m_i**2 + m_a**2 - m_b**2) / (2.0 * m_i),
        e_b_star=(m_i**2 + m_b**2 - m_a**2) / (2.0 * m_i),
    )
