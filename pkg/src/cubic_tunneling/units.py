"""Unit system and potential parameters.

Internal units: energies in meV, lengths in Angstrom, imaginary times in
hbar/meV (so the oscillator frequency omega is numerically equal to hbar*omega
in meV), temperatures in Kelvin.  The mass only ever enters through the
dimensionless combination ``M omega a**2 / hbar``.

The cubic potential is ``V(x) = M omega^2 x^2 / 2 - gamma x^3 / 3`` with
``gamma = M omega^2 / a`` so that the barrier top sits at ``x = a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

__all__ = [
    "HBAR_C_EV_ANGSTROM",
    "ELECTRON_MASS_EV",
    "K_B_MEV_PER_K",
    "PotentialParams",
    "derive_params",
]

# CODATA 2018, frozen so that golden outputs are bit-stable.
HBAR_C_EV_ANGSTROM = 1973.269804
ELECTRON_MASS_EV = 510998.95
K_B_MEV_PER_K = 0.08617333

_HBAR_C_MEV_ANGSTROM = HBAR_C_EV_ANGSTROM * 1e3
_ELECTRON_MASS_MEV = ELECTRON_MASS_EV * 1e3


@dataclass(frozen=True)
class PotentialParams:
    """Physical inputs of the cubic metastable potential plus derived constants.

    Parameters
    ----------
    mass : float
        Particle mass in electron masses.
    hbar_omega : float
        Oscillator quantum in meV.
    a : float
        Position of the barrier top in Angstrom.
    """

    mass: float
    hbar_omega: float
    a: float
    gamma: float = field(init=False)
    barrier_height: float = field(init=False)
    action_scale: float = field(init=False)

    def __post_init__(self):
        for name in ("mass", "hbar_omega", "a"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be a positive finite number, got {value!r}")
        m = self.mass_internal
        w = self.omega
        object.__setattr__(self, "gamma", m * w * w / self.a)
        object.__setattr__(self, "barrier_height", m * w * w * self.a**2 / 6.0)
        object.__setattr__(self, "action_scale", 1.2 * self.reduced_action)

    @property
    def omega(self) -> float:
        """Angular frequency in meV/hbar (numerically equal to ``hbar_omega``)."""
        return float(self.hbar_omega)

    @property
    def mass_internal(self) -> float:
        """Mass in meV^-1 Angstrom^-2 (with hbar = 1)."""
        return self.mass * _ELECTRON_MASS_MEV / _HBAR_C_MEV_ANGSTROM**2

    @property
    def reduced_action(self) -> float:
        """Dimensionless ``M omega a^2 / hbar``."""
        return self.mass_internal * self.omega * self.a**2

    @property
    def kT_c(self) -> float:
        """Crossover thermal energy ``hbar omega / 2 pi`` in meV."""
        return self.hbar_omega / (2.0 * math.pi)

    @property
    def T_c(self) -> float:
        """Crossover temperature in Kelvin."""
        return self.kT_c / K_B_MEV_PER_K

    def potential(self, x):
        """V(x) in meV for x in Angstrom."""
        x = np.asarray(x, dtype=float)
        m, w = self.mass_internal, self.omega
        return 0.5 * m * w * w * x * x - self.gamma * x**3 / 3.0

    def force(self, x):
        """V'(x) in meV/Angstrom."""
        x = np.asarray(x, dtype=float)
        return self.mass_internal * self.omega**2 * x - self.gamma * x * x

    def curvature(self, x):
        """V''(x) / M in (meV/hbar)^2."""
        x = np.asarray(x, dtype=float)
        return self.omega**2 * (1.0 - 2.0 * x / self.a)

    def as_dict(self) -> dict:
        return {"mass_me": self.mass, "hbar_omega_mev": self.hbar_omega, "a_angstrom": self.a}


def derive_params(mass: float, hbar_omega: float, a: float) -> PotentialParams:
    """Validate the three physical inputs and populate the derived constants."""
    return PotentialParams(float(mass), float(hbar_omega), float(a))
