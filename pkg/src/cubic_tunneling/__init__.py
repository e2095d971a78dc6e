"""Semiclassical decay rate of a particle in a cubic metastable potential at finite temperature."""

from .classical import (
    BounceState,
    bounce,
    bounce_state,
    bounce_velocity,
    classical_action,
    invert_temperature,
    mass_norm_squared,
    norm_squared,
    temperature,
    thermal_action,
)
from .elliptic import JacobiTriple, Modulus, complete_E, complete_K, incomplete_F, jacobi
from .errors import (
    DivergenceError,
    DomainError,
    FitError,
    ParameterError,
    QuantumRegimeError,
)
from .fluctuation import (
    DeterminantData,
    LameSpectrum,
    det_harmonic,
    det_ratio,
    det_regularized,
    determinants,
    lame_mode,
    lame_spectrum,
    wronskian,
)
from .rate import (
    RateCurve,
    RatePoint,
    arrhenius_rate,
    decay_rate,
    fit_crossover_exponent,
    scan,
    semiclassical_warnings,
)
from .units import PotentialParams, derive_params

__version__ = "0.1.0"
