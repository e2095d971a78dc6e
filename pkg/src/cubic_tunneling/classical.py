"""Periodic bounce of the cubic potential and its classical action.

The canonical parameter is the reduced energy ``kappa = 4E / (27 V(a))`` in
``[-4/27, 0]``; energy and temperature are views of it.  With the reduced
coordinate ``chi = 2x / (3a)`` the energy integral reads
``chi'^2 = omega^2 (-chi^3 + chi^2 + kappa)``, whose three real roots
``chi1 >= chi2 >= chi3`` are the turning points.

Writing ``kappa = -(4/27) sin^2(3 theta / 2)`` the roots are

    chi_j = 1/3 + (2/3) cos(theta - 2 pi j / 3),   j = 0, 1, 2

and all the differences needed downstream have cancellation-free forms in
``theta`` and ``beta = pi/3 - theta``:

    chi1 - chi2 = (2/sqrt3) sin(beta)
    chi2 - chi3 = (2/sqrt3) sin(theta)
    chi1 - chi3 = (2/sqrt3) sin(pi/3 + beta)

The bounce is ``x(tau) = (3a/2)[chi1 cn^2(w, p) + chi2 sn^2(w, p)]`` with
``w = sqrt(chi1 - chi3) omega tau / 2`` and ``p^2 = (chi1-chi2)/(chi1-chi3)``;
its period is ``L = 4 K(p) / (omega sqrt(chi1 - chi3))`` and ``L = hbar/(k_B T)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import elliptic
from .elliptic import Modulus
from .errors import DomainError, QuantumRegimeError
from .units import K_B_MEV_PER_K, PotentialParams

__all__ = [
    "KAPPA_SPHALERON",
    "BounceState",
    "bounce_state",
    "sphaleron_state",
    "bounce",
    "bounce_velocity",
    "temperature",
    "invert_temperature",
    "norm_squared",
    "mass_norm_squared",
    "classical_action",
    "thermal_action",
    "gauss_legendre",
]

KAPPA_SPHALERON = -4.0 / 27.0
_SQRT3 = math.sqrt(3.0)
_TWO_OVER_SQRT3 = 2.0 / _SQRT3
_PI_3 = math.pi / 3.0

# Smallest |kappa| handled through kappa itself; below this the state is
# built from log(1 - p^2) (temperatures under roughly T_c/110).
_KAPPA_FLOOR = 1e-300


@dataclass(frozen=True)
class BounceState:
    """Everything fixed by one classical energy.

    Lengths in Angstrom, ``L`` in hbar/meV, ``omega_bar`` in meV/hbar,
    ``energy`` in meV, ``T_star`` in Kelvin.
    """

    kappa: float
    energy: float
    theta: float
    beta: float
    chi1: float
    chi2: float
    chi3: float
    modulus: Modulus
    omega_bar: float
    L: float
    T_star: float
    params: PotentialParams

    @property
    def p(self) -> float:
        return self.modulus.p

    @property
    def q(self) -> float:
        """Elliptic parameter ``p**2``."""
        return self.modulus.q

    @property
    def p_bar_sq(self) -> float:
        return self.modulus.p_bar_sq

    @property
    def log_p_bar_sq(self) -> float:
        if self.modulus.log_p_bar_sq is not None:
            return self.modulus.log_p_bar_sq
        return math.log(self.modulus.p_bar_sq) if self.modulus.p_bar_sq > 0 else -math.inf

    @property
    def span(self) -> float:
        """``chi1 - chi3``."""
        return _TWO_OVER_SQRT3 * math.sin(_PI_3 + self.beta)

    @property
    def amplitude(self) -> float:
        """``chi1 - chi2``."""
        return _TWO_OVER_SQRT3 * math.sin(self.beta)

    @property
    def K(self) -> float:
        return elliptic.complete_K(self.modulus)

    @property
    def is_sphaleron(self) -> bool:
        return self.modulus.p == 0.0

    @property
    def is_zero_energy(self) -> bool:
        return self.modulus.p_bar_sq == 0.0 and self.modulus.log_p_bar_sq is None

    def energy_ratio(self) -> float:
        """``|E| / V(a)``: 0 for the zero-energy bounce, 1 at the sphaleron."""
        return -27.0 * self.kappa / 4.0

    def varpi(self, tau):
        """Elliptic argument ``sqrt(chi1 - chi3) omega tau / 2``."""
        return self.omega_bar * np.asarray(tau, dtype=float)


def _build(theta: float, beta: float, params: PotentialParams,
           log_p_bar_sq: float | None = None) -> BounceState:
    s_theta = math.sin(theta)
    s_beta = math.sin(beta)
    s_span = math.sin(_PI_3 + beta)
    chi1 = 1.0 / 3.0 + 2.0 / 3.0 * math.cos(theta)
    half_sum = 2.0 / 3.0 * math.sin(0.5 * theta) ** 2  # (chi2 + chi3) / 2
    chi2 = half_sum + s_theta / _SQRT3
    chi3 = half_sum - s_theta / _SQRT3
    if log_p_bar_sq is not None:
        modulus = Modulus(1.0, 0.0, log_p_bar_sq)
        kappa = -0.0
    else:
        modulus = Modulus(math.sqrt(s_beta / s_span), s_theta / s_span)
        kappa = -(4.0 / 27.0) * math.sin(1.5 * theta) ** 2
    span = _TWO_OVER_SQRT3 * s_span
    w = params.omega
    omega_bar = 0.5 * math.sqrt(span) * w
    if modulus.p == 0.0:
        L = 2.0 * math.pi / w
    elif modulus.p_bar_sq == 0.0 and log_p_bar_sq is None:
        L = math.inf
    else:
        L = 4.0 * elliptic.complete_K(modulus) / (w * math.sqrt(span))
    T_star = 0.0 if math.isinf(L) else 1.0 / (K_B_MEV_PER_K * L)
    energy = 27.0 * params.barrier_height * kappa / 4.0
    return BounceState(kappa, energy, theta, beta, chi1, chi2, chi3, modulus,
                       omega_bar, L, T_star, params)


def sphaleron_state(params: PotentialParams) -> BounceState:
    """The point-like bounce at the bottom of the inverted potential (kappa = -4/27)."""
    return BounceState(KAPPA_SPHALERON, -params.barrier_height, _PI_3, 0.0,
                       2.0 / 3.0, 2.0 / 3.0, -1.0 / 3.0, Modulus(0.0, 1.0),
                       0.5 * params.omega, 2.0 * math.pi / params.omega, params.T_c, params)


def bounce_state(kappa: float, params: PotentialParams) -> BounceState:
    """Turning points, modulus, period and temperature for reduced energy ``kappa``."""
    kappa = float(kappa)
    if not (KAPPA_SPHALERON <= kappa <= 0.0):
        raise DomainError(f"kappa={kappa!r} outside [-4/27, 0]: no classical bounce")
    if kappa == KAPPA_SPHALERON:
        return sphaleron_state(params)
    if kappa == 0.0:
        return BounceState(0.0, 0.0, 0.0, _PI_3, 1.0, 0.0, 0.0, Modulus(1.0, 0.0),
                           0.5 * params.omega, math.inf, 0.0, params)
    x = math.sqrt(-27.0 * kappa / 4.0)
    y = math.sqrt(max(1.0 + 27.0 * kappa / 4.0, 0.0))
    theta = 2.0 / 3.0 * math.atan2(x, y)
    beta = 2.0 / 3.0 * math.atan2(y, x)
    st = _build(theta, beta, params)
    return BounceState(kappa, st.energy, st.theta, st.beta, st.chi1, st.chi2, st.chi3,
                       st.modulus, st.omega_bar, st.L, st.T_star, params)


def _state_from_log_pbar_sq(log_pbar_sq: float, params: PotentialParams) -> BounceState:
    """Deep low-temperature states whose 1 - p^2 underflows double precision.

    Only the elliptic K carries information there; all other quantities are at
    their zero-energy values to within the (unrepresentable) 1 - p^2.
    """
    return _build(0.0, _PI_3, params, log_p_bar_sq=log_pbar_sq)


def bounce(tau, state: BounceState, tau0: float = 0.0):
    """Bounce trajectory x_cl(tau) in Angstrom."""
    a = state.params.a
    if state.is_sphaleron:
        return np.full_like(np.asarray(tau, dtype=float), a) if np.ndim(tau) else a
    sn, cn, _ = elliptic.jacobi(state.varpi(np.asarray(tau, dtype=float) - tau0), state.modulus)
    # chi1 cn^2 + chi2 sn^2: both terms non-negative, no cancellation in the tails
    return 1.5 * a * (state.chi1 * cn * cn + state.chi2 * sn * sn)


def bounce_velocity(tau, state: BounceState, tau0: float = 0.0):
    """Path velocity dx_cl/dtau in Angstrom meV / hbar."""
    a = state.params.a
    F = -state.params.omega * state.amplitude * math.sqrt(state.span)
    if state.is_sphaleron:
        return np.zeros_like(np.asarray(tau, dtype=float)) if np.ndim(tau) else 0.0
    sn, cn, dn = elliptic.jacobi(state.varpi(np.asarray(tau, dtype=float) - tau0), state.modulus)
    return 1.5 * a * F * sn * cn * dn


def temperature(state: BounceState) -> float:
    """Temperature T* in Kelvin at which the bounce period equals hbar / k_B T*.

    Zero for the zero-energy bounce (infinite period), T_c at the sphaleron.
    """
    return state.T_star


def invert_temperature(T_star: float, params: PotentialParams, *, rtol: float = 1e-13) -> BounceState:
    """Bounce state whose temperature is ``T_star`` (Kelvin).

    The temperature decreases monotonically from T_c at the sphaleron to zero at
    kappa = 0, so a bracketing root search in kappa (or in log|kappa| towards the
    zero-temperature end) is always well posed.
    """
    T_star = float(T_star)
    T_c = params.T_c
    if not (T_star > 0.0) or not math.isfinite(T_star):
        raise DomainError(f"temperature must be positive, got {T_star!r}")
    if T_star > T_c * (1.0 + 1e-14):
        raise QuantumRegimeError(f"T*={T_star} K exceeds the crossover temperature {T_c} K")
    if T_star >= T_c:
        return sphaleron_state(params)

    floor_state = bounce_state(-_KAPPA_FLOOR, params)
    if T_star < floor_state.T_star:
        # Below the kappa floor: solve K(p) = (pi/2)(T_c/T*) sqrt(chi1 - chi3) with the
        # logarithmic asymptotics K = ln 4 - log(1 - p^2) / 2 (span = 1 there).
        K_target = 0.25 * params.omega / (K_B_MEV_PER_K * T_star)
        return _state_from_log_pbar_sq(2.0 * (math.log(4.0) - K_target), params)

    def residual(z):
        return temperature(bounce_state(-math.exp(z), params)) / T_star - 1.0

    if T_star < 0.5 * T_c:
        z = brentq(residual, math.log(_KAPPA_FLOOR), math.log(4.0 / 27.0), xtol=1e-15, rtol=1e-15)
        return bounce_state(-math.exp(z), params)

    def residual_k(k):
        return temperature(bounce_state(k, params)) / T_star - 1.0

    k = brentq(residual_k, KAPPA_SPHALERON, -_KAPPA_FLOOR, xtol=1e-18, rtol=1e-15)
    return bounce_state(k, params)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1] (cached)."""
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _velocity_integral(state: BounceState, n: int = 96) -> float:
    """Dimensionless ``I = integral over one period of (dchi/ds)^2 ds`` (s = omega tau).

    With chi = chi2 + (chi1 - chi2) sin^2(phi) the turning-point square roots
    cancel and the integrand is smooth on [0, pi/2].
    """
    if state.is_sphaleron:
        return 0.0
    amp = state.amplitude
    gap = _TWO_OVER_SQRT3 * math.sin(state.theta)  # chi2 - chi3
    x, w = gauss_legendre(n)
    phi = 0.25 * math.pi * (x + 1.0)
    s2 = np.sin(phi) ** 2
    integrand = s2 * (1.0 - s2) * np.sqrt(gap + amp * s2)
    return 4.0 * amp * amp * 0.25 * math.pi * float(np.dot(w, integrand))


def norm_squared(state: BounceState, n: int = 96) -> float:
    """Squared norm of the path velocity, ``N^-2 = integral over one period of xdot^2``.

    Units Angstrom^2 meV / hbar.
    """
    a = state.params.a
    return 2.25 * a * a * state.params.omega * _velocity_integral(state, n)


def mass_norm_squared(state: BounceState) -> float:
    """Dimensionless ``M N^-2 / hbar``."""
    return 2.25 * state.params.reduced_action * _velocity_integral(state)


def classical_action(state: BounceState) -> float:
    """Dimensionless bounce action ``A / hbar = (M N^-2 - E L) / hbar``."""
    S = state.params.reduced_action
    if state.kappa == 0.0:
        energy_term = 0.0  # kappa L -> 0 at zero energy
    else:
        energy_term = 1.125 * S * state.kappa * state.params.omega * state.L
    return mass_norm_squared(state) - energy_term


def thermal_action(T_star: float, params: PotentialParams) -> float:
    """Dimensionless thermal action ``V(a) / k_B T*``."""
    if not (T_star > 0):
        raise DomainError("temperature must be positive")
    return params.barrier_height / (K_B_MEV_PER_K * T_star)
