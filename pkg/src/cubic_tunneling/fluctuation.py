"""Quadratic fluctuations about the periodic bounce.

The fluctuation operator is ``O = -d^2/dtau^2 + V''(x_cl)/M``.  In the elliptic
argument ``w = omega_bar tau`` its eigenproblem becomes the l = 3 Lame equation

    eta'' = (12 p^2 sn^2 w + A) eta,     eps = omega^2 (alpha1 - alpha2 A)

with ``alpha1 = 1 - 3 chi1`` and ``alpha2 = (chi1 - chi3) / 4``.  Three of the
seven polynomial solutions have period 2K and are admissible under periodic
boundary conditions; they give the negative mode, the zero mode and the
lowest positive ("soft") mode.

Determinants
------------
With ``f0`` the zero mode (the path velocity) and ``f1`` the second
homogeneous solution obtained from ``d x_cl / dq`` (q = p^2), the determinant
with the zero mode removed is

    Det^R = <f0|f0> (dL/dq) / W(f0, f1)

where ``W`` is the (constant) Wronskian.  ``det_regularized`` evaluates this
exactly; with ``scale_term=False`` the derivative of the period is taken at
fixed ``chi1 - chi3``, which is the simplified closed form

    Det^R = 2 / (omega sqrt(chi1 - chi3) (1 - p^2)) * [(E - (1 - p^2) K) / p^2] * <f0|f0> / W.

Both are compared against the monodromy oracle in ``oracle``; only the exact
one agrees with it (see README).

The harmonic determinant under periodic boundary conditions is
``-4 sinh^2(omega L / 2)``.  Magnitudes are carried as logarithms since
``omega L`` reaches several hundred at the cold end of a scan.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import classical, elliptic
from .classical import BounceState
from .errors import DivergenceError, DomainError

__all__ = [
    "LameSpectrum",
    "DeterminantData",
    "LAME_KINDS",
    "lame_spectrum",
    "lame_mode",
    "lame_polynomial",
    "lame_residual",
    "dchi1_dq",
    "dchi1_dq_fd",
    "period_derivative",
    "wronskian",
    "log_wronskian",
    "det_regularized",
    "log_abs_det_regularized",
    "det_harmonic",
    "log_abs_det_harmonic",
    "det_ratio",
    "determinants",
]

Variant = Literal["exact", "fixed-scale"]

_SQRT3 = math.sqrt(3.0)
_PI_3 = math.pi / 3.0
_LOG_DCHI = math.log(4.0 / (3.0 * _SQRT3))

# Admissible (period 2K) modes first, then the four period-4K solutions.
LAME_KINDS = ("dn-", "sncndn", "dn+", "sn+", "sn-", "cn+", "cn-")


@dataclass(frozen=True)
class LameSpectrum:
    """The three periodic Lame eigenvalues (in meV^2) and their ingredients."""

    A_plus: float
    A_minus: float
    alpha1: float
    alpha2: float
    eps_minus1: float
    eps_0: float
    eps_1: float


def _exp(x: float) -> float:
    """exp that saturates to inf instead of raising."""
    return math.exp(x) if x < 709.0 else math.inf


def _root_4q(q: float) -> float:
    return math.sqrt(4.0 * q * q - q + 1.0)


def lame_spectrum(state: BounceState) -> LameSpectrum:
    """Negative, zero and soft eigenvalues of the fluctuation operator."""
    q = state.q
    span = state.span
    w2 = state.params.omega ** 2
    R = _root_4q(q)
    A_plus = -(2.0 + 5.0 * q) - 2.0 * R
    A_minus = -(2.0 + 5.0 * q) + 2.0 * R
    alpha1 = 1.0 - 3.0 * state.chi1
    alpha2 = 0.25 * span
    # alpha1 = alpha2 * A0 with A0 = -4(1 + q) (zero mode), so eps = omega^2 alpha2 (A0 - A).
    # A0 - A_plus = 15 q^2 / (2R + 2 - q) avoids cancelling at small q.
    eps_1 = w2 * alpha2 * 15.0 * q * q / (2.0 * R + 2.0 - q)
    eps_minus1 = w2 * alpha2 * (q - 2.0 - 2.0 * R)
    return LameSpectrum(A_plus, A_minus, alpha1, alpha2, eps_minus1, 0.0, eps_1)


def _lame_constants(kind: str, q: float) -> tuple[float, float]:
    """Characteristic value A and polynomial constant C for one Lame solution."""
    if kind == "sncndn":
        return -4.0 * (1.0 + q), 0.0
    if kind in ("dn+", "dn-"):
        R = _root_4q(q)
        # dn+ is the soft mode (A_plus), dn- the negative mode (A_minus)
        A = -(2.0 + 5.0 * q) - 2.0 * R if kind == "dn+" else -(2.0 + 5.0 * q) + 2.0 * R
        return A, 2.0 / (q + A)
    if q == 0.0:
        raise DomainError("the period-4K Lame solutions degenerate at p = 0")
    sign = 1.0 if kind.endswith("+") else -1.0
    if kind.startswith("sn"):
        r = math.sqrt(4.0 * q * q - 7.0 * q + 4.0)
        C = (-2.0 * (1.0 + q) + sign * r) / (5.0 * q)
        return -9.0 * (1.0 + q) - 10.0 * q * C, C
    if kind.startswith("cn"):
        r = math.sqrt(q * q - q + 4.0)
        C = (-(q + 2.0) + sign * r) / (5.0 * q)
        return -5.0 - 2.0 * q - sign * 2.0 * r, C
    raise ValueError(f"unknown Lame solution {kind!r}")


def lame_polynomial(kind: str, varpi, state: BounceState):
    """Any of the seven l = 3 Lame polynomials, unnormalised.

    ``kind`` is one of ``LAME_KINDS``.  Returns ``(values, A)``.
    """
    A, C = _lame_constants(kind, state.q)
    sn, cn, dn = elliptic.jacobi(varpi, state.modulus)
    if kind == "sncndn":
        y = sn * cn * dn
    elif kind.startswith("dn"):
        y = dn * (sn * sn + C)
    elif kind.startswith("sn"):
        y = sn * (sn * sn + C)
    else:
        y = cn * (sn * sn + C)
    return y, A


def lame_mode(n: int, varpi, state: BounceState):
    """Periodic fluctuation eigenmode ``eta_n`` for n in {-1, 0, 1}."""
    kind = {-1: "dn-", 0: "sncndn", 1: "dn+"}.get(n)
    if kind is None:
        raise DomainError(f"mode index must be -1, 0 or 1, got {n!r}")
    return lame_polynomial(kind, varpi, state)[0]


def lame_residual(kind: str, varpi, state: BounceState, h: float = 1e-3):
    """Finite-difference residual of the Lame equation, scaled by max|eta|.

    Fourth-order central differences; useful as an ODE oracle for the modes.
    """
    varpi = np.asarray(varpi, dtype=float)
    f = lambda v: lame_polynomial(kind, v, state)[0]  # noqa: E731
    y, A = lame_polynomial(kind, varpi, state)
    d2 = (-f(varpi + 2 * h) + 16 * f(varpi + h) - 30 * y
          + 16 * f(varpi - h) - f(varpi - 2 * h)) / (12 * h * h)
    sn = elliptic.jacobi(varpi, state.modulus).sn
    scale = max(float(np.max(np.abs(y))), 1e-300)
    return (d2 - (12.0 * state.q * sn * sn + A) * y) / scale


def _check_open(state: BounceState):
    if state.is_sphaleron:
        raise DivergenceError("Wronskian vanishes at the sphaleron (p = 0)")
    if state.is_zero_energy:
        raise DivergenceError("Wronskian vanishes at zero energy (p = 1)")


def _log_dchi1_dq(state: BounceState) -> float:
    # chi1 = 1/3 + (2/3) cos(theta),  dq/dtheta = -(sqrt3/2) / sin^2(pi/3 + beta)
    s_span = math.sin(_PI_3 + state.beta)
    if state.modulus.log_p_bar_sq is not None:
        log_sin_theta = state.modulus.log_p_bar_sq + math.log(s_span)
    else:
        log_sin_theta = math.log(math.sin(state.theta))
    return _LOG_DCHI + log_sin_theta + 2.0 * math.log(s_span)


def dchi1_dq(state: BounceState) -> float:
    """``d chi1 / d(p^2)`` by the chain rule through theta (equals (1 - p^2)(chi1 - chi3)^3 / 2)."""
    _check_open(state)
    return math.exp(_log_dchi1_dq(state))


def _chi1_of_q(q: float) -> float:
    p_bar_sq = 1.0 - q
    theta = math.atan2(_SQRT3 * p_bar_sq, 2.0 - p_bar_sq)
    return 1.0 / 3.0 + 2.0 / 3.0 * math.cos(theta)


def dchi1_dq_fd(state: BounceState, rel_step: float = 1e-2) -> float:
    """Finite-difference cross-check of ``dchi1_dq`` (central, one Richardson step)."""
    _check_open(state)
    q = state.q
    h = rel_step * min(q, state.p_bar_sq)

    def central(step):
        return (_chi1_of_q(q + step) - _chi1_of_q(q - step)) / (2.0 * step)

    return (4.0 * central(0.5 * h) - central(h)) / 3.0


def _span_derivative(state: BounceState) -> float:
    """``d(chi1 - chi3) / dq``."""
    s = math.sin(_PI_3 + state.beta)
    return 4.0 / 3.0 * math.cos(_PI_3 + state.beta) * s * s


def _bracket(state: BounceState) -> float:
    """``(E - (1 - p^2) K) / p^2``; pi/4 at p = 0, 1 at p = 1."""
    m = state.modulus
    if m.p == 0.0:
        return 0.25 * math.pi
    if m.p_bar_sq == 0.0:
        return 1.0  # remaining p'^2 K underflows
    # E - p'^2 K = q K - (K - E)
    return elliptic.complete_K(m) - elliptic.k_minus_e_over_q(m)


def _log_period_derivative(state: BounceState, scale_term: bool) -> tuple[float, float]:
    """(log|dL/dq|, sign) with L = 4 K(p) / (omega sqrt(chi1 - chi3))."""
    m = state.modulus
    span = state.span
    pre = math.log(4.0 / (state.params.omega * math.sqrt(span)))
    inner = 0.5 * _bracket(state)  # = p'^2 dK/dq
    if scale_term:
        pbar_K = 0.0 if m.p_bar_sq == 0.0 else m.p_bar_sq * elliptic.complete_K(m)
        # near p = 0 the two terms cancel to O(q); relative error ~ 1e-16 / q
        inner -= pbar_K * _span_derivative(state) / (2.0 * span)
    if inner == 0.0:
        return -math.inf, 0.0
    return pre - state.log_p_bar_sq + math.log(abs(inner)), math.copysign(1.0, inner)


def period_derivative(state: BounceState, *, scale_term: bool = True) -> float:
    """``dL/dq`` in hbar/meV."""
    if state.is_zero_energy:
        return math.inf
    log_val, sign = _log_period_derivative(state, scale_term)
    return sign * math.exp(log_val)


def log_wronskian(state: BounceState) -> float:
    """log of W(f0, f1) = (9/8) a^2 omega^2 (chi1 - chi2)(chi1 - chi3) dchi1/dq."""
    _check_open(state)
    a, w = state.params.a, state.params.omega
    return (math.log(1.125 * a * a * w * w * state.amplitude * state.span)
            + _log_dchi1_dq(state))


def wronskian(state: BounceState) -> float:
    """Wronskian of the zero mode and the energy-derivative mode, Angstrom^2 meV^2 / hbar^2 units."""
    return _exp(log_wronskian(state))


def _variant_flag(variant: Variant) -> bool:
    if variant not in ("exact", "fixed-scale"):
        raise ValueError(f"unknown determinant variant {variant!r}")
    return variant == "exact"


def log_abs_det_regularized(state: BounceState, variant: Variant = "exact") -> float:
    """log|Det^R| (meV^-2).  -inf at the sphaleron, +inf at zero energy."""
    scale_term = _variant_flag(variant)
    if state.is_sphaleron:
        return -math.inf
    if state.is_zero_energy:
        return math.inf
    log_dl, _ = _log_period_derivative(state, scale_term)
    return math.log(classical.norm_squared(state)) + log_dl - log_wronskian(state)


def det_regularized(state: BounceState, variant: Variant = "exact") -> float:
    """Fluctuation determinant with the zero mode removed, in meV^-2.

    Reported with a positive sign; only the ratio to the harmonic determinant
    has an unambiguous sign (negative).
    """
    return _exp(log_abs_det_regularized(state, variant))


def log_abs_det_harmonic(L: float, params) -> float:
    """log(4 sinh^2(omega L / 2)), stable for omega L from 1e-300 to 1e300."""
    x = params.omega * float(L)
    if not x > 0.0:
        raise DomainError("period must be positive")
    if math.isinf(x):
        return math.inf
    # 4 sinh^2(x/2) = e^x (1 - e^-x)^2
    return x + 2.0 * math.log(-math.expm1(-x))


def det_harmonic(L: float, params) -> float:
    """Harmonic-oscillator determinant under periodic boundary conditions, ``-4 sinh^2(omega L/2)``."""
    return -_exp(log_abs_det_harmonic(L, params))


@dataclass(frozen=True)
class DeterminantData:
    """Determinants at one bounce state.  ``ratio`` is in meV^-2."""

    wronskian: float
    norm_sq: float
    det_R: float
    det_h: float
    ratio: float
    log_abs_det_R: float
    log_abs_det_h: float
    log_abs_ratio: float
    variant: str = "exact"

    @property
    def ratio_sign(self) -> int:
        return -1


def _zero_temperature_log_ratio(state: BounceState) -> float:
    return -math.log(60.0) - 2.0 * math.log(state.params.omega)


def determinants(state: BounceState, variant: Variant = "exact") -> DeterminantData:
    """Wronskian, regularized and harmonic determinants and their ratio."""
    _variant_flag(variant)
    norm_sq = classical.norm_squared(state)
    if state.is_zero_energy:
        log_ratio = _zero_temperature_log_ratio(state)
        return DeterminantData(0.0, norm_sq, math.inf, -math.inf, -math.exp(log_ratio),
                               math.inf, math.inf, log_ratio, variant)
    log_h = log_abs_det_harmonic(state.L, state.params)
    det_h = -_exp(log_h)
    if state.is_sphaleron:
        return DeterminantData(0.0, 0.0, 0.0, det_h, -0.0, -math.inf, log_h, -math.inf, variant)
    log_w = log_wronskian(state)
    log_r = log_abs_det_regularized(state, variant)
    log_ratio = log_r - log_h
    return DeterminantData(_exp(log_w), norm_sq, _exp(log_r), det_h,
                           -_exp(log_ratio), log_r, log_h, log_ratio, variant)


def det_ratio(state: BounceState, variant: Variant = "exact") -> float:
    """``Det^R / Det[h]`` in meV^-2; negative, tends to -1/(60 omega^2) at zero temperature."""
    return determinants(state, variant).ratio
