"""Finite-temperature decay rate and temperature scans.

The rate (reported as hbar*Gamma in meV) is

    hbar Gamma = sqrt(M N^-2 / (2 pi hbar)) * sqrt(|Det[h] / Det^R|) * exp(-A / hbar)

with the determinant ratio in meV^-2.  Substituting Det^R = N^-2 (dL/dq) / W
removes the norm altogether, which gives an independent route used for
auditing (``gamma_without_norm``).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import classical, fluctuation
from .errors import DomainError, FitError, QuantumRegimeError
from .units import PotentialParams, derive_params

__all__ = [
    "RatePoint",
    "RateCurve",
    "decay_rate",
    "gamma_from_components",
    "gamma_without_norm",
    "arrhenius_rate",
    "default_grid",
    "scan",
    "fit_crossover_exponent",
    "semiclassical_warnings",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RatePoint:
    """Decay-rate decomposition at one temperature.

    ``mass_norm_sq`` is M N^-2 / hbar (dimensionless), ``norm_sq`` is N^-2 in
    Angstrom^2 meV/hbar, ``det_ratio`` is in meV^-2, ``gamma`` and
    ``arrhenius`` are hbar*Gamma in meV.
    """

    T_star: float
    kappa: float
    action_over_hbar: float
    norm_sq: float
    mass_norm_sq: float
    det_ratio: float
    log_abs_det_ratio: float
    gamma: float
    arrhenius: float

    @property
    def log_gamma(self) -> float:
        return math.log(self.gamma) if self.gamma > 0 else -math.inf

    def recompute_gamma(self) -> float:
        return gamma_from_components(self.mass_norm_sq, self.log_abs_det_ratio,
                                     self.action_over_hbar)


def gamma_from_components(mass_norm_sq: float, log_abs_ratio: float, action: float) -> float:
    """hbar*Gamma in meV from M N^-2/hbar, log|Det^R/Det[h]| (meV^-2) and A/hbar."""
    if mass_norm_sq <= 0.0:
        return 0.0
    log_g = 0.5 * math.log(mass_norm_sq / _TWO_PI) - 0.5 * log_abs_ratio - action
    return math.exp(log_g)


def arrhenius_rate(T_star: float, params: PotentialParams, prefactor: float | None = None) -> float:
    """Classical activated rate ``prefactor * exp(-V(a) / k_B T*)`` in meV.

    The prefactor defaults to hbar*omega/(2 pi).
    """
    if not T_star > 0:
        raise DomainError("temperature must be positive")
    if prefactor is None:
        prefactor = params.kT_c
    return prefactor * math.exp(-classical.thermal_action(T_star, params))


def _state_for(T_star: float, params: PotentialParams) -> classical.BounceState:
    T_star = float(T_star)
    if not T_star > 0:
        raise DomainError(f"temperature must be positive, got {T_star!r}")
    if T_star > params.T_c * (1.0 + 1e-14):
        raise QuantumRegimeError(
            f"T*={T_star} K is above the crossover temperature {params.T_c} K")
    return classical.invert_temperature(T_star, params)


def decay_rate(T_star: float, params: PotentialParams, determinant: str = "exact",
               arrhenius_prefactor: float | None = None) -> RatePoint:
    """Decay rate at temperature ``T_star`` (Kelvin).

    At exactly T_c the bounce has collapsed onto the sphaleron, the norm
    vanishes and the rate is 0.
    """
    state = _state_for(T_star, params)
    action = classical.classical_action(state)
    arr = arrhenius_rate(T_star, params, arrhenius_prefactor)
    if state.is_sphaleron:
        return RatePoint(float(T_star), state.kappa, action, 0.0, 0.0, -0.0, -math.inf, 0.0, arr)
    dets = fluctuation.determinants(state, determinant)
    mns = classical.mass_norm_squared(state)
    gamma = gamma_from_components(mns, dets.log_abs_ratio, action)
    return RatePoint(float(T_star), state.kappa, action, dets.norm_sq, mns, dets.ratio,
                     dets.log_abs_ratio, gamma, arr)


def gamma_without_norm(T_star: float, params: PotentialParams, determinant: str = "exact") -> float:
    """hbar*Gamma with the norm cancelled analytically: sqrt(M W / (2 pi dL/dq)) sqrt|Det[h]| e^{-A}."""
    state = _state_for(T_star, params)
    if state.is_sphaleron:
        return 0.0
    action = classical.classical_action(state)
    if state.is_zero_energy:
        return gamma_from_components(classical.mass_norm_squared(state),
                                     fluctuation.determinants(state).log_abs_ratio, action)
    scale_term = determinant == "exact"
    log_dl = math.log(fluctuation.period_derivative(state, scale_term=scale_term))
    log_h = fluctuation.log_abs_det_harmonic(state.L, params)
    log_g = 0.5 * (math.log(params.mass_internal / _TWO_PI) + fluctuation.log_wronskian(state)
                   - log_dl + log_h) - action
    return math.exp(log_g)


def default_grid(params: PotentialParams, n_log: int = 400, n_edge: int = 60) -> np.ndarray:
    """400 log-spaced temperatures in [T_c/100, T_c(1 - 1e-4)] plus a dense edge below T_c."""
    T_c = params.T_c
    bulk = np.geomspace(T_c / 100.0, T_c * (1.0 - 1e-4), n_log)
    edge = T_c * (1.0 - np.geomspace(0.05, 1e-4, n_edge))
    return np.unique(np.concatenate([bulk, edge]))


@dataclass(frozen=True)
class RateCurve:
    """Scanned decay rate with derived features.

    ``T_P`` is the temperature of the maximum of Gamma (refined when the
    maximum is interior), ``T_A`` the first crossing above ``T_P`` with the
    Arrhenius rate, ``fitted_exponent`` the slope of log Gamma against
    log(T_c - T*) within 2% of T_c.  Features that do not exist are ``None``.
    """

    params: PotentialParams
    points: tuple[RatePoint, ...]
    determinant: str = "exact"
    T_P: float | None = field(default=None)
    gamma_P: float | None = field(default=None)
    peak_interior: bool = field(default=False)
    T_A: float | None = field(default=None)
    fitted_exponent: float | None = field(default=None)

    @property
    def T_star(self) -> np.ndarray:
        return np.array([p.T_star for p in self.points])

    @property
    def gamma(self) -> np.ndarray:
        return np.array([p.gamma for p in self.points])

    def to_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "determinant": self.determinant,
            "points": [asdict(p) for p in self.points],
            "features": {
                "T_P": self.T_P,
                "gamma_P": self.gamma_P,
                "peak_interior": self.peak_interior,
                "T_A": self.T_A,
                "fitted_exponent": self.fitted_exponent,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RateCurve":
        """Rebuild from ``to_dict`` output; features are recomputed, not trusted."""
        pr = data["params"]
        params = derive_params(pr["mass_me"], pr["hbar_omega_mev"], pr["a_angstrom"])
        points = [RatePoint(**{k: float(v) for k, v in p.items()}) for p in data["points"]]
        return _assemble(params, points, data.get("determinant", "exact"))


def _neg_log_gamma(T, params, determinant):
    g = decay_rate(T, params, determinant).gamma
    return -math.log(g) if g > 0 else math.inf


def _log_gap(T, params, determinant):
    pt = decay_rate(T, params, determinant)
    return math.log(pt.gamma) - math.log(pt.arrhenius)


def _assemble(params: PotentialParams, points, determinant: str) -> RateCurve:
    points = tuple(sorted(points, key=lambda p: p.T_star))
    Ts = np.array([p.T_star for p in points])
    if np.any(np.diff(Ts) <= 0):
        raise DomainError("temperatures in a curve must be distinct")
    gam = np.array([p.gamma for p in points])
    tol = 1e-5 * params.T_c

    i = int(np.argmax(gam))
    T_P, gamma_P = float(Ts[i]), float(gam[i])
    interior = 0 < i < len(points) - 1 and gam[i] > 0
    if interior:
        res = minimize_scalar(_neg_log_gamma, bounds=(Ts[i - 1], Ts[i + 1]), method="bounded",
                              args=(params, determinant), options={"xatol": tol})
        if res.success and math.exp(-res.fun) >= gamma_P:
            T_P, gamma_P = float(res.x), float(math.exp(-res.fun))

    T_A = None
    arr = np.array([p.arrhenius for p in points])
    with np.errstate(divide="ignore"):
        gap = np.log(gam) - np.log(arr)
    for j in range(len(points) - 1):
        if Ts[j] < T_P or not (np.isfinite(gap[j]) and np.isfinite(gap[j + 1])):
            continue
        if gap[j] == 0.0:
            T_A = float(Ts[j])
            break
        if gap[j] * gap[j + 1] < 0:
            T_A = float(brentq(_log_gap, Ts[j], Ts[j + 1], args=(params, determinant), xtol=tol))
            break

    curve = RateCurve(params, points, determinant, T_P, gamma_P, bool(interior), T_A, None)
    try:
        exponent = fit_crossover_exponent(curve)
    except FitError:
        exponent = None
    return RateCurve(params, points, determinant, T_P, gamma_P, bool(interior), T_A, exponent)


def scan(params: PotentialParams, T_grid=None, *, determinant: str = "exact",
         workers: int | None = None) -> RateCurve:
    """Evaluate the decay rate over a temperature grid and extract curve features.

    With ``workers`` > 1 the grid is evaluated in a process pool; the result
    does not depend on evaluation order.
    """
    if T_grid is None:
        T_grid = default_grid(params)
    T_grid = np.unique(np.asarray(T_grid, dtype=float))
    if T_grid.size == 0:
        raise ValueError("empty temperature grid")
    fn = partial(decay_rate, params=params, determinant=determinant)
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(fn, T_grid, chunksize=16))
    else:
        points = [fn(T) for T in T_grid]
    return _assemble(params, points, determinant)


def fit_crossover_exponent(curve: RateCurve, window: float = 0.02, min_points: int = 20) -> float:
    """Least-squares slope of log Gamma against log(T_c - T*) over the last ``window`` below T_c.

    Only the falling branch is used when the peak is interior.
    """
    T_c = curve.params.T_c
    lo = T_c * (1.0 - window)
    if curve.peak_interior and curve.T_P is not None:
        lo = max(lo, curve.T_P)
    sel = [p for p in curve.points if lo < p.T_star < T_c and p.gamma > 0]
    if len(sel) < min_points:
        raise FitError(f"need {min_points} points in the fit window, have {len(sel)}")
    x = np.log(T_c - np.array([p.T_star for p in sel]))
    y = np.log(np.array([p.gamma for p in sel]))
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


def semiclassical_warnings(curve: RateCurve) -> list[str]:
    """Flags for parameter sets where the leading semiclassical term is not trustworthy."""
    out = []
    positive = [p for p in curve.points if p.mass_norm_sq > 0]
    if positive:
        a_min = min(p.action_over_hbar for p in positive)
        if a_min <= 1.0:
            out.append(f"action A/hbar drops to {a_min:.4g} <= 1")
    if curve.gamma_P is not None:
        r = curve.gamma_P / curve.params.hbar_omega
        if r >= 1.0:
            out.append(f"peak rate hbar*Gamma(T_P)/hbar*omega = {r:.4g} >= 1")
    return out
