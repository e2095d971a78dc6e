"""Independent numerical checks of the closed forms.

Nothing here uses the trigonometric root formulas, the Jacobi functions or
the elliptic period: turning points come from bracketed root finding on the
cubic, periods from direct quadrature, trajectories and fundamental matrices
from an adaptive 8th-order Runge-Kutta integrator (scipy's DOP853).  The
closed forms are only touched as the "analytic" side of each comparison.

Determinant by monodromy
------------------------
For ``O + s`` with periodic boundary conditions over one period L,
``Det(O + s) / Det(h + s) = det(M(s) - 1) / det(M_h(s) - 1)`` where M is the
fundamental matrix over L.  The zero mode makes ``det(M(0) - 1)`` vanish, so
the regularized value is the slope ``lim det(M(s) - 1) / s`` which is
extrapolated from three small shifts.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.linalg import eigvalsh
from scipy.optimize import brentq

from . import classical, elliptic, fluctuation
from .errors import DomainError
from .units import PotentialParams

__all__ = [
    "STANDARD_KAPPAS",
    "DISCREPANCY_FLOOR",
    "OracleReport",
    "ShootingResult",
    "discrepancy",
    "cubic_roots",
    "period_quadrature",
    "shoot_bounce",
    "harmonic_selftest",
    "monodromy_det",
    "lame_fd_eigenvalues",
    "wronskian_constancy",
    "norm_closed_form",
    "run_suite",
]

STANDARD_KAPPAS = (-1.0 / 27.0, -2.0 / 27.0, -3.0 / 27.0, -3.9 / 27.0)
DISCREPANCY_FLOOR = 1e-300
# solve_ivp silently raises rtol below this
RTOL_FLOOR = 100.0 * np.finfo(float).eps
_DEFAULT_SHIFTS = (1e-4, 5e-5, 2.5e-5)


@dataclass
class OracleReport:
    """One analytic-versus-numeric comparison.

    ``discrepancy`` is ``|analytic - numeric| / max(|analytic|, floor)`` unless
    ``absolute`` is set, in which case it is the plain difference (used for
    quantities whose analytic value is zero).
    """

    quantity: str
    analytic: float
    numeric: float
    discrepancy: float
    threshold: float
    kappa: float | None = None
    converged: bool = True
    absolute: bool = False
    settings: dict = field(default_factory=dict)
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.discrepancy <= self.threshold

    def as_dict(self) -> dict:
        return {
            "quantity": self.quantity,
            "kappa": self.kappa,
            "analytic": self.analytic,
            "numeric": self.numeric,
            "discrepancy": self.discrepancy,
            "threshold": self.threshold,
            "absolute": bool(self.absolute),
            "converged": bool(self.converged),
            "passed": bool(self.passed),
            "settings": dict(self.settings),
            "note": self.note,
        }


def discrepancy(analytic: float, numeric: float, floor: float = DISCREPANCY_FLOOR) -> float:
    return abs(analytic - numeric) / max(abs(analytic), floor)


def _report(quantity, analytic, numeric, threshold, kappa=None, **kw) -> OracleReport:
    return OracleReport(quantity, float(analytic), float(numeric),
                        discrepancy(analytic, numeric), threshold, kappa, **kw)


def _check_kappa(kappa: float):
    if not (classical.KAPPA_SPHALERON < kappa < 0.0):
        raise DomainError(f"oracle needs kappa in the open interval (-4/27, 0), got {kappa!r}")


def _effective_rtol(rtol: float) -> tuple[float, bool]:
    return max(rtol, RTOL_FLOOR), rtol >= RTOL_FLOOR


def cubic_roots(kappa: float) -> tuple[float, float, float]:
    """Roots of -chi^3 + chi^2 + kappa by bracketing, largest first."""
    _check_kappa(kappa)

    def g(c):
        return -c**3 + c * c + kappa

    kw = dict(xtol=1e-17, rtol=4 * np.finfo(float).eps, maxiter=500)
    chi3 = brentq(g, -1.0 / 3.0, 0.0, **kw)
    chi2 = brentq(g, 0.0, 2.0 / 3.0, **kw)
    chi1 = brentq(g, 2.0 / 3.0, 1.0, **kw)
    return chi1, chi2, chi3


def _period_numeric(kappa: float, omega: float, epsrel: float = 1e-13) -> float:
    chi1, chi2, chi3 = cubic_roots(kappa)
    amp, gap = chi1 - chi2, chi2 - chi3

    def integrand(phi):
        return 1.0 / math.sqrt(gap + amp * math.sin(phi) ** 2)

    val, _ = quad(integrand, 0.0, 0.5 * math.pi, epsabs=0.0, epsrel=epsrel, limit=200)
    return 4.0 * val / omega


def period_quadrature(kappa: float, params: PotentialParams, threshold: float = 1e-9) -> OracleReport:
    """Bounce period from direct quadrature of the energy integral."""
    L_num = _period_numeric(kappa, params.omega)
    L_ana = classical.bounce_state(kappa, params).L
    return _report("period", L_ana, L_num, threshold, kappa,
                   settings={"method": "quad", "epsrel": 1e-13})


@dataclass
class ShootingResult:
    tau: np.ndarray
    x: np.ndarray
    v: np.ndarray
    max_deviation: float
    reports: list[OracleReport]
    solution: object = None


def _bounce_rhs(params: PotentialParams):
    w2, a = params.omega ** 2, params.a

    def rhs(t, u):
        x, v = u[0], u[1]
        return [v, w2 * (x - x * x / a), v * v]

    return rhs


def shoot_bounce(kappa: float, params: PotentialParams, rtol: float = 1e-12,
                 samples: int = 257) -> ShootingResult:
    """Integrate the Euclidean equation of motion from the outer turning point over one period.

    Reports: pointwise deviation from the elliptic bounce (in units of a), the
    inner turning point reached after half a period, energy drift relative to
    the barrier height, and the squared norm accumulated along the way.
    """
    _check_kappa(kappa)
    eff, ok = _effective_rtol(rtol)
    a, w = params.a, params.omega
    chi1, chi2, _ = cubic_roots(kappa)
    L = _period_numeric(kappa, w)
    x0 = 1.5 * a * chi1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_ivp(_bounce_rhs(params), (0.0, L), [x0, 0.0, 0.0], method="DOP853",
                        rtol=eff, atol=eff * np.array([a, a * w, a * a * w]) * 1e-3,
                        dense_output=True)
    settings = {"method": "DOP853", "rtol": eff, "requested_rtol": rtol}
    note = "" if ok else f"requested rtol below integrator floor {RTOL_FLOOR:.3g}"
    if not sol.success:
        rep = OracleReport("bounce.profile", 0.0, math.nan, math.inf, 1e-8, kappa, False, True,
                           settings, f"integrator failure: {sol.message}")
        return ShootingResult(np.array([]), np.array([]), np.array([]), math.inf, [rep], sol)

    tau = np.linspace(0.0, L, samples)
    x, v, _ = sol.sol(tau)
    state = classical.bounce_state(kappa, params)
    x_ana = classical.bounce(tau, state)
    max_dev = float(np.max(np.abs(x - x_ana)) / a)

    x_half, v_half, acc_half = sol.sol(0.5 * L)
    energy = 27.0 * params.barrier_height * kappa / 4.0
    drift = np.abs(0.5 * params.mass_internal * v * v - params.potential(x) - energy)
    drift = float(np.max(drift) / params.barrier_height)
    norm_num = float(sol.y[2, -1])

    reports = [
        OracleReport("bounce.profile", 0.0, max_dev, max_dev, 1e-8, kappa, ok, True, settings,
                     note or "max |x_num - x_elliptic| / a over one period"),
        _report("bounce.inner_turning_point", 1.5 * a * chi2, x_half, 1e-8, kappa,
                converged=ok, settings=settings | {"velocity_at_half_period": float(v_half)}),
        OracleReport("bounce.energy_drift", 0.0, drift, drift, 1e-10, kappa, ok, True, settings,
                     "max |(M/2) v^2 - V(x) - E| / V(a)"),
        _report("norm_squared", classical.norm_squared(state), norm_num, 1e-8, kappa,
                converged=ok, settings=settings),
    ]
    action_num = params.mass_internal * norm_num - energy * L
    reports.append(_report("action", classical.classical_action(state), action_num, 1e-8, kappa,
                           converged=ok, settings=settings))
    return ShootingResult(tau, x, v, max_dev, reports, sol)


def _monodromy(curvature, L: float, x0: float, params: PotentialParams, shift: float,
               rtol: float, with_path: bool = True, path=None) -> float:
    """det(M(shift) - 1) for y'' = (curvature(x) + shift) y over [0, L].

    The path x(t) is integrated alongside unless ``path`` (a callable of t)
    is given.
    """
    w2, a = params.omega ** 2, params.a

    if path is None:
        def rhs(t, u):
            x, v, y1, y1p, y2, y2p = u
            k = curvature(x) + shift
            return [v, w2 * (x - x * x / a) if with_path else 0.0, y1p, k * y1, y2p, k * y2]
        u0 = [x0, 0.0, 1.0, 0.0, 0.0, 1.0]
    else:
        def rhs(t, u):
            y1, y1p, y2, y2p = u
            k = curvature(path(t)) + shift
            return [y1p, k * y1, y2p, k * y2]
        u0 = [1.0, 0.0, 0.0, 1.0]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_ivp(rhs, (0.0, L), u0, method="DOP853", rtol=rtol, atol=rtol * 1e-3)
    if not sol.success:
        raise RuntimeError(sol.message)
    u = sol.y[-4:, -1]
    M = np.array([[u[0], u[2]], [u[1], u[3]]])
    return float(np.linalg.det(M - np.eye(2)))


def _extrapolate_to_zero(shifts, values) -> tuple[float, float]:
    """Quadratic (three-point) and linear (two smallest) extrapolations to shift 0."""
    s = np.asarray(shifts, dtype=float)
    g = np.asarray(values, dtype=float)
    weights = [np.prod([-s[j] / (s[i] - s[j]) for j in range(3) if j != i]) for i in range(3)]
    quadratic = float(np.dot(weights, g))
    i, j = np.argsort(s)[:2]
    linear = float((s[j] * g[i] - s[i] * g[j]) / (s[j] - s[i]))
    return quadratic, linear


def harmonic_selftest(L: float, params: PotentialParams, rtol: float = 1e-12) -> OracleReport:
    """Monodromy determinant of the constant-curvature operator against -4 sinh^2(omega L / 2)."""
    eff, ok = _effective_rtol(rtol)
    w2 = params.omega ** 2
    num = _monodromy(lambda x: w2, L, params.a, params, 0.0, eff, with_path=False)
    ana = fluctuation.det_harmonic(L, params)
    return _report("harmonic_selftest", ana, num, 1e-10, converged=ok,
                   settings={"method": "DOP853", "rtol": eff, "omega_L": params.omega * L})


def monodromy_det(kappa: float, params: PotentialParams, rtol: float = 1e-12,
                  shifts=_DEFAULT_SHIFTS, threshold: float = 1e-5,
                  determinant: str = "exact", path: str = "integrated") -> list[OracleReport]:
    """Determinant ratio from the monodromy matrix, plus the zero-mode check.

    Returns two reports: ``det_ratio`` and ``zero_mode`` (unshifted
    ``|det(M - 1)|`` relative to the harmonic one, which must vanish).

    Shifts are given in units of omega^2 and scaled down by (2 pi / omega L)^2
    for long periods so they stay below the lowest nonzero eigenvalue.  With
    ``path="integrated"`` the bounce is integrated alongside the fluctuations;
    this loses accuracy like exp(omega L / 2) and fails well below T_c, where
    ``path="elliptic"`` (the closed-form bounce) is the usable choice.
    """
    if path not in ("integrated", "elliptic"):
        raise ValueError(f"unknown path {path!r}")
    _check_kappa(kappa)
    eff, ok = _effective_rtol(rtol)
    w2, a = params.omega ** 2, params.a
    chi1, _, _ = cubic_roots(kappa)
    L = _period_numeric(kappa, params.omega)
    x0 = 1.5 * a * chi1

    def curvature(x):
        return w2 * (1.0 - 2.0 * x / a)

    state = classical.bounce_state(kappa, params)
    fn = None
    if path == "elliptic":
        def fn(t):
            return classical.bounce(t, state)

    scale = min(1.0, (2.0 * math.pi / (params.omega * L)) ** 2)
    abs_shifts = [s * scale * w2 for s in shifts]
    g = [_monodromy(curvature, L, x0, params, s, eff, path=fn) / s for s in abs_shifts]
    g0, g_lin = _extrapolate_to_zero(abs_shifts, g)
    det_h = _monodromy(lambda x: w2, L, a, params, 0.0, eff, with_path=False)
    numeric = g0 / det_h
    spread = float(discrepancy(g0, g_lin))
    converged = bool(ok and spread < 1e-6)
    analytic = fluctuation.det_ratio(state, determinant)
    settings = {"method": "DOP853", "rtol": eff, "path": path,
                "shifts_over_omega2": [s * scale for s in shifts],
                "extrapolation_spread": spread}
    notes = []
    if not ok:
        notes.append(f"requested rtol {rtol:.3g} below integrator floor {RTOL_FLOOR:.3g}")
    if spread >= 1e-6:
        notes.append("shift extrapolation not converged")
    zero = abs(_monodromy(curvature, L, x0, params, 0.0, eff, path=fn) / det_h)
    return [
        _report("det_ratio" if determinant == "exact" else f"det_ratio[{determinant}]",
                analytic, numeric, threshold, kappa, converged=converged, settings=settings,
                note="; ".join(notes)),
        OracleReport("zero_mode", 0.0, zero, zero, 1e-8, kappa, ok, True,
                     {"method": "DOP853", "rtol": eff, "path": path},
                     "unshifted |det(M - 1)| / |det(M_h - 1)|"),
    ]


def lame_fd_eigenvalues(kappa: float, params: PotentialParams, n: int = 600) -> list[OracleReport]:
    """Lowest three periodic eigenvalues of the fluctuation operator by finite differences.

    Second-order periodic differences on n and 2n points, one Richardson step.
    The path is taken from the shooting integration.
    """
    _check_kappa(kappa)
    shot = shoot_bounce(kappa, params)
    L = float(shot.tau[-1])
    w2, a = params.omega ** 2, params.a

    def lowest(m):
        h = L / m
        t = np.arange(m) * h
        diag = w2 * (1.0 - 2.0 * shot.solution.sol(t)[0] / a) + 2.0 / (h * h)
        A = np.diag(diag)
        idx = np.arange(m)
        A[idx, (idx + 1) % m] = -1.0 / (h * h)
        A[idx, (idx - 1) % m] = -1.0 / (h * h)
        return eigvalsh(A, subset_by_index=[0, 2])

    coarse, fine = lowest(n), lowest(2 * n)
    eig = (4.0 * fine - coarse) / 3.0
    spec = fluctuation.lame_spectrum(classical.bounce_state(kappa, params))
    settings = {"grid": [n, 2 * n], "richardson": True}
    return [
        _report("eps_minus1", spec.eps_minus1, eig[0], 1e-5, kappa, settings=settings),
        OracleReport("eps_0", 0.0, float(eig[1]), abs(float(eig[1])) / w2, 1e-5, kappa,
                     True, True, settings, "|eps_0| / omega^2"),
        _report("eps_1", spec.eps_1, eig[2], 1e-5, kappa, settings=settings),
    ]


def _dchi1_dq_numeric(kappa: float) -> float:
    def chi1_q(k):
        c1, c2, c3 = cubic_roots(k)
        return c1, (c1 - c2) / (c1 - c3)

    h = 1e-3 * min(-kappa, kappa - classical.KAPPA_SPHALERON)

    def central(step):
        (a1, q1), (a0, q0) = chi1_q(kappa + step), chi1_q(kappa - step)
        return (a1 - a0) / (2 * step), (q1 - q0) / (2 * step)

    d1 = central(h)
    d2 = central(0.5 * h)
    dchi = (4 * d2[0] - d1[0]) / 3
    dq = (4 * d2[1] - d1[1]) / 3
    return dchi / dq


def wronskian_constancy(kappa: float, params: PotentialParams, rtol: float = 1e-12) -> list[OracleReport]:
    """Wronskian of the numerically integrated f0 = dx/dtau and f1 = dx/dq at three times."""
    _check_kappa(kappa)
    eff, ok = _effective_rtol(rtol)
    w2, a = params.omega ** 2, params.a
    chi1, _, _ = cubic_roots(kappa)
    L = _period_numeric(kappa, params.omega)
    x0 = 1.5 * a * chi1
    f1_0 = 1.5 * a * _dchi1_dq_numeric(kappa)

    def rhs(t, u):
        x, v, y, yp = u
        return [v, w2 * (x - x * x / a), yp, w2 * (1.0 - 2.0 * x / a) * y]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_ivp(rhs, (0.0, L), [x0, 0.0, f1_0, 0.0], method="DOP853",
                        rtol=eff, atol=eff * 1e-3, dense_output=True)
    times = np.array([L / 7.0, L / 3.0, 0.8 * L])
    x, v, y, yp = sol.sol(times)
    acc = w2 * (x - x * x / a)
    W = v * yp - acc * y
    analytic = fluctuation.wronskian(classical.bounce_state(kappa, params))
    settings = {"method": "DOP853", "rtol": eff, "times_over_L": [1 / 7, 1 / 3, 0.8]}
    spread = float((W.max() - W.min()) / abs(W.mean()))
    return [
        _report("wronskian", analytic, float(W.mean()), 1e-7, kappa, converged=ok, settings=settings),
        OracleReport("wronskian.constancy", 0.0, spread, spread, 1e-8, kappa, ok, True, settings,
                     "(max W - min W) / |mean W| over three times"),
    ]


def norm_closed_form(kappa: float, params: PotentialParams) -> OracleReport:
    """Squared norm from its closed elliptic form against the quadrature in ``classical``.

    N^-2 = (3/5) a^2 omega D^(5/2) [2 (q^2 - q + 1) E - (1 - q)(2 - q) K], D = chi1 - chi3.
    """
    state = classical.bounce_state(kappa, params)
    q, D, m = state.q, state.span, state.modulus
    closed = 0.6 * params.a ** 2 * params.omega * D ** 2.5 * (
        2.0 * (q * q - q + 1.0) * elliptic.complete_E(m)
        - m.p_bar_sq * (2.0 - q) * elliptic.complete_K(m))
    return _report("norm_squared.closed_form", closed, classical.norm_squared(state), 1e-10, kappa,
                   settings={"method": "gauss-legendre vs closed form"})


def run_suite(params: PotentialParams, kappas=STANDARD_KAPPAS, rtol: float = 1e-12) -> list[OracleReport]:
    """The full set of comparisons; the harmonic self-test row comes first."""
    reports = [harmonic_selftest(2.0 * math.pi / params.omega, params, rtol)]
    for k in kappas:
        reports.append(period_quadrature(k, params))
        reports.extend(shoot_bounce(k, params, rtol).reports)
        reports.extend(monodromy_det(k, params, rtol))
        reports.extend(lame_fd_eigenvalues(k, params))
        reports.extend(wronskian_constancy(k, params, rtol))
        reports.append(norm_closed_form(k, params))
    return reports
