"""Acceptance checks for the 1000 m_e / 20 meV / 1 Angstrom bench.

Each test prints a single PASS/FAIL line (visible without ``-s``) and then
asserts the same condition.
"""

import math

import numpy as np
import pytest

from cubic_tunneling import classical as cl, fluctuation as fl, oracle, rate
from cubic_tunneling.classical import KAPPA_SPHALERON


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n:>2}: {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def curve(bench):
    return rate.scan(bench)


def test_01_crossover_temperature(bench, report):
    T_c = bench.T_c
    state_T = cl.bounce_state(KAPPA_SPHALERON, bench).T_star
    ok = abs(T_c - 36.938) <= 0.002 and abs(state_T - T_c) <= 1e-9 * T_c
    report(1, ok, f"T_c = {T_c:.6f} K (target 36.938 +- 0.002), sphaleron state gives {state_T:.6f} K")


def test_02_sphaleron_period(bench, report):
    L = cl.bounce_state(KAPPA_SPHALERON, bench).L
    rel = abs(L / 0.31416 - 1)
    report(2, rel <= 5e-3, f"L(E_sph) = {L:.7f} hbar/meV (target 0.31416, rel dev {rel:.2e} <= 5e-3)")


def test_03_action_limit(bench, report):
    A = cl.classical_action(cl.bounce_state(-1e-8, bench))
    target = 1.2 * bench.mass_internal * bench.omega * bench.a ** 2
    rel = abs(A / target - 1)
    ok = rel <= 1e-5 and abs(target - 3.1496) < 5e-5
    report(3, ok, f"A/hbar(kappa=-1e-8) = {A:.7f}, 6/5 M w a^2 = {target:.7f}, rel dev {rel:.2e} <= 1e-5")


def test_04_determinant_ratio_limit(bench, report):
    w2 = bench.omega ** 2
    cold = [fl.det_ratio(cl.invert_temperature(f * bench.T_c, bench)) * w2 * 60
            for f in np.geomspace(0.01, 0.1, 10)]
    half = fl.det_ratio(cl.invert_temperature(0.5 * bench.T_c, bench)) * w2 * 60
    dev_cold = max(abs(c + 1) for c in cold)
    dev_half = abs(half + 1)
    ok = dev_cold <= 1e-3 and dev_half <= 5e-2
    report(4, ok, f"-60 w^2 ratio: max dev {dev_cold:.2e} for T <= T_c/10 (<= 1e-3), "
                  f"{dev_half:.2e} at T_c/2 (<= 5e-2)")


def test_05_lame_endpoints(bench, report):
    w2 = bench.omega ** 2
    zero = fl.lame_spectrum(cl.bounce_state(0.0, bench))
    sph = fl.lame_spectrum(cl.bounce_state(KAPPA_SPHALERON, bench))
    devs = (abs(zero.eps_minus1 / w2 + 1.25), abs(sph.eps_minus1 / w2 + 1.0), abs(sph.eps_1 / w2))
    report(5, max(devs) <= 1e-12,
           "eps_-1/w^2 at p=1, p=0 and eps_1/w^2 at p=0 off by "
           + ", ".join(f"{d:.1e}" for d in devs) + " (<= 1e-12)")


def _proportional_slope(bench, lo, hi, n=60):
    T = np.linspace(lo, hi, n) * bench.T_c
    e1 = np.array([fl.lame_spectrum(cl.invert_temperature(t, bench)).eps_1 for t in T])
    x = (bench.T_c - T) / bench.T_c
    return float(np.dot(x, e1 / bench.omega ** 2) / np.dot(x, x))


def test_06_soft_mode_linearity(bench, report):
    windows = [(0.90, 0.99), (0.90, 0.95), (0.95, 0.99)]
    slopes = [_proportional_slope(bench, *w) for w in windows]
    spread = max(abs(s / slopes[0] - 1) for s in slopes)
    detail = ", ".join(f"[{lo:.2f},{hi:.2f}] -> {s:.4f}" for (lo, hi), s in zip(windows, slopes))
    report(6, spread <= 0.02,
           f"eps_1/w^2 per unit (1 - T/T_c): {detail}; spread {spread:.1%} (<= 2%)")


def test_07_crossover_exponent(curve, report):
    exp = curve.fitted_exponent
    ok = exp is not None and abs(exp - 0.5) <= 0.05
    shown = "none" if exp is None else f"{exp:.4f}"
    report(7, ok, f"slope of log Gamma vs log(T_c - T) in the top 2% = {shown} (target 0.5 +- 0.05)")


def test_08_curve_morphology(bench, bench10, curve, report):
    T, g = curve.T_star, curve.gamma
    cold = g[T < bench.T_c / 4]
    flat = float(np.ptp(cold) / cold.mean())
    g_half = rate.decay_rate(0.5 * bench.T_c, bench).gamma
    rising = bool(np.all(np.diff(g[(T >= 0.5 * bench.T_c) & (T <= curve.T_P)]) > 0)) \
        and curve.T_P > 0.5 * bench.T_c and curve.gamma_P > g_half
    zero_at_tc = rate.decay_rate(bench.T_c, bench).gamma == 0.0
    c10 = rate.scan(bench10)
    r10 = c10.gamma_P / bench10.hbar_omega
    warned = bool(rate.semiclassical_warnings(c10))
    checks = {
        f"flat below T_c/4 ({flat:.1e} <= 1e-2)": flat <= 1e-2,
        "rising above T_c/2": rising,
        f"interior peak (T_P = {curve.T_P:.4f} K of {bench.T_c:.4f})": curve.peak_interior,
        "Gamma(T_c) = 0": zero_at_tc,
        f"10 meV peak/hbar w = {r10:.3f} in [0.5, 2]": 0.5 <= r10 <= 2.0,
        "10 meV warning": warned,
    }
    ok = all(checks.values())
    report(8, ok, "; ".join(f"{k}: {'ok' if v else 'NO'}" for k, v in checks.items()))


def test_09_oracle_equivalence(bench, report):
    reps = oracle.run_suite(bench)
    limits = {"bounce.profile": 1e-8, "det_ratio": 1e-5, "period": 1e-9}
    worst = {q: max(r.discrepancy for r in reps if r.quantity == q) for q in limits}
    ok = all(worst[q] <= limits[q] for q in limits) and all(r.passed and r.converged for r in reps)
    report(9, ok, ", ".join(f"{q} worst {worst[q]:.1e} (<= {limits[q]:.0e})" for q in limits)
           + f"; {len(reps)} oracle rows")


def test_10_norm_cancellation(bench, curve, report):
    worst = 0.0
    for p in curve.points:
        if p.gamma == 0.0:
            continue
        alt = rate.gamma_without_norm(p.T_star, bench)
        worst = max(worst, abs(alt / p.gamma - 1))
    report(10, worst <= 1e-8,
           f"Gamma with vs without N^-2 over {len(curve.points)} temperatures: worst rel dev "
           f"{worst:.1e} (<= 1e-8)")
