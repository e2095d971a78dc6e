import math

import numpy as np
import pytest

from cubic_tunneling import DomainError, classical as cl, oracle
from cubic_tunneling.classical import KAPPA_SPHALERON


@pytest.fixture(scope="module")
def suite(bench):
    return oracle.run_suite(bench)


def test_suite_passes(suite):
    failed = [r.as_dict() for r in suite if not (r.passed and r.converged)]
    assert failed == []


def test_suite_layout(suite):
    assert suite[0].quantity == "harmonic_selftest"
    names = {r.quantity for r in suite}
    for q in ("period", "bounce.profile", "det_ratio", "zero_mode", "eps_1", "norm_squared"):
        assert any(n.startswith(q) for n in names), q
    kappas = {r.kappa for r in suite if r.kappa is not None}
    assert kappas == set(oracle.STANDARD_KAPPAS)


def test_suite_thresholds(suite):
    by_name = {}
    for r in suite:
        by_name.setdefault(r.quantity, r.threshold)
    assert by_name["bounce.profile"] == 1e-8
    assert by_name["det_ratio"] == 1e-5
    assert by_name["period"] <= 1e-9


def test_cubic_roots():
    for k in oracle.STANDARD_KAPPAS:
        roots = oracle.cubic_roots(k)
        assert roots[0] > roots[1] > roots[2]
        for c in roots:
            assert abs(-c**3 + c * c + k) < 1e-15
        assert sum(roots) == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize("frac", [0.3, 0.4, 0.6, 0.8, 0.95, 0.999])
def test_monodromy_across_temperatures(bench, frac):
    s = cl.invert_temperature(frac * bench.T_c, bench)
    det, zero = oracle.monodromy_det(s.kappa, bench, path="elliptic")
    assert det.passed and det.converged, det.as_dict()
    assert zero.passed


def test_integrated_path_flags_cold_runs(bench):
    s = cl.invert_temperature(0.2 * bench.T_c, bench)
    det, _ = oracle.monodromy_det(s.kappa, bench)
    assert not det.converged and "not converged" in det.note


def test_unknown_path(bench):
    with pytest.raises(ValueError):
        oracle.monodromy_det(-0.1, bench, path="spline")


def test_monodromy_fixed_scale_variant_is_rejected(bench):
    # the simplified determinant misses the numerically integrated one
    det, _ = oracle.monodromy_det(-3.0 / 27.0, bench, determinant="fixed-scale")
    assert det.quantity == "det_ratio[fixed-scale]"
    assert not det.passed


@pytest.mark.parametrize("L_omega", [1.0, math.pi, 2 * math.pi])
def test_harmonic_selftest(bench, L_omega):
    r = oracle.harmonic_selftest(L_omega / bench.omega, bench)
    assert r.passed and r.analytic < 0


def test_halving_tolerance_keeps_answer(bench):
    k = -3.0 / 27.0
    a = oracle.monodromy_det(k, bench, rtol=2e-12)[0]
    b = oracle.monodromy_det(k, bench, rtol=1e-12)[0]
    assert a.numeric == pytest.approx(b.numeric, rel=1e-7)


def test_unreachable_rtol_is_flagged(bench):
    k = -1.0 / 27.0
    shot = oracle.shoot_bounce(k, bench, rtol=1e-15)
    assert all(not r.converged for r in shot.reports)
    assert "floor" in shot.reports[0].note
    det = oracle.monodromy_det(k, bench, rtol=1e-15)[0]
    assert not det.converged and "floor" in det.note


def test_shooting_profile(bench):
    shot = oracle.shoot_bounce(-2.0 / 27.0, bench, samples=101)
    assert shot.tau.shape == shot.x.shape == (101,)
    assert shot.x[0] == pytest.approx(shot.x[-1], abs=1e-8 * bench.a)
    assert shot.max_deviation < 1e-8


@pytest.mark.parametrize("kappa", [0.0, KAPPA_SPHALERON, 0.1, -0.2])
def test_oracles_need_open_interval(bench, kappa):
    with pytest.raises(DomainError):
        oracle.shoot_bounce(kappa, bench)
    with pytest.raises(DomainError):
        oracle.monodromy_det(kappa, bench)
    with pytest.raises(DomainError):
        oracle.period_quadrature(kappa, bench)


def test_discrepancy():
    assert oracle.discrepancy(2.0, 1.0) == 0.5
    assert oracle.discrepancy(0.0, 0.0) == 0.0
    assert np.isfinite(oracle.discrepancy(0.0, 1e-310))


def test_report_dict_is_plain(suite):
    d = suite[1].as_dict()
    assert type(d["passed"]) is bool and type(d["discrepancy"]) is float
