import csv
import io
import json
import subprocess
import sys

import pytest

from cubic_tunneling import cli
from cubic_tunneling.cli import GridSpec, UsageError, main


def run(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_map_endpoints(capsys):
    code, out, _ = run(["map", "--grid", "0:1:5"], capsys)
    assert code == 0
    table = rows(out)
    assert table[0] == ["energy_ratio", "kappa", "T_star_K"]
    assert float(table[1][2]) == 0.0
    assert float(table[-1][0]) == 1.0
    assert float(table[-1][2]) == pytest.approx(36.938, abs=2e-3)


def test_csv_is_byte_stable(capsys):
    argv = ["spectrum", "--grid", "0:1:7"]
    _, first, _ = run(argv, capsys)
    _, second, _ = run(argv, capsys)
    assert first == second
    assert "e-" in first or "e+" in first


def test_spectrum_endpoints(capsys):
    _, out, _ = run(["spectrum", "--grid", "0:1:3"], capsys)
    table = rows(out)
    assert float(table[1][3]) == pytest.approx(-1.25, abs=1e-12)
    assert float(table[-1][3]) == pytest.approx(-1.0, abs=1e-12)
    assert abs(float(table[-1][2])) < 1e-12


def test_bounce_at_sphaleron_is_constant(capsys):
    code, out, _ = run(["bounce", "--energy-ratio", "1", "--samples", "11", "--format", "json"],
                       capsys)
    assert code == 0
    doc = json.loads(out)
    xs = [r[1] for r in doc["rows"]]
    assert xs == pytest.approx([1.0] * 11, abs=1e-12)
    assert doc["kappa"] == pytest.approx(-4 / 27)


def test_bounce_by_temperature(capsys):
    code, out, _ = run(["bounce", "--tstar", "20", "--samples", "5"], capsys)
    assert code == 0
    table = rows(out)
    assert len(table) == 6
    assert float(table[1][1]) == pytest.approx(float(table[-1][1]), rel=1e-12)


def test_bounce_zero_energy_has_finite_window(capsys):
    code, out, _ = run(["bounce", "--kappa", "0", "--samples", "3"], capsys)
    assert code == 0
    assert float(rows(out)[2][1]) == pytest.approx(1.5, rel=1e-14)


def test_bounce_options_exclusive(capsys):
    code, _, err = run(["bounce", "--kappa", "-0.1", "--tstar", "10"], capsys)
    assert code == 1 and "not allowed" in err


def test_bounce_needs_energy(capsys):
    code, _, _ = run(["bounce"], capsys)
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["bounce", "--kappa", "0.1"],
    ["bounce", "--energy-ratio", "1.5"],
    ["bounce", "--tstar", "50"],
    ["map", "--mass-me", "-1"],
])
def test_domain_errors_exit_2(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2 and out == "" and err


@pytest.mark.parametrize("argv", [
    ["map", "--grid", "0:1"],
    ["map", "--grid", "1:0:5"],
    ["map", "--grid", "0:1:5:cubic"],
    ["map", "--hbar-omega-mev", "10", "20"],
    ["nonsense"],
])
def test_usage_errors_exit_1(argv, capsys):
    code, _, _ = run(argv, capsys)
    assert code == 1


def test_grid_spec():
    g = GridSpec.parse("1:100:3:log")
    assert list(g.values()) == pytest.approx([1.0, 10.0, 100.0])
    assert GridSpec.parse("0:1:3").spacing == "lin"
    with pytest.raises(UsageError):
        GridSpec.parse("0:1:3:log")


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# heavier particle\nmass_me = 2000\nhbar_omega_mev = 10\ngrid = 1:1:2\n")
    code, out, err = run(["map", "--config", str(cfg)], capsys)
    # grid 1:1 is rejected
    assert code == 1
    cfg.write_text("mass_me = 2000\nhbar_omega_mev = 10\ngrid = 0:1:2\n")
    _, out, _ = run(["map", "--config", str(cfg), "--format", "json"], capsys)
    doc = json.loads(out)
    assert doc["params"] == {"mass_me": 2000.0, "hbar_omega_mev": 10.0, "a_angstrom": 1.0}
    _, out, _ = run(["map", "--config", str(cfg), "--hbar-omega-mev", "20", "--format", "json"],
                    capsys)
    assert json.loads(out)["rows"][-1][2] == pytest.approx(36.938, abs=2e-3)


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(["map", "--config", str(cfg)], capsys)
    assert code == 1 and "colour" in err


def test_missing_config_is_io_error(tmp_path, capsys):
    code, _, _ = run(["map", "--config", str(tmp_path / "nope.cfg")], capsys)
    assert code == 2


def test_out_file(tmp_path, capsys):
    path = tmp_path / "a.csv"
    code, out, _ = run(["action", "--grid", "5:30:4", "--out", str(path)], capsys)
    assert code == 0 and out == ""
    table = rows(path.read_text())
    assert table[0][:2] == ["T_star_K", "action_over_hbar"]
    assert len(table) == 5


def test_rate_csv_and_summary(tmp_path, capsys):
    summary = tmp_path / "s.json"
    code, out, _ = run(["rate", "--grid", "10:36:6", "--summary", str(summary)], capsys)
    assert code == 0
    table = rows(out)
    assert "hbar_Gamma_meV" in table[0]
    assert len(table) == 7
    s = json.loads(summary.read_text())["summary"][0]
    assert s["T_c_K"] == pytest.approx(36.938, abs=2e-3)


def test_rate_single_point_matches_library(capsys):
    from cubic_tunneling import derive_params, rate
    _, out, _ = run(["rate", "--grid", "0.3691:0.3692:2", "--format", "json"], capsys)
    doc = json.loads(out)
    pt = doc["curves"][0]["points"][0]
    expected = rate.decay_rate(pt["T_star"], derive_params(1000, 20, 1)).gamma
    assert pt["gamma"] == expected == pytest.approx(4.70199089567, rel=1e-9)


def test_rate_json_round_trip(capsys):
    from cubic_tunneling.rate import RateCurve
    _, out, _ = run(["rate", "--grid", "5:36:12", "--format", "json"], capsys)
    curve = json.loads(out)["curves"][0]
    back = RateCurve.from_dict(curve)
    assert back.to_dict()["features"] == curve["features"]


def test_rate_drops_points_above_tc(capsys):
    code, out, err = run(["rate", "--hbar-omega-mev", "10", "20", "--grid", "10:30:3"], capsys)
    assert code == 0
    assert "dropped 2" in err
    omegas = [r[0] for r in rows(out)[1:]]
    assert omegas.count("1.000000000000e+01") == 1
    assert omegas.count("2.000000000000e+01") == 3


def test_rate_warning_flag(capsys):
    code, _, err = run(["rate", "--hbar-omega-mev", "10", "--grid", "4:18.4:20",
                        "--warn-semiclassical"], capsys)
    assert code == 0 and "warning" in err


def test_verify_exit_code(capsys):
    code, out, _ = run(["verify"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and doc["n_failed"] == 0


def test_verify_failure_exit_3(monkeypatch, capsys):
    from cubic_tunneling import oracle
    real = oracle.run_suite

    def tightened(params, **kw):
        reps = real(params, **kw)
        reps[0].threshold = 0.0
        reps[0].discrepancy = 1.0
        return reps

    monkeypatch.setattr(oracle, "run_suite", tightened)
    code, out, _ = run(["verify"], capsys)
    assert code == 3 and json.loads(out)["n_failed"] == 1


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cubic_tunneling", "map", "--grid", "0:1:2"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.startswith("energy_ratio,kappa,T_star_K")


def test_exit_codes_are_distinct():
    assert len({cli.EXIT_OK, cli.EXIT_USAGE, cli.EXIT_DOMAIN, cli.EXIT_VERIFY}) == 4
