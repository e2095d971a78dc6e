"""Command-line front end.

Subcommands emit tables (CSV or JSON) for the energy-temperature map, the
action, the fluctuation spectrum and the decay rate, plus a bounce profile
and the oracle verification report.

Exit codes: 0 success, 1 usage error, 2 domain error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import classical, fluctuation, oracle, rate
from .errors import DomainError
from .units import derive_params

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2, 3

_CONFIG_KEYS = {
    "mass_me": float,
    "hbar_omega_mev": str,
    "a_angstrom": float,
    "format": str,
    "out": str,
    "grid": str,
    "rtol": float,
    "determinant": str,
}

_DEFAULTS = {
    "mass_me": 1000.0,
    "hbar_omega_mev": "20",
    "a_angstrom": 1.0,
    "format": "csv",
    "out": None,
    "grid": None,
    "rtol": 1e-12,
    "determinant": "exact",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    count: int
    spacing: str = "lin"

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise UsageError(f"grid must be min:max:count[:lin|log], got {text!r}")
        try:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise UsageError(f"bad grid {text!r}: {exc}") from None
        spacing = parts[3] if len(parts) == 4 else "lin"
        if spacing not in ("lin", "log"):
            raise UsageError(f"grid spacing must be lin or log, got {spacing!r}")
        if count < 2 or not lo < hi:
            raise UsageError("grid needs count >= 2 and min < max")
        if spacing == "log" and lo <= 0:
            raise UsageError("log grid needs min > 0")
        return cls(lo, hi, count, spacing)

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)


@dataclass
class RunConfig:
    command: str
    mass_me: float
    hbar_omega_mev: list[float]
    a_angstrom: float
    format: str = "csv"
    out: str | None = None
    grid: GridSpec | None = None
    rtol: float = 1e-12
    determinant: str = "exact"
    extra: dict = field(default_factory=dict)

    def params(self, omega: float | None = None):
        if omega is None:
            if len(self.hbar_omega_mev) != 1:
                raise UsageError("this command takes a single --hbar-omega-mev")
            omega = self.hbar_omega_mev[0]
        return derive_params(self.mass_me, omega, self.a_angstrom)


def read_config(path: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = _CONFIG_KEYS[key](value)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: bad value for {key}") from None
    return out


def _omega_list(value) -> list[float]:
    if isinstance(value, (int, float)):
        return [float(value)]
    items = value if isinstance(value, list) else [value]
    out = []
    for item in items:
        for tok in str(item).replace(",", " ").split():
            try:
                out.append(float(tok))
            except ValueError:
                raise UsageError(f"bad oscillator energy {tok!r}") from None
    if not out:
        raise UsageError("no oscillator energy given")
    return out


def _common_options(parser: argparse.ArgumentParser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    g = parser.add_argument_group("potential and output")
    g.add_argument("--config", default=default, help="key = value file; flags override it")
    g.add_argument("--mass-me", type=float, default=default, help="mass in electron masses (1000)")
    g.add_argument("--hbar-omega-mev", nargs="+", default=default,
                   help="oscillator quantum in meV (20); rate accepts several")
    g.add_argument("--a-angstrom", type=float, default=default, help="barrier-top position (1)")
    g.add_argument("--format", choices=("csv", "json"), default=default)
    g.add_argument("--out", default=default, help="output file (stdout if omitted)")
    g.add_argument("--grid", default=default, help="min:max:count[:lin|log]")
    g.add_argument("--rtol", type=float, default=default, help="integrator tolerance for verify")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cubic-tunneling",
                     description="Thermal decay rate of a particle in a cubic metastable well.")
    _common_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("bounce", help="one period of the bounce trajectory")
    _common_options(p, suppress=True)
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--kappa", type=float, help="reduced energy in [-4/27, 0]")
    which.add_argument("--energy-ratio", type=float, help="|E|/V(a) in [0, 1]")
    which.add_argument("--tstar", type=float, help="temperature in K")
    p.add_argument("--samples", type=int, default=201)

    p = sub.add_parser("map", help="|E|/V(a) against T* (grid over |E|/V(a))")
    _common_options(p, suppress=True)

    p = sub.add_parser("action", help="A/hbar, M N^-2/hbar and V(a)/k_B T* against T*")
    _common_options(p, suppress=True)

    p = sub.add_parser("spectrum", help="soft and negative Lame eigenvalues (grid over |E|/V(a))")
    _common_options(p, suppress=True)

    p = sub.add_parser("rate", help="decay rate against T* with peak, crossing and exponent")
    _common_options(p, suppress=True)
    p.add_argument("--determinant", choices=("exact", "fixed-scale"), default=argparse.SUPPRESS)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--summary", default=None, help="write the summary JSON here (csv mode)")
    p.add_argument("--warn-semiclassical", action="store_true",
                   help="print semiclassical-validity warnings to stderr")

    p = sub.add_parser("verify", help="run the oracle suite and report discrepancies")
    _common_options(p, suppress=True)
    return parser


def make_config(ns: argparse.Namespace) -> RunConfig:
    values = dict(_DEFAULTS)
    if getattr(ns, "config", None):
        values.update(read_config(ns.config))
    for key in _DEFAULTS:
        v = getattr(ns, key, None)
        if v is not None:
            values[key] = v
    grid = GridSpec.parse(values["grid"]) if values["grid"] else None
    extra = {k: v for k, v in vars(ns).items() if k not in _DEFAULTS and k not in ("command", "config")}
    return RunConfig(ns.command, float(values["mass_me"]), _omega_list(values["hbar_omega_mev"]),
                     float(values["a_angstrom"]), values["format"], values["out"], grid,
                     float(values["rtol"]), values["determinant"], extra)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(v)
    return "%.12e" % float(v)


def render_table(columns: list[str], rows, fmt: str, meta: dict | None = None) -> str:
    if fmt == "json":
        doc = {"columns": columns, "rows": [[float(x) for x in r] for r in rows]}
        if meta:
            doc = {**meta, **doc}
        return json.dumps(doc, indent=2, allow_nan=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(x) for x in r])
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _kappa_from_ratio(r: float) -> float:
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"energy ratio {r!r} outside [0, 1]")
    return -4.0 * r / 27.0


def cmd_bounce(cfg: RunConfig) -> int:
    params = cfg.params()
    ex = cfg.extra
    if ex.get("tstar") is not None:
        state = classical.invert_temperature(ex["tstar"], params)
    elif ex.get("energy_ratio") is not None:
        state = classical.bounce_state(_kappa_from_ratio(ex["energy_ratio"]), params)
    else:
        state = classical.bounce_state(ex["kappa"], params)
    n = ex.get("samples", 201)
    if n < 2:
        raise UsageError("--samples must be at least 2")
    # zero energy has an infinite period; show the instanton over +-10/omega
    half = 0.5 * state.L if math.isfinite(state.L) else 10.0 / params.omega
    tau = np.linspace(-half, half, n)
    x = np.atleast_1d(classical.bounce(tau, state))
    v = np.atleast_1d(classical.bounce_velocity(tau, state))
    cols = ["tau_hbar_per_meV", "x_angstrom", "xdot_angstrom_meV_per_hbar"]
    meta = {"kappa": state.kappa, "T_star_K": state.T_star, "period_hbar_per_meV": state.L,
            "params": params.as_dict()}
    _emit(render_table(cols, zip(tau, x, v), cfg.format, meta), cfg.out)
    return EXIT_OK


def cmd_map(cfg: RunConfig) -> int:
    params = cfg.params()
    grid = (cfg.grid or GridSpec(0.0, 1.0, 101)).values()
    rows = []
    for r in grid:
        st = classical.bounce_state(_kappa_from_ratio(r), params)
        rows.append((r, st.kappa, st.T_star))
    cols = ["energy_ratio", "kappa", "T_star_K"]
    _emit(render_table(cols, rows, cfg.format, {"params": params.as_dict()}), cfg.out)
    return EXIT_OK


def _temperature_grid(cfg: RunConfig, params) -> np.ndarray:
    if cfg.grid is not None:
        return cfg.grid.values()
    return np.linspace(params.T_c / 100.0, params.T_c, 200)


def cmd_action(cfg: RunConfig) -> int:
    params = cfg.params()
    rows = []
    for T in _temperature_grid(cfg, params):
        st = classical.invert_temperature(T, params)
        rows.append((T, classical.classical_action(st), classical.mass_norm_squared(st),
                     classical.thermal_action(T, params)))
    cols = ["T_star_K", "action_over_hbar", "mass_norm_sq_over_hbar", "thermal_action_over_hbar"]
    _emit(render_table(cols, rows, cfg.format, {"params": params.as_dict()}), cfg.out)
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    params = cfg.params()
    w2 = params.omega ** 2
    rows = []
    for r in (cfg.grid or GridSpec(0.0, 1.0, 101)).values():
        st = classical.bounce_state(_kappa_from_ratio(r), params)
        sp = fluctuation.lame_spectrum(st)
        rows.append((r, st.kappa, sp.eps_1 / w2, sp.eps_minus1 / w2))
    cols = ["energy_ratio", "kappa", "eps_1_over_omega2", "eps_minus1_over_omega2"]
    _emit(render_table(cols, rows, cfg.format, {"params": params.as_dict()}), cfg.out)
    return EXIT_OK


def curve_summary(curve: rate.RateCurve) -> dict:
    return {
        "hbar_omega_meV": curve.params.hbar_omega,
        "determinant": curve.determinant,
        "T_c_K": curve.params.T_c,
        "T_P_K": curve.T_P,
        "gamma_P_meV": curve.gamma_P,
        "peak_interior": curve.peak_interior,
        "T_A_K": curve.T_A,
        "fitted_exponent": curve.fitted_exponent,
        "warnings": rate.semiclassical_warnings(curve),
    }


def cmd_rate(cfg: RunConfig) -> int:
    curves = []
    for omega in cfg.hbar_omega_mev:
        params = cfg.params(omega)
        grid = None
        if cfg.grid is not None:
            grid = cfg.grid.values()
            keep = grid <= params.T_c
            if not keep.any():
                raise DomainError(f"whole grid lies above T_c = {params.T_c:.6g} K "
                                  f"for hbar*omega = {omega:g} meV")
            if not keep.all():
                print(f"note: dropped {int((~keep).sum())} grid points above T_c = "
                      f"{params.T_c:.6g} K for hbar*omega = {omega:g} meV", file=sys.stderr)
            grid = grid[keep]
        curves.append(rate.scan(params, grid, determinant=cfg.determinant,
                                workers=cfg.extra.get("workers")))
    summaries = [curve_summary(c) for c in curves]
    if cfg.extra.get("warn_semiclassical"):
        for s in summaries:
            for msg in s["warnings"]:
                print(f"warning (hbar*omega = {s['hbar_omega_meV']:g} meV): {msg}", file=sys.stderr)
    if cfg.format == "json":
        doc = {"curves": [c.to_dict() | {"summary": s} for c, s in zip(curves, summaries)]}
        _emit(json.dumps(doc, indent=2) + "\n", cfg.out)
        return EXIT_OK
    cols = ["hbar_omega_meV", "T_star_K", "kappa", "action_over_hbar", "mass_norm_sq_over_hbar",
            "det_ratio_per_meV2", "hbar_Gamma_meV", "arrhenius_meV"]
    rows = [(c.params.hbar_omega, p.T_star, p.kappa, p.action_over_hbar, p.mass_norm_sq,
             p.det_ratio, p.gamma, p.arrhenius) for c in curves for p in c.points]
    _emit(render_table(cols, rows, "csv"), cfg.out)
    text = json.dumps({"summary": summaries}, indent=2) + "\n"
    if cfg.extra.get("summary"):
        with open(cfg.extra["summary"], "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stderr.write(text)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    params = cfg.params()
    reports = oracle.run_suite(params, rtol=cfg.rtol)
    failed = [r for r in reports if not r.passed]
    unconverged = [r for r in reports if not r.converged]
    doc = {
        "params": params.as_dict(),
        "rtol": cfg.rtol,
        "passed": not failed,
        "n_reports": len(reports),
        "n_failed": len(failed),
        "n_unconverged": len(unconverged),
        "reports": [r.as_dict() for r in reports],
    }
    _emit(json.dumps(doc, indent=2) + "\n", cfg.out)
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {
    "bounce": cmd_bounce,
    "map": cmd_map,
    "action": cmd_action,
    "spectrum": cmd_spectrum,
    "rate": cmd_rate,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = make_config(ns)
        if cfg.format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {cfg.format!r}")
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"cubic-tunneling: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, OSError) as exc:
        print(f"cubic-tunneling: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
