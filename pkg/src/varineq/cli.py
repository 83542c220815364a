"""Command-line front end: ``check``, ``sweep`` and ``catalog``.

Exit codes
----------
0  every enabled check passed and the margin is non-negative
1  configuration or evaluation error (including usage errors)
2  an identity, boundary or Euler-Lagrange check failed
3  all checks passed but the margin is negative: the inequality is
   violated for this phi

Config files are flat ``key = value`` lines, optionally grouped under
``[section]`` headers (sections are cosmetic; keys are global).  ``#``
starts a comment anywhere, ``;`` only at the start of a line.  Every key
can be overridden by ``--key value`` on the command line.  Example::

    [problem]
    problem = harmonic
    [interval]
    alpha = 0
    beta = 4.0
    [phi]
    lambda = 1
    n = 3
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ConfigurationError as ConfigError, VarIneqError
from .lagrangian import catalog_info, get_model
from .pendulum import PendulumParams, rk4_integrate, separatrix_initial_rate, separatrix_trajectory
from .quadrature import QuadratureSpec
from .second_variation import (
    CheckReport,
    constant_trajectory,
    linear_trajectory,
    load_sampled_trajectory,
    run_check,
)
from .testfunctions import Interval, load_sampled_phi, poly_bump

__all__ = ["main", "RunConfig", "load_config", "cmd_check", "cmd_sweep", "cmd_catalog", "CSV_COLUMNS", "exit_code"]

EXIT_OK, EXIT_ERROR, EXIT_CHECK_FAILED, EXIT_INEQUALITY = 0, 1, 2, 3

CSV_COLUMNS = (
    "problem", "trajectory", "alpha", "beta", "lambda", "n", "m", "ell", "g", "theta0",
    "F_value", "el_residual_max", "I2_direct", "I2_paper", "I2_ibp_standard",
    "residual_AB", "residual_AC", "inequality_margin", "margin38", "boundary_ok", "converged",
)
_CONFIG_COLUMNS = CSV_COLUMNS[:10]

SWEEP_AXES = ("lambda", "n", "theta0", "beta")
TRAJECTORIES = ("equilibrium", "linear", "separatrix", "rk4", "sampled")
FORMATS = ("human", "json", "csv")


def _to_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {s!r}")


def _to_float(s: str) -> float:
    v = float(s)
    if not math.isfinite(v):
        raise ValueError(f"expected a finite number, got {s!r}")
    return v


def _to_int(s: str) -> int:
    v = _to_float(s)
    if not v.is_integer():
        raise ValueError(f"expected an integer, got {s!r}")
    return int(v)


def _to_choice(choices):
    def conv(s: str) -> str:
        s = s.strip()
        if s not in choices:
            raise ValueError(f"expected one of {', '.join(choices)}, got {s!r}")
        return s

    return conv


def _to_coeffs(s: str) -> dict:
    out = {}
    for item in filter(None, (p.strip() for p in s.split(";"))):
        exps, _, c = item.partition(":")
        parts = [p.strip() for p in exps.split(",")]
        if len(parts) != 3 or not c:
            raise ValueError(f"coefficient entries look like 'i,j,k:value', got {item!r}")
        key = tuple(int(p) for p in parts)
        out[key] = out.get(key, 0.0) + _to_float(c)
    if not out:
        raise ValueError("no coefficients given")
    return out


# key -> (parser, default); a default of None means "unset"
KEYS = {
    "problem": (str.strip, "pendulum"),
    "trajectory": (_to_choice(TRAJECTORIES), None),
    "alpha": (_to_float, 0.0),
    "beta": (_to_float, 2.0),
    "lambda": (_to_float, 1.0),
    "n": (_to_int, 3),
    "phi_file": (str.strip, None),
    "trajectory_file": (str.strip, None),
    "allow_large_n": (_to_bool, False),
    "m": (_to_float, 1.0),
    "ell": (_to_float, 1.0),
    "g": (_to_float, 9.8),
    "k": (_to_float, 1.0),
    "theta0": (_to_float, math.pi / 2),
    "theta_dot0": (_to_float, 0.0),
    "y0": (_to_float, 0.0),
    "slope": (_to_float, 1.0),
    "coeffs": (_to_coeffs, None),
    "rk4_steps": (_to_int, 10000),
    "el_grid": (_to_int, 201),
    "rule": (_to_choice(("gauss5", "simpson")), "gauss5"),
    "panels": (_to_int, 8),
    "tol": (_to_float, 1e-12),
    "max_panels": (_to_int, 4096),
    "format": (_to_choice(FORMATS), "human"),
    "out": (str.strip, None),
}

_MODEL_PARAMS = {"pendulum": ("m", "ell", "g"), "harmonic": ("k",), "arclength": (), "poly": ("coeffs",)}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse key = value text into a dict of typed values; errors carry line numbers."""
    values, seen = {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith("[") and line.endswith("]"):
            continue
        key, sep, val = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r} (first set on line {seen[key]})")
        try:
            values[key] = KEYS[key][0](val)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: {key}: {exc}") from None
        seen[key] = lineno
    return values


def load_config(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config_text(text, str(path))


@dataclass
class RunConfig:
    """A fully resolved run: every key present, referenced files resolved."""

    values: dict = field(default_factory=dict)

    @classmethod
    def resolve(cls, *layers: dict) -> "RunConfig":
        merged = {k: d for k, (_, d) in KEYS.items()}
        for layer in layers:
            merged.update({k: v for k, v in layer.items() if v is not None})
        if merged["trajectory"] is None:
            merged["trajectory"] = "separatrix" if merged["problem"] == "pendulum" else "equilibrium"
        return cls(merged)

    def __getitem__(self, key):
        return self.values[key]

    def echo(self) -> dict:
        v = self.values
        out = {k: v[k] for k in ("problem", "trajectory", "alpha", "beta")}
        if v["phi_file"]:
            out.update({"phi_file": v["phi_file"], "lambda": None, "n": None})
        else:
            out.update({"lambda": v["lambda"], "n": v["n"]})
        for k in ("m", "ell", "g", "theta0", "theta_dot0", "k", "y0", "slope", "rk4_steps", "el_grid"):
            out[k] = v[k]
        if v["coeffs"] is not None:
            out["coeffs"] = {",".join(map(str, e)): c for e, c in sorted(v["coeffs"].items())}
        if v["trajectory_file"]:
            out["trajectory_file"] = v["trajectory_file"]
        out["quadrature"] = {k: v[k] for k in ("rule", "panels", "tol", "max_panels")}
        return out

    def build(self):
        """Instantiate (model, trajectory, test function, quadrature spec, notes)."""
        v = self.values
        problem = v["problem"]
        params = {k: v[k] for k in _MODEL_PARAMS.get(problem, ()) if v[k] is not None}
        model = get_model(problem, **params)
        spec = QuadratureSpec(v["rule"], v["panels"], v["tol"], v["max_panels"])
        interval = Interval.make(v["alpha"], v["beta"])
        notes = {}
        kind = v["trajectory"]
        if kind in ("separatrix", "rk4") and problem != "pendulum":
            raise ConfigError(f"trajectory {kind!r} is only available for the pendulum")
        if kind == "equilibrium":
            traj = constant_trajectory(interval, v["y0"])
        elif kind == "linear":
            traj = linear_trajectory(interval, v["slope"])
        elif kind == "separatrix":
            p = PendulumParams(v["m"], v["ell"], v["g"], v["theta0"])
            traj = separatrix_trajectory(p, interval)
            rate = separatrix_initial_rate(p)
            notes["separatrix_theta_dot_at_0"] = rate
            notes["separatrix_rate_vanishes_at_0"] = rate == 0.0
        elif kind == "rk4":
            p = PendulumParams(v["m"], v["ell"], v["g"], v["theta0"])
            traj = rk4_integrate(p, v["theta0"], v["theta_dot0"], interval, v["rk4_steps"])
        else:
            if not v["trajectory_file"]:
                raise ConfigError("trajectory = sampled needs trajectory_file")
            traj = load_sampled_trajectory(v["trajectory_file"])
        if v["phi_file"]:
            tf = load_sampled_phi(v["phi_file"])
        else:
            tf = poly_bump(interval, v["lambda"], v["n"], allow_large_n=v["allow_large_n"])
        if tuple(tf.interval) != tuple(traj.interval):
            raise ConfigError(
                f"phi is defined on {list(tf.interval)} but the trajectory on {list(traj.interval)}"
            )
        return model, traj, tf, spec, notes


def run_config(cfg: RunConfig) -> CheckReport:
    model, traj, tf, spec, notes = cfg.build()
    report = run_check(model, traj, tf, spec, config=cfg.echo(), el_grid=cfg["el_grid"])
    report.notes.update(notes)
    return report


def exit_code(report: CheckReport) -> int:
    """Map a report onto the exit-code partition {0, 1, 2, 3}."""
    if report.errors:
        return EXIT_ERROR
    if report.identity_ok is False or report.boundary_ok is False or report.el_ok is False:
        return EXIT_CHECK_FAILED
    if report.inequality_holds is False:
        return EXIT_INEQUALITY
    return EXIT_OK


# --------------------------------------------------------------------------
# formatting
# --------------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def csv_row(report: CheckReport) -> list:
    d = {**report.config, **report.__dict__}
    return [_fmt(d.get(c)) for c in CSV_COLUMNS]


def error_row(config: dict) -> list:
    return [_fmt(config.get(c)) for c in _CONFIG_COLUMNS] + ["ERROR"] * (len(CSV_COLUMNS) - len(_CONFIG_COLUMNS))


def _csv_text(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    w.writerows(rows)
    return buf.getvalue()


def format_human(report: CheckReport, code: int) -> str:
    lines = []
    c = report.config
    lines.append(f"problem {c.get('problem')}  trajectory {c.get('trajectory')}  interval [{_fmt(c.get('alpha'))}, {_fmt(c.get('beta'))}]")
    for key in ("F_value", "el_residual_max", "I2_direct", "I2_paper", "I2_ibp_standard",
                "residual_AB", "residual_AC", "inequality_margin", "margin38"):
        lines.append(f"  {key:<18} {_fmt(getattr(report, key))}")
    if report.terms:
        lines.append("  terms " + "  ".join(f"{k}={_fmt(v)}" for k, v in report.terms.items()))
    for key in ("boundary_ok", "identity_ok", "el_ok", "converged", "degenerate"):
        lines.append(f"  {key:<18} {_fmt(getattr(report, key))}")
    for k, v in report.notes.items():
        lines.append(f"  note {k}: {_fmt(v)}")
    for k, v in report.errors.items():
        lines.append(f"  error in {k}: {v}")
    verdict = {
        EXIT_OK: "all checks passed; margin non-negative",
        EXIT_ERROR: "evaluation error",
        EXIT_CHECK_FAILED: "identity, boundary or Euler-Lagrange check failed",
        EXIT_INEQUALITY: "inequality violated for this phi",
    }[code]
    lines.append(f"result: {verdict} (exit {code})")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_check(cfg: RunConfig) -> tuple:
    """Run one configuration; returns (exit code, report text)."""
    report = run_config(cfg)
    code = exit_code(report)
    fmt = cfg["format"]
    if fmt == "json":
        text = report.to_json() + "\n"
    elif fmt == "csv":
        text = _csv_text([csv_row(report)])
    else:
        text = format_human(report, code)
    return code, text


def parse_axis(spec: str) -> tuple:
    key, sep, vals = spec.partition("=")
    key = key.strip()
    if not sep or key not in SWEEP_AXES:
        raise ConfigError(f"--axis expects one of {', '.join(SWEEP_AXES)} as key=v1,v2,...; got {spec!r}")
    items = [s.strip() for s in vals.split(",") if s.strip()]
    if not items:
        raise ConfigError(f"--axis {key}: empty value list")
    conv = KEYS[key][0]
    try:
        return key, [conv(s) for s in items]
    except ValueError as exc:
        raise ConfigError(f"--axis {key}: {exc}") from None


def cmd_sweep(base: dict, axes: list) -> tuple:
    """One CSV row per combination, in lexicographic order over ``axes``.

    A combination that cannot be built or evaluated yields a row whose
    result columns read ERROR; the sweep continues.  Returns (exit code, CSV
    text, list of error messages).
    """
    if not axes:
        raise ConfigError("sweep needs at least one --axis")
    keys = [k for k, _ in axes]
    if len(set(keys)) != len(keys):
        raise ConfigError(f"duplicate sweep axis in {keys}")
    rows, problems = [], []
    for combo in itertools.product(*(vals for _, vals in axes)):
        cfg = RunConfig.resolve(base, dict(zip(keys, combo)))
        try:
            report = run_config(cfg)
        except (VarIneqError, ArithmeticError, ValueError) as exc:
            echo = dict(cfg.values)
            rows.append(error_row(echo))
            problems.append(f"{dict(zip(keys, combo))}: {exc}")
            continue
        rows.append(csv_row(report))
        if report.errors:
            problems.append(f"{dict(zip(keys, combo))}: {report.errors}")
    return (EXIT_ERROR if problems else EXIT_OK), _csv_text(rows), problems


def cmd_catalog(as_json: bool = False) -> str:
    info = catalog_info()
    if as_json:
        return json.dumps(info, indent=2) + "\n"
    lines = []
    for e in info:
        params = ", ".join(e["params"]) or "-"
        lines.append(f"{e['name']:<10} params: {params:<12} trajectories: {', '.join(e['trajectories'])}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value config file")
    for key in KEYS:
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, metavar=key.upper(), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="varineq", description="Second-variation and variational-inequality checks.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    check = sub.add_parser("check", help="evaluate one configuration")
    _add_run_options(check)
    sweep = sub.add_parser("sweep", help="evaluate a grid of configurations, CSV output")
    _add_run_options(sweep)
    sweep.add_argument("--axis", action="append", default=[], metavar="KEY=V1,V2,...")
    cat = sub.add_parser("catalog", help="list catalog models")
    cat.add_argument("--json", action="store_true")
    return parser


def _flag_overrides(ns: argparse.Namespace) -> dict:
    out = {}
    for key, (conv, _) in KEYS.items():
        raw = getattr(ns, key, None)
        if raw is None:
            continue
        try:
            out[key] = conv(raw)
        except ValueError as exc:
            raise ConfigError(f"--{key.replace('_', '-')}: {exc}") from None
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    if ns.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_ERROR
    if ns.command == "catalog":
        sys.stdout.write(cmd_catalog(ns.json))
        return EXIT_OK
    try:
        layers = [load_config(ns.config)] if ns.config else []
        layers.append(_flag_overrides(ns))
        if ns.command == "check":
            cfg = RunConfig.resolve(*layers)
            code, text = cmd_check(cfg)
            _emit(text, cfg["out"])
            return code
        base = {}
        for layer in layers:
            base.update(layer)
        axes = [parse_axis(a) for a in ns.axis]
        code, text, problems = cmd_sweep(base, axes)
        _emit(text, RunConfig.resolve(base)["out"])
        for msg in problems:
            print(f"varineq: {msg}", file=sys.stderr)
        return code
    except (VarIneqError, ArithmeticError, ValueError, OSError) as exc:
        print(f"varineq: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
