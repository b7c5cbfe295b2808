"""Command-line front end: ``thermoweyl <command> [options]``.

Exit status: 0 success, 1 a verification suite failed, 2 invalid
configuration, 3 numerical failure.  Output goes to ``--output`` (written
atomically), else to ``$THERMOWEYL_OUTPUT_DIR/<command>.<fmt>`` when that
variable is set, else to standard output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import correlators as cor
from . import lattice as lat
from .crossed import ZoneSpec, zone_statistics
from .errors import ConfigTooLarge, ThermoWeylError
from .symplectic import ThermalParams
from .testfn import Gaussian, PolyGaussian
from .verify import SUITES, run_suites

OUTPUT_DIR_ENV = "THERMOWEYL_OUTPUT_DIR"
MAX_CLI_M = 7


class ConfigError(Exception):
    """Invalid user configuration (exit status 2)."""


# ---------------------------------------------------------------------------
# parsing helpers


def parse_grid(spec: str) -> np.ndarray:
    """'a:b:step' -> a, a+step, ..., b (inclusive); a single number is one point."""
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        a, b, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"bad grid {spec!r}; expected a:b:step") from None
    if step <= 0 or b < a:
        raise ConfigError(f"bad grid {spec!r}; need a <= b and step > 0")
    n = int(math.floor((b - a) / step + 1e-9)) + 1
    return a + step * np.arange(n)


def parse_int_range(spec: str) -> list[int]:
    """'4:7' -> [4, 5, 6, 7]; '5' -> [5]."""
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            return [int(parts[0])]
        lo, hi = int(parts[0]), int(parts[1])
    except ValueError:
        raise ConfigError(f"bad integer range {spec!r}") from None
    if hi < lo:
        raise ConfigError(f"bad integer range {spec!r}")
    return list(range(lo, hi + 1))


def read_config_file(path: str) -> dict:
    """Plain key=value lines; '#' starts a comment; keys use option names."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key=value")
                key, value = (s.strip() for s in line.split("=", 1))
                out[key.replace("-", "_")] = value
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    return out


def _fmt(x: float) -> str:
    return "%.17g" % x


# ---------------------------------------------------------------------------
# output


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit(args, text: str) -> None:
    path = args.output
    if path is None and os.environ.get(OUTPUT_DIR_ENV):
        path = os.path.join(os.environ[OUTPUT_DIR_ENV], f"{args.command}.{args.format}")
    if path is None:
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def table_text(args, header, rows) -> str:
    if args.format == "json":
        return json_text([dict(zip(header, row)) for row in rows])
    return csv_text(header, rows)


# ---------------------------------------------------------------------------
# commands


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise ConfigError(f"--{name.replace('_', '-')} is required")


def _thermal(args) -> ThermalParams:
    _require(args, "beta")
    if not args.beta > 0:
        raise ConfigError("--beta must be positive")
    if args.eps < 0:
        raise ConfigError("--eps must be non-negative")
    return ThermalParams(args.beta, args.eps)


def run_correlator(args) -> int:
    tp = _thermal(args)
    if args.alpha < 0:
        raise ConfigError("--alpha must be non-negative")
    u = parse_grid(args.grid)
    if args.kind == "anyon":
        vals = cor.anyon_two_point(args.alpha, u, tp)
    elif args.kind == "bare":
        vals = cor.bare_two_point(u, tp)
    elif args.kind == "bare-series":
        vals = np.array([cor.bare_two_point_series(x, tp) for x in u])
    else:
        if tp.epsilon_reg == 0:
            raise ConfigError("the alpha-commutator needs --eps > 0")
        vals = cor.alpha_commutator_expectation(args.alpha, u, tp)
    vals = np.atleast_1d(vals)
    rows = [(float(x), float(v.real), float(v.imag)) for x, v in zip(u, vals)]
    emit(args, table_text(args, ["u", "re", "im"], rows))
    return 0


def run_verify(args) -> int:
    names = args.suite or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise ConfigError(f"unknown suite(s) {unknown}; choose from {sorted(SUITES)}")
    results = run_suites(names)
    emit(args, json_text([r.to_dict() for r in results]))
    failed = [r.suite for r in results if not r.passed]
    if failed:
        print(f"thermoweyl verify: failing suite(s): {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def run_lattice(args) -> int:
    _require(args, "beta")
    ms = parse_int_range(args.M)
    if max(ms) > MAX_CLI_M or min(ms) < 1:
        raise ConfigError(f"--M must lie in 1..{MAX_CLI_M} (Fock dimension cap)")
    if not args.L > 0:
        raise ConfigError("--L must be positive")
    width = args.width if args.width is not None else args.L / 10.0
    f = Gaussian(0.0, width)
    g = PolyGaussian((0.0, 1.0), 0.0, width)
    records = []
    for m in ms:
        rep = lat.schwinger_check(f, g, lat.LatticeConfig(args.L, m, args.beta))
        records.append({"M": m, "lattice_value": [rep.lattice_value.real, rep.lattice_value.imag],
                        "continuum_sigma": rep.continuum_sigma, "rel_error": rep.rel_error})
    if args.format == "csv":
        rows = [(r["M"], r["lattice_value"][0], r["lattice_value"][1],
                 r["continuum_sigma"], r["rel_error"]) for r in records]
        emit(args, csv_text(["M", "re", "im", "continuum_sigma", "rel_error"], rows))
    else:
        emit(args, json_text(records))
    return 0


def run_zone_table(args) -> int:
    rows = []
    for n in parse_int_range(args.n):
        for nbar in parse_int_range(args.nbar):
            if n < 0 or nbar < 1:
                raise ConfigError("need n >= 0 and nbar >= 1")
            for m in parse_int_range(args.m):
                rec = zone_statistics(ZoneSpec(n, nbar), m)
                rows.append((n, nbar, m, rec.r, str(rec.r_squared), rec.cls))
    emit(args, table_text(args, ["n", "nbar", "m", "r", "r_squared", "class"], rows))
    return 0


def run_phases(args) -> int:
    tp = _thermal(args)
    alphas = [float(a) for a in args.alpha_list.split(",")] if args.alpha_list else [args.alpha]
    if not args.t > args.eps:
        raise ConfigError("--t must exceed --eps")
    out = []
    for a in alphas:
        rec = cor.coupling_statistics_map(a)
        plus = cor.exchange_phase(a, args.t, args.eps)
        minus = cor.exchange_phase(a, -args.t, args.eps)
        s = cor.anyon_two_point(a, args.t, ThermalParams(tp.beta, 0.0))
        sm = cor.anyon_two_point(a, -args.t, ThermalParams(tp.beta, 0.0))
        ratio = sm / s
        out.append({"alpha": a, "coupling": rec.coupling, "is_fermionic": rec.is_fermionic,
                    "is_bosonic": rec.is_bosonic, "n": rec.n,
                    "exchange_phase_plus": [plus.real, plus.imag],
                    "exchange_phase_minus": [minus.real, minus.imag],
                    "correlator_ratio": [ratio.real, ratio.imag]})
    emit(args, json_text(out))
    return 0


COMMANDS = {
    "correlator": run_correlator,
    "verify": run_verify,
    "lattice": run_lattice,
    "zone-table": run_zone_table,
    "phases": run_phases,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thermoweyl",
                                     description="Thermal Weyl-algebra and anyon correlator toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help, fmt="csv"):
        p = sub.add_parser(name, help=help)
        p.add_argument("--output", "-o", help="output file (written atomically)")
        p.add_argument("--format", choices=("csv", "json"), default=fmt)
        p.add_argument("--config", help="key=value file supplying option defaults")
        return p

    p = add("correlator", "tabulate a two-point function")
    p.add_argument("--alpha", type=float, default=2 * math.pi)
    p.add_argument("--beta", type=float)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--grid", default="-2:2:0.1", help="a:b:step, inclusive")
    p.add_argument("--kind", choices=("anyon", "bare", "bare-series", "alpha-commutator"),
                   default="anyon")

    p = add("verify", "run invariant suites", "json")
    p.add_argument("--suite", action="append", help=f"one of {', '.join(SUITES)}")

    p = add("lattice", "Schwinger-term sweep on the Fock oracle", "json")
    p.add_argument("--M", default="4:7", help="mode cutoff or range lo:hi")
    p.add_argument("--L", type=float, default=20.0)
    p.add_argument("--beta", type=float)
    p.add_argument("--width", type=float, help="Gaussian width (default L/10)")

    p = add("zone-table", "zone statistics classification")
    p.add_argument("--n", default="0:2")
    p.add_argument("--nbar", default="1:3")
    p.add_argument("--m", default="0:6")

    p = add("phases", "exchange phases and coupling map", "json")
    p.add_argument("--alpha", type=float, default=2 * math.pi)
    p.add_argument("--alpha-list", help="comma-separated alphas (overrides --alpha)")
    p.add_argument("--beta", type=float)
    p.add_argument("--eps", type=float, default=1e-3)
    p.add_argument("--t", type=float, default=1.0)
    return parser


def _apply_config(parser, argv):
    """Re-parse with defaults from --config so explicit flags still win."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    values = read_config_file(args.config)
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest: a for a in subparser._actions}
    defaults = {}
    for key, raw in values.items():
        if key not in known or key in ("config", "help"):
            raise ConfigError(f"unknown config key {key!r} for {args.command}")
        action = known[key]
        try:
            defaults[key] = action.type(raw) if action.type else raw
        except ValueError:
            raise ConfigError(f"bad value for {key}: {raw!r}") from None
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def _join_negative_values(argv):
    """Allow ``--grid -2:2:0.1``: argparse would take '-2:2:0.1' for an option."""
    out = []
    it = iter(argv)
    for token in it:
        if token in VALUE_OPTIONS:
            value = next(it, None)
            if value is not None and value.startswith("-") and len(value) > 1:
                out.append(f"{token}={value}")
                continue
            out.append(token)
            if value is not None:
                out.append(value)
            continue
        out.append(token)
    return out


VALUE_OPTIONS = ("--grid", "--M", "--n", "--nbar", "--m", "--alpha-list", "--t", "--alpha")


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = _apply_config(parser, argv)
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        parser.print_usage(sys.stderr)
        print(f"thermoweyl: error: {exc}", file=sys.stderr)
        return 2
    except ConfigTooLarge as exc:
        print(f"thermoweyl: error: {exc}", file=sys.stderr)
        return 2
    except (ThermoWeylError, FloatingPointError, ArithmeticError) as exc:
        print(f"thermoweyl: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
