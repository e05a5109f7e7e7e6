"""Command-line front end for the scenario runners.

Usage errors exit with status 1, numerical failures with status 2. The CSV
goes to ``--out`` (``-`` for standard output) and a one-line summary to
standard output, or to standard error when the CSV itself is on stdout.
"""
from __future__ import annotations

import argparse
import math
import re
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import NumericalError
from .experiments import (format_convergence_csv, format_reports_csv, run_cslice,
                          run_divergence, run_empty_cavity)
from .materials import CompressionProfile, parse_profile
from .stress import QuadratureConfig, pressure_si

SCENARIOS = ("empty", "cslice", "divergence")


class UsageError(ValueError):
    """Bad command-line or config-file input."""


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    d: float = 1.0
    profile: str | None = None
    interval: tuple[float, float] | None = None
    N: tuple[int, ...] = (64,)
    rel_tol: float = 1e-8
    abs_tol: float = 1e-14
    out: str | None = None
    length_unit: float | None = None
    timing: bool = False
    base_dir: str | None = None

    @property
    def out_path(self) -> str:
        return self.out if self.out is not None else f"casimir_{self.scenario}.csv"

    def quadrature(self) -> QuadratureConfig:
        return QuadratureConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol)

    def build_profile(self) -> CompressionProfile | None:
        if self.scenario == "empty":
            return None
        text = self.profile if self.profile is not None else "linear:1,2"
        interval = self.interval if self.interval is not None else (0.0, self.d)
        return parse_profile(text, interval, self.base_dir)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="casimir-cslice",
                description="Casimir pressure in planar cavities with C-slice and graded media.")
    p.add_argument("--config", metavar="PATH", help="file of key=value lines; flags given here win")
    p.add_argument("--scenario", choices=SCENARIOS,
                   help="default: cslice when --profile is given, else empty")
    p.add_argument("--d", type=float, help="cavity width (default 1.0)")
    p.add_argument("--profile", help="const:<m>, linear:<m_a>,<m_b> or table:<path>")
    p.add_argument("--interval", metavar="A,B", help="profile interval inside [0, d]")
    p.add_argument("--N", metavar="N1,N2,...", help="slice counts (default 64)")
    p.add_argument("--rel-tol", type=float)
    p.add_argument("--abs-tol", type=float)
    p.add_argument("--out", help="CSV path, '-' for standard output")
    p.add_argument("--length-unit", type=float, metavar="METRES",
                   help="length unit in metres; adds the pressure in pascals to the summary")
    p.add_argument("--timing", action="store_true",
                   help="fill the runtime_ms column (makes output run-dependent)")
    return p


_FLAG_KEYS = {"scenario", "d", "profile", "interval", "N", "rel-tol", "abs-tol", "out",
              "length-unit", "timing"}


def _read_config(path: str) -> list[str]:
    """Translate a key=value file into equivalent flags."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path!r}: {exc.strerror}") from None
    argv: list[str] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("_", "-")
        if key.lower() == "n":
            key = "N"
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
        if key not in _FLAG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        value = value.strip()
        if key == "timing":
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append("--timing")
            elif value.lower() not in ("0", "false", "no", "off"):
                raise UsageError(f"{path}:{lineno}: timing must be true or false, got {value!r}")
            continue
        argv.append(f"--{key}={value}")
    return argv


def _parse_interval(text: str) -> tuple[float, float]:
    parts = text.split(",")
    try:
        a, b = (float(x) for x in parts)
    except ValueError:
        raise UsageError(f"malformed interval {text!r}; expected A,B") from None
    if a > b:
        raise UsageError(f"interval start exceeds end: {text!r}")
    if a == b:
        raise UsageError(f"empty interval {text!r}")
    return a, b


def _parse_N(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"malformed N list {text!r}; expected positive integers") from None
    if any(n < 1 for n in values):
        raise UsageError(f"malformed N list {text!r}; expected positive integers")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError(f"N list {text!r} must be strictly increasing")
    return values


def parse_args(argv=None) -> RunConfig:
    """Validate flags (and an optional config file) into a :class:`RunConfig`.

    Raises
    ------
    UsageError
        With a message naming the offending token.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    pre, _ = parser.parse_known_args(argv)
    base_dir = None
    if pre.config:
        base_dir = str(Path(pre.config).resolve().parent)
        argv = _read_config(pre.config) + argv
    ns = parser.parse_args(argv)

    scenario = ns.scenario or ("cslice" if ns.profile is not None else "empty")
    d = 1.0 if ns.d is None else ns.d
    if not (math.isfinite(d) and d > 0):
        raise UsageError(f"--d must be a positive number, got {d!r}")
    interval = _parse_interval(ns.interval) if ns.interval is not None else None
    cfg = RunConfig(
        scenario=scenario, d=d, profile=ns.profile, interval=interval,
        N=_parse_N(ns.N) if ns.N is not None else (64,),
        rel_tol=1e-8 if ns.rel_tol is None else ns.rel_tol,
        abs_tol=1e-14 if ns.abs_tol is None else ns.abs_tol,
        out=ns.out, length_unit=ns.length_unit, timing=ns.timing, base_dir=base_dir)

    if cfg.scenario == "empty" and (cfg.profile is not None or cfg.interval is not None):
        raise UsageError("the empty scenario takes no --profile or --interval")
    if cfg.scenario == "cslice" and (cfg.profile is None or cfg.interval is None):
        raise UsageError("the cslice scenario needs --profile and --interval")
    if cfg.length_unit is not None and not cfg.length_unit > 0:
        raise UsageError(f"--length-unit must be positive, got {cfg.length_unit!r}")
    try:
        cfg.quadrature()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if interval is not None and (interval[0] < 0 or interval[1] > d):
        raise UsageError(f"interval {ns.interval!r} is not inside the cavity [0, {d:g}]")
    try:
        cfg.build_profile()
    except (ValueError, OSError) as exc:
        raise UsageError(f"bad profile {cfg.profile!r}: {exc}") from None
    return cfg


def _sci(x: float) -> str:
    """Six-digit scientific notation with a bare exponent, e.g. -4.112335e-2."""
    return re.sub(r"e([+-])0*(\d)", r"e\1\2", f"{x:.6e}")


def run(config: RunConfig) -> tuple[str, str]:
    """Run the configured scenario; return (CSV text, summary line)."""
    qcfg = config.quadrature()
    profile = config.build_profile()
    if config.scenario == "divergence":
        rows = run_divergence(profile, config.d, N_list=config.N, cfg=qcfg)
        last = rows[-1]
        summary = (f"divergence: N={last.N} sigma_xx={_sci(last.sigma_xx)} "
                   f"pressure={_sci(-last.sigma_xx)} rel_change={_sci(last.rel_change_vs_prev)}")
        return format_convergence_csv(rows), summary

    reports = run_cslice(config.d, profile, config.N, qcfg) if profile is not None else \
        _run_empty(config, qcfg)
    worst = max(reports, key=lambda r: r.rel_err)
    summary = (f"{config.scenario}: N={','.join(str(r.N) for r in reports)} "
               f"pressure={_sci(reports[-1].pressure_numeric)} rel_err={_sci(worst.rel_err)}")
    if config.length_unit is not None:
        summary += f" pressure_Pa={_sci(pressure_si(reports[-1].pressure_numeric, config.length_unit))}"
    return format_reports_csv(reports, include_runtime=config.timing), summary


def _run_empty(config: RunConfig, qcfg: QuadratureConfig):
    return [run_empty_cavity(config.d, qcfg, N) for N in config.N]


def main(argv=None) -> int:
    """Entry point; returns the process exit status."""
    try:
        config = parse_args(argv)
    except UsageError as exc:
        print(f"casimir-cslice: error: {exc}", file=sys.stderr)
        return 1
    try:
        text, summary = run(config)
    except NumericalError as exc:
        print(f"casimir-cslice: numerical failure: {exc}", file=sys.stderr)
        return 2
    if config.out_path == "-":
        sys.stdout.write(text)
        print(summary, file=sys.stderr)
        return 0
    try:
        Path(config.out_path).write_text(text)
    except OSError as exc:
        print(f"casimir-cslice: error: cannot write {config.out_path!r}: {exc.strerror}",
              file=sys.stderr)
        return 1
    print(summary)
    return 0
