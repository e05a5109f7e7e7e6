"""Scenario runners and their CSV serialisation.

* :func:`run_empty_cavity` - ideal mirrors, vacuum gap, against the closed form.
* :func:`run_cslice` - C-slice wafer, numeric pressure per slicing against the
  virtual-space closed form.
* :func:`run_divergence` - stress at a fixed point of a sliced inhomogeneous
  medium as the slicing is refined.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .materials import (IDEAL_MIRROR, BoundarySpec, CompressionProfile, MaterialSpec,
                        discretize, isotropic_material)
from .stress import (QuadratureConfig, pressure_cslice_analytic, pressure_ideal,
                     pressure_on_mirror, resolve_threads, stress_at_point)

REPORT_HEADER = ["scenario", "d", "profile", "N", "pressure_numeric", "pressure_analytic",
                 "rel_err", "nodes", "runtime_ms"]
CONVERGENCE_HEADER = ["N", "sigma_xx", "gap_local", "rel_change_vs_prev"]


@dataclass(frozen=True)
class ScenarioReport:
    scenario: str
    d: float
    profile: str
    N: int
    pressure_numeric: float
    pressure_analytic: float
    rel_err: float
    nodes: int
    runtime_ms: float = float("nan")
    inputs_digest: str = ""

    def passed(self, tol: float = 1e-6) -> bool:
        return math.isfinite(self.rel_err) and self.rel_err <= tol


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    sigma_xx: float
    gap_local: float
    rel_change_vs_prev: float


def _digest(*parts) -> str:
    return hashlib.sha256(repr(parts).encode()).hexdigest()[:16]


def _map_ordered(fn, items, threads):
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


def _mirror_report(scenario, d, profile, N, cfg, analytic):
    stack = discretize(profile, (IDEAL_MIRROR, IDEAL_MIRROR), d, N)
    t0 = time.perf_counter()
    res = pressure_on_mirror(stack, "left", cfg, threads=1)
    runtime = 1e3 * (time.perf_counter() - t0)
    rel = abs(res.pressure - analytic) / abs(analytic)
    desc = profile.describe() if profile is not None else "none"
    if profile is not None:
        desc += f"@{float(profile.a)!r},{float(profile.b)!r}"
    return ScenarioReport(scenario, float(d), desc, N, res.pressure, analytic, rel, res.node_count,
                          runtime, _digest(scenario, d, desc, N, stack.digest(), cfg))


def run_empty_cavity(d: float, cfg: QuadratureConfig | None = None, N: int = 1) -> ScenarioReport:
    """Empty ideal-mirror cavity against ``-pi^2 / (240 d^4)``."""
    cfg = cfg or QuadratureConfig()
    return _mirror_report("empty", d, None, N, cfg, pressure_ideal(d))


def run_cslice(d: float, profile: CompressionProfile, N_list: Sequence[int],
               cfg: QuadratureConfig | None = None,
               threads: int | None = None) -> list[ScenarioReport]:
    """Ideal-mirror cavity holding a C-slice wafer, one report per slicing.

    The analytic column is the closed form at the virtual-space width built
    from the exact integral of 1/m, so for non-constant profiles ``rel_err``
    also contains the midpoint slicing error of the profile itself.
    """
    cfg = cfg or QuadratureConfig()
    analytic = pressure_cslice_analytic(d, profile)
    return _map_ordered(lambda N: _mirror_report("cslice", d, profile, N, cfg, analytic),
                        N_list, resolve_threads(threads))


def run_divergence(profile: CompressionProfile, d: float, point: float | None = None,
                   N_list: Sequence[int] = (8, 16, 32, 64, 128),
                   cfg: QuadratureConfig | None = None,
                   material: Callable[[float], MaterialSpec] = isotropic_material,
                   boundaries: tuple[BoundarySpec, BoundarySpec] = (IDEAL_MIRROR, IDEAL_MIRROR),
                   threads: int | None = None) -> list[ConvergenceRow]:
    """Stress in the slice containing ``point`` for each slicing in ``N_list``.

    ``profile`` is a permittivity profile (``mu = 1``) by default; pass
    ``material=cslice_material`` to run a compression profile through the same
    harness. ``point`` defaults to the middle of the profile interval; a point
    on a slice edge is assigned to the slice on its right.
    """
    cfg = cfg or QuadratureConfig()
    N_list = [int(n) for n in N_list]
    if any(b <= a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("N_list must be strictly increasing")
    if point is None:
        point = 0.5 * (profile.a + profile.b)
    if not profile.a < point < profile.b:
        raise ValueError("point must lie strictly inside the profile interval")

    def one(N):
        stack = discretize(profile, boundaries, d, N, material=material)
        index = stack.slice_at(point)
        res = stress_at_point(stack, index, cfg, threads=1)
        return res.sigma_xx, stack.layers[index - 1].thickness

    values = _map_ordered(one, N_list, resolve_threads(threads))
    rows = []
    prev = None
    for N, (sigma, gap) in zip(N_list, values):
        change = float("nan") if prev is None else abs(sigma - prev) / abs(prev)
        rows.append(ConvergenceRow(N, sigma, gap, change))
        prev = sigma
    return rows


# --------------------------------------------------------------------------
# CSV

def _fmt(x) -> str:
    if isinstance(x, int):
        return str(x)
    return f"{x:.17g}"


def format_reports_csv(reports: Iterable[ScenarioReport], include_runtime: bool = False) -> str:
    """CSV text for scenario reports.

    ``runtime_ms`` is left empty unless ``include_runtime`` is set, so that
    identical inputs give byte-identical files.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPORT_HEADER)
    for r in reports:
        w.writerow([r.scenario, _fmt(r.d), r.profile, str(r.N), _fmt(r.pressure_numeric),
                    _fmt(r.pressure_analytic), _fmt(r.rel_err), str(r.nodes),
                    _fmt(r.runtime_ms) if include_runtime else ""])
    return buf.getvalue()


def format_convergence_csv(rows: Iterable[ConvergenceRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CONVERGENCE_HEADER)
    for r in rows:
        w.writerow([str(r.N), _fmt(r.sigma_xx), _fmt(r.gap_local), _fmt(r.rel_change_vs_prev)])
    return buf.getvalue()


def _float(s: str) -> float:
    return float(s) if s != "" else float("nan")


def parse_reports_csv(text: str) -> list[ScenarioReport]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != REPORT_HEADER:
        raise ValueError("not a scenario report CSV")
    return [ScenarioReport(r[0], float(r[1]), r[2], int(r[3]), float(r[4]), float(r[5]),
                           float(r[6]), int(r[7]), _float(r[8])) for r in rows[1:]]


def parse_convergence_csv(text: str) -> list[ConvergenceRow]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CONVERGENCE_HEADER:
        raise ValueError("not a convergence CSV")
    return [ConvergenceRow(int(r[0]), float(r[1]), float(r[2]), float(r[3])) for r in rows[1:]]


def report_digest(reports: Iterable[ScenarioReport | ConvergenceRow]) -> str:
    """Hash of the deterministic content of reports or convergence rows."""
    h = hashlib.sha256()
    for r in reports:
        if isinstance(r, ScenarioReport):
            fields = (r.scenario, _fmt(r.d), r.profile, r.N, _fmt(r.pressure_numeric),
                      _fmt(r.pressure_analytic), _fmt(r.rel_err), r.nodes)
        else:
            fields = (r.N, _fmt(r.sigma_xx), _fmt(r.gap_local), _fmt(r.rel_change_vs_prev))
        h.update(repr(fields).encode())
    return h.hexdigest()
