"""Regularised Casimir stress and mirror pressure on the imaginary-frequency axis.

Natural units hbar = c = 1: a stress returned here is sigma * L^4 / (hbar c)
for user length unit L. Positive sigma inside a cavity means the mirrors are
pulled together; the pressure on a mirror is ``P = -sigma``.

The (kappa, kpar) quarter plane is integrated in polar form,
``kappa = rho cos(theta)``, ``kpar = rho sin(theta)``::

    sigma = 1/(2 pi^2) int_0^inf d rho int_0^{pi/2} d theta rho^2 sin(theta) F

with ``F = sum_pol q Tr[X (1 - X)^-1]`` and ``X = R_L R_R exp(-2 q gap)``.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from scipy import constants

from .errors import NumericalError
from .materials import CompressionProfile, Stack, effective_length
from .quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, integrate, rule_nodes
from .transfer import ReflectionMatrix, slice_reflections
from .wavesolver import axial_decay


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and limits for the stress quadrature.

    The radial integral is truncated where ``q * gap`` reaches
    ``w_cutoff_factor`` for the smallest local decay constant ``q``; there the
    integrand is below ``exp(-2 * w_cutoff_factor)`` of its peak.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-14
    max_nodes: int = 4_000_000
    w_cutoff_factor: float = 40.0
    angular_panels: int = 1
    max_angular_panels: int = 32

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_nodes < 16:
            raise ValueError("max_nodes must be >= 16")
        if not self.w_cutoff_factor > 0:
            raise ValueError("w_cutoff_factor must be positive")
        if self.angular_panels < 1 or self.max_angular_panels < self.angular_panels:
            raise ValueError("invalid angular panel counts")


@dataclass(frozen=True)
class StressResult:
    """Stress at one point of a stack (units hbar c / L^4)."""

    sigma_xx: float
    est_error: float
    node_count: int
    slice_index: int = 0
    point: float = float("nan")
    stack_digest: str = ""
    metadata: dict = field(default_factory=dict, compare=False)

    @property
    def pressure(self) -> float:
        """Pressure on a mirror bounding this region, ``-sigma_xx``."""
        return -self.sigma_xx


# --------------------------------------------------------------------------
# integrands

def stress_integrand(RL: ReflectionMatrix, RR: ReflectionMatrix, w: float, gap: float) -> float:
    """``w Tr[X (1 - X)^-1]`` with ``X = R_L R_R exp(-2 gap w)`` (matrix form)."""
    if not (gap > 0 and w > 0):
        raise ValueError("gap and w must be positive")
    X = RL.as_array() @ RR.as_array() * math.exp(-2.0 * gap * w)
    radius = float(np.max(np.abs(np.linalg.eigvals(X))))
    if radius >= 1.0:
        raise NumericalError(f"round-trip spectral radius {radius:.6g} >= 1")
    return float(w * np.trace(X @ np.linalg.inv(np.eye(2) - X)))


def scalar_stress_integrand(rL, rR, w: float, gap: float) -> float:
    """Sum over s, p of ``w r_L r_R e / (1 - r_L r_R e)``, ``e = exp(-2 gap w)``."""
    if not (gap > 0 and w > 0):
        raise ValueError("gap and w must be positive")
    e = math.exp(-2.0 * gap * w)
    total = 0.0
    for a, b in zip(rL, rR):
        x = a * b * e
        if abs(x) >= 1.0:
            raise NumericalError(f"round-trip factor {x:.6g} has modulus >= 1")
        total += w * x / (1.0 - x)
    return total


def _local_kernel(stack: Stack, index: int, kappa, kpar) -> np.ndarray:
    """``F(kappa, kpar)`` for the diagonal reflection matrices seen from a slice."""
    sr = slice_reflections(stack, index, kappa, kpar)
    x = sr.left * sr.right * np.exp(-2.0 * sr.gap * sr.q)
    if np.any(np.abs(x) >= 1.0):
        raise NumericalError("round-trip factor with modulus >= 1 (unphysical gain)")
    return np.sum(sr.q * x / (1.0 - x), axis=0)


def _kernel_threaded(stack, index, kappa, kpar, threads):
    if threads <= 1 or kappa.size < 2048:
        return _local_kernel(stack, index, kappa, kpar)
    chunks = np.array_split(np.arange(kappa.size), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda ix: _local_kernel(stack, index, kappa[ix], kpar[ix]), chunks))
    return np.concatenate(parts)


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else ``CASIMIR_THREADS``; 0 or unset means all cores."""
    if threads is None:
        raw = os.environ.get("CASIMIR_THREADS", "").strip()
        try:
            threads = int(raw) if raw else 0
        except ValueError:
            raise ValueError(f"CASIMIR_THREADS must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ValueError("thread count must be >= 0")
    return threads or (os.cpu_count() or 1)


class _AngularRefine(Exception):
    pass


# --------------------------------------------------------------------------
# quadrature over (kappa, kpar)

def _radial_edges(scale: float, rho_max: float) -> np.ndarray:
    edges = [0.0, 1.0 / scale]
    while edges[-1] < rho_max:
        edges.append(2.0 * edges[-1])
    return np.array(edges)


def _min_decay_rate(material) -> float:
    """Smallest q / rho over the quarter plane (attained at theta = 0 or pi/2)."""
    q0 = axial_decay(material, 1.0, 0.0)
    q1 = axial_decay(material, 1e-300, 1.0)
    return float(min(min(q0), min(q1)))


def stress_at_point(stack: Stack, slice_index: int, cfg: QuadratureConfig | None = None,
                    threads: int | None = 1) -> StressResult:
    """Regularised stress inside layer ``slice_index`` (1..N) of ``stack``.

    The layer must be isotropic or a C-slice so that its own decay constant is
    the same for both polarisations. The e^{-2 q gap} factor uses that layer's
    width (the homogeneous region around the evaluation point), so the result
    depends on how finely an inhomogeneous medium is sliced.
    """
    cfg = cfg or QuadratureConfig()
    threads = resolve_threads(threads)
    n = stack.n_layers
    if not 1 <= slice_index <= n:
        raise IndexError(f"slice {slice_index} out of range 1..{n}")
    gap, mat = stack.layers[slice_index - 1]
    if not (mat.is_isotropic or mat.is_cslice):
        raise ValueError("stress is defined here only inside isotropic or C-slice layers")

    rho_max = cfg.w_cutoff_factor / (gap * _min_decay_rate(mat))
    edges = _radial_edges(stack.d, rho_max)
    n_ang = cfg.angular_panels

    while True:
        a = np.linspace(0.0, 0.5 * np.pi, n_ang + 1)
        theta, half = rule_nodes(a[:-1], a[1:])
        theta = theta.ravel()
        wk = (half[:, None] * KRONROD_WEIGHTS[None, :]).ravel()
        wg = (half[:, None] * GAUSS_WEIGHTS[None, :]).ravel()
        sin_t, cos_t = np.sin(theta), np.cos(theta)

        def radial(rho, sin_t=sin_t, cos_t=cos_t, wk=wk, wg=wg):
            kappa = (rho[:, None] * cos_t[None, :]).ravel()
            kpar = (rho[:, None] * sin_t[None, :]).ravel()
            F = _kernel_threaded(stack, slice_index, kappa, kpar, threads).reshape(rho.size, -1)
            g = (rho[:, None] ** 2) * sin_t[None, :] * F / (2.0 * np.pi ** 2)
            kron = g @ wk
            ang_err = np.abs(kron - g @ wg)
            if n_ang < cfg.max_angular_panels:
                scale = max(float(np.max(np.abs(kron))), 0.0)
                if np.any(ang_err > 0.1 * cfg.rel_tol * scale + 1e-300):
                    raise _AngularRefine
            return kron, ang_err

        try:
            res = integrate(radial, edges, cfg.rel_tol, cfg.abs_tol, cfg.max_nodes,
                            cost_per_node=theta.size)
        except _AngularRefine:
            n_ang *= 2
            continue
        break

    mid = float(stack.edges[slice_index - 1] + 0.5 * gap)
    return StressResult(res.value, res.error, res.nodes, slice_index, mid, stack.digest(),
                        {"gap": gap, "angular_panels": n_ang, "rho_max": float(edges[-1])})


def pressure_on_mirror(stack: Stack, side: Literal["left", "right"] = "left",
                       cfg: QuadratureConfig | None = None, threads: int | None = 1) -> StressResult:
    """Stress in the vacuum layer touching the ``side`` boundary.

    The mirror-side reflection is exact (-1 for an ideal mirror) and the
    far-side reflection comes from the whole interior. The pressure is the
    ``.pressure`` attribute of the result (``-sigma_xx``).
    """
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    index = 1 if side == "left" else stack.n_layers
    if not stack.layers[index - 1].material.is_vacuum:
        raise ValueError(f"the layer next to the {side} mirror must be vacuum")
    return stress_at_point(stack, index, cfg, threads)


# --------------------------------------------------------------------------
# closed forms

def pressure_ideal(d: float) -> float:
    """Casimir pressure between ideal mirrors, ``-pi^2 / (240 d^4)``."""
    if not d > 0:
        raise ValueError("d must be > 0")
    return -math.pi ** 2 / (240.0 * d ** 4)


def pressure_cslice_analytic(d: float, profile: CompressionProfile | None) -> float:
    """Ideal-mirror pressure with ``d`` replaced by the virtual-space width."""
    return pressure_ideal(effective_length(d, profile))


def ideal_cavity_stress_radial(d_eff: float, cfg: QuadratureConfig | None = None) -> StressResult:
    """One-dimensional form ``(1/pi^2) int w^3 / (e^{2 d w} - 1) dw`` for ideal mirrors."""
    cfg = cfg or QuadratureConfig()
    if not d_eff > 0:
        raise ValueError("d_eff must be > 0")

    def f(w):
        return w ** 3 / np.expm1(2.0 * d_eff * w) / np.pi ** 2

    edges = _radial_edges(d_eff, cfg.w_cutoff_factor / d_eff)
    res = integrate(f, edges, cfg.rel_tol, cfg.abs_tol, cfg.max_nodes)
    return StressResult(res.value, res.error, res.nodes)


def pressure_si(pressure: float, length_unit_m: float) -> float:
    """Convert a dimensionless ``P L^4 / (hbar c)`` to pascals for unit length ``L`` in metres."""
    return pressure * constants.hbar * constants.c / length_unit_m ** 4
