"""Materials, compression profiles, cavity geometry and slicing.

Lengths are in an arbitrary user unit L; every material parameter is a
dimensionless relative permittivity or permeability.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, NamedTuple, Sequence

import numpy as np


@dataclass(frozen=True)
class MaterialSpec:
    """Diagonal, lossless, non-dispersive permittivity and permeability."""

    eps_x: float
    eps_y: float
    eps_z: float
    mu_x: float
    mu_y: float
    mu_z: float

    def __post_init__(self):
        for name in ("eps_x", "eps_y", "eps_z", "mu_x", "mu_y", "mu_z"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")

    @property
    def eps(self) -> np.ndarray:
        return np.array([self.eps_x, self.eps_y, self.eps_z])

    @property
    def mu(self) -> np.ndarray:
        return np.array([self.mu_x, self.mu_y, self.mu_z])

    @property
    def is_isotropic(self) -> bool:
        return self.eps_x == self.eps_y == self.eps_z and self.mu_x == self.mu_y == self.mu_z

    @property
    def is_cslice(self) -> bool:
        """True for eps = mu = diag(1/m, 1/m, m) up to rounding of 1/m."""
        if not (self.eps_x == self.mu_x and self.eps_y == self.mu_y and self.eps_z == self.mu_z):
            return False
        if self.eps_x != self.eps_y:
            return False
        return abs(self.eps_x * self.eps_z - 1.0) <= 4 * np.finfo(float).eps

    @property
    def is_vacuum(self) -> bool:
        return self == VACUUM


VACUUM = MaterialSpec(1.0, 1.0, 1.0, 1.0, 1.0, 1.0)


def isotropic_material(eps: float, mu: float = 1.0) -> MaterialSpec:
    """Isotropic medium with scalar ``eps`` and ``mu``."""
    eps = float(eps)
    mu = float(mu)
    return MaterialSpec(eps, eps, eps, mu, mu, mu)


def cslice_material(m: float) -> MaterialSpec:
    """Impedance-matched compressing medium, eps = mu = diag(1/m, 1/m, m).

    Parameters
    ----------
    m : float
        Local compression factor, > 0. ``m = 1`` is vacuum.
    """
    m = float(m)
    if not (math.isfinite(m) and m > 0.0):
        raise ValueError(f"compression factor must be finite and > 0, got {m!r}")
    inv = 1.0 / m
    return MaterialSpec(inv, inv, m, inv, inv, m)


# --------------------------------------------------------------------------
# profiles

ProfileKind = Literal["const", "linear", "table"]


def _inverse_log_mean(m0: float, m1: float) -> float:
    """Mean of 1/m over a segment on which m varies linearly from m0 to m1."""
    x = (m1 - m0) / m0
    if abs(x) < 1e-4:
        return (1.0 - x / 2 + x * x / 3 - x ** 3 / 4) / m0
    return math.log1p(x) / (m1 - m0)


@dataclass(frozen=True)
class CompressionProfile:
    """A positive scalar profile m(z) on the interval ``(a, b)``.

    Used for compression factors of a C-slice wafer and, through the same
    machinery, for scalar permittivity profiles of ordinary inhomogeneous
    media. Build instances with :meth:`constant`, :meth:`linear` or
    :meth:`tabulated`.
    """

    interval: tuple[float, float]
    kind: ProfileKind
    params: tuple[float, ...] = ()
    z: tuple[float, ...] = ()
    values: tuple[float, ...] = ()
    source: str = field(default="", compare=False)

    def __post_init__(self):
        a, b = self.interval
        if not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError("profile interval must be finite")
        if a > b:
            raise ValueError("interval start exceeds end")
        if a == b:
            raise ValueError("profile interval is empty")
        if self.kind == "const":
            if len(self.params) != 1:
                raise ValueError("constant profile takes one value")
        elif self.kind == "linear":
            if len(self.params) != 2:
                raise ValueError("linear profile takes two end values")
        elif self.kind == "table":
            z = np.asarray(self.z, dtype=float)
            if z.size < 2 or z.size != len(self.values):
                raise ValueError("table needs at least two (z, m) rows")
            if np.any(np.diff(z) <= 0):
                raise ValueError("tabulated z values must be strictly increasing")
            if z[0] > a or z[-1] < b:
                raise ValueError(f"table spans [{z[0]}, {z[-1]}], which does not cover [{a}, {b}]")
        else:
            raise ValueError(f"unknown profile kind {self.kind!r}")
        samples = self.values if self.kind == "table" else self.params
        for v in samples:
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"profile values must be finite and > 0, got {v!r}")

    @classmethod
    def constant(cls, m: float, a: float, b: float) -> "CompressionProfile":
        return cls((float(a), float(b)), "const", (float(m),))

    @classmethod
    def linear(cls, m_a: float, m_b: float, a: float, b: float) -> "CompressionProfile":
        return cls((float(a), float(b)), "linear", (float(m_a), float(m_b)))

    @classmethod
    def tabulated(cls, z: Sequence[float], m: Sequence[float],
                  interval: tuple[float, float] | None = None,
                  source: str = "") -> "CompressionProfile":
        z = tuple(float(v) for v in z)
        m = tuple(float(v) for v in m)
        if interval is None:
            if len(z) < 1:
                raise ValueError("table needs at least two (z, m) rows")
            interval = (z[0], z[-1])
        return cls((float(interval[0]), float(interval[1])), "table", (), z, m, source)

    @property
    def a(self) -> float:
        return self.interval[0]

    @property
    def b(self) -> float:
        return self.interval[1]

    @property
    def width(self) -> float:
        return self.interval[1] - self.interval[0]

    def __call__(self, z):
        """Evaluate m(z); array in, array out."""
        z = np.asarray(z, dtype=float)
        if self.kind == "const":
            return np.full_like(z, self.params[0])
        if self.kind == "linear":
            m_a, m_b = self.params
            t = (z - self.a) / self.width
            return m_a + (m_b - m_a) * t
        return np.interp(z, self.z, self.values)

    def describe(self) -> str:
        """Mini-language form of the profile (``const:``, ``linear:``, ``table:``)."""
        if self.kind == "const":
            return f"const:{self.params[0]:.17g}"
        if self.kind == "linear":
            return f"linear:{self.params[0]:.17g},{self.params[1]:.17g}"
        return f"table:{self.source}" if self.source else "table:<inline>"


def parse_profile(text: str, interval: tuple[float, float],
                  base_dir: str | Path | None = None) -> CompressionProfile:
    """Parse ``const:<m>``, ``linear:<m_a>,<m_b>`` or ``table:<path>``.

    Table files hold whitespace-separated ``z m`` rows; ``#`` starts a comment.
    """
    kind, sep, arg = text.partition(":")
    if not sep or not arg:
        raise ValueError(f"malformed profile {text!r}")
    kind = kind.strip().lower()
    a, b = interval
    try:
        if kind == "const":
            return CompressionProfile.constant(float(arg), a, b)
        if kind == "linear":
            parts = arg.split(",")
            if len(parts) != 2:
                raise ValueError(f"malformed profile {text!r}")
            return CompressionProfile.linear(float(parts[0]), float(parts[1]), a, b)
    except ValueError as exc:
        if "could not convert" in str(exc):
            raise ValueError(f"malformed profile {text!r}") from None
        raise
    if kind == "table":
        path = Path(arg)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        z, m = read_profile_table(path)
        return CompressionProfile.tabulated(z, m, interval, source=arg)
    raise ValueError(f"unknown profile kind in {text!r}")


def read_profile_table(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected two columns 'z m'")
            rows.append((float(fields[0]), float(fields[1])))
    if len(rows) < 2:
        raise ValueError(f"{path}: need at least two rows")
    arr = np.array(rows)
    return arr[:, 0], arr[:, 1]


def virtual_width(profile: CompressionProfile) -> float:
    """Width of the profile interval as seen in virtual space, the integral of 1/m."""
    if profile.kind == "const":
        return profile.width / profile.params[0]
    if profile.kind == "linear":
        m_a, m_b = profile.params
        return profile.width * _inverse_log_mean(m_a, m_b)
    # exact for the piecewise-linear interpolant
    z = np.asarray(profile.z)
    inner = z[(z > profile.a) & (z < profile.b)]
    nodes = np.concatenate([[profile.a], inner, [profile.b]])
    m = profile(nodes)
    return math.fsum((nodes[i + 1] - nodes[i]) * _inverse_log_mean(m[i], m[i + 1])
                     for i in range(nodes.size - 1))


def compression_factor(profile: CompressionProfile) -> float:
    """Overall compression, interval width over virtual width (harmonic mean of m)."""
    return profile.width / virtual_width(profile)


def mean_compression(profile: CompressionProfile) -> float:
    """Arithmetic mean of m over the interval.

    Equals :func:`compression_factor` only for constant profiles; kept for
    comparison, it is not used to build effective lengths.
    """
    if profile.kind == "const":
        return profile.params[0]
    if profile.kind == "linear":
        return 0.5 * (profile.params[0] + profile.params[1])
    z = np.asarray(profile.z)
    inner = z[(z > profile.a) & (z < profile.b)]
    nodes = np.concatenate([[profile.a], inner, [profile.b]])
    return float(np.trapezoid(profile(nodes), nodes)) / profile.width


def _check_inside(d: float, profile: CompressionProfile | None):
    if not (math.isfinite(d) and d > 0):
        raise ValueError(f"cavity width must be > 0, got {d!r}")
    if profile is not None and (profile.a < 0.0 or profile.b > d):
        raise ValueError(f"profile interval [{profile.a}, {profile.b}] is not inside the cavity [0, {d}]")


def effective_length(d: float, profile: CompressionProfile | None) -> float:
    """Cavity width seen in virtual space, d - Δ + ∫ dz/m."""
    _check_inside(d, profile)
    if profile is None:
        return float(d)
    return d - profile.width + virtual_width(profile)


# --------------------------------------------------------------------------
# boundaries and stacks

BoundaryKind = Literal["ideal_mirror", "vacuum", "half_space"]


@dataclass(frozen=True)
class BoundarySpec:
    """Termination of a stack on one side."""

    kind: BoundaryKind
    medium: MaterialSpec | None = None

    def __post_init__(self):
        if self.kind == "half_space":
            if self.medium is None:
                raise ValueError("half_space boundary needs a material")
        elif self.kind in ("ideal_mirror", "vacuum"):
            if self.medium is not None:
                raise ValueError(f"{self.kind} boundary takes no material")
        else:
            raise ValueError(f"unknown boundary kind {self.kind!r}")

    @classmethod
    def half_space(cls, material: MaterialSpec) -> "BoundarySpec":
        return cls("half_space", material)

    @property
    def is_mirror(self) -> bool:
        return self.kind == "ideal_mirror"

    @property
    def material(self) -> MaterialSpec | None:
        """Semi-infinite medium behind the boundary (None for an ideal mirror)."""
        if self.kind == "vacuum":
            return VACUUM
        return self.medium


IDEAL_MIRROR = BoundarySpec("ideal_mirror")
OPEN_VACUUM = BoundarySpec("vacuum")


class Layer(NamedTuple):
    thickness: float
    material: MaterialSpec


@dataclass(frozen=True)
class Stack:
    """Homogeneous layers, left to right, between two boundaries.

    Slice numbering used by the transfer code: 0 is the left boundary
    medium, 1..N are the layers, N + 1 is the right boundary medium.
    """

    left: BoundarySpec
    right: BoundarySpec
    layers: tuple[Layer, ...]

    def __post_init__(self):
        layers = tuple(Layer(float(t), m) for t, m in self.layers)
        object.__setattr__(self, "layers", layers)
        if len(layers) < 1:
            raise ValueError("a stack needs at least one layer")
        for i, (t, _) in enumerate(layers):
            if not (math.isfinite(t) and t > 0.0):
                raise ValueError(f"layer {i} thickness must be > 0, got {t!r}")

    @property
    def n_layers(self) -> int:
        return len(self.layers)

    @property
    def d(self) -> float:
        return math.fsum(t for t, _ in self.layers)

    @property
    def thicknesses(self) -> np.ndarray:
        return np.array([t for t, _ in self.layers])

    @property
    def materials(self) -> list[MaterialSpec]:
        return [m for _, m in self.layers]

    @property
    def edges(self) -> np.ndarray:
        """Layer boundaries, starting at 0."""
        return np.concatenate([[0.0], np.cumsum(self.thicknesses)])

    def slice_at(self, z: float) -> int:
        """Stack slice number (1..N) containing ``z``.

        A point on an internal edge belongs to the layer on its right.
        """
        edges = self.edges
        if not (0.0 <= z <= edges[-1]):
            raise ValueError(f"z = {z} lies outside the cavity [0, {edges[-1]}]")
        idx = int(np.searchsorted(edges, z, side="right"))
        return min(max(idx, 1), self.n_layers)

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(repr((self.left, self.right)).encode())
        for t, m in self.layers:
            h.update(f"{t:.17g}|{m.eps_x:.17g},{m.eps_y:.17g},{m.eps_z:.17g},"
                     f"{m.mu_x:.17g},{m.mu_y:.17g},{m.mu_z:.17g};".encode())
        return h.hexdigest()[:16]


def discretize(profile: CompressionProfile | None,
               boundaries: tuple[BoundarySpec, BoundarySpec],
               d: float, N: int,
               material: Callable[[float], MaterialSpec] = cslice_material) -> Stack:
    """Slice a cavity of width ``d`` into homogeneous layers.

    The target slice width is ``d / N``. The regions left of, inside and right
    of the profile interval each get ``max(1, round(width * N / d))`` equal
    slices, so the profile edges are always slice edges. Inside the profile
    every slice gets ``material(m(z_mid))``; outside it is vacuum.

    Parameters
    ----------
    profile : CompressionProfile or None
        None gives an empty cavity of ``N`` vacuum slices.
    boundaries : pair of BoundarySpec
        Left and right terminations.
    d : float
        Cavity width.
    N : int
        Target number of slices, >= 1.
    material : callable, optional
        Maps a profile value to a material; :func:`cslice_material` by
        default, :func:`isotropic_material` for a permittivity profile.
    """
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    N = int(N)
    _check_inside(d, profile)
    left, right = boundaries
    if profile is None:
        regions = [(0.0, float(d), False)]
    else:
        regions = [(0.0, profile.a, False), (profile.a, profile.b, True), (profile.b, float(d), False)]
    layers = []
    for start, end, inside in regions:
        if end <= start:
            continue
        n = max(1, int(round((end - start) * N / d)))
        edges = np.linspace(start, end, n + 1)
        widths = np.diff(edges)
        if inside:
            mids = 0.5 * (edges[:-1] + edges[1:])
            values = profile(mids)
            layers.extend(Layer(w, material(v)) for w, v in zip(widths, values))
        else:
            layers.extend(Layer(w, VACUUM) for w in widths)
    return Stack(left, right, tuple(layers))
