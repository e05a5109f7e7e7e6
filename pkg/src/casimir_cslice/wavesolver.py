"""Plane-wave eigenmodes of a homogeneous diagonal slab on the imaginary axis.

Fields vary as ``exp(i kpar x + i k_z z - i omega t)`` with ``omega = i kappa``
(c = 1) and ``k_z = i q``. A mode with ``q > 0`` decays towards +z and is
called rightward; ``q < 0`` is leftward. The plane of incidence is xz.

After the substitution every quantity is real provided the z components of
the electric and magnetic polarisation vectors are stored divided by ``i``.
All 3-vectors returned here follow that convention: ``e[2]`` and ``h[2]``
stand for ``E_z / i`` and ``H_z / i``. Tangential components are untouched.

Mode order is fixed as (rightward s, leftward s, rightward p, leftward p).
Polarisations are scaled as ``e_s = (0, 1, 0)`` and
``e_p = (X, 0, ±kpar / w0)`` with ``X = (kappa^2 eps_z mu_y + kpar^2) / (|q| w0)``
and ``w0 = sqrt(kappa^2 + kpar^2)``. This is the textbook p-mode with
``E_z`` fixed, rescaled by the medium-independent factor ``kpar / w0`` so the
normal-incidence limit is regular, and ``E_x`` has the same sign for both
directions so that reflection coefficients are ratios of tangential E.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, SingularMatrixError
from .materials import MaterialSpec

DEGENERACY_RTOL = 1e-12
MAX_CONDITION = 1e12


@dataclass(frozen=True)
class SpectralPoint:
    """Imaginary frequency ``kappa`` (omega = i c kappa) and in-plane wavevector."""

    kappa: float
    kpar: float

    def __post_init__(self):
        if not (np.isfinite(self.kappa) and self.kappa > 0):
            raise ValueError(f"kappa must be > 0, got {self.kappa!r}")
        if not (np.isfinite(self.kpar) and self.kpar >= 0):
            raise ValueError(f"kpar must be >= 0, got {self.kpar!r}")

    @property
    def w0(self) -> float:
        """Vacuum axial decay constant sqrt(kappa^2 + kpar^2)."""
        return float(np.hypot(self.kappa, self.kpar))


@dataclass(frozen=True)
class ModeBasis:
    """Four eigenmodes of one slab at one spectral point.

    Attributes
    ----------
    e, h : ndarray, shape (4, 3)
        Electric and magnetic polarisations, one row per mode.
    q : ndarray, shape (4,)
        Signed axial decay constants; positive for rightward modes.
    directions : tuple of str
        ``"rightward"`` or ``"leftward"`` per mode.
    """

    material: MaterialSpec
    point: SpectralPoint
    e: np.ndarray
    h: np.ndarray
    q: np.ndarray
    directions: tuple[str, ...] = ("rightward", "leftward", "rightward", "leftward")
    polarizations: tuple[str, ...] = ("s", "s", "p", "p")


@dataclass(frozen=True)
class DynamicalMatrix:
    """Tangential field components of the four modes.

    Rows are (e.y, h.x, h.y, e.x), columns follow the mode order.
    """

    matrix: np.ndarray
    condition: float


def wave_matrix(material: MaterialSpec, sp: SpectralPoint, q: float) -> np.ndarray:
    """Real 3x3 wave-equation matrix W(q) with W e = 0 for an eigenmode.

    This is ``eps * omega^2 + k x (mu^-1 (k x .))`` for diagonal tensors with
    ``omega^2 = -kappa^2``, ``k = (kpar, 0, i q)``, conjugated by
    ``diag(1, 1, i)`` so that it acts on the real polarisation convention of
    this module.
    """
    ex, ey, ez = material.eps
    mx, my, mz = material.mu
    k2 = sp.kappa ** 2
    kx = sp.kpar
    return np.array([
        [-k2 * ex + q * q / my, 0.0, -q * kx / my],
        [0.0, -k2 * ey - kx * kx / mz + q * q / mx, 0.0],
        [q * kx / my, 0.0, -k2 * ez - kx * kx / my],
    ])


def axial_decay(material: MaterialSpec, kappa, kpar):
    """Rightward decay constants (q_s, q_p); broadcasts over arrays.

    For diagonal media with k_y = 0 the secular determinant factors into
    ``W_yy(q) * det(W_xz(q))``, each linear in ``q^2``; these are its roots.
    """
    kappa = np.asarray(kappa, dtype=float)
    kpar = np.asarray(kpar, dtype=float)
    k2, kp2 = kappa * kappa, kpar * kpar
    q_s = np.sqrt(material.mu_x * (k2 * material.eps_y + kp2 / material.mu_z))
    q_p = np.sqrt(material.eps_x * (k2 * material.mu_y + kp2 / material.eps_z))
    return q_s, q_p


def secular_coefficients(material: MaterialSpec, sp: SpectralPoint) -> np.ndarray:
    """Coefficients of det W(q), highest power of q first (a quartic)."""
    ex, ey, ez = material.eps
    mx, my, mz = material.mu
    k2, kp2 = sp.kappa ** 2, sp.kpar ** 2
    a = k2 * ey + kp2 / mz            # W_yy = q^2/mu_x - a
    b = k2 * ez / my                  # det W_xz = c0 - b q^2
    c0 = k2 * ex * (k2 * ez + kp2 / my)
    return np.array([-b / mx, 0.0, c0 / mx + a * b, 0.0, -a * c0])


def axial_constants(material: MaterialSpec, sp: SpectralPoint) -> list[tuple[float, int]]:
    """Rightward axial decay constants with multiplicities.

    Returns ``[(q, 2)]`` when the s and p roots coincide (isotropic and
    C-slice media), else ``[(q_s, 1), (q_p, 1)]``.
    """
    q_s, q_p = (float(v) for v in axial_decay(material, sp.kappa, sp.kpar))
    if not (np.isfinite(q_s) and np.isfinite(q_p) and q_s > 0 and q_p > 0):
        raise NumericalError(
            f"secular equation has no two rightward roots for {material} at {sp}")
    if abs(q_s - q_p) <= DEGENERACY_RTOL * max(q_s, q_p):
        return [(q_s, 2)]
    return [(q_s, 1), (q_p, 1)]


def tangential_blocks(material: MaterialSpec, kappa, kpar):
    """Per-polarisation quantities behind the dynamical matrix.

    Returns ``(q_s, Y_s, q_p, Z_p, X_p)`` where the s block of D is
    ``[[1, 1], [-Y_s, Y_s]]`` and the p block is ``[[Z_p, -Z_p], [X_p, X_p]]``.
    Broadcasts over arrays of ``kappa`` and ``kpar``.
    """
    kappa = np.asarray(kappa, dtype=float)
    kpar = np.asarray(kpar, dtype=float)
    w0 = np.hypot(kappa, kpar)
    q_s, q_p = axial_decay(material, kappa, kpar)
    y_s = q_s / (kappa * material.mu_x)
    z_p = kappa * material.eps_z / w0
    x_p = (kappa * kappa * material.eps_z * material.mu_y + kpar * kpar) / (q_p * w0)
    return q_s, y_s, q_p, z_p, x_p


def mode_basis(material: MaterialSpec, sp: SpectralPoint) -> ModeBasis:
    """Electric and magnetic eigenmodes, ``h = mu^-1 (k x e) / omega``."""
    kappa, kx = sp.kappa, sp.kpar
    w0 = sp.w0
    q_s, q_p = (float(v) for v in axial_decay(material, kappa, kx))
    x_p = (kappa ** 2 * material.eps_z * material.mu_y + kx ** 2) / (q_p * w0)
    q = np.array([q_s, -q_s, q_p, -q_p])
    e = np.array([
        [0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
        [x_p, 0.0, kx / w0],
        [x_p, 0.0, -kx / w0],
    ])
    # (k x e) / omega in the real convention, then mu^-1
    curl = np.stack([
        -q * e[:, 1],
        q * e[:, 0] - kx * e[:, 2],
        -kx * e[:, 1],
    ], axis=1) / kappa
    h = curl / material.mu
    # for p modes q e_x - kpar e_z simplifies to sign(q) kappa^2 eps_z mu_y / w0;
    # the direct difference loses digits when kappa << kpar
    h[2:, 1] = np.sign(q[2:]) * kappa * material.eps_z / w0
    return ModeBasis(material, sp, e, h, q)


def dynamical_matrix(basis: ModeBasis) -> DynamicalMatrix:
    """Matrix of tangential components; raises if it is numerically singular."""
    e, h = basis.e, basis.h
    D = np.array([e[:, 1], h[:, 0], h[:, 1], e[:, 0]])
    cond = float(np.linalg.cond(D))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularMatrixError(
            f"dynamical matrix of {basis.material} at {basis.point} is singular "
            f"(condition number {cond:.3g})")
    return DynamicalMatrix(D, cond)
