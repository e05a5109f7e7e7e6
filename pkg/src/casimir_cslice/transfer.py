"""Transfer matrices, reflection matrices and the isotropic closed forms.

Mode amplitudes of a slice are referenced at its right edge (the left
boundary medium, slice 0, at z = 0; the right boundary medium, slice N + 1,
at z = d). The factor taking slice j - 1 to slice j is
``t(j) = Phi(j) @ M(j)`` with ``M(j) = D(j)^-1 D(j-1)``; the right boundary
medium has no propagation factor.

Amplitude vectors are ordered (s+, s-, p+, p-) as in :mod:`.wavesolver`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PropagationOverflowError, SingularMatrixError
from .materials import MaterialSpec, Stack
from .wavesolver import SpectralPoint, axial_decay, dynamical_matrix, mode_basis, tangential_blocks

MAX_EXPONENT = 700.0
_FWD = [0, 2]
_BWD = [1, 3]


@dataclass(frozen=True)
class TransferMatrix:
    """4x4 map between mode amplitudes of slice ``span[0]`` and ``span[1]``."""

    matrix: np.ndarray
    span: tuple[int, int]

    def __post_init__(self):
        if self.matrix.shape != (4, 4) or not np.all(np.isfinite(self.matrix)):
            raise ValueError("transfer matrix must be a finite 4x4 array")

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        # (j, k) @ (i, j) -> (i, k)
        if other.span[1] != self.span[0]:
            raise ValueError(f"cannot compose spans {other.span} and {self.span}")
        return TransferMatrix(self.matrix @ other.matrix, (other.span[0], self.span[1]))


@dataclass(frozen=True)
class ReflectionMatrix:
    """Polarisation-resolved reflection, r_ab = reflected a / incident b."""

    r_ss: float
    r_sp: float
    r_ps: float
    r_pp: float

    @classmethod
    def from_array(cls, R) -> "ReflectionMatrix":
        R = np.asarray(R, dtype=float)
        return cls(float(R[0, 0]), float(R[0, 1]), float(R[1, 0]), float(R[1, 1]))

    @classmethod
    def diagonal(cls, r_s: float, r_p: float) -> "ReflectionMatrix":
        return cls(float(r_s), 0.0, 0.0, float(r_p))

    def as_array(self) -> np.ndarray:
        """``[[r_ss, r_sp], [r_ps, r_pp]]``: rows reflected, columns incident."""
        return np.array([[self.r_ss, self.r_sp], [self.r_ps, self.r_pp]])

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.as_array())))


IDEAL_MIRROR_R = ReflectionMatrix(-1.0, 0.0, 0.0, -1.0)


def _solve_dynamical(D_r: np.ndarray, D_l: np.ndarray) -> np.ndarray:
    """``D_r^-1 D_l``, using the exact s/p block structure when it is present.

    For diagonal tensors with the plane of incidence xz, rows (e_y, h_x) only
    involve s modes and rows (h_y, e_x) only p modes. Inverting each 2x2 block
    in closed form keeps reflection coefficients that nearly cancel accurate
    to a few ulp in absolute terms, which a pivoted 4x4 LU does not.
    """
    s, p = [0, 1], [2, 3]
    off = (D_r[np.ix_(s, p)], D_r[np.ix_(p, s)], D_l[np.ix_(s, p)], D_l[np.ix_(p, s)])
    if any(np.any(blk != 0.0) for blk in off):
        return np.linalg.solve(D_r, D_l)
    out = np.zeros((4, 4))
    for idx in (s, p):
        (a, b), (c, d) = D_r[np.ix_(idx, idx)]
        (e, f), (g, h) = D_l[np.ix_(idx, idx)]
        det = a * d - b * c
        out[np.ix_(idx, idx)] = np.array([[d * e - b * g, d * f - b * h],
                                          [a * g - c * e, a * h - c * f]]) / det
    return out


def interface_matrix(left: MaterialSpec, right: MaterialSpec, sp: SpectralPoint) -> TransferMatrix:
    """Boundary-condition matrix ``D_right^-1 D_left`` for a single interface."""
    D_l = dynamical_matrix(mode_basis(left, sp)).matrix
    D_r = dynamical_matrix(mode_basis(right, sp)).matrix
    return TransferMatrix(_solve_dynamical(D_r, D_l), (0, 1))


def propagation_matrix(material: MaterialSpec, thickness: float, sp: SpectralPoint) -> TransferMatrix:
    """Diagonal phase matrix ``diag(e^{-q_s t}, e^{q_s t}, e^{-q_p t}, e^{q_p t})``."""
    if not thickness >= 0:
        raise ValueError(f"thickness must be >= 0, got {thickness!r}")
    q_s, q_p = (float(v) for v in axial_decay(material, sp.kappa, sp.kpar))
    expo = np.array([-q_s, q_s, -q_p, q_p]) * thickness
    if np.max(np.abs(expo)) > MAX_EXPONENT:
        raise PropagationOverflowError(
            f"propagation exponent {np.max(np.abs(expo)):.1f} exceeds {MAX_EXPONENT}; "
            "use the reflection recursion for thick stacks")
    return TransferMatrix(np.diag(np.exp(expo)), (0, 1))


def _slice_material(stack: Stack, j: int) -> MaterialSpec:
    n = stack.n_layers
    if j == 0 or j == n + 1:
        side = stack.left if j == 0 else stack.right
        if side.material is None:
            raise ValueError(f"slice {j} is an ideal mirror; it carries no field")
        return side.material
    if not 1 <= j <= n:
        raise IndexError(f"slice {j} out of range 0..{n + 1}")
    return stack.layers[j - 1].material


def stack_transfer(stack: Stack, span: tuple[int, int], sp: SpectralPoint) -> TransferMatrix:
    """Ordered product ``t(k) ... t(i+1)`` for ``span = (i, k)``, ``i < k``.

    Slice numbers run from 0 (left boundary medium) to N + 1 (right boundary
    medium). Spans touching an ideal-mirror boundary are rejected; use
    :func:`terminated_reflection_right` / :func:`terminated_reflection_left`
    for mirrors.
    """
    i, k = span
    n = stack.n_layers
    if not (0 <= i < k <= n + 1):
        raise ValueError(f"invalid slice span {span} for a stack of {n} layers")
    T = np.eye(4)
    prev = _slice_material(stack, i)
    for j in range(i + 1, k + 1):
        cur = _slice_material(stack, j)
        t = np.eye(4) if cur == prev else interface_matrix(prev, cur, sp).matrix
        if j <= n:
            t = propagation_matrix(cur, stack.layers[j - 1].thickness, sp).matrix @ t
        T = t @ T
        prev = cur
    return TransferMatrix(T, (i, k))


def _blocks(T):
    T = np.asarray(T.matrix if isinstance(T, TransferMatrix) else T, dtype=float)
    A = T[np.ix_(_FWD, _FWD)]
    B = T[np.ix_(_FWD, _BWD)]
    C = T[np.ix_(_BWD, _FWD)]
    D = T[np.ix_(_BWD, _BWD)]
    return A, B, C, D


def _check_den(den, scale):
    if not np.isfinite(den) or abs(den) <= 1e-14 * scale:
        raise SingularMatrixError(f"reflection denominator vanishes ({den:.3g})")


def reflection_matrix(T: TransferMatrix) -> ReflectionMatrix:
    """Reflection for light incident from the left end of ``T``.

    ``T`` must end in a medium that carries only the transmitted
    (rightward-decaying) wave, so ``(t_s, 0, t_p, 0) = T (a_s, b_s, a_p, b_p)``.
    """
    M = np.asarray(T.matrix if isinstance(T, TransferMatrix) else T, dtype=float)
    m = lambda r, c: M[r - 1, c - 1]  # noqa: E731  (1-based, as usually written)
    den = m(2, 2) * m(4, 4) - m(2, 4) * m(4, 2)
    _check_den(den, np.max(np.abs(M)) ** 2)
    r_ss = (m(2, 4) * m(4, 1) - m(2, 1) * m(4, 4)) / den
    r_ps = (m(2, 1) * m(4, 2) - m(2, 2) * m(4, 1)) / den
    r_pp = (m(2, 3) * m(4, 2) - m(2, 2) * m(4, 3)) / den
    r_sp = (m(2, 4) * m(4, 3) - m(2, 3) * m(4, 4)) / den
    return ReflectionMatrix(r_ss, r_sp, r_ps, r_pp)


def reflection_matrix_left(T: TransferMatrix) -> ReflectionMatrix:
    """Reflection for light incident from the right end of ``T``.

    ``T`` must start in a medium carrying only the leftward-decaying wave;
    the result is (rightward amplitude) / (leftward amplitude) at the far end.
    """
    A, B, C, D = _blocks(T)
    _check_den(np.linalg.det(D), np.max(np.abs(D)) ** 2)
    return ReflectionMatrix.from_array(B @ np.linalg.inv(D))


def terminated_reflection_right(T: TransferMatrix, terminal: ReflectionMatrix) -> ReflectionMatrix:
    """Right-side reflection when the far end of ``T`` reflects with ``terminal``."""
    A, B, C, D = _blocks(T)
    Rt = terminal.as_array()
    lhs = Rt @ B - D
    _check_den(np.linalg.det(lhs), np.max(np.abs(lhs)) ** 2)
    return ReflectionMatrix.from_array(np.linalg.solve(lhs, C - Rt @ A))


def terminated_reflection_left(T: TransferMatrix, terminal: ReflectionMatrix) -> ReflectionMatrix:
    """Left-side reflection when the near end of ``T`` starts at a reflector ``terminal``."""
    A, B, C, D = _blocks(T)
    Rt = terminal.as_array()
    den = C @ Rt + D
    _check_den(np.linalg.det(den), np.max(np.abs(den)) ** 2)
    return ReflectionMatrix.from_array((A @ Rt + B) @ np.linalg.inv(den))


# --------------------------------------------------------------------------
# isotropic closed forms (independent oracles)

def fresnel_isotropic(eps_in, mu_in, eps_out, mu_out, sp: SpectralPoint):
    """Interface reflection (r_s, r_p) on the imaginary axis, incident from ``in``."""
    k2, kp2 = sp.kappa ** 2, sp.kpar ** 2
    w_in = np.sqrt(eps_in * mu_in * k2 + kp2)
    w_out = np.sqrt(eps_out * mu_out * k2 + kp2)
    r_s = (mu_out * w_in - mu_in * w_out) / (mu_out * w_in + mu_in * w_out)
    r_p = -(eps_out * w_in - eps_in * w_out) / (eps_out * w_in + eps_in * w_out)
    return r_s, r_p


def airy_stack_reflection(eps, mu, widths, sp: SpectralPoint):
    """Recursive two-interface (Airy) composition for an isotropic multilayer.

    ``eps`` and ``mu`` list the media from the incident half-space to the
    substrate; ``widths`` gives the thicknesses of the inner media.
    """
    eps = [float(v) for v in eps]
    mu = [float(v) for v in mu]
    widths = [float(v) for v in np.atleast_1d(widths)]
    if len(eps) != len(mu) or len(widths) != len(eps) - 2:
        raise ValueError("need n media and n - 2 widths")
    k2, kp2 = sp.kappa ** 2, sp.kpar ** 2
    r_s, r_p = fresnel_isotropic(eps[-2], mu[-2], eps[-1], mu[-1], sp)
    for j in range(len(eps) - 2, 0, -1):
        q = np.sqrt(eps[j] * mu[j] * k2 + kp2)
        decay = np.exp(-2.0 * q * widths[j - 1])
        f_s, f_p = fresnel_isotropic(eps[j - 1], mu[j - 1], eps[j], mu[j], sp)
        r_s = (f_s + r_s * decay) / (1.0 + f_s * r_s * decay)
        r_p = (f_p + r_p * decay) / (1.0 + f_p * r_p * decay)
    return float(r_s), float(r_p)


def airy_reflection(eps, mu, width, sp: SpectralPoint):
    """Three-medium Airy formula ``(r12 + r23 e) / (1 + r12 r23 e)``, ``e = exp(-2 q2 width)``."""
    if len(eps) != 3 or len(mu) != 3:
        raise ValueError("airy_reflection takes exactly three media")
    return airy_stack_reflection(eps, mu, [float(np.squeeze(width))], sp)


# --------------------------------------------------------------------------
# vectorised reflection recursion used by the quadrature

@dataclass
class SliceReflections:
    """Reflection coefficients seen from inside one slice, over many spectral points.

    ``left`` is referenced at the slice's left edge, ``right`` at its right
    edge; each has shape (2, P) for (s, p). ``q`` holds the slice's own
    decay constants, same shape.
    """

    left: np.ndarray
    right: np.ndarray
    q: np.ndarray
    gap: float


def _interface_blocks(bl, br):
    """(A, B, C, D) arrays of shape (2, P) for M = D_right^-1 D_left."""
    _, y_l, _, z_l, x_l = bl
    _, y_r, _, z_r, x_r = br
    a_s = 0.5 * (1.0 + y_l / y_r)
    b_s = 0.5 * (1.0 - y_l / y_r)
    a_p = 0.5 * (z_l / z_r + x_l / x_r)
    b_p = 0.5 * (x_l / x_r - z_l / z_r)
    A = np.stack([a_s, a_p])
    B = np.stack([b_s, b_p])
    return A, B, B, A


def _safe_div(num, den):
    if not np.all(np.isfinite(den)) or np.any(np.abs(den) < 1e-300):
        raise SingularMatrixError("reflection recursion hit a vanishing denominator")
    return num / den


def slice_reflections(stack: Stack, index: int, kappa, kpar) -> SliceReflections:
    """Left/right reflections seen from layer ``index`` (1..N) at arrays of points.

    Applies the interface and propagation factors of the transfer-matrix
    product one at a time to the reflection coefficient (its linear-fractional
    action), which is algebraically the same as forming the product first but
    never builds the growing exponentials.
    """
    n = stack.n_layers
    if not 1 <= index <= n:
        raise IndexError(f"layer {index} out of range 1..{n}")
    kappa = np.asarray(kappa, dtype=float)
    kpar = np.asarray(kpar, dtype=float)
    cache = {}

    def blocks(mat):
        if mat not in cache:
            cache[mat] = tangential_blocks(mat, kappa, kpar)
        return cache[mat]

    def decay(j):
        q_s, _, q_p, _, _ = blocks(stack.layers[j - 1].material)
        t = stack.layers[j - 1].thickness
        return np.exp(-2.0 * t * np.stack([q_s, q_p]))

    mats = stack.materials
    shape = (2,) + np.broadcast(kappa, kpar).shape

    # left side, starting at the left edge of layer 1
    if stack.left.is_mirror:
        r_l = np.full(shape, -1.0)
    else:
        A, B, C, D = _interface_blocks(blocks(stack.left.material), blocks(mats[0]))
        r_l = _safe_div(B, D)
    for j in range(1, index):
        r_l = r_l * decay(j)
        if mats[j] != mats[j - 1]:
            A, B, C, D = _interface_blocks(blocks(mats[j - 1]), blocks(mats[j]))
            r_l = _safe_div(A * r_l + B, C * r_l + D)

    # right side, starting at the right edge of layer N
    if stack.right.is_mirror:
        r_r = np.full(shape, -1.0)
    else:
        A, B, C, D = _interface_blocks(blocks(mats[-1]), blocks(stack.right.material))
        r_r = -_safe_div(C, D)
    for j in range(n, index, -1):
        r_r = r_r * decay(j)
        if mats[j - 2] != mats[j - 1]:
            A, B, C, D = _interface_blocks(blocks(mats[j - 2]), blocks(mats[j - 1]))
            r_r = _safe_div(C - r_r * A, r_r * B - D)

    q_s, _, q_p, _, _ = blocks(mats[index - 1])
    q = np.broadcast_to(np.stack([q_s, q_p]), shape)
    return SliceReflections(r_l, r_r, q, stack.layers[index - 1].thickness)
