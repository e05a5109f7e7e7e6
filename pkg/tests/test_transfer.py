import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from casimir_cslice.errors import PropagationOverflowError, SingularMatrixError
from casimir_cslice.materials import (IDEAL_MIRROR, OPEN_VACUUM, VACUUM, BoundarySpec, Layer,
                                      MaterialSpec, Stack, cslice_material, isotropic_material)
from casimir_cslice.transfer import (IDEAL_MIRROR_R, ReflectionMatrix, TransferMatrix,
                                     airy_reflection, airy_stack_reflection, fresnel_isotropic,
                                     interface_matrix, propagation_matrix, reflection_matrix,
                                     reflection_matrix_left, slice_reflections, stack_transfer,
                                     terminated_reflection_left, terminated_reflection_right)
from casimir_cslice.wavesolver import SpectralPoint

pos = st.floats(min_value=0.1, max_value=10.0)
points = st.builds(SpectralPoint, st.floats(min_value=0.01, max_value=5.0),
                   st.floats(min_value=0.0, max_value=5.0))


def half(material):
    return BoundarySpec.half_space(material)


def test_identical_materials_give_identity():
    mat = MaterialSpec(2.0, 3.0, 1.5, 1.0, 1.2, 0.8)
    M = interface_matrix(mat, mat, SpectralPoint(0.4, 1.1)).matrix
    np.testing.assert_allclose(M, np.eye(4), atol=1e-15)


@pytest.mark.parametrize("m", [0.5, 2.0, 7.0])
def test_vacuum_to_cslice_interface(m):
    M = interface_matrix(VACUUM, cslice_material(m), SpectralPoint(0.9, 1.7)).matrix
    # (s+, s-, p+, p-) ordering; in (p, p, s, s) ordering this reads diag(1/m, 1/m, 1, 1)
    np.testing.assert_allclose(M, np.diag([1.0, 1.0, 1 / m, 1 / m]), atol=1e-15)
    perm = [2, 3, 0, 1]
    np.testing.assert_allclose(M[np.ix_(perm, perm)], np.diag([1 / m, 1 / m, 1.0, 1.0]), atol=1e-15)


def test_propagation_matrix():
    sp = SpectralPoint(1.0, 2.0)
    np.testing.assert_array_equal(propagation_matrix(VACUUM, 0.0, sp).matrix, np.eye(4))
    q = np.sqrt(5.0)
    np.testing.assert_allclose(np.diag(propagation_matrix(VACUUM, 0.3, sp).matrix),
                               np.exp([-0.3 * q, 0.3 * q, -0.3 * q, 0.3 * q]), rtol=1e-15)
    with pytest.raises(PropagationOverflowError):
        propagation_matrix(VACUUM, 1e3, sp)
    with pytest.raises(ValueError):
        propagation_matrix(VACUUM, -1.0, sp)


def test_vacuum_slices_compose_to_one_propagation():
    sp = SpectralPoint(0.8, 1.5)
    stack = Stack(OPEN_VACUUM, OPEN_VACUUM, tuple(Layer(0.125, VACUUM) for _ in range(8)))
    T = stack_transfer(stack, (0, 8), sp)
    np.testing.assert_allclose(T.matrix, propagation_matrix(VACUUM, 1.0, sp).matrix, rtol=1e-14)


def test_single_interface_span():
    sp = SpectralPoint(0.8, 1.5)
    a, b = isotropic_material(2.0), MaterialSpec(2.0, 3.0, 1.5, 1.0, 1.2, 0.8)
    stack = Stack(half(VACUUM), half(b), (Layer(0.3, a),))
    np.testing.assert_allclose(stack_transfer(stack, (1, 2), sp).matrix,
                               interface_matrix(a, b, sp).matrix, rtol=1e-15)


def test_composition_matches_split_products():
    sp = SpectralPoint(0.6, 0.9)
    mats = [isotropic_material(2.0), cslice_material(0.7), MaterialSpec(2.0, 3.0, 1.5, 1.0, 1.2, 0.8)]
    stack = Stack(half(VACUUM), half(isotropic_material(3.0)),
                  tuple(Layer(0.2 + 0.1 * i, m) for i, m in enumerate(mats)))
    whole = stack_transfer(stack, (0, 4), sp)
    split = stack_transfer(stack, (2, 4), sp) @ stack_transfer(stack, (0, 2), sp)
    assert split.span == (0, 4)
    np.testing.assert_allclose(split.matrix, whole.matrix, rtol=1e-13)
    with pytest.raises(ValueError):
        stack_transfer(stack, (0, 2), sp) @ stack_transfer(stack, (0, 2), sp)


def test_mirror_slices_are_rejected():
    stack = Stack(IDEAL_MIRROR, OPEN_VACUUM, (Layer(1.0, VACUUM),))
    with pytest.raises(ValueError, match="mirror"):
        stack_transfer(stack, (0, 1), SpectralPoint(1.0, 1.0))


def test_identity_transfer_reflects_nothing():
    R = reflection_matrix(TransferMatrix(np.eye(4), (0, 1)))
    assert R.max_abs == 0.0


def test_vacuum_cslice_interface_reflects_nothing():
    for m in (0.3, 2.0):
        R = reflection_matrix(interface_matrix(VACUUM, cslice_material(m), SpectralPoint(0.5, 2.0)))
        assert R.max_abs <= 1e-15


def test_large_eps_approaches_ideal_mirror():
    R = reflection_matrix(interface_matrix(VACUUM, isotropic_material(1e8), SpectralPoint(1.0, 0.5)))
    assert R.r_ss == pytest.approx(-1.0, abs=1e-3)
    assert R.r_pp == pytest.approx(-1.0, abs=1e-3)


def test_vanishing_denominator_raises():
    with pytest.raises(SingularMatrixError):
        reflection_matrix(TransferMatrix(np.zeros((4, 4)), (0, 1)))


@settings(max_examples=100, deadline=None)
@given(entries=st.lists(st.floats(min_value=-3, max_value=3), min_size=16, max_size=16))
def test_reflection_formulas_match_linear_solve(entries):
    T = np.array(entries).reshape(4, 4)
    # rows 2 and 4 of T (leftward output amplitudes) must vanish for the reflected solution
    G = T[[1, 3]][:, [1, 3]]
    if abs(np.linalg.det(G)) < 1e-3:
        return
    R = reflection_matrix(TransferMatrix(T, (0, 1)))
    for col, inc in ((0, 0), (1, 2)):      # incident s, incident p
        r = np.linalg.solve(G, -T[[1, 3], inc])
        np.testing.assert_allclose(R.as_array()[:, col], r, rtol=1e-9, atol=1e-9)


def test_fresnel_examples():
    sp = SpectralPoint(1.0, 0.0)
    r_s, r_p = fresnel_isotropic(1.0, 1.0, 4.0, 1.0, sp)
    assert r_s == pytest.approx(-1 / 3, rel=1e-15)
    assert r_p == pytest.approx(-1 / 3, rel=1e-15)   # at normal incidence r_p = r_s in this convention
    assert fresnel_isotropic(2.0, 1.5, 2.0, 1.5, SpectralPoint(0.3, 2.0)) == (0.0, 0.0)
    r_s, r_p = fresnel_isotropic(1.0, 1.0, 1e12, 1.0, SpectralPoint(1.0, 1.0))
    assert r_s == pytest.approx(-1.0, abs=1e-5) and r_p == pytest.approx(-1.0, abs=1e-5)


@settings(max_examples=100, deadline=None)
@given(e1=pos, m1=pos, e2=pos, m2=pos, sp=points)
def test_transfer_pipeline_matches_fresnel(e1, m1, e2, m2, sp):
    a, b = isotropic_material(e1, m1), isotropic_material(e2, m2)
    R = reflection_matrix(interface_matrix(a, b, sp))
    r_s, r_p = fresnel_isotropic(e1, m1, e2, m2, sp)
    np.testing.assert_allclose([R.r_ss, R.r_pp], [r_s, r_p], rtol=1e-12, atol=1e-14)
    assert abs(R.r_sp) <= 1e-15 and abs(R.r_ps) <= 1e-15


def test_airy_limits():
    sp = SpectralPoint(1.0, 0.5)
    thick = airy_reflection([1.0, 3.0, 5.0], [1.0, 1.0, 1.0], 100.0, sp)
    np.testing.assert_allclose(thick, fresnel_isotropic(1.0, 1.0, 3.0, 1.0, sp), rtol=1e-15)
    thin = airy_reflection([2.0, 7.0, 2.0], [1.0, 1.0, 1.0], 0.0, sp)
    np.testing.assert_allclose(thin, 0.0, atol=1e-16)


@settings(max_examples=60, deadline=None)
@given(data=st.data(), sp=points)
def test_transfer_pipeline_matches_airy(data, sp):
    n = data.draw(st.integers(min_value=1, max_value=5))
    eps = data.draw(st.lists(pos, min_size=n + 2, max_size=n + 2))
    mu = data.draw(st.lists(st.floats(min_value=0.5, max_value=2.0), min_size=n + 2, max_size=n + 2))
    widths = data.draw(st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=n, max_size=n))
    mats = [isotropic_material(e, m) for e, m in zip(eps, mu)]
    stack = Stack(half(mats[0]), half(mats[-1]), tuple(Layer(w, m) for w, m in zip(widths, mats[1:-1])))
    R = reflection_matrix(stack_transfer(stack, (0, n + 1), sp))
    np.testing.assert_allclose([R.r_ss, R.r_pp], airy_stack_reflection(eps, mu, widths, sp),
                               rtol=1e-9, atol=1e-14)


def test_terminated_reflections_with_mirrors():
    sp = SpectralPoint(0.7, 0.4)
    q = sp.w0
    P = propagation_matrix(VACUUM, 0.5, sp)
    # a mirror at the far end seen through vacuum of width 0.5
    R = terminated_reflection_right(P, IDEAL_MIRROR_R)
    np.testing.assert_allclose(R.as_array(), -np.exp(-q) * np.eye(2), rtol=1e-14)
    L = terminated_reflection_left(P, IDEAL_MIRROR_R)
    np.testing.assert_allclose(L.as_array(), -np.exp(-q) * np.eye(2), rtol=1e-14)


def test_left_reflection_matches_fresnel_from_other_side():
    sp = SpectralPoint(0.7, 0.4)
    a, b = isotropic_material(2.0), isotropic_material(5.0, 1.5)
    R = reflection_matrix_left(interface_matrix(a, b, sp))
    np.testing.assert_allclose([R.r_ss, R.r_pp], fresnel_isotropic(5.0, 1.5, 2.0, 1.0, sp), rtol=1e-13)


def test_reflection_matrix_helpers():
    R = ReflectionMatrix.diagonal(-0.5, 0.25)
    np.testing.assert_array_equal(R.as_array(), [[-0.5, 0.0], [0.0, 0.25]])
    assert ReflectionMatrix.from_array(R.as_array()) == R
    assert R.max_abs == 0.5


@pytest.mark.parametrize("left, right", [
    (half(isotropic_material(3.0)), half(isotropic_material(1.5, 2.0))),
    (IDEAL_MIRROR, half(isotropic_material(4.0))),
    (IDEAL_MIRROR, IDEAL_MIRROR),
])
def test_slice_recursion_matches_transfer_products(left, right):
    layers = (Layer(0.3, VACUUM), Layer(0.2, isotropic_material(2.5)),
              Layer(0.25, cslice_material(0.6)), Layer(0.15, isotropic_material(1.2, 1.7)))
    stack = Stack(left, right, layers)
    sp = SpectralPoint(0.9, 1.3)
    for index in range(1, 5):
        sr = slice_reflections(stack, index, np.array([sp.kappa]), np.array([sp.kpar]))
        # right reflection at the right edge of the slice
        if right.is_mirror:
            rr = terminated_reflection_right(stack_transfer(_no_mirrors(stack), (index, 5), sp),
                                             IDEAL_MIRROR_R) if index < 4 else IDEAL_MIRROR_R
        else:
            rr = reflection_matrix(stack_transfer(stack, (index, 5), sp))
        np.testing.assert_allclose(sr.right[:, 0], [rr.r_ss, rr.r_pp], rtol=1e-12)
        # left reflection at the left edge: undo the slice's own propagation
        if left.is_mirror:
            rl = terminated_reflection_left(stack_transfer(_no_mirrors(stack), (0, index), sp),
                                            IDEAL_MIRROR_R)
            t = 0.0
        else:
            rl = reflection_matrix_left(stack_transfer(stack, (0, index), sp))
            t = 0.0
        decay = np.exp(2.0 * sr.q[:, 0] * (stack.layers[index - 1].thickness + t))
        np.testing.assert_allclose(sr.left[:, 0], np.array([rl.r_ss, rl.r_pp]) * decay, rtol=1e-12)


def _no_mirrors(stack):
    """Same layers with the mirror ends replaced by vacuum (used only for spans that stop short)."""
    return Stack(stack.left if not stack.left.is_mirror else OPEN_VACUUM,
                 stack.right if not stack.right.is_mirror else OPEN_VACUUM, stack.layers)
