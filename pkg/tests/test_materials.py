import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from casimir_cslice.materials import (IDEAL_MIRROR, OPEN_VACUUM, VACUUM, BoundarySpec,
                                      CompressionProfile, Layer, MaterialSpec, Stack,
                                      compression_factor, cslice_material, discretize,
                                      effective_length, isotropic_material, mean_compression,
                                      parse_profile, virtual_width)

positive = st.floats(min_value=0.05, max_value=20.0)


def test_cslice_identity_is_vacuum():
    assert cslice_material(1.0) == VACUUM
    assert cslice_material(1.0).is_vacuum


@pytest.mark.parametrize("m, diag", [(2.0, (0.5, 0.5, 2.0)), (0.5, (2.0, 2.0, 0.5))])
def test_cslice_tensors(m, diag):
    mat = cslice_material(m)
    np.testing.assert_array_equal(mat.eps, diag)
    np.testing.assert_array_equal(mat.mu, diag)
    assert mat.is_cslice
    assert not mat.is_isotropic


@pytest.mark.parametrize("m", [0.0, -1.0, math.inf, math.nan])
def test_cslice_rejects_bad_m(m):
    with pytest.raises(ValueError):
        cslice_material(m)


def test_material_rejects_non_positive():
    with pytest.raises(ValueError, match="eps_y"):
        MaterialSpec(1.0, 0.0, 1.0, 1.0, 1.0, 1.0)


def test_isotropic_material():
    mat = isotropic_material(4.0)
    assert mat.is_isotropic and not mat.is_cslice
    np.testing.assert_array_equal(mat.eps, [4.0, 4.0, 4.0])
    np.testing.assert_array_equal(mat.mu, [1.0, 1.0, 1.0])


@pytest.mark.parametrize("profile, expected", [
    (CompressionProfile.constant(2.0, 0.0, 0.2), 0.1),
    (CompressionProfile.constant(1.0, 0.3, 0.7), 0.4),
    (CompressionProfile.linear(1.0, 2.0, 0.0, 1.0), math.log(2.0)),
    (CompressionProfile.linear(1.0, 3.0, 0.4, 0.6), 0.1 * math.log(3.0)),
])
def test_virtual_width_examples(profile, expected):
    assert virtual_width(profile) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("profile, expected", [
    (CompressionProfile.constant(2.0, 0.0, 0.2), 2.0),
    (CompressionProfile.constant(1.0, 0.0, 0.2), 1.0),
    (CompressionProfile.linear(1.0, 2.0, 0.0, 1.0), 1.0 / math.log(2.0)),
])
def test_compression_factor_is_harmonic_mean(profile, expected):
    assert compression_factor(profile) == pytest.approx(expected, rel=1e-14)


def test_arithmetic_mean_differs_for_linear_profile():
    profile = CompressionProfile.linear(1.0, 2.0, 0.0, 1.0)
    assert mean_compression(profile) == pytest.approx(1.5)
    assert compression_factor(profile) == pytest.approx(1.442695, abs=1e-6)


@settings(max_examples=50, deadline=None)
@given(m_a=positive, m_b=positive)
def test_linear_virtual_width_matches_quad(m_a, m_b):
    profile = CompressionProfile.linear(m_a, m_b, 0.1, 0.9)
    ref, _ = quad(lambda z: 1.0 / profile(z), 0.1, 0.9, epsabs=0, epsrel=1e-13)
    assert virtual_width(profile) == pytest.approx(ref, rel=1e-11)


def test_table_virtual_width_matches_quad():
    z = np.array([0.0, 0.1, 0.25, 0.5, 0.8, 1.0])
    m = np.array([1.0, 1.7, 0.6, 2.5, 2.5, 0.9])
    profile = CompressionProfile.tabulated(z, m, (0.05, 0.95))
    points = [0.1, 0.25, 0.5, 0.8]
    ref, _ = quad(lambda x: 1.0 / profile(x), 0.05, 0.95, points=points, epsabs=0, epsrel=1e-13)
    assert virtual_width(profile) == pytest.approx(ref, rel=1e-11)


@pytest.mark.parametrize("profile, expected", [
    (None, 1.0),
    (CompressionProfile.constant(0.5, 0.4, 0.6), 1.2),
    (CompressionProfile.constant(2.0, 0.4, 0.6), 0.9),
])
def test_effective_length(profile, expected):
    assert effective_length(1.0, profile) == pytest.approx(expected, rel=1e-15)


def test_effective_length_rejects_profile_outside_cavity():
    with pytest.raises(ValueError, match="not inside"):
        effective_length(0.5, CompressionProfile.constant(2.0, 0.4, 0.6))


def test_profile_validation():
    with pytest.raises(ValueError, match="interval start exceeds end"):
        CompressionProfile.constant(1.0, 0.7, 0.2)
    with pytest.raises(ValueError):
        CompressionProfile.linear(1.0, -1.0, 0.0, 1.0)
    with pytest.raises(ValueError, match="cover"):
        CompressionProfile.tabulated([0.2, 0.5], [1.0, 2.0], (0.0, 1.0))


def test_parse_profile_kinds(tmp_path):
    assert parse_profile("const:0.5", (0.4, 0.6)) == CompressionProfile.constant(0.5, 0.4, 0.6)
    lin = parse_profile("linear:1,3", (0.4, 0.6))
    assert lin(0.5) == pytest.approx(2.0)
    table = tmp_path / "m.txt"
    table.write_text("# z m\n0.0 1.0\n0.5 2.0  # midpoint\n\n1.0 1.0\n")
    prof = parse_profile("table:m.txt", (0.0, 1.0), base_dir=tmp_path)
    assert prof(0.25) == pytest.approx(1.5)
    assert prof.describe() == "table:m.txt"


@pytest.mark.parametrize("text", ["const", "const:", "const:abc", "linear:1", "linear:1,2,3",
                                  "cubic:1", "const:-2"])
def test_parse_profile_rejects_malformed(text):
    with pytest.raises(ValueError):
        parse_profile(text, (0.0, 1.0))


def test_describe_round_trips():
    for prof in (CompressionProfile.constant(0.3, 0.1, 0.2),
                 CompressionProfile.linear(1.1, 2.7, 0.1, 0.2)):
        assert parse_profile(prof.describe(), (prof.a, prof.b)) == prof


def test_boundary_spec():
    assert IDEAL_MIRROR.is_mirror and IDEAL_MIRROR.material is None
    assert OPEN_VACUUM.material == VACUUM
    half = BoundarySpec.half_space(isotropic_material(3.0))
    assert half.material.eps_x == 3.0
    with pytest.raises(ValueError):
        BoundarySpec("half_space")
    with pytest.raises(ValueError):
        BoundarySpec("wall")


def test_stack_geometry():
    stack = Stack(IDEAL_MIRROR, IDEAL_MIRROR,
                  (Layer(0.25, VACUUM), Layer(0.5, cslice_material(2.0)), Layer(0.25, VACUUM)))
    assert stack.n_layers == 3
    assert stack.d == 1.0
    np.testing.assert_allclose(stack.edges, [0.0, 0.25, 0.75, 1.0])
    assert stack.slice_at(0.1) == 1
    assert stack.slice_at(0.25) == 2       # an edge belongs to the layer on its right
    assert stack.slice_at(1.0) == 3
    with pytest.raises(ValueError):
        stack.slice_at(1.5)
    with pytest.raises(ValueError):
        Stack(IDEAL_MIRROR, IDEAL_MIRROR, (Layer(0.0, VACUUM),))


def test_discretize_single_vacuum_layer():
    stack = discretize(None, (IDEAL_MIRROR, IDEAL_MIRROR), 1.0, 1)
    assert stack.layers == (Layer(1.0, VACUUM),)


def test_discretize_aligns_profile_edges():
    profile = CompressionProfile.linear(1.0, 3.0, 0.4, 0.6)
    stack = discretize(profile, (IDEAL_MIRROR, IDEAL_MIRROR), 1.0, 10)
    assert stack.n_layers == 10
    assert 0.4 in np.round(stack.edges, 15) and 0.6 in np.round(stack.edges, 15)
    assert stack.d == pytest.approx(1.0, abs=1e-15)
    # midpoint values inside the wafer, vacuum outside
    ms = [lay.material.eps_z for lay in stack.layers]
    assert ms[:4] == [1.0] * 4 and ms[-4:] == [1.0] * 4
    np.testing.assert_allclose(ms[4:6], [1.5, 2.5])


def test_discretize_isotropic_material():
    profile = CompressionProfile.linear(1.0, 2.0, 0.0, 1.0)
    stack = discretize(profile, (IDEAL_MIRROR, IDEAL_MIRROR), 1.0, 4, material=isotropic_material)
    assert all(lay.material.is_isotropic for lay in stack.layers)
    np.testing.assert_allclose([lay.material.eps_x for lay in stack.layers],
                               [1.125, 1.375, 1.625, 1.875])


def test_stack_digest_is_content_based():
    a = discretize(CompressionProfile.constant(2.0, 0.4, 0.6), (IDEAL_MIRROR, IDEAL_MIRROR), 1.0, 8)
    b = discretize(CompressionProfile.constant(2.0, 0.4, 0.6), (IDEAL_MIRROR, IDEAL_MIRROR), 1.0, 8)
    c = discretize(CompressionProfile.constant(2.5, 0.4, 0.6), (IDEAL_MIRROR, IDEAL_MIRROR), 1.0, 8)
    assert a.digest() == b.digest() != c.digest()
