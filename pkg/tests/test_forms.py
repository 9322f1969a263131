"""Hodge star, self-dual projectors and the curvature operator on 2-forms."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from shrinker4 import forms
from shrinker4.errors import InconsistencyError
from shrinker4.forms import (
    CurvatureOperatorMatrix,
    calibrate_weyl_constant,
    curvature_operator,
    from_matrix,
    hodge_star,
    sd_projectors,
    two_form_metric,
    weyl_operator,
    weyl_sd_norms,
)
from shrinker4.tensor import curvature_bundle
from shrinker4.zoo import product_s2xs2_chart

from conftest import COMPACT, EINSTEIN_SHRINKERS, built, interior_points

E01, E23 = np.eye(6)[0], np.eye(6)[3]

spd = arrays(np.float64, (4, 4), elements=st.floats(-1, 1)).map(lambda a: a @ a.T + 0.5 * np.eye(4))


def _random_spd(n, seed=0):
    rng = np.random.default_rng(seed)
    A = rng.uniform(-1, 1, (n, 4, 4))
    return A @ np.swapaxes(A, -1, -2) + 0.5 * np.eye(4)


def _bundle(name, n=40, seed=0):
    atlas, _ = built(name)
    chart = atlas.charts[0]
    return chart, curvature_bundle(chart, interior_points(chart, n, seed=seed))


def test_flat_star_is_block_antidiagonal():
    star = hodge_star(np.eye(4))
    np.testing.assert_allclose(star @ E01, E23)
    expected = np.block([[np.zeros((3, 3)), np.eye(3)], [np.eye(3), np.zeros((3, 3))]])
    np.testing.assert_allclose(star, expected)


def test_star_squares_to_identity_on_1000_random_metrics():
    star = hodge_star(_random_spd(1000))
    np.testing.assert_allclose(star @ star, np.broadcast_to(np.eye(6), star.shape), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(spd, st.sampled_from([1, -1]))
def test_star_involution_and_self_adjoint(g, orientation):
    star = hodge_star(g, orientation)
    np.testing.assert_allclose(star @ star, np.eye(6), atol=1e-10)
    G = two_form_metric(g)
    np.testing.assert_allclose(star.T @ G, G @ star, atol=1e-9)
    eig = np.sort(np.linalg.eigvals(star).real)
    np.testing.assert_allclose(eig, [-1, -1, -1, 1, 1, 1], atol=1e-8)


@settings(max_examples=50, deadline=None)
@given(spd)
def test_orientation_flip_negates_star_and_swaps_projectors(g):
    plus, minus = sd_projectors(hodge_star(g, 1))
    np.testing.assert_allclose(hodge_star(g, -1), -hodge_star(g, 1), atol=1e-12)
    plus2, minus2 = sd_projectors(hodge_star(g, -1))
    np.testing.assert_allclose(plus2, minus, atol=1e-12)
    np.testing.assert_allclose(minus2, plus, atol=1e-12)


def test_flat_projector_example():
    plus, minus = sd_projectors(hodge_star(np.eye(4)))
    np.testing.assert_allclose(plus @ E01, 0.5 * (E01 + E23))
    np.testing.assert_allclose(minus @ E01, 0.5 * (E01 - E23))


@settings(max_examples=100, deadline=None)
@given(spd)
def test_projector_algebra(g):
    plus, minus = sd_projectors(hodge_star(g))
    np.testing.assert_allclose(plus @ minus, 0.0, atol=1e-12)
    np.testing.assert_allclose(plus @ plus, plus, atol=1e-12)
    np.testing.assert_allclose(plus + minus, np.eye(6), atol=1e-12)
    assert np.linalg.matrix_rank(plus, tol=1e-8) == 3
    assert np.linalg.matrix_rank(minus, tol=1e-8) == 3


def test_projectors_reject_non_involution():
    with pytest.raises(InconsistencyError):
        sd_projectors(2 * np.eye(6))


@pytest.mark.parametrize("name", COMPACT)
def test_zoo_star_and_projector_rank(name):
    chart, b = _bundle(name, n=50, seed=1)
    star = hodge_star(b.metric, chart.orientation)
    np.testing.assert_allclose(star @ star, np.broadcast_to(np.eye(6), star.shape), atol=1e-12)
    for s in star:
        plus, _ = sd_projectors(s)
        assert np.linalg.matrix_rank(plus, tol=1e-8) == 3


@pytest.mark.parametrize("lam", [2.0, 6.0])
@pytest.mark.parametrize("name", COMPACT)
def test_projectors_are_conformally_invariant(name, lam):
    chart, b = _bundle(name, n=20, seed=2)
    p1, _ = sd_projectors(hodge_star(b.metric, chart.orientation)[0])
    p2, _ = sd_projectors(hodge_star(lam * b.metric, chart.orientation)[0])
    np.testing.assert_allclose(p2, p1, atol=1e-10)


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, 6, elements=st.floats(-1e3, 1e3)))
def test_two_form_round_trip(vec):
    m = forms.to_matrix(vec)
    np.testing.assert_array_equal(m, -m.T)
    np.testing.assert_array_equal(from_matrix(m), vec)


def test_round_s4_operator_is_scalar_multiple_of_identity():
    _, b = _bundle("round_s4", seed=3)
    op = curvature_operator(b)
    np.testing.assert_allclose(op.matrix, np.broadcast_to(np.eye(6) / 6, op.matrix.shape), atol=1e-12)
    np.testing.assert_allclose(op.w_plus, 0.0, atol=1e-12)
    np.testing.assert_allclose(op.w_minus, 0.0, atol=1e-12)
    np.testing.assert_allclose(op.off_diagonal, 0.0, atol=1e-12)


def test_unit_sphere_operator_is_identity():
    from shrinker4.zoo import round_s4_chart

    chart = round_s4_chart(1.0)
    op = curvature_operator(curvature_bundle(chart, interior_points(chart, 10)))
    np.testing.assert_allclose(op.matrix, np.broadcast_to(np.eye(6), op.matrix.shape), atol=1e-11)


def test_flat_operator_is_zero():
    _, b = _bundle("flat_t4")
    assert np.all(curvature_operator(b).matrix == 0)


@pytest.mark.parametrize("name", COMPACT)
def test_operator_structure(name):
    chart, b = _bundle(name, n=100, seed=4)
    op = curvature_operator(b, chart.orientation)
    M = op.matrix
    scale = max(1.0, float(np.max(np.abs(M))))
    np.testing.assert_allclose(M, np.swapaxes(M, -1, -2), atol=1e-10 * scale)
    np.testing.assert_allclose(np.trace(op.plus_block, axis1=1, axis2=2), b.scalar / 4, atol=1e-10 * scale)
    np.testing.assert_allclose(np.trace(op.minus_block, axis1=1, axis2=2), b.scalar / 4, atol=1e-10 * scale)
    np.testing.assert_allclose(op.scalar, b.scalar, atol=1e-9 * scale)
    np.testing.assert_allclose(np.trace(op.w_plus, axis1=1, axis2=2), 0.0, atol=1e-10 * scale)


@pytest.mark.parametrize("name", EINSTEIN_SHRINKERS)
def test_einstein_off_diagonal_vanishes(name):
    chart, b = _bundle(name, n=100, seed=5)
    op = curvature_operator(b, chart.orientation)
    assert np.max(np.linalg.norm(op.off_diagonal, axis=(-2, -1))) < 1e-9


def test_off_diagonal_detects_traceless_ricci():
    chart = product_s2xs2_chart(math.sqrt(2.0), 1.0)
    b = curvature_bundle(chart, interior_points(chart, 30, seed=6))
    op = curvature_operator(b)
    assert np.min(np.linalg.norm(op.off_diagonal, axis=(-2, -1))) > 0.1
    assert np.min(np.linalg.norm(b.rc0, axis=(-2, -1))) > 0.1


@pytest.mark.parametrize("name", COMPACT)
def test_weyl_tensor_blocks_match_trace_free_diagonal_blocks(name):
    chart, b = _bundle(name, n=30, seed=7)
    op = curvature_operator(b, chart.orientation)
    W = weyl_operator(b, chart.orientation)
    np.testing.assert_allclose(W[:, :3, :3], op.w_plus, atol=1e-10)
    np.testing.assert_allclose(W[:, 3:, 3:], op.w_minus, atol=1e-10)
    np.testing.assert_allclose(W[:, :3, 3:], 0.0, atol=1e-10)


@pytest.mark.parametrize("name", ["round_s4", "flat_t4", "product_s2xs2"])
def test_weyl_norms_balanced_on_signature_zero_examples(name):
    chart, b = _bundle(name, seed=8)
    wp, wm = weyl_sd_norms(curvature_operator(b, chart.orientation))
    np.testing.assert_allclose(wp, wm, atol=1e-12)
    if name == "product_s2xs2":
        # R = 2 and the product is Kahler for both orientations: 24 |W+-|^2 = R^2
        np.testing.assert_allclose(wp, 1 / 6, atol=1e-12)
    else:
        np.testing.assert_allclose(wp, 0.0, atol=1e-12)


def test_fubini_study_self_dual_weyl():
    chart, b = _bundle("fubini_study_cp2", n=200, seed=9)
    wp, wm = weyl_sd_norms(curvature_operator(b, chart.orientation))
    np.testing.assert_allclose(24 * wp, b.scalar**2, rtol=1e-10)
    np.testing.assert_allclose(wm, 0.0, atol=1e-10)


def test_wrong_orientation_swaps_weyl_halves():
    chart, b = _bundle("fubini_study_cp2", n=20, seed=10)
    wp, wm = weyl_sd_norms(curvature_operator(b, -chart.orientation))
    np.testing.assert_allclose(wp, 0.0, atol=1e-10)
    np.testing.assert_allclose(24 * wm, b.scalar**2, rtol=1e-10)


def test_calibration_helper():
    assert calibrate_weyl_constant(0.5) == pytest.approx(2.0)
    assert calibrate_weyl_constant(1.0) == 1.0
    with pytest.raises(InconsistencyError):
        calibrate_weyl_constant(0.0)


def test_operator_accessors_on_synthetic_matrix():
    M = np.diag([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
    op = CurvatureOperatorMatrix(M)
    assert op.scalar == pytest.approx(2 * (6 + 15))
    np.testing.assert_allclose(np.trace(op.w_plus), 0.0, atol=1e-15)
    np.testing.assert_allclose(op.w_minus, np.diag([-1.0, 0.0, 1.0]))
