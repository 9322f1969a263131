"""Zoo builders, reference records and their agreement with computed invariants."""

from __future__ import annotations

import math

import numpy as np
import pytest
import sympy as sp

from shrinker4 import zoo
from shrinker4.errors import InvalidParameterError, UnknownNameError
from shrinker4.invariants import sample_points
from shrinker4.soliton import residual
from shrinker4.tensor import curvature_bundle

from conftest import built, interior_points, report

PI2 = math.pi**2


def test_sphere_volume_formula_by_computer_algebra():
    r, psi, th, ph, vp = sp.symbols("r psi theta phi varphi", positive=True)
    density = r**4 * sp.sin(psi) ** 3 * sp.sin(th) ** 2 * sp.sin(ph)
    vol = sp.integrate(density, (psi, 0, sp.pi), (th, 0, sp.pi), (ph, 0, sp.pi), (vp, 0, 2 * sp.pi))
    assert sp.simplify(vol - sp.Rational(8, 3) * sp.pi**2 * r**4) == 0
    assert zoo.reference("round_s4", r=2.0).volume == pytest.approx(float(vol.subs(r, 2)))


def test_round_s4_build():
    atlas, c = zoo.build("round_s4", r=math.sqrt(6.0))
    assert atlas.compact
    assert c.rho == pytest.approx(0.5) and c.f.label.startswith("constant")
    ref = zoo.reference("round_s4")
    assert (ref.chi, ref.tau, ref.spin, ref.einstein) == (2, 0, True, True)
    assert ref.volume == pytest.approx(96 * PI2)


def test_flat_t4_build():
    atlas, c = zoo.build("flat_t4", L=2 * math.pi)
    assert atlas.compact and c is None
    assert report("flat_t4").chi.value == 0.0


def test_gaussian_build():
    atlas, c = zoo.build("gaussian_shrinker", half_width=1.0)
    assert not atlas.compact
    assert c.rho == 0.5 and c.f.label == "|x|^2/4"
    x = np.array([0.2, -0.4, 0.6, 0.0])
    assert c.f.f(x) == pytest.approx(np.dot(x, x) / 4)


def test_fubini_study_reference():
    ref = zoo.reference("fubini_study_cp2")
    assert (ref.chi, ref.tau, ref.spin, ref.kahler) == (3, 1, False, True)
    assert ref.volume == pytest.approx(72 * PI2)


def test_product_reference():
    ref = zoo.reference("product_s2xs2")
    assert (ref.chi, ref.tau, ref.spin) == (4, 0, True)


def test_unknown_and_invalid():
    with pytest.raises(UnknownNameError):
        zoo.build("hyperbolic")
    with pytest.raises(UnknownNameError):
        zoo.reference("hyperbolic")
    with pytest.raises(InvalidParameterError):
        zoo.build("round_s4", r=-1.0)
    with pytest.raises(InvalidParameterError):
        zoo.build("round_s4", r=0.0)
    with pytest.raises(InvalidParameterError):
        zoo.build("round_s4", radius=1.0)


@pytest.mark.parametrize("name", ["koiso_cao", "wang_zhu"])
def test_reference_only_entries(name):
    with pytest.raises(UnknownNameError):
        zoo.build(name)
    ref = zoo.reference(name)
    assert ref.kahler and not ref.einstein and ref.volume is None


def test_reference_only_topology():
    assert (zoo.reference("koiso_cao").chi, zoo.reference("koiso_cao").tau) == (4, 0)
    assert (zoo.reference("wang_zhu").chi, zoo.reference("wang_zhu").tau) == (5, -1)


def test_listing_is_complete_and_ordered():
    names = [e["name"] for e in zoo.listing()]
    assert names == list(zoo.ZOO)
    assert all(set(e) >= {"name", "chi", "tau", "buildable"} for e in zoo.listing())


@pytest.mark.parametrize("name", ["round_s4", "fubini_study_cp2", "product_s2xs2", "gaussian_shrinker"])
def test_soliton_data_satisfies_equation(name):
    _, c = built(name)
    worst = 0.0
    for chart, x in sample_points(c.atlas, 100, np.random.default_rng(7)):
        worst = max(worst, float(np.max(residual(c, x, chart)[1])))
    assert worst < 1e-9


def test_unequal_product_is_not_einstein():
    atlas, c = zoo.build("product_s2xs2", a=math.sqrt(2.0), b=1.0)
    assert c is None
    assert not zoo.reference("product_s2xs2", a=math.sqrt(2.0), b=1.0).einstein
    chart = atlas.charts[0]
    b = curvature_bundle(chart, interior_points(chart, 20))
    assert np.max(np.abs(b.rc0)) > 0.1
    np.testing.assert_allclose(b.scalar, 3.0, atol=1e-12)


@pytest.mark.parametrize("lam", [2.0, 6.0])
def test_scaled_sphere_soliton_constant(lam):
    _, c = zoo.build("round_s4", r=math.sqrt(6.0 * lam))
    assert c.rho == pytest.approx(0.5 / lam)
