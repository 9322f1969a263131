"""Closed-form example metrics with analytic first and second derivatives.

Every chart below is a single dense coordinate box; the excluded boundary
(poles and seams of the angular coordinates) has measure zero.  Derivative
formulas were written by hand and are checked against sympy differentiation
in ``tests/test_tensor.py``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InvalidParameterError, UnknownNameError
from .tensor import DIM, ChartAtlas, MetricChart

PI = math.pi


@dataclass(frozen=True)
class ReferenceRecord:
    chi: int
    tau: int
    spin: bool
    kahler: bool
    einstein: bool
    compact: bool
    volume: float | None
    topology: str
    note: str = ""


@dataclass(frozen=True)
class ZooEntry:
    name: str
    params: dict
    description: str
    builder: Callable | None
    reference: Callable
    buildable: bool = True


# -- helpers -----------------------------------------------------------------


def _diag_sin_product(x, radius2, chain):
    """Diagonal metric ``radius2 * prod_{j in chain[k]} sin^2 x_j`` on entry k.

    Returns ``(g, dg, d2g)`` for a batch of points.
    """
    n = x.shape[0]
    s2 = np.sin(x) ** 2
    d1 = np.sin(2 * x)
    d2 = 2 * np.cos(2 * x)
    g = np.zeros((n, DIM, DIM))
    dg = np.zeros((n, DIM, DIM, DIM))
    d2g = np.zeros((n, DIM, DIM, DIM, DIM))
    for k, factors in enumerate(chain):
        base = np.full(n, radius2[k])
        for j in factors:
            base = base * s2[:, j]
        g[:, k, k] = base
        for i in factors:
            rest_i = np.full(n, radius2[k])
            for j in factors:
                if j != i:
                    rest_i = rest_i * s2[:, j]
            dg[:, k, k, i] = rest_i * d1[:, i]
            d2g[:, k, k, i, i] = rest_i * d2[:, i]
            for l in factors:
                if l == i:
                    continue
                rest_il = np.full(n, radius2[k])
                for j in factors:
                    if j not in (i, l):
                        rest_il = rest_il * s2[:, j]
                d2g[:, k, k, i, l] = rest_il * d1[:, i] * d1[:, l]
    return g, dg, d2g


def _component(triple_fn, k):
    """One member of the (g, dg, d2g) triple; a single (4,) point gives unbatched output."""

    def fn(x):
        x = np.asarray(x, dtype=float)
        out = triple_fn(np.atleast_2d(x))[k]
        return out[0] if x.ndim == 1 else out

    return fn


def _chart(box, triple_fn, **kw) -> MetricChart:
    return MetricChart(
        np.asarray(box, dtype=float),
        _component(triple_fn, 0),
        _component(triple_fn, 1),
        _component(triple_fn, 2),
        jet=lambda x: triple_fn(np.atleast_2d(np.asarray(x, dtype=float))),
        **kw,
    )


def _positive(name, value):
    value = float(value)
    if not math.isfinite(value) or value <= 0:
        raise InvalidParameterError(f"{name} must be a positive number, got {value!r}")
    return value


# -- round S^4 ---------------------------------------------------------------


def round_s4_chart(r: float) -> MetricChart:
    """Hyperspherical coordinates (psi, theta, phi, varphi) on S^4(r)."""
    r = _positive("r", r)
    chain = ((), (0,), (0, 1), (0, 1, 2))
    radius2 = (r * r,) * 4

    def triple(x):
        return _diag_sin_product(x, radius2, chain)

    return _chart(
        [[0, PI], [0, PI], [0, PI], [0, 2 * PI]],
        triple,
        measure_note="sqrt(det g) = r^4 sin^3(psi) sin^2(theta) sin(phi) vanishes on the faces psi, theta, phi in {0, pi}",
        cyclic=(3,),
        name=f"round_s4(r={r:g})",
    )


def _round_s4(r: float = math.sqrt(6.0)):
    r = _positive("r", r)
    atlas = ChartAtlas((round_s4_chart(r),), compact=True, name="round_s4")
    return atlas, {"f": "zero", "rho": 3.0 / (r * r)}


def _round_s4_ref(r: float = math.sqrt(6.0)):
    r = _positive("r", r)
    return ReferenceRecord(2, 0, True, False, True, True, 8 * PI**2 / 3 * r**4, "S4")


# -- product S^2 x S^2 ---------------------------------------------------------


def product_s2xs2_chart(a: float, b: float) -> MetricChart:
    """(theta1, phi1, theta2, phi2) on S^2(a) x S^2(b) with the product orientation."""
    a = _positive("a", a)
    b = _positive("b", b)
    chain = ((), (0,), (), (2,))
    radius2 = (a * a, a * a, b * b, b * b)

    def triple(x):
        return _diag_sin_product(x, radius2, chain)

    return _chart(
        [[0, PI], [0, 2 * PI], [0, PI], [0, 2 * PI]],
        triple,
        measure_note="sqrt(det g) = a^2 b^2 sin(theta1) sin(theta2) vanishes at both pairs of poles",
        cyclic=(1, 3),
        name=f"product_s2xs2(a={a:g},b={b:g})",
    )


def _product_s2xs2(a: float = math.sqrt(2.0), b: float = math.sqrt(2.0)):
    a = _positive("a", a)
    b = _positive("b", b)
    atlas = ChartAtlas((product_s2xs2_chart(a, b),), compact=True, name="product_s2xs2", kahler=True)
    soliton = {"f": "zero", "rho": 1.0 / (a * a)} if math.isclose(a, b, rel_tol=1e-14) else None
    return atlas, soliton


def _product_s2xs2_ref(a: float = math.sqrt(2.0), b: float = math.sqrt(2.0)):
    a = _positive("a", a)
    b = _positive("b", b)
    einstein = math.isclose(a, b, rel_tol=1e-14)
    return ReferenceRecord(4, 0, True, True, einstein, True, 16 * PI**2 * a * a * b * b, "S2xS2")


# -- Fubini-Study CP^2 ---------------------------------------------------------


def fubini_study_chart(scale: float) -> MetricChart:
    """CP^2 in cohomogeneity-one coordinates (mu, theta, phi, psi).

    ``g = scale * [dmu^2 + 1/4 sin^2 mu (dtheta^2 + sin^2 theta dphi^2)
    + 1/4 sin^2 mu cos^2 mu (dpsi + cos theta dphi)^2]``, mu in (0, pi/2),
    theta in (0, pi), phi in (0, 2pi), psi in (0, 4pi).  For ``scale = 1``
    this is the Fubini-Study metric of holomorphic sectional curvature 4
    (Rc = 6 g, volume pi^2/2).  The chart orientation is the one for which
    the Kahler form is self-dual.
    """
    s = _positive("scale", scale)

    def triple(x):
        n = x.shape[0]
        mu, th = x[:, 0], x[:, 1]
        A = 0.25 * np.sin(mu) ** 2
        A1 = 0.25 * np.sin(2 * mu)
        A2 = 0.5 * np.cos(2 * mu)
        B = np.sin(2 * mu) ** 2 / 16.0
        B1 = np.sin(4 * mu) / 8.0
        B2 = 0.5 * np.cos(4 * mu)
        st, ct = np.sin(th), np.cos(th)
        s2t, c2t = np.sin(2 * th), np.cos(2 * th)

        g = np.zeros((n, DIM, DIM))
        dg = np.zeros((n, DIM, DIM, DIM))
        d2g = np.zeros((n, DIM, DIM, DIM, DIM))
        MU, TH, PH, PS = 0, 1, 2, 3

        g[:, MU, MU] = 1.0
        g[:, TH, TH] = A
        dg[:, TH, TH, MU] = A1
        d2g[:, TH, TH, MU, MU] = A2

        g[:, PH, PH] = A * st**2 + B * ct**2
        dg[:, PH, PH, MU] = A1 * st**2 + B1 * ct**2
        dg[:, PH, PH, TH] = (A - B) * s2t
        d2g[:, PH, PH, MU, MU] = A2 * st**2 + B2 * ct**2
        d2g[:, PH, PH, MU, TH] = d2g[:, PH, PH, TH, MU] = (A1 - B1) * s2t
        d2g[:, PH, PH, TH, TH] = 2 * (A - B) * c2t

        for i, j in ((PH, PS), (PS, PH)):
            g[:, i, j] = B * ct
            dg[:, i, j, MU] = B1 * ct
            dg[:, i, j, TH] = -B * st
            d2g[:, i, j, MU, MU] = B2 * ct
            d2g[:, i, j, MU, TH] = d2g[:, i, j, TH, MU] = -B1 * st
            d2g[:, i, j, TH, TH] = -B * ct

        g[:, PS, PS] = B
        dg[:, PS, PS, MU] = B1
        d2g[:, PS, PS, MU, MU] = B2
        return s * g, s * dg, s * d2g

    return _chart(
        [[0, PI / 2], [0, PI], [0, 2 * PI], [0, 4 * PI]],
        triple,
        orientation=-1,
        measure_note=(
            "sqrt(det g) = scale^2/8 sin^3(mu) cos(mu) sin(theta); mu = 0 is a point, "
            "mu = pi/2 the line at infinity, theta in {0, pi} the Hopf-fibre seams"
        ),
        cyclic=(2, 3),
        name=f"fubini_study_cp2(scale={s:g})",
    )


def _fubini_study(scale: float = 12.0):
    s = _positive("scale", scale)
    atlas = ChartAtlas((fubini_study_chart(s),), compact=True, name="fubini_study_cp2", kahler=True)
    return atlas, {"f": "zero", "rho": 6.0 / s}


def _fubini_study_ref(scale: float = 12.0):
    s = _positive("scale", scale)
    return ReferenceRecord(3, 1, False, True, True, True, s * s * PI**2 / 2, "CP2")


# -- flat T^4 and the Gaussian shrinker -----------------------------------------


def _flat_triple(x):
    n = x.shape[0]
    g = np.broadcast_to(np.eye(DIM), (n, DIM, DIM)).copy()
    return g, np.zeros((n, DIM, DIM, DIM)), np.zeros((n, DIM, DIM, DIM, DIM))


def flat_chart(box, name, note) -> MetricChart:
    return _chart(box, _flat_triple, measure_note=note, cyclic=(0, 1, 2, 3), name=name)


def _flat_t4(L: float = 2 * PI):
    L = _positive("L", L)
    chart = flat_chart([[0, L]] * 4, f"flat_t4(L={L:g})", "no degeneration; opposite faces identified")
    return ChartAtlas((chart,), compact=True, name="flat_t4"), None


def _flat_t4_ref(L: float = 2 * PI):
    L = _positive("L", L)
    return ReferenceRecord(0, 0, True, True, True, True, L**4, "T4", note="flat; steady, not a shrinker")


def _gaussian(half_width: float = 1.0):
    w = _positive("half_width", half_width)
    chart = flat_chart([[-w, w]] * 4, f"gaussian_shrinker(w={w:g})", "window of flat R^4")
    atlas = ChartAtlas((chart,), compact=False, name="gaussian_shrinker")
    return atlas, {"f": "gaussian", "rho": 0.5}


def _gaussian_ref(half_width: float = 1.0):
    _positive("half_width", half_width)
    return ReferenceRecord(2, 0, True, True, False, False, None, "R4", note="non-compact; pointwise checks only")


def _reference_only(chi, tau, topology, note):
    def ref():
        return ReferenceRecord(chi, tau, False, True, False, True, None, topology, note=note)

    return ref


ZOO: dict[str, ZooEntry] = {
    "round_s4": ZooEntry(
        "round_s4", {"r": math.sqrt(6.0)}, "round 4-sphere of radius r", _round_s4, _round_s4_ref
    ),
    "fubini_study_cp2": ZooEntry(
        "fubini_study_cp2",
        {"scale": 12.0},
        "Fubini-Study CP^2, scale * (metric with Rc = 6g); scale 12 gives rho = 1/2",
        _fubini_study,
        _fubini_study_ref,
    ),
    "product_s2xs2": ZooEntry(
        "product_s2xs2",
        {"a": math.sqrt(2.0), "b": math.sqrt(2.0)},
        "S^2(a) x S^2(b); Einstein iff a = b",
        _product_s2xs2,
        _product_s2xs2_ref,
    ),
    "flat_t4": ZooEntry("flat_t4", {"L": 2 * PI}, "flat torus with all periods L", _flat_t4, _flat_t4_ref),
    "gaussian_shrinker": ZooEntry(
        "gaussian_shrinker",
        {"half_width": 1.0},
        "flat R^4 window (-w, w)^4 with f = |x|^2/4, rho = 1/2",
        _gaussian,
        _gaussian_ref,
    ),
    "koiso_cao": ZooEntry(
        "koiso_cao",
        {},
        "Koiso-Cao Kahler shrinker on CP2 # -CP2 (existence only)",
        None,
        _reference_only(4, 0, "CP2 # CP2bar", "non-Einstein Kahler shrinker; no closed form"),
        buildable=False,
    ),
    "wang_zhu": ZooEntry(
        "wang_zhu",
        {},
        "Wang-Zhu Kahler shrinker on CP2 # -2CP2 (existence only)",
        None,
        _reference_only(5, -1, "CP2 # 2*CP2bar", "non-Einstein Kahler shrinker; no closed form"),
        buildable=False,
    ),
}


def _entry(name: str) -> ZooEntry:
    try:
        return ZOO[name]
    except KeyError:
        raise UnknownNameError(f"unknown zoo metric {name!r}; known: {', '.join(ZOO)}") from None


def _check_params(entry: ZooEntry, params: dict):
    unknown = set(params) - set(entry.params)
    if unknown:
        raise InvalidParameterError(f"{entry.name} does not take parameters {sorted(unknown)}")


def build(name: str, **params):
    """Return ``(atlas, candidate)``; ``candidate`` is ``None`` without soliton data."""
    from .soliton import PotentialField, SolitonCandidate

    entry = _entry(name)
    if not entry.buildable:
        raise UnknownNameError(f"{name!r} is a reference record only; no closed-form metric is known")
    _check_params(entry, params)
    atlas, data = entry.builder(**params)
    if data is None:
        return atlas, None
    f = PotentialField.gaussian() if data["f"] == "gaussian" else PotentialField.constant(0.0)
    return atlas, SolitonCandidate(atlas, f, data["rho"])


def reference(name: str, **params) -> ReferenceRecord:
    entry = _entry(name)
    _check_params(entry, params)
    return entry.reference(**params)


def listing() -> list[dict]:
    out = []
    for entry in ZOO.values():
        ref = entry.reference()
        out.append(
            {
                "name": entry.name,
                "description": entry.description,
                "params": {k: float(v) for k, v in entry.params.items()},
                "buildable": entry.buildable,
                "compact": ref.compact,
                "einstein": ref.einstein,
                "kahler": ref.kahler,
                "spin": ref.spin,
                "chi": ref.chi,
                "tau": ref.tau,
            }
        )
    return out
