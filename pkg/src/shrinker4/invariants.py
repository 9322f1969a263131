"""Tensor-product Gauss-Legendre quadrature over chart atlases and the
curvature integrals built on it (Euler characteristic, signature,
Hitchin-Thorpe combinations, sigma_2, ...).

Reductions are deterministic: cells are evaluated in fixed-size chunks
(optionally on a thread pool) and the weighted values are summed with
``math.fsum``, which is exactly rounded and therefore independent of order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import forms
from .errors import EvaluationError, InconsistencyError, UnsupportedError
from .tensor import ChartAtlas, MetricChart, bundle_from_derivatives

PI2 = math.pi**2

# Relative roundoff floor added to every refinement error estimate: pointwise
# curvature carries ~1e-14 relative error, so differences below this are noise.
ROUNDOFF_FLOOR = 1e-12

# Default relative distance of pointwise samples from chart faces.  Chart
# metrics become ill-conditioned near coordinate seams (e.g. det g ~ sin^2
# theta), which costs digits in second-derivative quantities there.
SAMPLE_MARGIN = 0.05


@dataclass(frozen=True)
class QuadratureSpec:
    nodes: int = 24
    refine: int = 2
    atol: float = 1e-6
    chunk: int = 16384
    workers: int = 1

    def __post_init__(self):
        if self.nodes < 2:
            raise ValueError("node count must be at least 2")
        if self.refine < 2:
            raise ValueError("refinement factor must be at least 2")

    def refined(self) -> "QuadratureSpec":
        return QuadratureSpec(self.nodes * self.refine, self.refine, self.atol, self.chunk, self.workers)


@dataclass(frozen=True)
class Estimate:
    value: float
    error: float

    def __add__(self, other):
        if isinstance(other, Estimate):
            return Estimate(self.value + other.value, self.error + other.error)
        return Estimate(self.value + other, self.error)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Estimate):
            return Estimate(self.value - other.value, self.error + other.error)
        return Estimate(self.value - other, self.error)

    def __mul__(self, k: float):
        return Estimate(self.value * k, self.error * abs(k))

    __rmul__ = __mul__

    @property
    def nearest_integer(self) -> int:
        return int(round(self.value))

    @property
    def integer_distance(self) -> float:
        return abs(self.value - round(self.value))

    def as_dict(self):
        return {"value": self.value, "error": self.error}


def _axis_rule(lo: float, hi: float, n: int, collapse: bool):
    if collapse:
        return np.array([0.5 * (lo + hi)]), np.array([hi - lo])
    t, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return 0.5 * (lo + hi) + half * t, half * w


def chart_grid(chart: MetricChart, n: int, collapse_cyclic: bool = False):
    """Nodes ``(M, 4)`` and weights ``(M,)`` of the tensor-product rule on a chart box."""
    rules = [
        _axis_rule(chart.box[k, 0], chart.box[k, 1], n, collapse_cyclic and k in chart.cyclic) for k in range(4)
    ]
    mesh = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wmesh = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=-1)
    weights = np.prod(np.stack([w.ravel() for w in wmesh], axis=-1), axis=-1)
    return nodes, weights


def _volume_density(g: np.ndarray) -> np.ndarray:
    return np.sqrt(np.linalg.det(g))


def _integrate_columns(atlas: ChartAtlas, evaluate, n_nodes: int, spec: QuadratureSpec, collapse: bool):
    """Integrate a vector-valued pointwise function over the atlas.

    ``evaluate(chart, points) -> (values (M, k), sqrt_det_g (M,))``.
    Returns ``(sums (k,), abs_sums (k,))``.
    """
    if not atlas.compact:
        raise UnsupportedError(f"atlas {atlas.name!r} is not compact; integrals are not offered")
    per_chunk: list = []
    jobs = []
    for chart in atlas.charts:
        nodes, weights = chart_grid(chart, n_nodes, collapse)
        for start in range(0, len(nodes), spec.chunk):
            jobs.append((chart, nodes[start : start + spec.chunk], weights[start : start + spec.chunk]))

    def run(job):
        chart, x, w = job
        vals, density = evaluate(chart, x)
        vals = np.asarray(vals, dtype=float)
        if vals.ndim == 1:
            vals = vals[:, None]
        bad = ~np.isfinite(vals).all(axis=1)
        if np.any(bad):
            point = x[np.argmax(bad)]
            raise EvaluationError(f"non-finite integrand at chart point {point.tolist()}", point=point)
        return vals * (w * density)[:, None]

    if spec.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(spec.workers) as pool:
            per_chunk = list(pool.map(run, jobs))
    else:
        per_chunk = [run(job) for job in jobs]
    weighted = np.concatenate(per_chunk, axis=0)
    sums = np.array([math.fsum(weighted[:, k]) for k in range(weighted.shape[1])])
    abs_sums = np.array([math.fsum(np.abs(weighted[:, k])) for k in range(weighted.shape[1])])
    return sums, abs_sums


def _with_refinement(atlas, evaluate, spec: QuadratureSpec, collapse: bool):
    base, mass = _integrate_columns(atlas, evaluate, spec.nodes, spec, collapse)
    fine, _ = _integrate_columns(atlas, evaluate, spec.nodes * spec.refine, spec, collapse)
    err = np.abs(base - fine) + ROUNDOFF_FLOOR * mass
    return base, err


def integrate_scalar(
    atlas: ChartAtlas,
    field: Callable[[MetricChart, np.ndarray], np.ndarray],
    spec: QuadratureSpec = QuadratureSpec(),
    *,
    metric_only: bool = False,
) -> Estimate:
    """Integral of ``field(chart, points)`` against dV_g over the atlas.

    ``metric_only=True`` declares that the field depends on the point only
    through the metric, which allows cyclic chart axes to be integrated
    exactly with a single node.
    """

    def evaluate(chart, x):
        return field(chart, x), _volume_density(chart.g(x))

    value, err = _with_refinement(atlas, evaluate, spec, metric_only)
    return Estimate(float(value[0]), float(err[0]))


# Integrand columns evaluated in one pass per node.
_COLUMNS = ("one", "R2", "rc2", "rc0_2", "wp2", "wm2", "sigma2")


def _curvature_columns(chart: MetricChart, x: np.ndarray, kappa: float):
    g, dg, d2g = chart.evaluate(x)
    b = bundle_from_derivatives(g, dg, d2g)
    op = forms.curvature_operator(b, chart.orientation)
    wp, wm = forms.weyl_sd_norms(op, kappa)
    ginv = b.inverse
    rc_up = np.einsum("...ab,...bc->...ac", ginv, b.rc)
    rc2 = np.einsum("...ab,...ba->...", rc_up, rc_up)
    rc0_up = np.einsum("...ab,...bc->...ac", ginv, b.rc0)
    rc0_2 = np.einsum("...ab,...ba->...", rc0_up, rc0_up)
    R = b.scalar
    sigma2 = (R**2 - 3.0 * rc2) / 6.0
    cols = np.stack([np.ones_like(R), R**2, rc2, rc0_2, wp, wm, sigma2], axis=-1)
    return cols, _volume_density(g)


def curvature_integrals(atlas: ChartAtlas, spec: QuadratureSpec = QuadratureSpec(), kappa: float = forms.KAPPA_W):
    """Raw integrals of the basic curvature integrands, keyed by column name."""
    value, err = _with_refinement(atlas, lambda c, x: _curvature_columns(c, x, kappa), spec, True)
    return {name: Estimate(float(v), float(e)) for name, v, e in zip(_COLUMNS, value, err)}


@dataclass(frozen=True)
class InvariantReport:
    volume: Estimate
    chi: Estimate
    tau: Estimate
    ht_plus_abs: Estimate  # 2 chi + 3 |tau|
    ht_minus_abs: Estimate  # 2 chi - 3 |tau|
    two_chi_plus_three_tau: Estimate
    two_chi_minus_three_tau: Estimate
    r2: Estimate
    rc2: Estimate
    sigma2: Estimate
    wplus2: Estimate
    wminus2: Estimate
    ricci_identity_residual: Estimate
    ht_closing_plus: Estimate  # int 24|W+|^2 - R^2 + 6
    ht_closing_minus: Estimate  # int 24|W-|^2 - R^2 + 6
    nodes: int

    @property
    def chi_snapped(self) -> int:
        return self.chi.nearest_integer

    @property
    def tau_snapped(self) -> int:
        return self.tau.nearest_integer

    def near_integer(self, factor: float = 10.0) -> bool:
        return all(e.integer_distance <= factor * e.error for e in (self.chi, self.tau))

    def as_dict(self) -> dict:
        out = {}
        for name, val in asdict(self).items():
            out[name] = val
        out["chi_snapped"] = self.chi_snapped
        out["tau_snapped"] = self.tau_snapped
        out["near_integer"] = self.near_integer()
        return out


def invariant_report(
    atlas: ChartAtlas, spec: QuadratureSpec = QuadratureSpec(), kappa: float = forms.KAPPA_W
) -> InvariantReport:
    """Evaluate every curvature integral of interest on a compact atlas."""
    I = curvature_integrals(atlas, spec, kappa)
    vol, r2, rc2, rc0_2, wp, wm = I["one"], I["R2"], I["rc2"], I["rc0_2"], I["wp2"], I["wm2"]
    chi = (wp + wm + r2 * (1 / 24) - rc0_2 * 0.5) * (1 / (8 * PI2))
    tau = (wp - wm) * (1 / (12 * PI2))
    ht_p = (wp * 2 + r2 * (1 / 24) - rc0_2 * 0.5) * (1 / (4 * PI2))
    ht_m = (wm * 2 + r2 * (1 / 24) - rc0_2 * 0.5) * (1 / (4 * PI2))
    hi, lo = (ht_p, ht_m) if ht_p.value >= ht_m.value else (ht_m, ht_p)
    return InvariantReport(
        volume=vol,
        chi=chi,
        tau=tau,
        ht_plus_abs=hi,
        ht_minus_abs=lo,
        two_chi_plus_three_tau=ht_p,
        two_chi_minus_three_tau=ht_m,
        r2=r2,
        rc2=rc2,
        sigma2=I["sigma2"],
        wplus2=wp,
        wminus2=wm,
        ricci_identity_residual=r2 * 0.5 - rc2 - vol,
        ht_closing_plus=wp * 24 - r2 + vol * 6,
        ht_closing_minus=wm * 24 - r2 + vol * 6,
        nodes=spec.nodes,
    )


def sigma2_integral(atlas: ChartAtlas, spec: QuadratureSpec = QuadratureSpec(), route: str = "direct") -> Estimate:
    """Integral of sigma_2 = (R^2 - 3|Rc|^2)/6.

    ``route="volume"`` instead returns (Vol - (1/6) int R^2) / 2.  On a
    shrinker normalized to rho = 1/2, int |Rc|^2 = 1/2 int R^2 - Vol, so this
    equals the direct value.
    """
    I = curvature_integrals(atlas, spec)
    if route == "direct":
        return I["sigma2"]
    if route == "volume":
        return (I["one"] - I["R2"] * (1 / 6)) * 0.5
    raise ValueError(f"unknown route {route!r}")


@dataclass(frozen=True)
class DerdzinskiResult:
    deviation: float
    passed: bool
    kahler_tagged: bool
    samples: int
    tolerance: float
    absolute: bool


def sample_points(atlas: ChartAtlas, count: int, rng: np.random.Generator, margin: float = SAMPLE_MARGIN):
    """Uniform random points in the chart boxes, kept ``margin`` (relative) away from faces.

    Returns a list of ``(chart, points)`` pairs with counts split evenly.
    """
    out = []
    k = len(atlas.charts)
    for i, chart in enumerate(atlas.charts):
        m = count // k + (1 if i < count % k else 0)
        lo = chart.box[:, 0] + margin * chart.widths
        hi = chart.box[:, 1] - margin * chart.widths
        out.append((chart, lo + (hi - lo) * rng.random((m, 4))))
    return out


def derdzinski_check(
    atlas: ChartAtlas, samples=1000, *, seed: int = 0, tol: float = 1e-6, margin: float = SAMPLE_MARGIN
) -> DerdzinskiResult:
    """Maximum relative deviation of ``24|W+|^2 - R^2`` over sample points.

    ``samples`` is a count (random points, seeded) or a list of
    ``(chart, points)`` pairs.  Where R vanishes the absolute deviation is used.
    """
    if isinstance(samples, int):
        groups = sample_points(atlas, samples, np.random.default_rng(seed), margin)
    else:
        groups = list(samples)
    worst = 0.0
    absolute = False
    total = 0
    for chart, x in groups:
        if len(x) == 0:
            continue
        b = bundle_from_derivatives(*chart.evaluate(x))
        wp, _ = forms.weyl_sd_norms(forms.curvature_operator(b, chart.orientation))
        R2 = b.scalar**2
        diff = np.abs(24 * wp - R2)
        zero = R2 <= 1e-24
        absolute = absolute or bool(np.any(zero))
        rel = np.where(zero, diff, diff / np.where(zero, 1.0, R2))
        worst = max(worst, float(np.max(rel)))
        total += len(x)
    if total == 0:
        raise InconsistencyError("no sample points")
    return DerdzinskiResult(worst, worst < tol, atlas.kahler, total, tol, absolute)
