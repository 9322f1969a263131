"""Gradient shrinking Ricci soliton checks.

A candidate is a compact or non-compact atlas together with a potential f and
a constant rho; it is a soliton when ``Rc + Hess f = rho g`` holds pointwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import NormalizationRequiredError, NotShrinkingError, UnsupportedError
from .invariants import (
    SAMPLE_MARGIN,
    Estimate,
    InvariantReport,
    QuadratureSpec,
    chart_grid,
    invariant_report,
    sample_points,
)
from .tensor import (
    DIM,
    ChartAtlas,
    MetricChart,
    _fd_derivative,
    as_points,
    bundle_from_derivatives,
    christoffel,
    inner_norm,
)

LOG5 = math.log(5.0)
# Width of the "boundary" band around f_max - f_min = log 5.
OSC_BAND = 1e-8


@dataclass(frozen=True)
class PotentialField:
    """Potential function with its gradient and Hessian (coordinate partials), batch-evaluated."""

    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    d2f: Callable[[np.ndarray], np.ndarray]
    label: str = "f"

    @classmethod
    def constant(cls, c: float = 0.0) -> "PotentialField":
        def f(x):
            x = np.asarray(x, dtype=float)
            return np.full(x.shape[:-1], float(c))

        def df(x):
            return np.zeros(np.shape(x))

        def d2f(x):
            return np.zeros(np.shape(x) + (DIM,))

        return cls(f, df, d2f, label=f"constant({c:g})")

    @classmethod
    def quadratic(cls, A, b=None, c: float = 0.0) -> "PotentialField":
        """``f = 1/2 x^T A x + b.x + c`` with symmetric A."""
        A = np.asarray(A, dtype=float)
        A = 0.5 * (A + A.T)
        b = np.zeros(DIM) if b is None else np.asarray(b, dtype=float)

        def f(x):
            x = np.asarray(x, dtype=float)
            return 0.5 * np.einsum("...a,ab,...b->...", x, A, x) + x @ b + c

        def df(x):
            return np.asarray(x, dtype=float) @ A + b

        def d2f(x):
            x = np.asarray(x, dtype=float)
            return np.broadcast_to(A, x.shape[:-1] + (DIM, DIM)).copy()

        return cls(f, df, d2f, label="quadratic")

    @classmethod
    def gaussian(cls) -> "PotentialField":
        """``|x|^2 / 4`` on flat coordinates."""
        field_ = cls.quadratic(0.5 * np.eye(DIM))
        return cls(field_.f, field_.df, field_.d2f, label="|x|^2/4")

    @classmethod
    def from_function(cls, f, step: float = 1e-4, label: str = "f") -> "PotentialField":
        """Derivatives by fourth-order central differences with absolute ``step``."""
        h = np.full(DIM, step)
        df = _fd_derivative(f, h)
        return cls(f, df, _fd_derivative(df, h), label=label)


@dataclass(frozen=True)
class SolitonCandidate:
    atlas: ChartAtlas
    f: PotentialField
    rho: float

    @property
    def shrinking(self) -> bool:
        return self.rho > 0

    @property
    def normalized(self) -> bool:
        return abs(self.rho - 0.5) <= 1e-12


def _chart(c: SolitonCandidate, chart: int | MetricChart) -> MetricChart:
    return chart if isinstance(chart, MetricChart) else c.atlas.charts[chart]


def residual(c: SolitonCandidate, p, chart: int | MetricChart = 0):
    """``(Rc + Hess f - rho g, |.|)`` at chart point(s) ``p``; the norm is the metric norm."""
    ch = _chart(c, chart)
    x, single = as_points(ch, p)
    b = bundle_from_derivatives(*ch.evaluate(x))
    df = np.asarray(c.f.df(x), dtype=float)
    hess = np.asarray(c.f.d2f(x), dtype=float) - np.einsum("...cab,...c->...ab", b.gamma, df)
    hess = 0.5 * (hess + np.swapaxes(hess, -1, -2))
    T = b.rc + hess - c.rho * b.metric
    norm = np.sqrt(np.maximum(inner_norm(b.metric, T, T), 0.0))
    if single:
        return T[0], float(norm[0])
    return T, norm


def _scalar_at(chart: MetricChart, x):
    return bundle_from_derivatives(*chart.evaluate(x)).scalar


@dataclass(frozen=True)
class IdentityReport:
    trace: float  # max |R + lap f - 4 rho|
    gradient: float  # max |1/2 dR - Rc(grad f, .)|
    conserved_spread: float  # max - min of |grad f|^2 + R - 2 rho f
    samples: int

    def passed(self, tol: float = 1e-7) -> bool:
        return max(self.trace, self.gradient, self.conserved_spread) < tol


def identity_suite(
    c: SolitonCandidate, samples=100, *, seed: int = 0, rel_step: float = 3e-3
) -> IdentityReport:
    """Deviations of the three identities implied by the soliton equation.

    dR is taken by fourth-order central differences of the analytic scalar
    curvature with step ``rel_step`` times the box width.
    """
    if isinstance(samples, int):
        groups = sample_points(c.atlas, samples, np.random.default_rng(seed), margin=SAMPLE_MARGIN)
    else:
        groups = list(samples)
    trace = grad = 0.0
    q_min, q_max = math.inf, -math.inf
    total = 0
    for ch, x in groups:
        if len(x) == 0:
            continue
        x, _ = as_points(ch, x)
        b = bundle_from_derivatives(*ch.evaluate(x))
        gamma = christoffel(b.inverse, ch.dg(x))
        df = np.asarray(c.f.df(x), dtype=float)
        hess = np.asarray(c.f.d2f(x), dtype=float) - np.einsum("...cab,...c->...ab", gamma, df)
        lap = np.einsum("...ab,...ab->...", b.inverse, hess)
        trace = max(trace, float(np.max(np.abs(b.scalar + lap - 4 * c.rho))))

        dR = _fd_derivative(lambda y: _scalar_at(ch, y), rel_step * ch.widths)(x)
        grad_f_up = np.einsum("...ab,...b->...a", b.inverse, df)
        V = 0.5 * dR - np.einsum("...ab,...b->...a", b.rc, grad_f_up)
        vnorm = np.sqrt(np.maximum(np.einsum("...ab,...a,...b->...", b.inverse, V, V), 0.0))
        grad = max(grad, float(np.max(vnorm)))

        q = np.einsum("...a,...a->...", grad_f_up, df) + b.scalar - 2 * c.rho * np.asarray(c.f.f(x), dtype=float)
        q_min = min(q_min, float(np.min(q)))
        q_max = max(q_max, float(np.max(q)))
        total += len(x)
    return IdentityReport(trace, grad, q_max - q_min, total)


def normalize(c: SolitonCandidate) -> SolitonCandidate:
    """Rescale to rho = 1/2: metric ``lam * g`` with ``lam = 2 rho``; f unchanged."""
    if not c.rho > 0:
        raise NotShrinkingError(
            f"rho = {c.rho!r}: steady and expanding compact solitons are Einstein; only shrinkers are normalized"
        )
    if c.rho == 0.5:
        return c
    lam = 2.0 * c.rho
    return SolitonCandidate(c.atlas.scaled(lam), c.f, 0.5)


def _verdict(margin: float, tol: float) -> str:
    if margin > tol:
        return "pass"
    if margin >= -tol:
        return "boundary"
    return "fail"


@dataclass(frozen=True)
class SufficientReport:
    scalar_positive: bool  # surrogate for positive Yamabe invariant
    scalar_min: float
    r2_bound: str  # int R^2 vs 6 Vol
    r2_margin: Estimate  # 6 Vol - int R^2
    oscillation_bound: str  # f_max - f_min vs log 5
    oscillation: float
    sigma2: str
    sigma2_integral: Estimate
    class_a: bool
    ricci_min: float | None  # min Ricci eigenvalue, sampled when class_a holds
    ricci_positive: bool | None
    weyl_oscillation_slack: Estimate
    weyl_oscillation_equality: bool
    implication_ok: bool  # oscillation_bound holds => r2_bound holds
    class_a_matches_strict_r2: bool  # class_a <=> strict r2_bound
    r2_equality_matches_sigma2_zero: bool  # r2_bound equality <=> int sigma_2 = 0
    ht_verdict: dict
    invariants: InvariantReport = field(repr=False)
    yamabe_surrogate: str = "min R > 0 over quadrature nodes and samples"

    def as_dict(self) -> dict:
        out = {}
        for name in self.__dataclass_fields__:
            val = getattr(self, name)
            if isinstance(val, Estimate):
                val = val.as_dict()
            elif isinstance(val, InvariantReport):
                val = val.as_dict()
            out[name] = val
        return out


def _min_scalar_and_ricci(atlas: ChartAtlas, spec: QuadratureSpec, groups):
    r_min = math.inf
    ric_min = math.inf
    for chart in atlas.charts:
        nodes, _ = chart_grid(chart, spec.nodes, collapse_cyclic=True)
        for start in range(0, len(nodes), spec.chunk):
            r_min = min(r_min, float(np.min(_scalar_at(chart, nodes[start : start + spec.chunk]))))
    for chart, x in groups:
        b = bundle_from_derivatives(*chart.evaluate(x))
        r_min = min(r_min, float(np.min(b.scalar)))
        # eigenvalues of Rc relative to g
        E = np.linalg.cholesky(b.metric)
        Einv = np.linalg.inv(E)
        sym = Einv @ b.rc @ np.swapaxes(Einv, -1, -2)
        ric_min = min(ric_min, float(np.min(np.linalg.eigvalsh(sym))))
    return r_min, ric_min


def _f_range(c: SolitonCandidate, spec: QuadratureSpec, groups):
    lo, hi = math.inf, -math.inf
    for chart in c.atlas.charts:
        nodes, _ = chart_grid(chart, spec.nodes, collapse_cyclic=False)
        for start in range(0, len(nodes), 4 * spec.chunk):
            vals = np.asarray(c.f.f(nodes[start : start + 4 * spec.chunk]), dtype=float)
            lo, hi = min(lo, float(np.min(vals))), max(hi, float(np.max(vals)))
    for _, x in groups:
        vals = np.asarray(c.f.f(x), dtype=float)
        lo, hi = min(lo, float(np.min(vals))), max(hi, float(np.max(vals)))
    return lo, hi


def sufficient_report(
    c: SolitonCandidate,
    spec: QuadratureSpec = QuadratureSpec(),
    *,
    samples: int = 10_000,
    seed: int = 0,
    report: InvariantReport | None = None,
) -> SufficientReport:
    """Evaluate every Hitchin-Thorpe sufficient condition on a normalized compact candidate."""
    if not c.normalized:
        raise NormalizationRequiredError(f"candidate has rho = {c.rho!r}; call normalize() first")
    if not c.atlas.compact:
        raise UnsupportedError("sufficient conditions are integral statements; atlas is not compact")
    inv = report if report is not None else invariant_report(c.atlas, spec)
    rng = np.random.default_rng(seed)
    groups = sample_points(c.atlas, samples, rng)
    # f extremes may sit near the faces; f itself is well conditioned there
    f_groups = sample_points(c.atlas, samples, rng, margin=1e-6)
    vol = inv.volume
    scale_tol = spec.atol * max(1.0, vol.value)

    r_min, ric_min = _min_scalar_and_ricci(c.atlas, spec, groups)
    scalar_positive = r_min > 0

    r2_margin = vol * 6 - inv.r2
    r2_bound = _verdict(r2_margin.value, 10 * r2_margin.error + scale_tol)

    f_lo, f_hi = _f_range(c, spec, f_groups)
    osc = f_hi - f_lo
    oscillation_bound = _verdict(LOG5 - osc, OSC_BAND)

    sigma2 = _verdict(inv.sigma2.value, 10 * inv.sigma2.error + scale_tol)
    class_a = scalar_positive and sigma2 == "pass"

    slack = (
        Estimate(8 * math.pi**2 * inv.chi_snapped, 0.0)
        - (inv.wplus2 + inv.wminus2)
        - vol * ((5.0 - math.exp(osc)) / 24.0)
    )
    slack_tol = 10 * slack.error + scale_tol

    ht = {}
    for key, est in (("2chi+3|tau|", inv.ht_plus_abs), ("2chi-3|tau|", inv.ht_minus_abs)):
        ht[key] = {"value": est.value, "error": est.error, "verdict": _verdict(est.value, 10 * est.error + spec.atol)}

    return SufficientReport(
        scalar_positive=scalar_positive,
        scalar_min=r_min,
        r2_bound=r2_bound,
        r2_margin=r2_margin,
        oscillation_bound=oscillation_bound,
        oscillation=osc,
        sigma2=sigma2,
        sigma2_integral=inv.sigma2,
        class_a=class_a,
        ricci_min=ric_min if class_a else None,
        ricci_positive=(ric_min > 0) if class_a else None,
        weyl_oscillation_slack=slack,
        weyl_oscillation_equality=abs(slack.value) <= slack_tol,
        implication_ok=(oscillation_bound == "fail") or (r2_bound != "fail"),
        class_a_matches_strict_r2=class_a == (r2_bound == "pass"),
        r2_equality_matches_sigma2_zero=(r2_bound == "boundary") == (sigma2 == "boundary"),
        ht_verdict=ht,
        invariants=inv,
    )
