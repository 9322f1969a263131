"""Chart-based 4-metrics and pointwise curvature.

Index conventions (fixed for the whole package):

* ``dg[..., a, b, c] = d_c g_ab`` and ``d2g[..., a, b, c, d] = d_c d_d g_ab``
  (derivative indices last).
* ``gamma[..., a, b, c]`` is the Christoffel symbol Gamma^a_bc.
* ``R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb``
  and ``rm[..., a, b, c, d] = g_ae R^e_bcd``, so that ``rc_ab = R^c_acb`` and the
  unit round sphere has ``rm_abcd = g_ac g_bd - g_ad g_bc`` (positive scalar curvature).

Every function accepts a single point of shape ``(4,)`` or a batch ``(N, 4)``
and returns arrays with a matching leading batch axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateMetricError, DomainError, ShapeError

DIM = 4

ArrayFn = Callable[[np.ndarray], np.ndarray]


def _fd_derivative(fn: ArrayFn, h: np.ndarray) -> ArrayFn:
    """Fourth-order central difference of ``fn`` along every coordinate.

    The derivative index is appended last.
    """

    def deriv(x):
        x = np.asarray(x, dtype=float)
        parts = []
        for c in range(DIM):
            e = np.zeros(DIM)
            e[c] = h[c]
            val = (fn(x - 2 * e) - 8 * fn(x - e) + 8 * fn(x + e) - fn(x + 2 * e)) / (12 * h[c])
            parts.append(val)
        return np.stack(parts, axis=-1)

    return deriv


@dataclass(frozen=True)
class MetricChart:
    """One coordinate box carrying a Riemannian metric and its derivatives.

    ``cyclic`` lists coordinate axes on which the metric does not depend
    (Killing coordinates); quadrature of metric-derived integrands may
    collapse them.
    """

    box: np.ndarray
    g: ArrayFn
    dg: ArrayFn
    d2g: ArrayFn
    orientation: int = 1
    measure_note: str = ""
    cyclic: tuple[int, ...] = ()
    name: str = "chart"
    jet: ArrayFn | None = None

    def __post_init__(self):
        box = np.asarray(self.box, dtype=float)
        if box.shape != (DIM, 2) or np.any(box[:, 0] >= box[:, 1]):
            raise ShapeError(f"chart box must be 4 increasing intervals, got {self.box!r}")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        object.__setattr__(self, "box", box)

    @property
    def widths(self) -> np.ndarray:
        return self.box[:, 1] - self.box[:, 0]

    def evaluate(self, x):
        """``(g, dg, d2g)`` at a batch of points, in one pass when the chart provides a jet."""
        if self.jet is not None:
            return self.jet(x)
        return self.g(x), self.dg(x), self.d2g(x)

    def contains(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.all((x > self.box[:, 0]) & (x < self.box[:, 1]), axis=-1)

    def scaled(self, lam: float) -> "MetricChart":
        """The same chart with metric ``lam * g``."""
        g, dg, d2g, jet = self.g, self.dg, self.d2g, self.jet
        scaled_jet = None
        if jet is not None:

            def scaled_jet(x):
                return tuple(lam * a for a in jet(x))

        return replace(
            self,
            g=lambda x: lam * g(x),
            dg=lambda x: lam * dg(x),
            d2g=lambda x: lam * d2g(x),
            jet=scaled_jet,
            name=f"{self.name}*{lam:g}",
        )

    def with_orientation(self, sign: int) -> "MetricChart":
        return replace(self, orientation=sign)

    def with_finite_differences(self, rel_step: float = 1e-4) -> "MetricChart":
        """Replace dg and d2g by central differences of g (cross-check path)."""
        return MetricChart.from_metric(
            self.box,
            self.g,
            orientation=self.orientation,
            measure_note=self.measure_note,
            cyclic=self.cyclic,
            name=f"{self.name}[fd]",
            rel_step=rel_step,
        )

    @classmethod
    def from_metric(
        cls,
        box,
        g: ArrayFn,
        *,
        orientation: int = 1,
        measure_note: str = "",
        cyclic: Sequence[int] = (),
        name: str = "user",
        rel_step: float = 1e-4,
    ) -> "MetricChart":
        """Build a chart from metric components alone; derivatives by finite differences."""
        box = np.asarray(box, dtype=float)
        h = rel_step * (box[:, 1] - box[:, 0])
        dg = _fd_derivative(g, h)
        d2g = _fd_derivative(dg, h)
        return cls(box, g, dg, d2g, orientation, measure_note, tuple(cyclic), name)


@dataclass(frozen=True)
class ChartAtlas:
    """A 4-manifold presented by charts that are disjoint up to measure zero."""

    charts: tuple[MetricChart, ...]
    compact: bool
    name: str
    kahler: bool = False
    notes: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        charts = tuple(self.charts)
        if not charts:
            raise ValueError("an atlas needs at least one chart")
        object.__setattr__(self, "charts", charts)

    def scaled(self, lam: float) -> "ChartAtlas":
        return replace(self, charts=tuple(c.scaled(lam) for c in self.charts), name=f"{self.name}*{lam:g}")

    def with_orientation(self, sign: int) -> "ChartAtlas":
        return replace(self, charts=tuple(c.with_orientation(sign * c.orientation) for c in self.charts))


@dataclass(frozen=True)
class CurvatureBundle:
    """Pointwise curvature quantities (batched along the leading axis when present).

    ``weyl`` is computed on first access.
    """

    metric: np.ndarray
    inverse: np.ndarray
    gamma: np.ndarray
    rm: np.ndarray
    rc: np.ndarray
    scalar: np.ndarray
    rc0: np.ndarray

    @cached_property
    def weyl(self) -> np.ndarray:
        """W = Rm - 1/2 (Rc0 o g) - R/24 (g o g)."""
        g = self.metric
        return (
            self.rm
            - 0.5 * kulkarni_nomizu(self.rc0, g)
            - (self.scalar / 24.0)[..., None, None, None, None] * kulkarni_nomizu(g, g)
        )


def as_points(chart: MetricChart, p) -> tuple[np.ndarray, bool]:
    """Validate chart points; returns ``(points (N, 4), was_single)``."""
    x = np.asarray(p, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[-1] != DIM or x.ndim != 2:
        raise ShapeError(f"points must have shape (4,) or (N, 4), got {np.shape(p)}")
    inside = chart.contains(x)
    if not np.all(inside):
        bad = x[np.argmin(inside)]
        raise DomainError(f"point {bad.tolist()} is not strictly inside chart {chart.name!r}")
    return x, single


def _unbatch(arrays, single):
    if single:
        return tuple(a[0] for a in arrays)
    return tuple(arrays)


# Smallest admissible eigenvalue ratio; Gauss-Legendre nodes near sphere poles
# reach ~1e-20 legitimately while the integrands stay bounded.
DEGENERACY_RATIO = 1e-28


def metric_inverse(g: np.ndarray) -> np.ndarray:
    """Inverse metric, raising on non positive-definite input."""
    eig = np.linalg.eigvalsh(g)
    if not np.all(np.isfinite(eig)) or np.any(
        eig <= DEGENERACY_RATIO * np.max(np.abs(eig), axis=-1, keepdims=True)
    ):
        raise DegenerateMetricError("metric is singular or not positive-definite")
    return np.linalg.inv(g)


def _first_kind(dg: np.ndarray) -> np.ndarray:
    """Gamma_dbc = 1/2 (d_b g_dc + d_c g_db - d_d g_bc), lowered index first."""
    return 0.5 * (np.swapaxes(dg, -1, -2) + dg - np.moveaxis(dg, -1, -3))


def christoffel(ginv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    """Gamma^a_bc = 1/2 g^ad (d_b g_dc + d_c g_db - d_d g_bc)."""
    first = _first_kind(dg)
    return (ginv @ first.reshape(first.shape[:-3] + (4, 16))).reshape(first.shape)


def riemann(g, ginv, dg, d2g):
    """Return ``(gamma, rm)`` from the metric and its first two derivatives."""
    batch = g.shape[:-2]
    first = _first_kind(dg)
    gamma = (ginv @ first.reshape(batch + (4, 16))).reshape(batch + (4, 4, 4))
    # d_e of the lowered symbols, e last
    dfirst = 0.5 * (np.swapaxes(d2g, -2, -3) + d2g - np.moveaxis(d2g, -2, -4))
    # d_e g^ad = -g^ap d_e g_pq g^qd, stacked with e leading
    dg_e = np.moveaxis(dg, -1, -3)
    dginv_e = -(ginv[..., None, :, :] @ dg_e @ ginv[..., None, :, :])
    # d_e Gamma^a_bc = (d_e g^ad) Gamma_dbc + g^ad d_e Gamma_dbc
    term1 = dginv_e @ first.reshape(batch + (1, 4, 16))  # [e, a, bc]
    term1 = np.moveaxis(term1.reshape(batch + (4, 4, 4, 4)), -4, -1)
    term2 = (ginv @ dfirst.reshape(batch + (4, 64))).reshape(batch + (4, 4, 4, 4))
    dgamma = term1 + term2  # [a, b, c, e]
    # R^a_bcd = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
    # dc[a, b, c, d] = dgamma[a, d, b, c]; dd[a, b, c, d] = dgamma[a, c, b, d]
    dc = np.moveaxis(dgamma, (-3, -2, -1), (-1, -3, -2))
    dd = np.moveaxis(dgamma, (-3, -2, -1), (-2, -3, -1))
    gg = (gamma.reshape(batch + (16, 4)) @ gamma.reshape(batch + (4, 16))).reshape(batch + (4, 4, 4, 4))
    # gg[a, c, d, b] = G^a_ce G^e_db
    quad = np.moveaxis(gg, -1, -3)  # [a, b, c, d]
    r_up = dc - dd + quad - np.swapaxes(quad, -1, -2)
    rm = (g @ r_up.reshape(batch + (4, 64))).reshape(batch + (4, 4, 4, 4))
    return gamma, rm


def kulkarni_nomizu(h: np.ndarray, k: np.ndarray) -> np.ndarray:
    """(h o k)_abcd = h_ac k_bd + h_bd k_ac - h_ad k_bc - h_bc k_ad."""

    def outer(p, q):  # p_ac q_bd at [a, b, c, d]
        return p[..., :, None, :, None] * q[..., None, :, None, :]

    t = outer(h, k) + outer(k, h)
    return t - np.swapaxes(t, -1, -2)


def bundle_from_derivatives(g, dg, d2g) -> CurvatureBundle:
    ginv = metric_inverse(g)
    gamma, rm = riemann(g, ginv, dg, d2g)
    # Rc_ab = g^cd Rm_dacb
    rc = np.einsum("...cd,...dacb->...ab", ginv, rm)
    rc = 0.5 * (rc + np.swapaxes(rc, -1, -2))
    scalar = np.sum(ginv * rc, axis=(-2, -1))
    rc0 = rc - 0.25 * scalar[..., None, None] * g
    return CurvatureBundle(g, ginv, gamma, rm, rc, scalar, rc0)


def _slice_bundle(b: CurvatureBundle, i) -> CurvatureBundle:
    return CurvatureBundle(*(getattr(b, f)[i] for f in b.__dataclass_fields__))


def levi_civita(chart: MetricChart, p) -> np.ndarray:
    """Christoffel symbols Gamma^a_bc at chart point(s) ``p``."""
    x, single = as_points(chart, p)
    g = chart.g(x)
    gamma = christoffel(metric_inverse(g), chart.dg(x))
    return gamma[0] if single else gamma


def curvature_bundle(chart: MetricChart, p) -> CurvatureBundle:
    """All pointwise curvature quantities at chart point(s) ``p``."""
    x, single = as_points(chart, p)
    b = bundle_from_derivatives(*chart.evaluate(x))
    return _slice_bundle(b, 0) if single else b


def hessian_laplacian(chart: MetricChart, f, p):
    """Return ``(df, hess, lap)``: the differential d_a f, the Hessian
    ``d_a d_b f - Gamma^c_ab d_c f`` and its metric trace."""
    x, single = as_points(chart, p)
    g = chart.g(x)
    ginv = metric_inverse(g)
    gamma = christoffel(ginv, chart.dg(x))
    df = np.asarray(f.df(x), dtype=float)
    d2f = np.asarray(f.d2f(x), dtype=float)
    hess = d2f - np.einsum("...cab,...c->...ab", gamma, df)
    hess = 0.5 * (hess + np.swapaxes(hess, -1, -2))
    lap = np.einsum("...ab,...ab->...", ginv, hess)
    return _unbatch((df, hess, lap), single)


def inner_norm(g, T, S) -> np.ndarray:
    """Full metric contraction <T, S> of two covariant tensors of equal valence.

    ``g`` may carry batch axes; the valence is inferred from the trailing axes.
    """
    g = np.asarray(g, dtype=float)
    T = np.asarray(T, dtype=float)
    S = np.asarray(S, dtype=float)
    if T.shape != S.shape:
        raise ShapeError(f"valence mismatch: {T.shape} vs {S.shape}")
    batch = g.ndim - 2
    rank = T.ndim - batch
    if rank < 0 or T.shape[:batch] != g.shape[:batch] or any(n != DIM for n in T.shape[batch:]):
        raise ShapeError(f"tensor of shape {T.shape} is not compatible with metric {g.shape}")
    ginv = np.linalg.inv(g)
    # pad ginv so its batch axes line up with T's batch axes
    ginv = ginv.reshape(g.shape[:batch] + (1,) * max(rank - 1, 0) + (DIM, DIM))
    out = T
    # raise every index of T in turn, then contract with S
    for k in range(rank):
        out = np.moveaxis(np.einsum("...ij,...j->...i", ginv, np.moveaxis(out, batch + k, -1)), -1, batch + k)
    axes = tuple(range(batch, batch + rank))
    return np.sum(out * S, axis=axes)


def raise_first(ginv, rm):
    """Rm with its first index raised, R^a_bcd."""
    return np.einsum("...ae,...ebcd->...abcd", ginv, rm)
