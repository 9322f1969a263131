"""Verification toolkit for four-dimensional gradient shrinking Ricci solitons.

Curvature on closed-form charts, Chern-Gauss-Bonnet and signature integrals,
soliton checks, and integer-level obstruction rules for 4-manifolds.
"""

from __future__ import annotations

from .errors import ToolkitError
from .forms import KAPPA_W, CurvatureOperatorMatrix, curvature_operator, hodge_star, sd_projectors
from .invariants import InvariantReport, QuadratureSpec, derdzinski_check, integrate_scalar, invariant_report
from .soliton import PotentialField, SolitonCandidate, identity_suite, normalize, residual, sufficient_report
from .tensor import ChartAtlas, CurvatureBundle, MetricChart, curvature_bundle, levi_civita
from .topology import FourManifoldClass, block, connected_sum, obstruction_report, parse_sum

__version__ = "0.1.0"

__all__ = [
    "KAPPA_W",
    "ChartAtlas",
    "CurvatureBundle",
    "CurvatureOperatorMatrix",
    "FourManifoldClass",
    "InvariantReport",
    "MetricChart",
    "PotentialField",
    "QuadratureSpec",
    "SolitonCandidate",
    "ToolkitError",
    "block",
    "connected_sum",
    "curvature_bundle",
    "curvature_operator",
    "derdzinski_check",
    "hodge_star",
    "identity_suite",
    "integrate_scalar",
    "invariant_report",
    "levi_civita",
    "normalize",
    "obstruction_report",
    "parse_sum",
    "residual",
    "sd_projectors",
    "sufficient_report",
]
