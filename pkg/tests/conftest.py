from __future__ import annotations

import functools

import numpy as np
import pytest

from shrinker4 import zoo
from shrinker4.invariants import QuadratureSpec, invariant_report

COMPACT = ("round_s4", "fubini_study_cp2", "product_s2xs2", "flat_t4")
EINSTEIN_SHRINKERS = ("round_s4", "fubini_study_cp2", "product_s2xs2")


@functools.lru_cache(maxsize=None)
def built(name: str, **params):
    return zoo.build(name, **params)


@functools.lru_cache(maxsize=None)
def report(name: str, nodes: int = 24):
    atlas, _ = built(name)
    return invariant_report(atlas, QuadratureSpec(nodes=nodes))


def interior_points(chart, n, seed=0, margin=0.05):
    rng = np.random.default_rng(seed)
    lo = chart.box[:, 0] + margin * chart.widths
    hi = chart.box[:, 1] - margin * chart.widths
    return lo + (hi - lo) * rng.random((n, 4))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
