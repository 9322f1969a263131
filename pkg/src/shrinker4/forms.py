"""2-forms on a 4-manifold: Hodge star, (anti-)self-dual projectors, curvature operator.

Two-form components are stored against the fixed pair ordering
``(01, 02, 03, 23, 31, 12)``.  With this ordering the flat-metric Hodge star
is the block-antidiagonal identity.

The curvature operator acts by ``phi_ab -> 1/2 Rm_abcd phi^cd`` and is
represented in an orthonormal basis of Lambda^+ (first three slots) and
Lambda^- (last three).  With that normalization the round unit sphere has
operator equal to the identity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateMetricError, InconsistencyError, ShapeError
from .tensor import CurvatureBundle, metric_inverse

PAIRS = ((0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2))

# Conversion constant between the Frobenius norm of the trace-free diagonal
# blocks (in the orthonormal Lambda^2 basis above) and |W^\pm|^2 as it enters
# the Euler and signature integrands.  Fixed by requiring tau(CP^2) = 1; see
# ``calibrate_weyl_constant`` and tests/test_acceptance.py.
KAPPA_W = 1.0


def _levi_civita_symbol() -> np.ndarray:
    eps = np.zeros((4, 4, 4, 4))
    for perm in itertools.permutations(range(4)):
        inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


EPSILON = _levi_civita_symbol()


def to_matrix(vec) -> np.ndarray:
    """6-vector of 2-form components -> antisymmetric 4x4 component matrix."""
    vec = np.asarray(vec, dtype=float)
    if vec.shape[-1] != 6:
        raise ShapeError(f"expected 6 components, got shape {vec.shape}")
    out = np.zeros(vec.shape[:-1] + (4, 4))
    for k, (i, j) in enumerate(PAIRS):
        out[..., i, j] = vec[..., k]
        out[..., j, i] = -vec[..., k]
    return out


def from_matrix(mat) -> np.ndarray:
    """Antisymmetric 4x4 component matrix -> 6-vector (antisymmetric part is used)."""
    mat = np.asarray(mat, dtype=float)
    if mat.shape[-2:] != (4, 4):
        raise ShapeError(f"expected (..., 4, 4), got {mat.shape}")
    return np.stack([0.5 * (mat[..., i, j] - mat[..., j, i]) for i, j in PAIRS], axis=-1)


def two_form_metric(g) -> np.ndarray:
    """Induced inner product on 2-forms in the pair basis: g^ac g^bd - g^ad g^bc."""
    ginv = metric_inverse(np.asarray(g, dtype=float))
    G = np.empty(ginv.shape[:-2] + (6, 6))
    for I, (a, b) in enumerate(PAIRS):
        for J, (c, d) in enumerate(PAIRS):
            G[..., I, J] = ginv[..., a, c] * ginv[..., b, d] - ginv[..., a, d] * ginv[..., b, c]
    return G


def hodge_star(g, orientation: int = 1) -> np.ndarray:
    """Matrix of * on 2-form components dx^a ^ dx^b at a point (or batch).

    ``(*w)_cd = 1/2 eps_abcd w^ab`` with ``eps = orientation * sqrt(det g) [abcd]``.
    """
    g = np.asarray(g, dtype=float)
    ginv = metric_inverse(g)
    vol = orientation * np.sqrt(np.linalg.det(g))
    # full[c, d, e, f] = sum_ab eps_abcd g^ae g^bf
    full = np.einsum("abcd,...ae,...bf->...cdef", EPSILON, ginv, ginv) * vol[..., None, None, None, None]
    star = np.empty(g.shape[:-2] + (6, 6))
    for I, (c, d) in enumerate(PAIRS):
        for J, (e, f) in enumerate(PAIRS):
            star[..., I, J] = full[..., c, d, e, f]
    return star


def sd_projectors(star, tol: float = 1e-10):
    """``(P+, P-) = ((I + *)/2, (I - *)/2)``; raises if * does not square to 1."""
    star = np.asarray(star, dtype=float)
    eye = np.eye(6)
    defect = np.max(np.abs(star @ star - eye))
    if not defect <= tol:
        raise InconsistencyError(f"star squared differs from identity by {defect:.3e}")
    return 0.5 * (eye + star), 0.5 * (eye - star)


def orthonormal_frame(g) -> np.ndarray:
    """Frame vectors ``E[..., a, i]`` with ``E^T g E = 1`` and det E > 0."""
    try:
        L = np.linalg.cholesky(np.asarray(g, dtype=float))
    except np.linalg.LinAlgError:
        raise DegenerateMetricError("metric is not positive-definite") from None
    return np.swapaxes(np.linalg.inv(L), -1, -2)


def sd_basis(orientation: int = 1) -> np.ndarray:
    """Columns: orthonormal basis of Lambda^+ then Lambda^- in frame-pair components."""
    s = float(orientation)
    eye = np.eye(3)
    top = np.hstack([eye, eye])
    bottom = np.hstack([s * eye, -s * eye])
    return np.vstack([top, bottom]) / math.sqrt(2.0)


def frame_operator(rm, g) -> np.ndarray:
    """6x6 matrix ``Rm(e_i, e_j, e_k, e_l)`` over orthonormal-frame pairs (ij), (kl)."""
    E = orthonormal_frame(g)
    batch = E.shape[:-2]
    # bivectors e_i ^ e_j as antisymmetric 4x4 component arrays, flattened
    bi = np.stack([E[..., :, i, None] * E[..., None, :, j] for i, j in PAIRS], axis=-3)
    bi = (bi - np.swapaxes(bi, -1, -2)).reshape(batch + (6, 16))
    rm16 = np.asarray(rm).reshape(batch + (16, 16))
    return 0.25 * (bi @ rm16 @ np.swapaxes(bi, -1, -2))


@dataclass(frozen=True)
class CurvatureOperatorMatrix:
    """Curvature operator in the orthonormal Lambda^+ (+) Lambda^- basis."""

    matrix: np.ndarray

    @property
    def plus_block(self) -> np.ndarray:
        return self.matrix[..., :3, :3]

    @property
    def minus_block(self) -> np.ndarray:
        return self.matrix[..., 3:, 3:]

    @property
    def off_diagonal(self) -> np.ndarray:
        """Lambda^- -> Lambda^+ block (the traceless Ricci action)."""
        return self.matrix[..., :3, 3:]

    @property
    def scalar(self) -> np.ndarray:
        """R recovered as 4 * trace of either diagonal block (average of the two)."""
        return 2.0 * (np.trace(self.plus_block, axis1=-2, axis2=-1) + np.trace(self.minus_block, axis1=-2, axis2=-1))

    @staticmethod
    def _trace_free(block):
        tr = np.trace(block, axis1=-2, axis2=-1)
        return block - (tr / 3.0)[..., None, None] * np.eye(3)

    @property
    def w_plus(self) -> np.ndarray:
        return self._trace_free(self.plus_block)

    @property
    def w_minus(self) -> np.ndarray:
        return self._trace_free(self.minus_block)


def curvature_operator(bundle: CurvatureBundle, orientation: int = 1) -> CurvatureOperatorMatrix:
    """Assemble the curvature operator from ``bundle.rm`` at the bundle's metric."""
    g = bundle.metric
    if bundle.rm.shape[:-4] != g.shape[:-2]:
        raise InconsistencyError("curvature bundle and metric have different batch shapes")
    M = frame_operator(bundle.rm, g)
    Q = sd_basis(orientation)
    return CurvatureOperatorMatrix(Q.T @ M @ Q)


def weyl_operator(bundle: CurvatureBundle, orientation: int = 1) -> np.ndarray:
    """The Weyl tensor alone as a 6x6 operator in the Lambda^+ (+) Lambda^- basis."""
    Q = sd_basis(orientation)
    return Q.T @ frame_operator(bundle.weyl, bundle.metric) @ Q


def weyl_sd_norms(op: CurvatureOperatorMatrix, kappa: float = KAPPA_W):
    """``(|W+|^2, |W-|^2)`` from the trace-free diagonal blocks."""
    wp = np.sum(op.w_plus**2, axis=(-2, -1))
    wm = np.sum(op.w_minus**2, axis=(-2, -1))
    return kappa * wp, kappa * wm


def calibrate_weyl_constant(tau_integral_unit_kappa: float, tau_target: int = 1) -> float:
    """kappa making ``(1/12 pi^2) * kappa * int(|W+|_F^2 - |W-|_F^2)`` equal ``tau_target``.

    The argument is the signature integral evaluated with kappa = 1.
    """
    if tau_integral_unit_kappa == 0:
        raise InconsistencyError("signature integral vanishes; cannot calibrate")
    return tau_target / tau_integral_unit_kappa
