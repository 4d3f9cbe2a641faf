"""Estimator-style front end for the prism tiling construction."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .core_model import HPoint, trace_points
from .export import Mesh, TilingReport, build_mesh
from .tiling import (
    DEFAULT_PHI_RANGE,
    DEFAULT_SAMPLES,
    SOLVER_TOL,
    FaceToFaceReport,
    TilingPatch,
    check_admissible,
    cover_plane_S2,
    face_to_face_check,
    generators,
    rotated_vertex_and_midpoint,
    solve,
    tiling_patch,
    vertex_ring,
)


def check_points(X, interior: bool = False) -> np.ndarray:
    """Validate an ``(n, 4)`` array of homogeneous rows.

    Rows must be finite and non-zero; with ``interior=True`` they must also
    have negative form value.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != 4:
        raise ValueError(f"expected an (n, 4) array of homogeneous rows, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("homogeneous rows must be finite")
    if np.any(~X.any(axis=1)):
        raise ValueError("homogeneous rows must not vanish")
    if interior:
        form = -X[:, 0] ** 2 - X[:, 1] ** 2 + X[:, 2] ** 2 + X[:, 3] ** 2
        if np.any(form >= 0):
            raise ValueError("some rows are not interior points")
    return X


class PrismTiling(BaseEstimator):
    """Regular p-gonal prism tiling with rotation order q.

    Parameters
    ----------
    p, q : int
        Number of sides and rotation order, with ``q > 2p / (p - 2)``.
    phi_tau : float or None
        Fibre-translation height of the bounded prism; ``None`` builds the
        infinite prism tiling.
    tol : float
        Residual tolerance of the x3 solver.
    resolution : int
        Samples per side curve and per fibre segment when meshing.
    phi_range : tuple of float
        Fibre window used to clip infinite prisms when meshing.

    Attributes
    ----------
    spec_ : PrismSpec
    x3_ : float
    vertices_ : list of HPoint
    generators_ : list of Isometry
    rotated_vertex_, midpoint_ : HPoint
        ``r_2(A_1)`` on ``f_3`` and the fibre midpoint between it and ``A_3``.
    s2_plane_, s2_k_ :
        Plane through ``A_1`` invariant under the rotations about ``f_2``.

    Examples
    --------
    >>> PrismTiling(p=3, q=8).fit().x3_  # doctest: +ELLIPSIS
    0.405616400...
    """

    def __init__(self, p=3, q=7, phi_tau=None, tol=SOLVER_TOL,
                 resolution=DEFAULT_SAMPLES, phi_range=DEFAULT_PHI_RANGE):
        self.p = p
        self.q = q
        self.phi_tau = phi_tau
        self.tol = tol
        self.resolution = resolution
        self.phi_range = phi_range

    def fit(self, X=None, y=None):
        """Solve the tiling; ``X`` and ``y`` are ignored."""
        p, q = check_admissible(self.p, self.q)
        if self.resolution < 2:
            raise ValueError("resolution must be at least 2")
        self.spec_ = solve(p, q, self.phi_tau, self.tol)
        self.x3_ = self.spec_.x3
        self.vertices_ = vertex_ring(p, self.x3_)
        self.generators_ = generators(self.spec_)
        self.rotated_vertex_, self.midpoint_ = rotated_vertex_and_midpoint(self.spec_)
        self.s2_plane_, self.s2_k_ = cover_plane_S2(self.spec_)
        return self

    def transform(self, X) -> np.ndarray:
        """Base-plane ``(y, z)`` coordinates of the trace points of interior rows."""
        X = check_points(X, interior=True)
        return trace_points(X)[:, 2:]

    def patch(self, depth: int = 1) -> TilingPatch:
        check_is_fitted(self)
        return tiling_patch(self.spec_, depth)

    def mesh(self, depth: int = 0) -> Mesh:
        return build_mesh(self.patch(depth), self.resolution, tuple(self.phi_range))

    def face_to_face(self) -> FaceToFaceReport:
        check_is_fitted(self)
        return face_to_face_check(self.spec_)

    def report(self) -> TilingReport:
        check_is_fitted(self)
        return TilingReport.from_spec(self.spec_)

    def contains_fibre(self, X: HPoint, k: int) -> bool:
        """Whether ``X`` lies on the side fibre line through vertex ``A_k``."""
        check_is_fitted(self)
        trace = trace_points(X.coords[None, :])[0]
        return HPoint(trace).same_as(self.vertices_[(k - 1) % self.p], 1e-8)
