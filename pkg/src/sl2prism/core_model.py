"""Homogeneous-coordinate model of the SL2R geometry.

Points are rows ``(x0; x1; x2; x3)`` of projective 3-space, identified up to
a strictly positive factor.  The interior of the one-sheeted hyperboloid
solid is where the signature (-, -, +, +) form is negative; the plane
``x1 = 0`` is the Beltrami-Cayley-Klein base plane and ``x = x1/x0`` is the
tangent of the fibre coordinate.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import AtInfinity, NonInteriorPoint

FORM = np.diag([-1.0, -1.0, 1.0, 1.0])

#: Default angular tolerance for projective point equality.
POINT_TOL = 1e-10


def _as_coords(values) -> np.ndarray:
    arr = np.array(values, dtype=float).reshape(-1)
    if arr.shape != (4,):
        raise ValueError(f"expected 4 homogeneous coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("homogeneous coordinates must be finite")
    if not np.any(arr):
        raise ValueError("homogeneous coordinates must not all vanish")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class HPoint:
    """A homogeneous coordinate row with positive projective equivalence.

    The stored representative is kept as given, because the form value is
    not scale invariant; use :meth:`canonical` for the ``x0 = 1`` version.
    """

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _as_coords(self.coords))

    @classmethod
    def of(cls, *values) -> "HPoint":
        if len(values) == 1:
            return cls(values[0])
        return cls(values)

    def __iter__(self):
        return iter(self.coords.tolist())

    def __getitem__(self, i):
        return float(self.coords[i])

    def __repr__(self):
        return "HPoint(" + "; ".join(f"{c:.10g}" for c in self.coords) + ")"

    def canonical(self) -> "HPoint":
        """Positive rescaling with ``x0 = 1`` when ``x0 > 0``, unit norm otherwise."""
        x0 = self.coords[0]
        scale = x0 if x0 > 0 else np.linalg.norm(self.coords)
        return HPoint(self.coords / scale)

    def normalized(self) -> "HPoint":
        """Positive rescaling with form value exactly -1 (interior points only)."""
        f = form_value(self)
        if f >= 0:
            raise NonInteriorPoint(f"form value {f!r} >= 0 for {self!r}")
        return HPoint(self.coords / np.sqrt(-f))

    def is_interior(self) -> bool:
        return form_value(self) < 0

    def same_as(self, other: "HPoint", tol: float = POINT_TOL) -> bool:
        return point_angle(self, other) <= tol


@dataclass(frozen=True)
class ModelPoint:
    """Inhomogeneous Euclidean coordinates ``x = x1/x0, y = x2/x0, z = x3/x0``."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(np.isfinite((self.x, self.y, self.z))):
            raise ValueError("model coordinates must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class HyperboloidParam:
    """Base-plane polar radius and angle plus the unbounded fibre coordinate."""

    r: float
    theta: float
    phi: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("polar radius r must be non-negative")


def point_angle(p: HPoint, q: HPoint) -> float:
    """Angle between the unit 4-vectors of two points.

    Zero exactly when the points are positively proportional; antipodal
    representatives give pi.
    """
    u = p.coords / np.linalg.norm(p.coords)
    v = q.coords / np.linalg.norm(q.coords)
    # atan2 form keeps precision for nearly parallel vectors
    return float(np.arctan2(np.linalg.norm(u - v), np.linalg.norm(u + v)) * 2.0)


def form_value(P: HPoint) -> float:
    """The (-, -, +, +) quadratic form at the stored representative."""
    x0, x1, x2, x3 = P.coords
    return float(-x0 * x0 - x1 * x1 + x2 * x2 + x3 * x3)


def sl2_chart(P: HPoint) -> tuple[float, float, float, float]:
    """Entries ``(a, b, c, d)`` of the 2x2 matrix ``[[d, b], [c, a]]`` of a point.

    ``ad - bc`` equals minus the form value, so it is 1 for a point
    normalized onto the hyperboloid.
    """
    if form_value(P) >= 0:
        raise NonInteriorPoint(f"{P!r} is not interior")
    x0, x1, x2, x3 = P.coords
    return float(x0 + x3), float(x1 + x2), float(-x1 + x2), float(x0 - x3)


def trace_point(X: HPoint) -> HPoint:
    """Intersection of the fibre line through ``X`` with the base plane ``x1 = 0``."""
    x0, x1, x2, x3 = X.coords
    return HPoint((x0 * x0 + x1 * x1, 0.0, x0 * x2 - x1 * x3, x0 * x3 + x1 * x2))


def trace_points(X: np.ndarray) -> np.ndarray:
    """Row-wise :func:`trace_point` for an ``(n, 4)`` array, returned with ``z0 = 1``."""
    X = np.asarray(X, dtype=float)
    x0, x1, x2, x3 = X.T
    z0 = x0 * x0 + x1 * x1
    out = np.stack([z0, np.zeros_like(z0), x0 * x2 - x1 * x3, x0 * x3 + x1 * x2], axis=-1)
    return out / z0[:, None]


def from_hyperboloid_params(param: HyperboloidParam) -> HPoint:
    r, theta, phi = param.r, param.theta, param.phi
    return HPoint(
        (
            np.cosh(r) * np.cos(phi),
            np.cosh(r) * np.sin(phi),
            np.sinh(r) * np.cos(theta - phi),
            np.sinh(r) * np.sin(theta - phi),
        )
    )


def fibre_coordinate(X: HPoint) -> float:
    """Fibre coordinate ``arctan(x1/x0)`` in ``(-pi/2, pi/2)``.

    The model only sees phi modulo pi; the universal cover is carried by
    :class:`HyperboloidParam` instead.
    """
    x0, x1 = X.coords[:2]
    if x0 == 0:
        raise AtInfinity(f"{X!r} has x0 == 0")
    return float(np.arctan(x1 / x0))


def to_inhomogeneous(X: HPoint) -> ModelPoint:
    x0, x1, x2, x3 = X.coords
    if x0 == 0:
        raise AtInfinity(f"{X!r} has x0 == 0")
    return ModelPoint(float(x1 / x0), float(x2 / x0), float(x3 / x0))


def from_inhomogeneous(M: ModelPoint) -> HPoint:
    return HPoint((1.0, M.x, M.y, M.z))


def to_inhomogeneous_array(X: np.ndarray) -> np.ndarray:
    """Row-wise inhomogeneous coordinates of an ``(n, 4)`` array."""
    X = np.asarray(X, dtype=float)
    if np.any(X[:, 0] == 0):
        raise AtInfinity("some rows have x0 == 0")
    return X[:, 1:] / X[:, :1]
