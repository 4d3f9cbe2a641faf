"""Isometries of the projective SL2R model.

Matrices act on coordinate rows from the right: the image of ``X`` under
``M`` is ``X @ M``, so "apply A, then B" is the product ``A @ B``.  An
isometry is only defined up to a positive scalar factor.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core_model import FORM, POINT_TOL, HPoint, ModelPoint, form_value
from .exceptions import DegeneratePlane, NonInteriorPoint, NotRescalable, ResultAtInfinity

#: Entrywise tolerance for comparing canonical isometry matrices.
ISOMETRY_TOL = 1e-10


def _as_matrix(values) -> np.ndarray:
    m = np.array(values, dtype=float)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    m.setflags(write=False)
    return m


@dataclass(frozen=True, eq=False)
class Isometry:
    m: np.ndarray
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "m", _as_matrix(self.m))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return compose(self, other)

    def __repr__(self):
        name = f" {self.label}" if self.label else ""
        return f"Isometry{name}(\n{np.array2string(self.m, precision=8)})"

    def canonical(self) -> np.ndarray:
        """Frobenius-normalized matrix whose first non-negligible entry is positive."""
        m = self.m / np.linalg.norm(self.m)
        flat = m.reshape(-1)
        lead = flat[np.argmax(np.abs(flat) > 1e-9)]
        return m if lead > 0 else -m

    def equals(self, other: "Isometry", tol: float = ISOMETRY_TOL) -> bool:
        return float(np.max(np.abs(self.canonical() - other.canonical()))) <= tol

    def power(self, n: int) -> "Isometry":
        return Isometry(np.linalg.matrix_power(self.m, n))

    def inverse(self) -> "Isometry":
        return Isometry(np.linalg.inv(self.m))

    def apply_rows(self, X: np.ndarray) -> np.ndarray:
        """Image of an ``(n, 4)`` array of rows, without renormalizing."""
        return np.asarray(X, dtype=float) @ self.m


IDENTITY = Isometry(np.eye(4), "identity")


def fibre_translation(phi: float) -> Isometry:
    c, s = np.cos(phi), np.sin(phi)
    return Isometry(
        [
            [c, s, 0.0, 0.0],
            [-s, c, 0.0, 0.0],
            [0.0, 0.0, c, -s],
            [0.0, 0.0, s, c],
        ],
        f"S({phi:.6g})",
    )


def apply(M: Isometry, X: HPoint) -> HPoint:
    """Row action ``X @ M``, returned as the canonical representative."""
    y = X.coords @ M.m
    if y[0] == 0:
        raise ResultAtInfinity(f"image of {X!r} lies on the ideal plane")
    return HPoint(y).canonical()


def _translation_pair(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x0, x1, x2, x3 = x
    t = np.array(
        [
            [x0, x1, x2, x3],
            [-x1, x0, x3, -x2],
            [x2, x3, x0, x1],
            [x3, -x2, -x1, x0],
        ]
    )
    t_inv = np.array(
        [
            [x0, -x1, -x2, -x3],
            [x1, x0, -x3, x2],
            [-x2, -x3, x0, -x1],
            [-x3, x2, x1, x0],
        ]
    )
    return t, t_inv


def translation_to(X: HPoint) -> tuple[Isometry, Isometry]:
    """The translation carrying the origin ``E0`` onto ``X`` and its inverse."""
    x = X.normalized().coords
    t, t_inv = _translation_pair(x)
    return Isometry(t, "T"), Isometry(t_inv, "T^-1")


def normalize_angle(omega: float) -> float:
    """Representative of ``omega`` in ``(-pi, pi]``."""
    w = float(np.mod(omega + np.pi, 2 * np.pi) - np.pi)
    return np.pi if w == -np.pi else w


def rotation_about_origin_fibre(omega: float) -> Isometry:
    w = normalize_angle(omega)
    c, s = np.cos(w), np.sin(w)
    return Isometry(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, c, s],
            [0.0, 0.0, -s, c],
        ],
        f"R_E0({w:.6g})",
    )


def rotation_about_fibre(X: HPoint, omega: float) -> Isometry:
    """Rotation by ``omega`` about the fibre line through ``X``.

    Conjugates the origin-fibre rotation by the translation to ``X``: first
    move ``X`` back to the origin, rotate, then move the origin out to ``X``.
    """
    t, t_inv = translation_to(X)
    m = t_inv.m @ rotation_about_origin_fibre(omega).m @ t.m
    return Isometry(m, f"R_X({normalize_angle(omega):.6g})")


def compose(A: Isometry, B: Isometry) -> Isometry:
    """Apply ``A`` first, then ``B``."""
    return Isometry(A.m @ B.m)


@dataclass(frozen=True)
class ValidationReport:
    """Residuals of the isometry constraint system after rescaling row 0."""

    scale: float
    row0_form: float
    row2_form: float
    orthogonality: float
    cross_orthogonality: float
    upper_pattern: float
    lower_pattern: float
    tol: float

    @property
    def form_residual(self) -> float:
        return max(
            abs(self.row0_form), abs(self.row2_form),
            abs(self.orthogonality), abs(self.cross_orthogonality),
        )

    @property
    def upper_ok(self) -> bool:
        return self.form_residual <= self.tol and self.upper_pattern <= self.tol

    @property
    def lower_ok(self) -> bool:
        return self.form_residual <= self.tol and self.lower_pattern <= self.tol

    @property
    def ok(self) -> bool:
        return self.upper_ok or self.lower_ok

    @property
    def pattern(self) -> str | None:
        if self.upper_ok:
            return "upper"
        if self.lower_ok:
            return "lower"
        return None

    @property
    def max_residual(self) -> float:
        return max(self.form_residual, min(self.upper_pattern, self.lower_pattern))


def _form(u: np.ndarray, v: np.ndarray) -> float:
    return float(u @ FORM @ v)


def validate_isometry(M: Isometry, tol: float = ISOMETRY_TOL) -> ValidationReport:
    """Check a matrix against the defining constraints of the isometry group.

    The matrix is scaled so that row 0 has form value -1.  Row 2 must then
    have form value +1 and be orthogonal to row 0 under both the form and
    the twisted pairing; rows 1 and 3 must follow one of the two admissible
    sign patterns built from rows 0 and 2.
    """
    f0 = _form(M.m[0], M.m[0])
    if not f0 < 0:
        raise NotRescalable(f"row 0 has form value {f0!r} >= 0")
    scale = 1.0 / np.sqrt(-f0)
    a = M.m * scale
    r0, r1, r2, r3 = a
    cross = -r0[0] * r2[1] + r0[1] * r2[0] - r0[2] * r2[3] + r0[3] * r2[2]
    upper1 = np.array([-r0[1], r0[0], r0[3], -r0[2]])
    upper3 = np.array([r2[1], -r2[0], -r2[3], r2[2]])
    upper = max(np.max(np.abs(r1 - upper1)), np.max(np.abs(r3 - upper3)))
    lower = max(np.max(np.abs(r1 + upper1)), np.max(np.abs(r3 + upper3)))
    return ValidationReport(
        scale=float(scale),
        row0_form=_form(r0, r0) + 1.0,
        row2_form=_form(r2, r2) - 1.0,
        orthogonality=_form(r0, r2),
        cross_orthogonality=float(cross),
        upper_pattern=float(upper),
        lower_pattern=float(lower),
        tol=tol,
    )


def form_preservation_residual(M: Isometry) -> tuple[float, float]:
    """Best positive ``lam`` with ``M Q M^T = lam Q`` and the max relative residual."""
    g = M.m @ FORM @ M.m.T
    lam = float(np.sum(g * FORM) / np.sum(FORM * FORM))
    if lam <= 0:
        return lam, float("inf")
    return lam, float(np.max(np.abs(g / lam - FORM)))


def invariant_plane(T: HPoint, k: float) -> tuple[float, float, float, float]:
    """Coefficients ``(A, B, C, D)`` of ``Ax + By + Cz + D = 0`` kept by rotations about T's fibre.

    This is the image of the plane ``x = k`` under the translation to ``T``;
    the coefficients are homogeneous in ``T`` so no normalization is needed.
    """
    if form_value(T) >= 0:
        raise NonInteriorPoint(f"{T!r} is not interior")
    t0, t1, t2, t3 = T.coords
    A = k * t1 - t0
    B = t3 - k * t2
    C = -(k * t3 + t2)
    D = t0 * k + t1
    if np.max(np.abs((A, B, C))) <= 1e-14 * max(1.0, abs(D)):
        raise DegeneratePlane(f"plane for T={T!r}, k={k!r} has no direction")
    return float(A), float(B), float(C), float(D)


def plane_residual(plane, points) -> np.ndarray | float:
    """Value of ``Ax + By + Cz + D`` at a model point or an ``(n, 3)`` array."""
    A, B, C, D = plane
    xyz = points.as_array() if isinstance(points, ModelPoint) else np.asarray(points, dtype=float)
    value = A * xyz[..., 0] + B * xyz[..., 1] + C * xyz[..., 2] + D
    return float(value) if np.ndim(value) == 0 else value


def transform_plane(plane, M: Isometry) -> tuple[float, float, float, float]:
    """Image of a plane under ``M``.

    A plane is a column ``u`` in ``(x0, x1, x2, x3)`` order with ``X @ u = 0``;
    images ``Y = X @ M`` satisfy ``Y @ M^-1 @ u = 0``.
    """
    A, B, C, D = plane
    u = np.array([D, A, B, C])
    v = np.linalg.solve(M.m, u)
    return float(v[1]), float(v[2]), float(v[3]), float(v[0])


def same_point(p: HPoint, q: HPoint, tol: float = POINT_TOL) -> bool:
    return p.same_as(q, tol)
