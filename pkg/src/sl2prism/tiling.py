"""Regular infinite and bounded p-gonal prism tilings.

The base p-gon has vertices ``A_k = (1; 0; x3 sin(2(k-1)pi/p); x3 cos(2(k-1)pi/p))``
in the base plane.  The tiling exists when the rotation ``r_k`` by
``2 pi / q`` about the fibre line ``f_k`` through ``A_k`` carries the side
face ``[f_{k-1}; f_k]`` onto ``[f_k; f_{k+1}]``; ``x3`` is solved for so that
``r_2`` moves ``A_1`` onto the fibre line ``f_3``.

Indexing is 1-based throughout to match vertex names.  Side surface ``k``
joins ``f_k`` and ``f_{k+1}`` (indices taken mod p).
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .core_model import (
    HPoint,
    ModelPoint,
    fibre_coordinate,
    point_angle,
    to_inhomogeneous,
    trace_point,
    trace_points,
)
from .exceptions import DegenerateK, InadmissibleQ, InvalidParameter, NoConvergence
from .isometry import (
    IDENTITY,
    Isometry,
    apply,
    fibre_translation,
    plane_residual,
    rotation_about_fibre,
    rotation_about_origin_fibre,
    transform_plane,
    translation_to,
    validate_isometry,
)

logger = logging.getLogger(__name__)

SOLVER_TOL = 1e-12
SOLVER_MAX_ITER = 200
CROSS_CHECK_TOL = 1e-8
GEOMETRY_TOL = 1e-10
DEDUP_TOL = 1e-8
DEFAULT_SAMPLES = 64
DEFAULT_PHI_RANGE = (-1.2, 1.2)
DEFECT_THRESHOLD = 1e-6

# generator of the fibre translations: d/dphi S(phi) at 0
_FIBRE_GENERATOR = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ]
)


def admissible(p: int, q: int) -> bool:
    return p >= 3 and q * (p - 2) > 2 * p


def check_admissible(p, q) -> tuple[int, int]:
    """Validate ``(p, q)`` and return them as ints."""
    if int(p) != p or int(q) != q:
        raise InvalidParameter(f"p and q must be integers, got {p!r}, {q!r}")
    p, q = int(p), int(q)
    if p < 3:
        raise InvalidParameter(f"p must be at least 3, got {p}")
    if not admissible(p, q):
        raise InadmissibleQ(p, q)
    return p, q


@dataclass(frozen=True)
class PrismSpec:
    """A solved tiling instance.

    ``phi_tau`` is the fibre-translation height of the bounded prism;
    ``None`` means the infinite prism.  ``rotation_sign`` records which
    orientation of ``2 pi / q`` carries ``A_1`` onto ``f_3``.
    """

    p: int
    q: int
    x3: float
    phi_tau: float | None = None
    rotation_sign: int = 1

    def __post_init__(self):
        check_admissible(self.p, self.q)
        if not 0 < self.x3 < 1:
            raise InvalidParameter(f"x3 must lie in (0, 1), got {self.x3!r}")
        if self.phi_tau is not None and self.phi_tau == 0:
            raise InvalidParameter("phi_tau must be non-zero")
        if self.rotation_sign not in (1, -1):
            raise InvalidParameter("rotation_sign must be +1 or -1")

    @property
    def omega(self) -> float:
        return self.rotation_sign * 2 * np.pi / self.q

    @property
    def bounded(self) -> bool:
        return self.phi_tau is not None

    def with_phi_tau(self, phi_tau: float | None) -> "PrismSpec":
        return PrismSpec(self.p, self.q, self.x3, phi_tau, self.rotation_sign)


def vertex_ring(p: int, x3: float) -> list[HPoint]:
    if p < 3 or int(p) != p:
        raise InvalidParameter(f"p must be an integer >= 3, got {p!r}")
    if not 0 < x3 < 1:
        raise InvalidParameter(f"x3 must lie in (0, 1), got {x3!r}")
    angles = 2 * np.pi * np.arange(p) / p
    return [HPoint((1.0, 0.0, x3 * np.sin(a), x3 * np.cos(a))) for a in angles]


def _vertex(vertices: list[HPoint], k: int) -> HPoint:
    return vertices[(k - 1) % len(vertices)]


def _base_angle(u: HPoint, v: HPoint) -> float:
    """Unsigned Euclidean angle at the origin between two base-plane points."""
    a = u.coords[2:] / u.coords[0]
    b = v.coords[2:] / v.coords[0]
    return float(np.arctan2(abs(a[0] * b[1] - a[1] * b[0]), a @ b))


def vertex_angle(p: int, x3: float) -> float:
    """Angle at ``A_2`` seen through the trace points after moving ``A_2`` to the origin."""
    A = vertex_ring(p, x3)
    _, back = translation_to(A[1])
    a1 = trace_point(HPoint(A[0].coords @ back.m))
    a3 = trace_point(HPoint(A[2].coords @ back.m))
    return _base_angle(a1, a3)


def vertex_angle_residual(p: int, q: int, x3: float) -> float:
    """Vertex angle minus the rotation angle ``2 pi / q``; decreasing in ``x3``."""
    return vertex_angle(p, x3) - 2 * np.pi / q


def bisect(func, lo: float, hi: float, tol: float = SOLVER_TOL, max_iter: int = SOLVER_MAX_ITER):
    """Root of a function with a sign change on ``[lo, hi]``.

    Stops once ``|func(mid)| <= tol`` or the bracket cannot be split any
    further in floating point.  Returns ``(root, residual, iterations)``.
    """
    f_lo, f_hi = func(lo), func(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoConvergence(f"no sign change on [{lo}, {hi}]: {f_lo:.3g}, {f_hi:.3g}")
    best = (lo, f_lo) if abs(f_lo) < abs(f_hi) else (hi, f_hi)
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        f_mid = func(mid)
        if abs(f_mid) < abs(best[1]):
            best = (mid, f_mid)
        if abs(f_mid) <= tol or mid in (lo, hi):
            return best[0], best[1], it
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return best[0], best[1], max_iter


def _landing_residual(p: int, x3: float, omega: float) -> float:
    """Angle between ``trace(r_2(A_1))`` and ``A_3``."""
    A = vertex_ring(p, x3)
    moved = HPoint(A[0].coords @ rotation_about_fibre(A[1], omega).m)
    return point_angle(trace_point(moved).canonical(), A[2])


def rotation_sign(p: int, q: int, x3: float) -> int:
    """Orientation of ``2 pi / q`` that carries ``A_1`` onto the fibre of ``A_3``."""
    w = 2 * np.pi / q
    return 1 if _landing_residual(p, x3, w) <= _landing_residual(p, x3, -w) else -1


def solve_x3(p: int, q: int, tol: float = SOLVER_TOL, max_iter: int = SOLVER_MAX_ITER) -> float:
    """Vertex parameter of the regular infinite prism tiling with parameters ``(p, q)``.

    Bisects the vertex-angle residual on ``(0, 1)``, then confirms the root
    by rotating ``A_1`` about ``f_2`` and checking it lands on ``f_3``.
    """
    p, q = check_admissible(p, q)
    eps = 1e-12
    root, residual, iterations = bisect(
        lambda x: vertex_angle_residual(p, q, x), eps, 1 - eps, tol, max_iter
    )
    if abs(residual) > tol:
        raise NoConvergence(f"residual {residual:.3g} above {tol:.3g} after {iterations} steps")
    w = 2 * np.pi / q
    landing = min(_landing_residual(p, root, w), _landing_residual(p, root, -w))
    if landing > CROSS_CHECK_TOL:
        raise NoConvergence(f"rotated A1 misses f3 by {landing:.3g} at x3={root!r}")
    logger.debug("solved (p, q) = (%d, %d): x3=%r in %d steps", p, q, root, iterations)
    return root


def closed_form_x3_p3(q: int) -> float:
    """Closed-form vertex parameter of the trigonal tilings."""
    if int(q) != q or q <= 6:
        raise InadmissibleQ(3, q)
    w = 2 * np.pi / q
    return float(np.sqrt((np.sqrt(3) * np.cos(w) - np.sin(w)) / (2 * np.sin(w) + np.sqrt(3))))


def solve(p: int, q: int, phi_tau: float | None = None, tol: float = SOLVER_TOL) -> PrismSpec:
    """Solve ``x3`` and package a :class:`PrismSpec`."""
    x3 = solve_x3(p, q, tol)
    return PrismSpec(int(p), int(q), x3, phi_tau, rotation_sign(p, q, x3))


def generator(spec: PrismSpec, k: int) -> Isometry:
    """Rotation ``r_k`` by ``omega`` about the fibre line through ``A_k``."""
    A = vertex_ring(spec.p, spec.x3)
    r = rotation_about_fibre(_vertex(A, k), spec.omega)
    return Isometry(r.m, f"r{(k - 1) % spec.p + 1}")


def generators(spec: PrismSpec) -> list[Isometry]:
    return [generator(spec, k) for k in range(1, spec.p + 1)]


def ring_step(p: int, steps: int = 1) -> Isometry:
    """Origin-fibre rotation carrying every ``A_k`` to ``A_{k+steps}``.

    Vertices advance clockwise in the ``(y, z)`` plane, hence the minus sign.
    """
    return rotation_about_origin_fibre(-2 * np.pi * steps / p)


def rotated_vertex_and_midpoint(spec: PrismSpec, pivot: int = 2) -> tuple[HPoint, HPoint]:
    """Image of the previous vertex under ``r_pivot`` and the fibre midpoint ``F``.

    With the default pivot this is ``A'_1 = r_2(A_1)`` on ``f_3`` together
    with the point ``F`` of ``f_3`` halfway (in fibre coordinate) between
    ``A_3`` and ``A'_1``.  ``pivot=1`` gives ``r_1(A_p)`` on ``f_2``.
    """
    A = vertex_ring(spec.p, spec.x3)
    prev, nxt = _vertex(A, pivot - 1), _vertex(A, pivot + 1)
    moved = apply(generator(spec, pivot), prev)
    phi = fibre_coordinate(moved)
    midpoint = apply(fibre_translation(phi / 2), nxt)
    return moved, midpoint


@dataclass(frozen=True, eq=False)
class SideSurface:
    """Fibre lines through the points of a straight model-space segment.

    ``samples[i, j]`` is the point at fibre coordinate ``phis[j]`` on the
    fibre through the trace of segment point ``ts[i]``.
    """

    index: int
    generator_segment: tuple[ModelPoint, ModelPoint]
    ts: np.ndarray
    phis: np.ndarray
    samples: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.samples.shape[:2]


@dataclass(frozen=True, eq=False)
class BaseFigure:
    vertices: list[HPoint]
    side_curves: list[np.ndarray]


def _segment_rows(start: HPoint, end: HPoint, ts: np.ndarray) -> np.ndarray:
    a = start.canonical().coords
    b = end.canonical().coords
    return (1 - ts)[:, None] * a + ts[:, None] * b


def _fibre_images(rows: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """``rows[i] @ S(phis[j])`` for all pairs, shape ``(n_rows, n_phi, 4)``."""
    c = np.cos(phis)[None, :, None]
    s = np.sin(phis)[None, :, None]
    moved = rows @ _FIBRE_GENERATOR
    return c * rows[:, None, :] + s * moved[:, None, :]


def base_side_curve(spec: PrismSpec, index: int = 2, n_samples: int = DEFAULT_SAMPLES) -> np.ndarray:
    """Trace curve from ``A_index`` to ``A_{index+1}`` as ``(n, 4)`` rows with ``x0 = 1``.

    The constructed curve joins ``A_2`` and ``A_3``; the others are its
    images under the order-p rotation about the origin fibre.
    """
    if n_samples < 2:
        raise InvalidParameter("n_samples must be at least 2")
    A = vertex_ring(spec.p, spec.x3)
    _, midpoint = rotated_vertex_and_midpoint(spec)
    ts = np.linspace(0.0, 1.0, n_samples)
    curve = trace_points(_segment_rows(A[1], midpoint, ts))
    curve = curve @ ring_step(spec.p, index - 2).m
    curve[:, 1] = 0.0
    return curve


def side_surface(
    spec: PrismSpec,
    index: int = 2,
    resolution: int = DEFAULT_SAMPLES,
    phi_range: tuple[float, float] = DEFAULT_PHI_RANGE,
) -> SideSurface:
    """Sampled side surface joining ``f_index`` and ``f_{index+1}``."""
    if resolution < 2:
        raise InvalidParameter("resolution must be at least 2")
    A = vertex_ring(spec.p, spec.x3)
    _, midpoint = rotated_vertex_and_midpoint(spec)
    step = ring_step(spec.p, index - 2)
    segment = (
        to_inhomogeneous(apply(step, A[1])),
        to_inhomogeneous(apply(step, midpoint)),
    )
    ts = np.linspace(0.0, 1.0, resolution)
    phis = np.linspace(phi_range[0], phi_range[1], resolution)
    curve = base_side_curve(spec, index, resolution)
    samples = _fibre_images(curve, phis)
    return SideSurface((index - 1) % spec.p + 1, segment, ts, phis, samples)


def line_meets_segment(Y: np.ndarray, start: HPoint, end: HPoint) -> tuple[float, float]:
    """Does the fibre line through ``Y`` meet the line through ``start`` and ``end``?

    Returns the smallest singular value of the four spanning unit rows (zero
    exactly when the two projective lines meet) and the affine parameter of
    the meeting point along ``start -> end``.
    """
    y = np.asarray(Y, dtype=float)
    y = y / np.linalg.norm(y)
    a = start.canonical().coords
    b = end.canonical().coords
    rows = np.array([y, y @ _FIBRE_GENERATOR, a / np.linalg.norm(a), b / np.linalg.norm(b)])
    _, sv, vt = np.linalg.svd(rows.T)
    null = vt[-1]
    # null gives alpha*y + beta*yJ = -(gamma*a_hat + delta*b_hat)
    gamma = null[2] / np.linalg.norm(a)
    delta = null[3] / np.linalg.norm(b)
    t = delta / (gamma + delta) if gamma + delta != 0 else np.nan
    return float(sv[-1]), float(t)


def surface_mapping_residual(spec: PrismSpec, pivot: int = 2, resolution: int = 16) -> dict:
    """How well ``r_pivot`` carries side surface ``pivot - 1`` onto side surface ``pivot``.

    Every image sample must lie on a fibre line through the generating
    segment of the target surface; the meeting parameters must sweep the
    whole segment.
    """
    source = side_surface(spec, pivot - 1, resolution)
    A = vertex_ring(spec.p, spec.x3)
    _, midpoint = rotated_vertex_and_midpoint(spec)
    step = ring_step(spec.p, pivot - 2)
    start, end = apply(step, A[1]), apply(step, midpoint)
    r = generator(spec, pivot)
    images = source.samples.reshape(-1, 4) @ r.m
    found = [line_meets_segment(y, start, end) for y in images]
    residuals = np.array([f[0] for f in found])
    ts = np.array([f[1] for f in found])
    return {
        "max_residual": float(residuals.max()),
        "t_min": float(ts.min()),
        "t_max": float(ts.max()),
        "samples": int(len(found)),
    }


def cover_plane_S2(spec: PrismSpec) -> tuple[tuple[float, float, float, float], float]:
    """Plane through ``A_1`` kept invariant by the rotations about ``f_2``, and its ``k``."""
    w = 2 * np.pi / spec.p
    x3 = spec.x3
    denom = 1 - x3 * x3 * np.cos(w)
    if abs(denom) < 1e-15:
        raise DegenerateK(f"1 - x3^2 cos(2pi/p) vanishes for x3={x3!r}")
    k = x3 * x3 * np.sin(w) / denom
    plane = (
        -1.0,
        float(x3 * np.cos(w) - k * x3 * np.sin(w)),
        float(-(k * x3 * np.cos(w) + x3 * np.sin(w))),
        float(k),
    )
    return plane, float(k)


def parallel_defect(plane) -> float:
    """Sine of the angle between a plane's normal and the x axis.

    Zero exactly for the planes ``x = const`` that carry the cover faces.
    """
    A, B, C, _ = plane
    return float(np.hypot(B, C) / np.linalg.norm((A, B, C)))


@dataclass(frozen=True, eq=False)
class Prism:
    spec: PrismSpec
    base: BaseFigure
    side_surfaces: list[SideSurface]
    cover_translation: Isometry | None = None
    top_vertices: list[HPoint] = field(default_factory=list)

    @property
    def bounded(self) -> bool:
        return self.cover_translation is not None


def _base_figure(spec: PrismSpec, n_samples: int) -> BaseFigure:
    A = vertex_ring(spec.p, spec.x3)
    curves = [base_side_curve(spec, k, n_samples) for k in range(1, spec.p + 1)]
    return BaseFigure(A, curves)


def infinite_prism(
    spec: PrismSpec,
    resolution: int = DEFAULT_SAMPLES,
    phi_range: tuple[float, float] = DEFAULT_PHI_RANGE,
) -> Prism:
    """The infinite prism clipped to a fibre-coordinate window for sampling."""
    surfaces = [side_surface(spec, k, resolution, phi_range) for k in range(1, spec.p + 1)]
    return Prism(spec.with_phi_tau(None), _base_figure(spec, resolution), surfaces)


def bounded_prism(spec: PrismSpec, resolution: int = DEFAULT_SAMPLES) -> Prism:
    """Slab of the infinite prism between the base figure and its translate by ``phi_tau``."""
    if spec.phi_tau is None or spec.phi_tau == 0:
        raise InvalidParameter("a bounded prism needs a non-zero phi_tau")
    tau = fibre_translation(spec.phi_tau)
    slab = (0.0, spec.phi_tau)
    surfaces = [side_surface(spec, k, resolution, slab) for k in range(1, spec.p + 1)]
    base = _base_figure(spec, resolution)
    top = [apply(tau, a) for a in base.vertices]
    return Prism(spec, base, surfaces, Isometry(tau.m, "tau"), top)


def prism(spec: PrismSpec, resolution: int = DEFAULT_SAMPLES, phi_range=DEFAULT_PHI_RANGE) -> Prism:
    if spec.bounded:
        return bounded_prism(spec, resolution)
    return infinite_prism(spec, resolution, phi_range)


@dataclass(frozen=True, eq=False)
class TilingPatch:
    """Tiles as ``(isometry, tile_id)`` pairs; ids spell the generator word.

    A word ``"r2.r1"`` means: apply ``r2``, then ``r1``.
    """

    spec: PrismSpec
    tiles: list[tuple[Isometry, str]]
    depth: int

    def __len__(self):
        return len(self.tiles)

    @property
    def ids(self) -> list[str]:
        return [tile_id for _, tile_id in self.tiles]


def tiling_patch(spec: PrismSpec, depth: int = 1, tol: float = DEDUP_TOL) -> TilingPatch:
    """Breadth-first closure of generator words up to length ``depth``.

    Duplicate group elements are dropped, keeping the first word found, so
    the output order is fixed by the generator order.
    """
    if depth < 0:
        raise InvalidParameter("depth must be non-negative")
    gens = generators(spec)
    if spec.bounded:
        tau = fibre_translation(spec.phi_tau)
        gens += [Isometry(tau.m, "tau"), Isometry(tau.inverse().m, "tau^-1")]
    tiles = [(IDENTITY, "e")]
    seen = [IDENTITY.canonical()]
    frontier = list(tiles)
    for _ in range(depth):
        grown = []
        for g in gens:
            for iso, word in frontier:
                candidate = Isometry(g.m @ iso.m)
                key = candidate.canonical()
                if any(np.max(np.abs(key - other)) <= tol for other in seen):
                    continue
                seen.append(key)
                tile_id = g.label if word == "e" else f"{g.label}.{word}"
                grown.append((candidate, tile_id))
        tiles.extend(grown)
        frontier = grown
    return TilingPatch(spec, tiles, depth)


class Verdict(enum.Enum):
    FACE_TO_FACE = "FACE_TO_FACE"
    NON_FACE_TO_FACE = "NON_FACE_TO_FACE"


@dataclass(frozen=True)
class FaceToFaceReport:
    verdict: Verdict
    s2_plane: tuple[float, float, float, float]
    s2_k: float
    s2_defect: float
    neighbour_base_plane: tuple[float, float, float, float]
    neighbour_base_defect: float
    neighbour_top_plane: tuple[float, float, float, float]
    neighbour_top_defect: float
    shifted_s2_plane: tuple[float, float, float, float]
    orbit_residual: float


def face_to_face_check(spec: PrismSpec, threshold: float = DEFECT_THRESHOLD) -> FaceToFaceReport:
    """Decide whether the bounded prisms can meet face to face.

    The cover faces of a tile lie in planes ``x = const``.  The neighbour
    across side ``[f_1; f_2]`` is the image under ``r_2``, so its cover
    faces lie in the images of those planes; the tiling is face to face
    only if the images are again ``x = const`` planes.
    """
    if not spec.bounded:
        raise InvalidParameter("face_to_face_check needs a bounded prism (phi_tau)")
    r2 = generator(spec, 2)
    base_plane = (-1.0, 0.0, 0.0, 0.0)
    top_plane = (-1.0, 0.0, 0.0, float(np.tan(spec.phi_tau)))
    s2, k = cover_plane_S2(spec)
    neighbour_base = transform_plane(base_plane, r2)
    neighbour_top = transform_plane(top_plane, r2)
    shifted = transform_plane(s2, fibre_translation(spec.phi_tau))

    A = vertex_ring(spec.p, spec.x3)
    orbit = np.array([
        apply(rotation_about_fibre(A[1], w), A[0]).coords[1:]
        for w in np.linspace(-np.pi, np.pi, 13)
    ])
    defects = (parallel_defect(s2), parallel_defect(neighbour_base), parallel_defect(neighbour_top))
    verdict = Verdict.NON_FACE_TO_FACE if min(defects) >= threshold else Verdict.FACE_TO_FACE
    return FaceToFaceReport(
        verdict=verdict,
        s2_plane=s2,
        s2_k=k,
        s2_defect=defects[0],
        neighbour_base_plane=neighbour_base,
        neighbour_base_defect=defects[1],
        neighbour_top_plane=neighbour_top,
        neighbour_top_defect=defects[2],
        shifted_s2_plane=shifted,
        orbit_residual=float(np.max(np.abs(plane_residual(s2, orbit)))),
    )


def check_patch(patch: TilingPatch, tol: float = 1e-10) -> float:
    """Largest constraint residual over the isometries of a patch."""
    return max(validate_isometry(iso, tol).max_residual for iso, _ in patch.tiles)
