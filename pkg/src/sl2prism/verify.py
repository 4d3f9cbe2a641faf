"""Self-check suites run by ``sl2prism verify``."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core_model import HPoint, HyperboloidParam, from_hyperboloid_params
from .isometry import (
    IDENTITY,
    fibre_translation,
    form_preservation_residual,
    invariant_plane,
    plane_residual,
    rotation_about_fibre,
    rotation_about_origin_fibre,
    translation_to,
    validate_isometry,
)
from .reference import MIDPOINT_3_7, ROTATED_VERTEX_3_7, TABLE_X3, TABLE_X3_CORRECTED, X3_P4_Q6
from .tiling import (
    Verdict,
    admissible,
    closed_form_x3_p3,
    face_to_face_check,
    generator,
    rotated_vertex_and_midpoint,
    solve,
    solve_x3,
    surface_mapping_residual,
)

LEVELS = {
    "quick": {"isometries": 200, "planes": 100, "q_max": 40, "p_max": 5, "f2f_q_max": 12},
    "full": {"isometries": 10_000, "planes": 1_000, "q_max": 200, "p_max": 8, "f2f_q_max": 20},
}


@dataclass
class SuiteResult:
    name: str
    max_residual: float
    tol: float
    lines: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.tol)


def random_interior_point(rng: np.random.Generator, r_max: float = 2.5) -> HPoint:
    param = HyperboloidParam(
        r=rng.uniform(0, r_max), theta=rng.uniform(-np.pi, np.pi), phi=rng.uniform(-1.4, 1.4)
    )
    return from_hyperboloid_params(param)


def random_isometries(rng: np.random.Generator, n: int):
    """Yield ``n`` matrices from each of the four isometry families."""
    for _ in range(n):
        X = random_interior_point(rng)
        omega = rng.uniform(-np.pi, np.pi)
        yield fibre_translation(rng.uniform(-2 * np.pi, 2 * np.pi))
        t, t_inv = translation_to(X)
        yield t
        yield t_inv
        yield rotation_about_origin_fibre(omega)
        yield rotation_about_fibre(X, omega)


def isometry_suite(n: int, tol: float, seed: int = 0) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for M in random_isometries(rng, n):
        report = validate_isometry(M, tol)
        _, form_res = form_preservation_residual(M)
        worst = max(worst, report.max_residual, form_res)
    return SuiteResult("isometry constraints", worst, tol)


def plane_suite(n: int, tol: float, seed: int = 1) -> SuiteResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        T = random_interior_point(rng, r_max=1.5)
        k = rng.uniform(-2, 2)
        omega = rng.uniform(-np.pi, np.pi)
        plane = invariant_plane(T, k)
        points = plane_samples(plane, rng, 8)
        rot = rotation_about_fibre(T, omega)
        image = np.hstack([np.ones((len(points), 1)), points]) @ rot.m
        image = image[:, 1:] / image[:, :1]
        scale = np.linalg.norm(plane[:3])
        worst = max(worst, float(np.max(np.abs(plane_residual(plane, image)))) / scale)
    origin = invariant_plane(HPoint((1.0, 0.0, 0.0, 0.0)), 0.7)
    worst = max(worst, float(np.max(np.abs(np.array(origin) - (-1.0, 0.0, 0.0, 0.7)))))
    return SuiteResult("invariant planes", worst, tol)


def plane_samples(plane, rng: np.random.Generator, n: int) -> np.ndarray:
    """Random points of a plane scattered around its foot point from the origin."""
    normal = np.array(plane[:3], dtype=float)
    unit = normal / np.linalg.norm(normal)
    foot = -plane[3] * normal / (normal @ normal)
    offsets = rng.normal(size=(n, 3)) * 0.3
    offsets -= np.outer(offsets @ unit, unit)
    return foot + offsets


def solver_suite(q_max: int, tol: float) -> SuiteResult:
    worst = max(abs(solve_x3(3, q) - closed_form_x3_p3(q)) for q in range(7, q_max + 1))
    return SuiteResult(f"solver vs closed form (q <= {q_max})", worst, tol)


def table_suite(tol: float = 1e-7) -> SuiteResult:
    lines, worst = [], 0.0
    for (p, q), printed in TABLE_X3.items():
        expected = TABLE_X3_CORRECTED[(p, q)]
        x3 = solve_x3(p, q)
        worst = max(worst, abs(x3 - expected))
        note = "" if printed == expected else f"  (printed {printed:.8f}, transposed digits)"
        lines.append(f"({p}, {q:>4}) x3 = {x3:.8f}  reference {expected:.8f}{note}")
    x3 = solve_x3(4, 6)
    worst = max(worst, abs(x3 - X3_P4_Q6))
    lines.append(f"(4,    6) x3 = {x3:.8f}  reference (sqrt 6 - sqrt 2)/2 = {X3_P4_Q6:.8f}")
    return SuiteResult("x3 table", worst, tol, lines)


def printed_points_suite(tol: float = 1e-6) -> SuiteResult:
    spec = solve(3, 7)
    moved, midpoint = rotated_vertex_and_midpoint(spec, pivot=1)
    worst = max(
        float(np.max(np.abs(moved.coords - ROTATED_VERTEX_3_7))),
        float(np.max(np.abs(midpoint.coords - MIDPOINT_3_7))),
    )
    return SuiteResult("rotated vertex and midpoint (3, 7)", worst, tol)


def closure_suites(tol: float = 1e-8, order_tol: float = 1e-10) -> list[SuiteResult]:
    surface = SuiteResult("side surface mapping", 0.0, tol)
    order = SuiteResult("generator order", 0.0, order_tol)
    eye = IDENTITY.canonical()
    for p, q in [(3, 7), (3, 8), (4, 6), (5, 4)]:
        spec = solve(p, q)
        mapping = surface_mapping_residual(spec)
        coverage = max(abs(mapping["t_min"]), abs(1 - mapping["t_max"]))
        worst_order = max(
            float(np.max(np.abs(generator(spec, k).power(q).canonical() - eye)))
            for k in range(1, p + 1)
        )
        surface.max_residual = max(surface.max_residual, mapping["max_residual"], coverage)
        order.max_residual = max(order.max_residual, worst_order)
        surface.lines.append(f"({p}, {q}) r2 maps [f1; f2] onto [f2; f3]: {mapping['max_residual']:.2e}")
    return [surface, order]


def face_to_face_suite(p_max: int, q_max: int, phi_tau: float = 0.5) -> SuiteResult:
    threshold = 1e-6
    smallest = np.inf
    failures = 0
    for p in range(3, p_max + 1):
        for q in range(3, q_max + 1):
            if not admissible(p, q):
                continue
            report = face_to_face_check(solve(p, q, phi_tau))
            smallest = min(smallest, report.s2_defect, report.neighbour_base_defect)
            failures += report.verdict is not Verdict.NON_FACE_TO_FACE
    # residual is the shortfall below the threshold, zero when all pass
    shortfall = max(0.0, threshold - smallest) + failures
    result = SuiteResult(f"non face-to-face (p <= {p_max}, q <= {q_max})", shortfall, 0.0)
    result.lines.append(f"smallest plane defect {smallest:.3e}")
    return result


def run(level: str = "quick", tol_override: float | None = None) -> list[SuiteResult]:
    """Run every suite; ``tol_override`` replaces all tolerances (test hook)."""
    cfg = LEVELS[level]

    def tol(default):
        return default if tol_override is None else tol_override

    results = [
        isometry_suite(cfg["isometries"], tol(1e-10)),
        plane_suite(cfg["planes"], tol(1e-9)),
        solver_suite(cfg["q_max"], tol(1e-9)),
        table_suite(tol(1e-7)),
        printed_points_suite(tol(1e-6)),
        *closure_suites(tol(1e-8), tol(1e-10)),
        face_to_face_suite(cfg["p_max"], cfg["f2f_q_max"]),
    ]
    if tol_override is not None:
        for r in results:
            r.tol = tol_override
    return results
