"""Mesh, Wavefront OBJ and JSON report export for prisms and tiling patches."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .core_model import FORM, HPoint, point_angle, trace_point
from .exceptions import AtInfinity, InvalidParameter
from .isometry import Isometry, plane_residual, validate_isometry
from .tiling import (
    DEFAULT_PHI_RANGE,
    DEFAULT_SAMPLES,
    PrismSpec,
    TilingPatch,
    cover_plane_S2,
    face_to_face_check,
    generators,
    prism,
    rotated_vertex_and_midpoint,
    tiling_patch,
    vertex_angle_residual,
    vertex_ring,
)

REPORT_TOL = 1e-9


@dataclass
class Mesh:
    """Triangle mesh in inhomogeneous model coordinates.

    ``groups`` holds ``(object, part, first_face, end_face)`` runs so that
    faces of one part of one tile are contiguous.
    """

    vertices: np.ndarray
    faces: np.ndarray
    groups: list[tuple[str, str, int, int]] = field(default_factory=list)
    objects: list[tuple[str, int, int]] = field(default_factory=list)

    def validate(self) -> None:
        if not np.all(np.isfinite(self.vertices)):
            raise ValueError("mesh has non-finite vertex coordinates")
        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= len(self.vertices)):
            raise ValueError("mesh face index out of range")
        lifted = np.hstack([np.ones((len(self.vertices), 1)), self.vertices])
        if np.any(np.einsum("ij,jk,ik->i", lifted, FORM, lifted) >= 0):
            raise ValueError("mesh vertex outside the hyperboloid solid")


def _grid_faces(n_rows: int, n_cols: int, offset: int) -> np.ndarray:
    idx = np.arange(n_rows * n_cols).reshape(n_rows, n_cols) + offset
    a, b = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    c, d = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    return np.concatenate([np.stack([a, b, c], 1), np.stack([a, c, d], 1)])


def _fan(boundary: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centre-plus-boundary rows of a cover face and its triangles (local indices)."""
    rows = np.vstack([[1.0, 0.0, 0.0, 0.0], boundary])
    m = len(boundary)
    ring = np.arange(m) + 1
    tris = np.stack([np.zeros(m, dtype=int), ring, np.roll(ring, -1)], 1)
    return rows, tris


def prism_parts(spec: PrismSpec, resolution: int, phi_range=DEFAULT_PHI_RANGE):
    """Homogeneous sample rows and local triangles of each labelled part of a prism."""
    solid = prism(spec, resolution, phi_range)
    parts = []
    for surf in solid.side_surfaces:
        n_t, n_phi = surf.shape
        parts.append((f"side_{surf.index}", surf.samples.reshape(-1, 4), _grid_faces(n_t, n_phi, 0)))
    boundary = np.vstack([curve[:-1] for curve in solid.base.side_curves])
    rows, tris = _fan(boundary)
    if solid.bounded:
        parts.append(("cover_base", rows, tris))
        parts.append(("cover_top", rows @ solid.cover_translation.m, tris))
    else:
        parts.append(("base", rows, tris))
    return parts


def vertices_per_tile(p: int, resolution: int, bounded: bool) -> int:
    fan = 1 + p * (resolution - 1)
    return p * resolution * resolution + (2 if bounded else 1) * fan


def build_mesh(patch: TilingPatch, resolution: int = DEFAULT_SAMPLES, phi_range=DEFAULT_PHI_RANGE) -> Mesh:
    if resolution < 2:
        raise InvalidParameter("resolution must be at least 2")
    parts = prism_parts(patch.spec, resolution, phi_range)
    verts, faces, groups, objects = [], [], [], []
    n_verts = n_faces = 0
    for iso, tile_id in patch.tiles:
        name = f"tile_{tile_id}"
        first_vertex = n_verts
        for label, rows, tris in parts:
            image = rows @ iso.m
            if np.any(np.abs(image[:, 0]) < 1e-12):
                raise AtInfinity(f"{name}/{label} reaches the ideal plane")
            verts.append(image[:, 1:] / image[:, :1])
            faces.append(tris + n_verts)
            groups.append((name, label, n_faces, n_faces + len(tris)))
            n_verts += len(rows)
            n_faces += len(tris)
        objects.append((name, first_vertex, n_verts))
    mesh = Mesh(np.vstack(verts), np.vstack(faces).astype(int), groups, objects)
    mesh.validate()
    return mesh


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def format_obj(mesh: Mesh, header: str = "") -> str:
    lines = [f"# {line}" for line in header.splitlines()]
    by_object: dict[str, list[tuple[str, int, int]]] = {}
    for obj, part, lo, hi in mesh.groups:
        by_object.setdefault(obj, []).append((part, lo, hi))
    for obj, v_lo, v_hi in mesh.objects:
        lines.append(f"o {obj}")
        lines.extend(f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}" for x, y, z in mesh.vertices[v_lo:v_hi])
        for part, lo, hi in by_object[obj]:
            lines.append(f"g {obj}_{part}")
            lines.append(f"usemtl {part}")
            lines.extend(f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces[lo:hi])
    return "\n".join(lines) + "\n"


def write_obj(mesh: Mesh, path, header: str = "") -> None:
    Path(path).write_text(format_obj(mesh, header), encoding="ascii")


def parse_obj(text: str) -> dict:
    """Minimal OBJ reader: vertices, 1-based faces and the ``o``/``usemtl`` names seen."""
    vertices, faces, objects, materials = [], [], [], []
    for line in text.splitlines():
        if not line or line.startswith("#"):
            continue
        key, *rest = line.split()
        if key == "v":
            vertices.append([float(v) for v in rest])
        elif key == "f":
            faces.append([int(v.split("/")[0]) for v in rest])
        elif key == "o":
            objects.append(rest[0])
        elif key == "usemtl":
            materials.append(rest[0])
    return {"vertices": vertices, "faces": faces, "objects": objects, "materials": materials}


# -- JSON report -------------------------------------------------------------


def _dump(value, indent: int = 0) -> str:
    """JSON text with every float printed to 17 significant digits."""
    pad = "  " * (indent + 1)
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError("non-finite float in report")
        text = _fmt(value)
        return text if any(ch in text for ch in ".en") else text + ".0"
    if isinstance(value, (int, str)):
        return json.dumps(value)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(value, (list, tuple)):
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
            return "[" + ", ".join(_dump(v) for v in value) + "]"
        items = [pad + _dump(v, indent + 1) for v in value]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _floats(values) -> list:
    return [float(v) for v in values]


@dataclass
class TilingReport:
    p: int
    q: int
    x3: float
    phi_tau: float | None
    vertices: list[list[float]]
    a_prime_1: list[float]
    f: list[float]
    s2_plane: list[float]
    s2_k: float
    generators: list[list[list[float]]]
    residuals: dict[str, float]
    verdict: str | None

    @classmethod
    def from_spec(cls, spec: PrismSpec) -> "TilingReport":
        a_prime, midpoint = rotated_vertex_and_midpoint(spec)
        plane, k = cover_plane_S2(spec)
        verdict = face_to_face_check(spec).verdict.value if spec.bounded else None
        report = cls(
            p=spec.p,
            q=spec.q,
            x3=float(spec.x3),
            phi_tau=None if spec.phi_tau is None else float(spec.phi_tau),
            vertices=[_floats(a.coords) for a in vertex_ring(spec.p, spec.x3)],
            a_prime_1=_floats(a_prime.coords),
            f=_floats(midpoint.coords),
            s2_plane=_floats(plane),
            s2_k=float(k),
            generators=[g.m.tolist() for g in generators(spec)],
            residuals={},
            verdict=verdict,
        )
        report.residuals = report.recompute_residuals()
        return report

    def recompute_residuals(self) -> dict[str, float]:
        """Diagnostics evaluated purely from the stored numbers."""
        A = [HPoint(v) for v in self.vertices]
        a_prime, midpoint = HPoint(self.a_prime_1), HPoint(self.f)
        gens = [Isometry(g) for g in self.generators]
        a3 = A[2 % self.p]
        moved = HPoint(A[0].coords @ gens[1].m).canonical()
        eye = Isometry(np.eye(4)).canonical()
        return {
            "vertex_angle": abs(vertex_angle_residual(self.p, self.q, self.x3)),
            "a_prime_1_trace": point_angle(trace_point(a_prime), a3),
            "f_trace": point_angle(trace_point(midpoint), a3),
            "generator_image": point_angle(moved, a_prime),
            "s2_a1": abs(plane_residual(self.s2_plane, A[0].coords[1:] / A[0][0])),
            "s2_a_prime_1": abs(plane_residual(self.s2_plane, a_prime.coords[1:] / a_prime[0])),
            "isometry_constraints": max(validate_isometry(g).max_residual for g in gens),
            "generator_order": max(
                float(np.max(np.abs(g.power(self.q).canonical() - eye))) for g in gens
            ),
        }

    def is_consistent(self, tol: float = REPORT_TOL) -> bool:
        fresh = self.recompute_residuals()
        return fresh.keys() == self.residuals.keys() and all(
            abs(fresh[key] - self.residuals[key]) <= tol for key in fresh
        )

    def to_json(self) -> str:
        return _dump(asdict(self)) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "TilingReport":
        data = json.loads(text)
        data["residuals"] = {k: float(v) for k, v in data["residuals"].items()}
        return cls(**data)


def export_patch(spec: PrismSpec, depth: int, resolution: int, phi_range, obj_path, json_path) -> tuple[Mesh, TilingReport]:
    """Write the OBJ mesh and its JSON sidecar for a tiling patch."""
    if spec.bounded and not -np.pi / 2 < spec.phi_tau < np.pi / 2:
        raise InvalidParameter("phi_tau must lie in (-pi/2, pi/2) for export")
    if not -np.pi / 2 < phi_range[0] < phi_range[1] < np.pi / 2:
        raise InvalidParameter("phi range must be increasing inside (-pi/2, pi/2)")
    patch = tiling_patch(spec, depth)
    mesh = build_mesh(patch, resolution, phi_range)
    report = TilingReport.from_spec(spec)
    kind = "bounded" if spec.bounded else "infinite"
    header = (
        f"sl2prism {kind} prism tiling p={spec.p} q={spec.q} x3={_fmt(spec.x3)}\n"
        f"tiles={len(patch)} depth={depth} resolution={resolution}"
    )
    write_obj(mesh, obj_path, header)
    Path(json_path).write_text(report.to_json(), encoding="ascii")
    return mesh, report
