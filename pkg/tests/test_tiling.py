from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sl2prism.core_model import HPoint, fibre_coordinate, point_angle, to_inhomogeneous, trace_point, trace_points
from sl2prism.exceptions import DegenerateK, InadmissibleQ, InvalidParameter, NoConvergence
from sl2prism.isometry import IDENTITY, apply, fibre_translation, invariant_plane, plane_residual, rotation_about_fibre
from sl2prism.reference import MIDPOINT_3_7, ROTATED_VERTEX_3_7, TABLE_X3, TABLE_X3_CORRECTED, X3_P4_Q6
from sl2prism.tiling import (
    PrismSpec,
    Verdict,
    admissible,
    base_side_curve,
    bisect,
    bounded_prism,
    check_patch,
    closed_form_x3_p3,
    cover_plane_S2,
    face_to_face_check,
    generator,
    infinite_prism,
    parallel_defect,
    ring_step,
    rotated_vertex_and_midpoint,
    side_surface,
    solve,
    solve_x3,
    surface_mapping_residual,
    tiling_patch,
    vertex_angle_residual,
    vertex_ring,
)

ADMISSIBLE_SMALL = [(p, q) for p in range(3, 11) for q in range(3, 51) if admissible(p, q)]


@pytest.fixture(scope="module")
def spec37():
    return solve(3, 7, phi_tau=0.5)


def landing_angle(p, x3, omega):
    """Signed base-plane angle from A_3 to the trace of A_1 rotated about f_2."""
    A = vertex_ring(p, x3)
    moved = A[0].coords @ rotation_about_fibre(A[1], omega).m
    t = trace_point(HPoint(moved)).canonical().coords[2:]
    a = A[2].coords[2:]
    return np.arctan2(a[0] * t[1] - a[1] * t[0], a @ t)


# -- vertices and the angle condition ---------------------------------------------


def test_vertex_ring_examples():
    A = vertex_ring(3, 0.30007426)
    np.testing.assert_array_equal(A[0].coords, [1, 0, 0, 0.30007426])
    A = vertex_ring(4, 0.4)
    np.testing.assert_allclose(A[1].coords, [1, 0, 0.4, 0], atol=1e-16)
    for p in range(3, 9):
        radii = [np.hypot(a[2], a[3]) for a in vertex_ring(p, 0.61)]
        np.testing.assert_allclose(radii, 0.61)


@pytest.mark.parametrize("args", [(2, 0.3), (3, 0.0), (3, 1.0), (3, -0.2)])
def test_vertex_ring_invalid(args):
    with pytest.raises(InvalidParameter):
        vertex_ring(*args)


def test_residual_vanishes_at_reference_roots():
    assert abs(vertex_angle_residual(3, 7, TABLE_X3_CORRECTED[(3, 7)])) <= 1e-6
    assert abs(vertex_angle_residual(4, 6, X3_P4_Q6)) <= 1e-12


def test_printed_37_entry_is_not_a_root():
    # the printed (3, 7) table entry has transposed digits
    assert abs(vertex_angle_residual(3, 7, TABLE_X3[(3, 7)])) > 1e-4


@pytest.mark.parametrize("p,q", [(3, 7), (4, 6), (5, 4), (8, 3)])
def test_residual_flat_limit(p, q):
    expected = np.pi * (p - 2) / p - 2 * np.pi / q
    assert vertex_angle_residual(p, q, 1e-7) == pytest.approx(expected, abs=1e-9)
    assert expected > 0


@pytest.mark.parametrize("p", [3, 4, 5, 7, 10])
def test_residual_strictly_decreasing(p):
    values = [vertex_angle_residual(p, 50, x) for x in np.linspace(1e-4, 1 - 1e-4, 400)]
    assert np.all(np.diff(values) < 0)


# -- solver ---------------------------------------------------------------------------


@pytest.mark.parametrize("key", sorted(TABLE_X3_CORRECTED))
def test_solve_reference_table(key):
    assert solve_x3(*key) == pytest.approx(TABLE_X3_CORRECTED[key], abs=1e-7)


def test_solve_p4_q6():
    assert solve_x3(4, 6) == pytest.approx(X3_P4_Q6, abs=1e-9)


@pytest.mark.parametrize("p,q", [(3, 6), (3, 3), (4, 4), (6, 3)])
def test_solve_inadmissible(p, q):
    with pytest.raises(InadmissibleQ) as info:
        solve_x3(p, q)
    assert f"{2 * p / (p - 2):g}" in str(info.value)


def test_solve_rejects_small_p():
    with pytest.raises(InvalidParameter):
        solve_x3(2, 100)


def test_solve_reports_no_convergence():
    with pytest.raises(NoConvergence):
        solve_x3(3, 7, tol=1e-300, max_iter=5)


def test_bisect_without_sign_change():
    with pytest.raises(NoConvergence):
        bisect(lambda x: x * x + 1, -1, 1)


@pytest.mark.parametrize("p,q", [(3, 7), (3, 12), (4, 6), (5, 4), (6, 5), (9, 3)])
def test_solver_against_grid_scan(p, q):
    # independent oracle: sign change of the landing angle on a dense grid
    grid = np.linspace(1e-3, 1 - 1e-3, 4001)
    values = np.array([landing_angle(p, x, 2 * np.pi / q) for x in grid])
    crossings = np.nonzero(np.diff(np.sign(values)))[0]
    crossings = [i for i in crossings if abs(values[i]) < 0.5]
    assert len(crossings) == 1
    i = crossings[0]
    root = grid[i] - values[i] * (grid[i + 1] - grid[i]) / (values[i + 1] - values[i])
    assert solve_x3(p, q) == pytest.approx(root, abs=1e-6)


@pytest.mark.parametrize("p,q", ADMISSIBLE_SMALL)
def test_vertex_condition(p, q):
    spec = solve(p, q)
    A = vertex_ring(p, spec.x3)
    moved = apply(generator(spec, 2), A[0])
    assert point_angle(trace_point(moved).canonical(), A[2]) <= 1e-8


def test_closed_form_examples():
    assert closed_form_x3_p3(7) == pytest.approx(TABLE_X3_CORRECTED[(3, 7)], abs=1e-8)
    assert closed_form_x3_p3(9) == pytest.approx(0.47611091, abs=1e-8)
    assert closed_form_x3_p3(10**9) == pytest.approx(1.0, abs=1e-8)
    for q in (6, 3, 0):
        with pytest.raises(InadmissibleQ):
            closed_form_x3_p3(q)


@settings(max_examples=40, deadline=None)
@given(st.integers(7, 400))
def test_solver_matches_closed_form(q):
    assert abs(solve_x3(3, q) - closed_form_x3_p3(q)) <= 1e-9


def test_prism_spec_validation():
    with pytest.raises(InadmissibleQ):
        PrismSpec(3, 6, 0.3)
    with pytest.raises(InvalidParameter):
        PrismSpec(3, 7, 1.2)
    with pytest.raises(InvalidParameter):
        PrismSpec(3, 7, 0.3, phi_tau=0.0)
    assert PrismSpec(3, 7, 0.3, phi_tau=-0.2).bounded


def test_rotation_orientation_is_positive():
    for p, q in [(3, 7), (4, 6), (5, 4), (7, 3)]:
        assert solve(p, q).rotation_sign == 1


# -- rotated vertex, midpoint, surfaces -----------------------------------------------------


def test_rotated_vertex_and_midpoint_printed_values(spec37):
    moved, midpoint = rotated_vertex_and_midpoint(spec37, pivot=1)
    np.testing.assert_allclose(moved.coords, ROTATED_VERTEX_3_7, atol=1e-6)
    np.testing.assert_allclose(midpoint.coords, MIDPOINT_3_7, atol=1e-6)


def test_rotated_vertex_pivots_are_symmetric(spec37):
    first = rotated_vertex_and_midpoint(spec37, pivot=1)
    second = rotated_vertex_and_midpoint(spec37, pivot=2)
    step = ring_step(3)
    for a, b in zip(first, second):
        assert apply(step, a).same_as(b, 1e-12)


@pytest.mark.parametrize("p,q", [(3, 7), (4, 6), (5, 4), (6, 9)])
def test_rotated_vertex_and_midpoint_on_f3(p, q):
    spec = solve(p, q)
    A = vertex_ring(p, spec.x3)
    moved, midpoint = rotated_vertex_and_midpoint(spec)
    assert trace_point(moved).same_as(A[2], 1e-9)
    assert trace_point(midpoint).same_as(A[2], 1e-9)
    assert fibre_coordinate(midpoint) == pytest.approx(fibre_coordinate(moved) / 2, abs=1e-12)


def test_side_surface_endpoints(spec37):
    A = vertex_ring(3, spec37.x3)
    surf = side_surface(spec37, 2, resolution=9, phi_range=(-1.0, 1.0))
    for j, phi in enumerate(surf.phis):
        assert HPoint(surf.samples[0, j]).same_as(apply(fibre_translation(phi), A[1]), 1e-12)
    zero = side_surface(spec37, 2, resolution=9, phi_range=(0.0, 1.0))
    assert HPoint(zero.samples[-1, 0]).same_as(A[2], 1e-12)
    start, end = surf.generator_segment
    np.testing.assert_allclose(start.as_array(), to_inhomogeneous(A[1]).as_array())
    assert end.x == pytest.approx(rotated_vertex_and_midpoint(spec37)[1][1])


def test_side_surface_samples_lie_on_segment_fibres(spec37):
    surf = side_surface(spec37, 2, resolution=12)
    A = vertex_ring(3, spec37.x3)
    _, midpoint = rotated_vertex_and_midpoint(spec37)
    from sl2prism.tiling import line_meets_segment

    for row in surf.samples.reshape(-1, 4):
        residual, t = line_meets_segment(row, A[1], midpoint)
        assert residual <= 1e-12 and -1e-9 <= t <= 1 + 1e-9


@pytest.mark.parametrize("p,q", [(3, 7), (4, 6), (5, 4)])
def test_side_surfaces_are_rotations_of_each_other(p, q):
    spec = solve(p, q)
    step = ring_step(p)
    for k in range(1, p + 1):
        here = side_surface(spec, k, resolution=8).samples.reshape(-1, 4)
        there = side_surface(spec, k + 1, resolution=8).samples.reshape(-1, 4)
        np.testing.assert_allclose(here @ step.m, there, atol=1e-10)


def test_base_side_curve_examples(spec37):
    A = vertex_ring(3, spec37.x3)
    curve = base_side_curve(spec37, 2, 33)
    assert HPoint(curve[0]).same_as(A[1], 1e-12)
    assert HPoint(curve[-1]).same_as(A[2], 1e-12)
    assert np.all(curve[:, 1] == 0)
    assert np.all(np.hypot(curve[:, 2], curve[:, 3]) < 1)


@pytest.mark.parametrize("p,q", [(3, 7), (4, 6), (7, 3)])
def test_base_side_curves_congruent(p, q):
    spec = solve(p, q)
    step = ring_step(p)
    A = vertex_ring(p, spec.x3)
    for k in range(1, p + 1):
        curve = base_side_curve(spec, k, 16)
        assert HPoint(curve[0]).same_as(A[(k - 1) % p], 1e-12)
        np.testing.assert_allclose(curve @ step.m, base_side_curve(spec, k + 1, 16), atol=1e-10)


def test_base_side_curve_is_trace_of_segment(spec37):
    A = vertex_ring(3, spec37.x3)
    _, F = rotated_vertex_and_midpoint(spec37)
    ts = np.linspace(0, 1, 11)
    segment = (1 - ts)[:, None] * A[1].coords + ts[:, None] * F.coords
    np.testing.assert_allclose(base_side_curve(spec37, 2, 11), trace_points(segment), atol=1e-15)


@pytest.mark.parametrize("p,q", [(3, 7), (3, 8), (4, 6), (5, 4)])
def test_rotated_side_curve_lies_on_next_surface(p, q):
    # image of c(A1 A2) under r2 stays on the surface over c(A2 A3)
    result = surface_mapping_residual(solve(p, q), resolution=12)
    assert result["max_residual"] <= 1e-8
    assert result["t_min"] == pytest.approx(0, abs=1e-9)
    assert result["t_max"] == pytest.approx(1, abs=1e-9)


# -- cover plane, bounded prisms, patches -------------------------------------------------


def test_cover_plane_k_value(spec37):
    plane, k = cover_plane_S2(spec37)
    # independent evaluation at the closed-form root
    assert k == pytest.approx(0.07493964001908697, abs=1e-10)
    A = vertex_ring(3, spec37.x3)
    np.testing.assert_allclose(plane, invariant_plane(A[1], k), atol=1e-15)
    assert abs(plane_residual(plane, to_inhomogeneous(A[0]))) <= 1e-15


@pytest.mark.parametrize("p,q", [(3, 7), (4, 6), (5, 4), (8, 3)])
def test_cover_plane_holds_rotation_orbit(p, q, rng):
    spec = solve(p, q)
    plane, _ = cover_plane_S2(spec)
    A = vertex_ring(p, spec.x3)
    for omega in rng.uniform(-np.pi, np.pi, 100):
        image = apply(rotation_about_fibre(A[1], omega), A[0])
        assert abs(plane_residual(plane, to_inhomogeneous(image))) <= 1e-9
    assert parallel_defect(plane) > 1e-3


def test_cover_plane_degenerate_k():
    with pytest.raises(DegenerateK):
        cover_plane_S2(SimpleNamespace(p=6, x3=np.sqrt(2.0)))


def test_bounded_prism_vertices(spec37):
    solid = bounded_prism(spec37, resolution=8)
    assert solid.bounded
    for b in solid.top_vertices:
        assert fibre_coordinate(b) == pytest.approx(0.5, abs=1e-14)
        assert to_inhomogeneous(b).x == pytest.approx(np.tan(0.5), abs=1e-14)
    for surf in solid.side_surfaces:
        assert surf.phis[0] == 0 and surf.phis[-1] == 0.5
    with pytest.raises(InvalidParameter):
        bounded_prism(spec37.with_phi_tau(None))


def test_bounded_prism_stack_partitions_infinite_prism(spec37):
    phi_tau = 0.3
    spec = spec37.with_phi_tau(phi_tau)
    solid = bounded_prism(spec, resolution=6)
    tau = solid.cover_translation
    infinite = infinite_prism(spec, resolution=6, phi_range=(0.0, 1.2))
    for surf in solid.side_surfaces:
        lower = surf.samples
        upper = surf.samples @ tau.m
        # top row of one copy is the bottom row of the next
        np.testing.assert_allclose(lower[:, -1], upper[:, 0], atol=1e-12)
        # fibre windows of consecutive copies meet only at the shared cover face
        lo = np.arctan(lower[..., 1] / lower[..., 0])
        hi = np.arctan(upper[..., 1] / upper[..., 0])
        assert lo.max() <= hi.min() + 1e-12
    assert all(s.index == t.index for s, t in zip(solid.side_surfaces, infinite.side_surfaces))


def test_cover_plane_stack_distinct():
    phi_tau = 0.35
    heights = [np.tan(n * phi_tau) for n in range(-4, 5)]
    assert len(set(np.round(heights, 12))) == len(heights)


def test_patch_depth_zero(spec37):
    patch = tiling_patch(spec37.with_phi_tau(None), 0)
    assert patch.ids == ["e"]
    assert patch.tiles[0][0].equals(IDENTITY)


@pytest.mark.parametrize("p,q", [(3, 7), (4, 6), (5, 4)])
def test_patch_depth_one(p, q):
    patch = tiling_patch(solve(p, q), 1)
    assert patch.ids == ["e"] + [f"r{k}" for k in range(1, p + 1)]
    assert check_patch(patch) <= 1e-10
    bounded = tiling_patch(solve(p, q, 0.4), 1)
    assert len(bounded) == p + 3


def test_patch_removes_duplicates():
    # distinct words of length 2 can give the same group element
    patch = tiling_patch(solve(4, 6), 2)
    keys = [iso.canonical() for iso, _ in patch.tiles]
    for i in range(len(keys)):
        for j in range(i):
            assert np.max(np.abs(keys[i] - keys[j])) > 1e-8
    assert len(patch) < 1 + 4 + 16


@pytest.mark.parametrize("p,q", [(3, 7), (4, 6), (5, 4)])
def test_generators_have_order_q(p, q):
    spec = solve(p, q)
    for k in range(1, p + 1):
        assert generator(spec, k).power(q).equals(IDENTITY, 1e-10)
        assert not generator(spec, k).power(q - 1).equals(IDENTITY, 1e-6)


@pytest.mark.parametrize("p,q,phi", [(3, 7, 0.5), (4, 6, 0.2), (4, 6, -0.7), (6, 4, 1.0)])
def test_face_to_face_check(p, q, phi):
    report = face_to_face_check(solve(p, q, phi))
    assert report.verdict is Verdict.NON_FACE_TO_FACE
    assert report.s2_defect >= 1e-6
    assert report.neighbour_base_defect >= 1e-6
    assert report.orbit_residual <= 1e-9


def test_face_to_face_needs_bounded_spec():
    with pytest.raises(InvalidParameter):
        face_to_face_check(solve(3, 7))
