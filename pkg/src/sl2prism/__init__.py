"""Regular prism tilings of SL2R space in its projective model."""
from .core_model import (
    HPoint,
    HyperboloidParam,
    ModelPoint,
    fibre_coordinate,
    form_value,
    from_hyperboloid_params,
    from_inhomogeneous,
    sl2_chart,
    to_inhomogeneous,
    trace_point,
)
from .estimator import PrismTiling
from .exceptions import (
    AtInfinity,
    DegenerateK,
    DegeneratePlane,
    GeometryError,
    InadmissibleQ,
    InvalidParameter,
    NoConvergence,
    NonInteriorPoint,
    NotRescalable,
    ResultAtInfinity,
)
from .isometry import (
    Isometry,
    apply,
    compose,
    fibre_translation,
    invariant_plane,
    rotation_about_fibre,
    rotation_about_origin_fibre,
    translation_to,
    validate_isometry,
)
from .tiling import (
    PrismSpec,
    Verdict,
    base_side_curve,
    bounded_prism,
    closed_form_x3_p3,
    cover_plane_S2,
    face_to_face_check,
    rotated_vertex_and_midpoint,
    side_surface,
    solve,
    solve_x3,
    tiling_patch,
    vertex_angle_residual,
    vertex_ring,
)

__version__ = "0.1.0"
