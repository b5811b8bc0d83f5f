"""Principal curves of uniform densities on geometric domains.

Moving frames in spherical coordinates, transverse cross-section moments,
the curve dynamical system, closed-form helix analysis, and Monte-Carlo
self-consistency validation.
"""

from .domain import (
    Ball,
    Cuboid,
    Cylinder,
    DiskSector2D,
    Ellipse2D,
    Interval2D,
    Polygon2D,
    PolygonND,
    Prism,
    Quadrant2D,
    RotatedDomain,
    contains,
    cross_section,
    load_domain,
    sample_uniform,
    save_domain,
)
from .dynamics import (
    CurveState,
    CurveTrace,
    SolverConfig,
    integrate,
    rhs_general,
    rhs_quadrant,
    rotate_scene,
    trace_from_curve,
)
from .frame import (
    Curvatures,
    Frame,
    SphericalAngles,
    angles_from_tangent,
    bishop_propagate,
    frame_from_angles,
    principal_curvatures,
    tangent_from_angles,
    tangent_partial_norms,
)
from .helix import (
    HelixParams,
    helix_state,
    helix_trace,
    mean_offset_closed_form,
    mean_offset_quadrature,
    principal_pitch_search,
)
from .moments import (
    MomentSet,
    TransverseStats,
    gram_solve,
    moments_ellipse,
    moments_interval,
    moments_polygon,
    moments_quadrature,
    partial_moments,
    transverse_stats,
)
from .validate import (
    ValidationReport,
    admissibility_check,
    ambiguity_fraction,
    energy,
    full_report,
    projection_index,
    self_consistency_residual,
    voronoi_barycenters,
)

__version__ = "0.1.0"
