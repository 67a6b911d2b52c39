"""Concurrent normals to convex polytope boundaries.

Counts and classifies the normals from interior points, decomposes the
interior into constant-count chambers, computes exact and Monte-Carlo
averages, and certifies the ten-normals lower bound through nice vertices.
"""

__version__ = "0.1.0"

from . import errors, fixtures
from .geometry import (
    DEFAULT_TOL,
    Face,
    Polytope,
    chebyshev_center,
    cone_contains,
    contains_interior,
    dihedral_angle,
    hull_from_points,
    inner_normal_cone,
    planar_angle,
    polytope_from_halfspaces,
)
from .normals import (
    MorseProfile,
    NormalRecord,
    count_normals_batch,
    face_normal_from,
    morse_profile,
    normals_from_point,
    perturb_to_generic,
)
from .bifurcation import (
    Chamber,
    CrossingEvent,
    SheetPlane,
    chamber_decomposition,
    chamber_report,
    check_crossing_rule,
    crossing_audit,
    exact_average,
    max_normals,
    monte_carlo_average,
    plane_section,
    point_on_sheet,
    sheet_planes,
    spot_check_chamber,
)
from .spherical import (
    SphericalTriangle,
    VertexClassification,
    acute_census,
    classify_by_definition,
    classify_by_lemma,
    local_critical_test,
    normal_fan_tiling,
    polar_dual_triangle,
    random_hemispheric_triangle,
    ray_scan_counts,
    shell_ratio_check,
    spherical_distance,
    spherical_project,
    ten_normals_certificate,
    vertex_figure,
)
from .explorer import (
    ScanConfig,
    ScanReport,
    random_polytope,
    scan,
    witness_lower_bound,
)
from .fileio import read_polytope, write_polytope

__all__ = [name for name in dir() if not name.startswith("_")]
