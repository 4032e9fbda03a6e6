"""Convexity of invariant sets through orbit-space geometry.

Group actions and orbit distances live in ``groups``, support functions and
hull oracles in ``convex``, saturated sets and the slope criterion in
``submetry``, end-to-end checks in ``scenarios``.
"""

from .config import DEFAULT_SEED, TOL, Tolerances
from .convex import (
    BipolarOracle,
    MembershipResult,
    OrthogonalOrbitope,
    SupportOracle,
    affine_dimension,
    bipolar_check,
    conv_membership,
    hull_hausdorff,
    polar_support,
    project_cloud,
    projection_polar_check,
    support,
)
from .geomcore import PointCloud, Subspace, as_point, busemann_gap_bound, busemann_pairing, project
from .groups import (
    GroupAction,
    OrbitCloud,
    fixed_point_subspace,
    make_action,
    orbit,
    orbit_distance,
    section_slice,
)
from .report import VerificationReport
from .scenarios import ConfigError, parse_action, run_scenario
from .submetry import (
    SaturatedSet,
    SlopeEstimate,
    ascending_slope,
    basic_function_check,
    convexity_detect,
    distance_to_saturated,
    midpoint_convexity_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "BipolarOracle",
    "ConfigError",
    "DEFAULT_SEED",
    "GroupAction",
    "MembershipResult",
    "OrbitCloud",
    "OrthogonalOrbitope",
    "PointCloud",
    "SaturatedSet",
    "SlopeEstimate",
    "Subspace",
    "SupportOracle",
    "TOL",
    "Tolerances",
    "VerificationReport",
    "affine_dimension",
    "as_point",
    "ascending_slope",
    "basic_function_check",
    "bipolar_check",
    "busemann_gap_bound",
    "busemann_pairing",
    "conv_membership",
    "convexity_detect",
    "distance_to_saturated",
    "fixed_point_subspace",
    "hull_hausdorff",
    "make_action",
    "midpoint_convexity_oracle",
    "orbit",
    "orbit_distance",
    "parse_action",
    "polar_support",
    "project",
    "project_cloud",
    "projection_polar_check",
    "run_scenario",
    "section_slice",
    "support",
]
