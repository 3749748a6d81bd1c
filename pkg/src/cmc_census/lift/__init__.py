""".. include:: ../docs/lift.md"""  # noqa: D400, D415

from cmc_census.lift.core import (
    IntegrationError,
    LiftData,
    LiftState,
    PathError,
    Tolerances,
    chordal_distance,
    coefficient_matrix,
    gauge_for_path,
    immerse,
    integrate_lift,
    sample_lift,
    secondary_gauss,
    secondary_gauss_numeric,
    su2_pole_gauge,
)
from cmc_census.lift.curvature import numeric_TA
from cmc_census.lift.mesh import (
    Annulus,
    Domain,
    Mesh,
    Rectangle,
    domain_from_json,
    dual_mesh,
    lift_grid,
    mesh,
    seam_mismatch,
)
from cmc_census.lift.monodromy import (
    MonodromyClass,
    MonodromyLoop,
    MonodromyReport,
    classify,
    deviation,
    eigenphase,
    fold_phase,
    monodromy,
    product_relation,
)
from cmc_census.lift.paths import Arc, Line, PathSegment, loop_around

__all__ = [
    "Annulus",
    "Arc",
    "Domain",
    "IntegrationError",
    "LiftData",
    "LiftState",
    "Line",
    "Mesh",
    "MonodromyClass",
    "MonodromyLoop",
    "MonodromyReport",
    "PathError",
    "PathSegment",
    "Rectangle",
    "Tolerances",
    "chordal_distance",
    "classify",
    "coefficient_matrix",
    "deviation",
    "domain_from_json",
    "dual_mesh",
    "eigenphase",
    "fold_phase",
    "gauge_for_path",
    "immerse",
    "integrate_lift",
    "lift_grid",
    "loop_around",
    "mesh",
    "monodromy",
    "numeric_TA",
    "product_relation",
    "sample_lift",
    "seam_mismatch",
    "secondary_gauss",
    "secondary_gauss_numeric",
    "su2_pole_gauge",
]
