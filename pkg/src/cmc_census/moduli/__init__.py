""".. include:: ../docs/moduli.md"""  # noqa: D400, D415

from cmc_census.moduli.analysis import (
    CompatibilityError,
    CurvatureReport,
    EndReport,
    ExistencePattern,
    UmbilicReport,
    analyze,
    apply_chart_inversion,
    apply_rigid_motion,
    curvature_report,
    existence_pattern,
)
from cmc_census.moduli.enumeration import (
    EXCLUSION_AXIOMS,
    Enumeration,
    Exclusion,
    ExclusionAxiom,
    TypeRecord,
    enumerate_types,
    type_tag,
)
from cmc_census.moduli.spec import GenusOneDescriptor, SurfaceSpec

__all__ = [
    "EXCLUSION_AXIOMS",
    "CompatibilityError",
    "CurvatureReport",
    "EndReport",
    "Enumeration",
    "Exclusion",
    "ExclusionAxiom",
    "ExistencePattern",
    "GenusOneDescriptor",
    "SurfaceSpec",
    "TypeRecord",
    "UmbilicReport",
    "analyze",
    "apply_chart_inversion",
    "apply_rigid_motion",
    "curvature_report",
    "enumerate_types",
    "existence_pattern",
    "type_tag",
]
