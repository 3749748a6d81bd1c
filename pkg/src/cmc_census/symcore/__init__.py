""".. include:: ../docs/symcore.md"""  # noqa: D400, D415

from cmc_census.symcore.rational import (
    DivisorEntry,
    LaurentSeries,
    RationalFunction,
    SpherePoint,
    branch_order,
    chart,
    differential_order_at,
    divisor,
    integrate_exact,
    is_zero,
    laurent_at,
    local_series,
    mobius,
    order_at,
    rational_arithmetic,
    residue_at,
    schwarzian,
    schwarzian_expr,
)
from cmc_census.symcore.scalar import (
    THETA,
    Z,
    ExactnessError,
    ExactScalar,
    ParamScalar,
    Scalar,
    exact_sqrt,
    scalar_from_str,
    scalar_to_str,
    to_scalar,
)

__all__ = [
    "THETA",
    "Z",
    "DivisorEntry",
    "ExactScalar",
    "ExactnessError",
    "LaurentSeries",
    "ParamScalar",
    "RationalFunction",
    "Scalar",
    "SpherePoint",
    "branch_order",
    "chart",
    "differential_order_at",
    "divisor",
    "exact_sqrt",
    "integrate_exact",
    "is_zero",
    "laurent_at",
    "local_series",
    "mobius",
    "order_at",
    "rational_arithmetic",
    "residue_at",
    "scalar_from_str",
    "scalar_to_str",
    "schwarzian",
    "schwarzian_expr",
    "to_scalar",
]
