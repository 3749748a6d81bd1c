""".. include:: ../docs/flatlab.md"""  # noqa: D400, D415

from cmc_census.flatlab.elliptic import (
    EllipticLattice,
    i11_density,
    sigma,
    wp,
    wp_prime,
    zeta,
)
from cmc_census.flatlab.periods import (
    B_constant,
    ConvergenceError,
    PeriodReport,
    b_integrals,
    cg_jacobian_exact,
    cg_periods,
    cg_solve,
    o33_data,
    o33_excluded,
    o33_gauss_map,
    o33_period,
    o33_report,
)
from cmc_census.flatlab.weierstrass import WeierstrassData, weier_integrate

__all__ = [
    "B_constant",
    "ConvergenceError",
    "EllipticLattice",
    "PeriodReport",
    "WeierstrassData",
    "b_integrals",
    "cg_jacobian_exact",
    "cg_periods",
    "cg_solve",
    "i11_density",
    "o33_data",
    "o33_excluded",
    "o33_gauss_map",
    "o33_period",
    "o33_report",
    "sigma",
    "weier_integrate",
    "wp",
    "wp_prime",
    "zeta",
]
