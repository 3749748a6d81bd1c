""".. include:: ../docs/frobenius.md"""  # noqa: D400, D415

from cmc_census.frobenius.equivalence import (
    EquivalenceReport,
    FormEntry,
    equivalence_report,
    exponent_gaps,
)
from cmc_census.frobenius.ode import (
    E0Form,
    E1SharpForm,
    E2SharpForm,
    EquationForm,
    IrregularSingularityError,
    RegularSingularODE,
    build_form,
    from_E0,
    from_E1sharp,
    from_E2sharp,
)
from cmc_census.frobenius.solver import (
    FormalSolution,
    FrobeniusReport,
    GapClass,
    IndicialData,
    ResonanceError,
    closed_form_condition,
    factorial_monomial,
    frobenius_report,
    indicial,
    log_coefficients,
    log_term,
    log_term_theta_poly,
    residual,
    second_solution,
    series_solution,
)

__all__ = [
    "E0Form",
    "E1SharpForm",
    "E2SharpForm",
    "EquationForm",
    "EquivalenceReport",
    "FormEntry",
    "FormalSolution",
    "FrobeniusReport",
    "GapClass",
    "IndicialData",
    "IrregularSingularityError",
    "RegularSingularODE",
    "ResonanceError",
    "build_form",
    "closed_form_condition",
    "equivalence_report",
    "exponent_gaps",
    "factorial_monomial",
    "frobenius_report",
    "from_E0",
    "from_E1sharp",
    "from_E2sharp",
    "indicial",
    "log_coefficients",
    "log_term",
    "log_term_theta_poly",
    "residual",
    "second_solution",
    "series_solution",
]
