""".. include:: ../docs/census.md"""  # noqa: D400, D415

from cmc_census.census.base import (
    CaseRecord,
    ConstraintKind,
    ConstraintViolation,
    Reducibility,
    Status,
    ThetaConstraint,
    Verdict,
    family_dimension,
)
from cmc_census.census.four_pi import FOUR_PI_CASES, build_4pi
from cmc_census.census.genus_one import genus_one_records, i3, i4, i11_candidate, i22
from cmc_census.census.one_end import o5, o6
from cmc_census.census.table import (
    CASES,
    DEFAULT_PARAMS,
    STATUS_VERDICTS,
    TABLE1,
    TableBlock,
    TableEntry,
    minimal_analogues,
    run_all,
    run_case,
    table1,
)
from cmc_census.census.three_ends import (
    o112,
    o122_h1,
    o122_h3,
    o222_h1,
    o222_h3,
    o222_irreducible,
)
from cmc_census.census.two_ends import (
    o13,
    o14,
    o22,
    o23_a,
    o23_b,
    o23_h3_nonexistence,
    o24_h1,
    o24_h3,
    o33_record,
)

__all__ = [
    "CASES",
    "DEFAULT_PARAMS",
    "FOUR_PI_CASES",
    "STATUS_VERDICTS",
    "TABLE1",
    "CaseRecord",
    "ConstraintKind",
    "ConstraintViolation",
    "Reducibility",
    "Status",
    "TableBlock",
    "TableEntry",
    "ThetaConstraint",
    "Verdict",
    "build_4pi",
    "family_dimension",
    "genus_one_records",
    "i3",
    "i4",
    "i11_candidate",
    "i22",
    "minimal_analogues",
    "o5",
    "o6",
    "o13",
    "o14",
    "o22",
    "o23_a",
    "o23_b",
    "o23_h3_nonexistence",
    "o24_h1",
    "o24_h3",
    "o33_record",
    "o112",
    "o122_h1",
    "o122_h3",
    "o222_h1",
    "o222_h3",
    "o222_irreducible",
    "run_all",
    "run_case",
    "table1",
]
