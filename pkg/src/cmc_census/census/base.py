import enum
import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

import sympy

from cmc_census.moduli import SurfaceSpec
from cmc_census.symcore import (
    RationalFunction,
    exact_sqrt,
    is_zero,
    scalar_from_str,
    scalar_to_str,
)

LOGGER = logging.getLogger(__name__)


class Reducibility(enum.Enum):
    """Reducibility of the monodromy of the secondary Gauss map."""

    IRREDUCIBLE = "irreducible"
    H1 = "H1"
    H3 = "H3"
    # the table's wording for two-ended types, whose monodromy is always reducible
    REDUCIBLE = "reducible"
    # genus-one rows of the census table leave the column empty
    NONE = "-"


class Verdict(enum.Enum):
    """Outcome of a case verification."""

    VERIFIED = "verified"
    NONEXISTENT = "nonexistent"
    EXTERNAL = "external"
    UNKNOWN = "unknown"


class Status(enum.Enum):
    """The classification status of a type, as listed in the census table.

    `classified0` means unique up to isometry and deformation, `existence+` and
    `unknown+` mean that all `(G, Q)` are determined while the period problem is
    solved only in special cases or not at all.
    """

    CLASSIFIED = "classified"
    CLASSIFIED_UNIQUE = "classified0"
    EXISTENCE = "existence"
    EXISTENCE_PLUS = "existence+"
    UNKNOWN = "unknown"
    UNKNOWN_PLUS = "unknown+"


class ConstraintViolation(ValueError):
    """Parameters rejected by the constraint of a census case."""


class ConstraintKind(enum.Enum):
    """Kinds of parameter constraints."""

    EQUALS = "equals"
    SQRT_REAL_NON_INTEGER = "sqrt-real-non-integer"
    SQRT_INTEGER_GE_2 = "sqrt-integer-ge-2"
    EXCLUDED_SET = "excluded-set"


def _is_nonnegative_real(x: sympy.Expr) -> bool:
    return bool(x.is_real) and bool(x.is_nonnegative)


@dataclass(frozen=True)
class ThetaConstraint:
    """An exactly decidable condition on the parameters of a case.

    `payload` depends on the kind: `(value, target)` for `equals`, `(radicand,)`
    for the two square-root kinds and `(value, *excluded)` for `excluded-set`.
    """

    kind: ConstraintKind
    payload: tuple[Any, ...]
    description: str = ""

    @property
    def holds(self) -> bool:
        """Decide the constraint exactly.

        :raises ValueError: When the payload still contains free symbols.
        """
        values = [sympy.nsimplify(sympy.sympify(x)) for x in self.payload]
        if any(v.free_symbols for v in values):
            raise ValueError(f"Constraint {self.description!r} is not decidable.")
        if self.kind == ConstraintKind.EQUALS:
            return is_zero(values[0] - values[1])
        if self.kind == ConstraintKind.EXCLUDED_SET:
            return not any(is_zero(values[0] - x) for x in values[1:])
        radicand = sympy.radsimp(values[0])
        if not _is_nonnegative_real(radicand):
            return False
        root = exact_sqrt(radicand)
        if self.kind == ConstraintKind.SQRT_REAL_NON_INTEGER:
            return not bool(root.is_integer)
        return bool(root.is_integer) and bool(root >= 2)

    def require(self) -> None:
        """Raise unless the constraint holds.

        :raises ConstraintViolation: When it does not.
        """
        if not self.holds:
            raise ConstraintViolation(
                f"Constraint {self.kind.value} violated: {self.description}."
            )

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            "kind": self.kind.value,
            "payload": [scalar_to_str(x) for x in self.payload],
            "description": self.description,
        }


@dataclass
class CaseRecord:
    """The outcome of one census case.

    A record may only carry the verdict `verified` when every attached check passed.
    """

    tag: str
    type_tag: str
    TA: str
    reducibility: Reducibility
    verdict: Verdict
    status: Status
    params: dict[str, str] = field(default_factory=dict)
    spec: SurfaceSpec | None = None
    secondary_g: RationalFunction | str | None = None
    checks: dict[str, bool] = field(default_factory=dict)
    notes: str = ""
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Validate the verdict.

        :raises ValueError: When a verified record has a failing check.
        """
        failed = [k for k, v in self.checks.items() if not v]
        if self.verdict == Verdict.VERIFIED and failed:
            raise ValueError(f"Record {self.tag} is verified but fails {failed}.")

    @property
    def family_dimension(self) -> int:
        """Size of the deformation family sharing `(G, Q)`."""
        return family_dimension(self)

    def to_json(self) -> dict[str, Any]:
        """JSON form; exact values are strings."""
        out: dict[str, Any] = {
            "tag": self.tag,
            "type": self.type_tag,
            "TA": self.TA,
            "reducibility": self.reducibility.value,
            "verdict": self.verdict.value,
            "status": self.status.value,
            "params": dict(sorted(self.params.items())),
            "checks": dict(sorted(self.checks.items())),
            "family_dimension": self.family_dimension,
            "notes": self.notes,
            "metadata": self.metadata,
        }
        if self.spec is not None:
            out["spec"] = self.spec.to_json()
            out["spec_hash"] = self.spec.spec_hash()
        if isinstance(self.secondary_g, RationalFunction):
            out["secondary_g"] = self.secondary_g.to_json()
        elif self.secondary_g is not None:
            out["secondary_g"] = self.secondary_g
        return out


def family_dimension(record: CaseRecord) -> int:
    """Dimension of the deformation family of a record.

    H3-reducible surfaces come in 3-parameter families and H1-reducible ones in
    1-parameter families; the members share `G` and `Q`.

    :param record: The record.
    :return: 3, 1 or 0.
    """
    if record.verdict != Verdict.VERIFIED:
        return 0
    monodromy = record.metadata.get("monodromy", record.reducibility.value)
    return {"H3": 3, "H1": 1}.get(monodromy, 0)


def record_params(params: Mapping[str, Any]) -> dict[str, str]:
    """Serialize parameter values."""
    return {k: scalar_to_str(v) for k, v in params.items()}


def verdict_from(checks: Mapping[str, bool], tag: str) -> Verdict:
    """`verified` when all checks pass, `unknown` otherwise."""
    failed = [k for k, v in checks.items() if not v]
    if failed:
        LOGGER.warning("%s fails checks %s", tag, failed)
        return Verdict.UNKNOWN
    return Verdict.VERIFIED


def exact_param(value: Any) -> sympy.Expr:
    """Turn a user-supplied parameter into an exact sympy value.

    Strings are parsed, floats are read by their shortest decimal representation.
    """
    if isinstance(value, str):
        return scalar_from_str(value)
    if isinstance(value, float):
        return sympy.Rational(repr(value))
    return sympy.sympify(value)
