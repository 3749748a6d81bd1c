import itertools
import logging
from collections.abc import Iterator
from dataclasses import dataclass
from typing import Any

import pandas as pd

LOGGER = logging.getLogger(__name__)

GENUS_LETTERS = {0: "O", 1: "I", 2: "II"}


def type_tag(genus: int, d: tuple[int, ...]) -> str:
    """Return a tag such as `O(-2,-4)`."""
    return f"{GENUS_LETTERS.get(genus, f'G{genus}')}({','.join(map(str, d))})"


@dataclass(frozen=True)
class ExclusionAxiom:
    """An admissible case ruled out by an argument outside the enumerator.

    `kind` is `flux` for balancing-formula arguments taken as axioms and `derived`
    for cases ruled out by a computation elsewhere in this package (`check` names
    it).
    """

    name: str
    genus: int
    ends: tuple[tuple[int, int], ...] | None
    n_ends: int
    kind: str
    citation: str
    check: str = ""

    def matches(self, genus: int, ends: tuple[tuple[int, int], ...]) -> bool:
        """Whether a candidate `((d, mu#), ...)` falls under this axiom."""
        if genus != self.genus or len(ends) != self.n_ends:
            return False
        if self.ends is None:
            return True
        return sorted(ends) == sorted(self.ends)


EXCLUSION_AXIOMS: tuple[ExclusionAxiom, ...] = (
    ExclusionAxiom(
        "single embedded end of genus two",
        genus=2,
        ends=None,
        n_ends=1,
        kind="flux",
        citation="nonvanishing flux at a single embedded end contradicts the "
        "balancing formula (external: ends of type I and II)",
    ),
    ExclusionAxiom(
        "mixed regular ends in genus one",
        genus=1,
        ends=((-2, 0), (-1, 1)),
        n_ends=2,
        kind="flux",
        citation="an end of type I together with an end of type II contradicts "
        "the flux theorem for regular ends (external)",
    ),
    ExclusionAxiom(
        "log term at the simple end",
        genus=0,
        ends=((-1, 1), (-3, 1)),
        n_ends=2,
        kind="derived",
        citation="the log term at the end of order -1 vanishes only for theta = 0",
        check="census.o13",
    ),
)


@dataclass(frozen=True)
class TypeRecord:
    """An admissible combination of genus, end orders and branch orders."""

    genus: int
    d: tuple[int, ...]
    mu_sharp: tuple[int, ...]
    xi_total: int
    degree: int
    notes: str = ""

    @property
    def n_ends(self) -> int:
        """Number of ends."""
        return len(self.d)

    @property
    def tag(self) -> str:
        """Type tag such as `O(-2,-4)`."""
        return type_tag(self.genus, self.d)

    @property
    def slack(self) -> tuple[int, ...]:
        """`mu# - d` per end."""
        return tuple(m - d for m, d in zip(self.mu_sharp, self.d))

    def check(self) -> bool:
        """Re-check the total curvature, completeness and branch order bounds."""
        if self.degree == 0:
            return self.d == (0,) and self.xi_total == 0
        ta = 2 * self.genus - 2 + sum(self.slack) == 2 * self.degree
        complete = all(s >= 2 for s in self.slack)
        mu_bound = all(0 <= m <= self.degree - 1 for m in self.mu_sharp)
        rr = self.xi_total + sum(self.d) == 4 * self.genus - 4
        return ta and complete and mu_bound and rr and self.xi_total >= 0

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            "type": self.tag,
            "genus": self.genus,
            "d": list(self.d),
            "mu_sharp": list(self.mu_sharp),
            "xi_total": self.xi_total,
            "degree": self.degree,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class Exclusion:
    """A candidate removed by an axiom."""

    record: TypeRecord
    axiom: ExclusionAxiom

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            **self.record.to_json(),
            "axiom": self.axiom.name,
            "kind": self.axiom.kind,
            "citation": self.axiom.citation,
        }


@dataclass(frozen=True)
class Enumeration:
    """Admissible types for one total curvature budget."""

    TA_over_4pi: int
    types: tuple[TypeRecord, ...]
    exclusions: tuple[Exclusion, ...]

    @property
    def tags(self) -> list[str]:
        """Type tags, one per record (repeated for different branch patterns)."""
        return [t.tag for t in self.types]

    def to_frame(self) -> pd.DataFrame:
        """Tabulate admitted and excluded records.

        :return: One row per record with an `excluded_by` column.
        """
        rows = [{**t.to_json(), "excluded_by": None} for t in self.types]
        rows += [
            {**e.record.to_json(), "excluded_by": e.axiom.name} for e in self.exclusions
        ]
        df = pd.DataFrame(rows)
        df["d"] = df["d"].map(tuple)
        df["mu_sharp"] = df["mu_sharp"].map(tuple)
        return df

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            "TA_over_4pi": self.TA_over_4pi,
            "types": [t.to_json() for t in self.types],
            "exclusions": [e.to_json() for e in self.exclusions],
        }


def _candidates(k: int, genus: int, n: int) -> Iterator[TypeRecord]:
    total = 2 * k + 2 - 2 * genus
    pairs = [(s, mu) for s in range(2, total + 1) for mu in range(k)]
    for combo in itertools.combinations_with_replacement(pairs, n):
        if sum(s for s, _ in combo) != total:
            continue
        ends = sorted(((mu - s, mu) for s, mu in combo), key=lambda e: (-e[0], -e[1]))
        d = tuple(e[0] for e in ends)
        xi_total = 4 * genus - 4 - sum(d)
        if xi_total < 0:
            continue
        # umbilics have 1 <= xi <= deg G - 1
        if xi_total > 0 and k < 2:
            continue
        yield TypeRecord(genus, d, tuple(e[1] for e in ends), xi_total, k)


def enumerate_types(TA_over_4pi: int) -> Enumeration:
    """List every type with dual total absolute curvature `4 pi TA_over_4pi`.

    :param TA_over_4pi: The budget, 0, 1 or 2.
    :raises ValueError: When the budget is unsupported.
    :return: The admitted types and the candidates removed by exclusion axioms.
    """
    k = TA_over_4pi
    if k not in (0, 1, 2):
        raise ValueError(f"Unsupported budget {k} * 4pi; use 0, 1 or 2.")
    if k == 0:
        horosphere = TypeRecord(0, (0,), (0,), 0, 0, "horosphere")
        return Enumeration(0, (horosphere,), ())
    types: list[TypeRecord] = []
    exclusions: list[Exclusion] = []
    for genus in range(k + 1):
        if k == 1 and genus > 0:
            continue
        for n in range(1, k + 2 - genus):
            for record in _candidates(k, genus, n):
                ends = tuple(zip(record.d, record.mu_sharp))
                axiom = next(
                    (a for a in EXCLUSION_AXIOMS if a.matches(genus, ends)), None
                )
                if axiom is not None:
                    exclusions.append(Exclusion(record, axiom))
                    LOGGER.debug("excluded %s by %s", record.tag, axiom.name)
                else:
                    types.append(record)
    LOGGER.info(
        "budget %s * 4pi: %s types, %s exclusions", k, len(types), len(exclusions)
    )
    return Enumeration(k, tuple(types), tuple(exclusions))
