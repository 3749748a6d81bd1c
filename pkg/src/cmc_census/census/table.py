import logging
import os
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import pandas as pd
import sympy
from tqdm import tqdm

from cmc_census.census.base import (
    CaseRecord,
    Reducibility,
    Status,
    Verdict,
    exact_param,
)
from cmc_census.census.four_pi import build_4pi
from cmc_census.census.genus_one import i3, i4, i11_candidate, i22
from cmc_census.census.one_end import o5, o6
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

LOGGER = logging.getLogger(__name__)

THREADS_ENV = "CMC_CENSUS_THREADS"
BUDGETS = ("4pi", "8pi")

# verdicts that support a status of the census table
STATUS_VERDICTS = {
    Status.CLASSIFIED: {Verdict.VERIFIED, Verdict.EXTERNAL},
    Status.CLASSIFIED_UNIQUE: {Verdict.VERIFIED},
    Status.EXISTENCE: {Verdict.VERIFIED, Verdict.EXTERNAL},
    Status.EXISTENCE_PLUS: {Verdict.VERIFIED},
    Status.UNKNOWN: {Verdict.UNKNOWN},
    Status.UNKNOWN_PLUS: {Verdict.UNKNOWN},
}

Builder = Callable[[], CaseRecord | list[CaseRecord]]

# every case the command line can run, with keyword parameters
CASES: dict[str, Callable[..., CaseRecord | list[CaseRecord]]] = {
    "horosphere": lambda: build_4pi("horosphere"),
    "enneper_dual": lambda **kw: build_4pi("enneper_dual", **kw),
    "catenoid_cousin": lambda **kw: build_4pi("catenoid_cousin", **kw),
    "warped_catenoid": lambda **kw: build_4pi("warped_catenoid", **kw),
    "o5": o5,
    "o6": o6,
    "o22": o22,
    "o13": o13,
    "o14": o14,
    "o23_a": o23_a,
    "o23_b": o23_b,
    "o23_h3_nonexistence": o23_h3_nonexistence,
    "o24_h1": o24_h1,
    "o24_h3": o24_h3,
    "o33": o33_record,
    "o112": o112,
    "o122_h1": o122_h1,
    "o122_h3": o122_h3,
    "o222_irreducible": o222_irreducible,
    "o222_h1": o222_h1,
    "o222_h3": o222_h3,
    "i3": i3,
    "i4": i4,
    "i11": i11_candidate,
    "i22": i22,
}

# parameters of the representatives in the census table
DEFAULT_PARAMS: dict[str, dict[str, str]] = {
    "o23_a": {"theta": "3/16"},
    "o23_b": {"theta": "1/4"},
    "o23_h3_nonexistence": {"m": "2"},
    "o24_h1": {"theta": "3/32", "q": "2"},
    "o24_h3": {"m": "2"},
    "o122_h1": {"p": "4"},
    "o122_h3": {"r": "3"},
    "o222_h1": {"s": "2"},
    "o222_h3": {"m": "4"},
}


def run_case(tag: str, **params: Any) -> list[CaseRecord]:
    """Run one census case by its tag.

    String parameters are parsed as exact values; missing ones are taken from
    `DEFAULT_PARAMS`.

    :param tag: A key of `CASES`.
    :param params: Parameters of the case.
    :raises ValueError: When the tag is unknown.
    :return: The records of the case.
    """
    if tag not in CASES:
        raise ValueError(f"Unknown case {tag!r}, expected one of {sorted(CASES)}.")
    merged = {**DEFAULT_PARAMS.get(tag, {}), **params}
    values = {
        k: exact_param(v) if isinstance(v, str) else v for k, v in merged.items()
    }
    result = CASES[tag](**values)
    return result if isinstance(result, list) else [result]


@dataclass(frozen=True)
class TableEntry:
    """One reducibility line of a block of the census table."""

    reducibility: Reducibility
    status: Status
    builder: Builder


@dataclass(frozen=True)
class TableBlock:
    """A type together with its dual total absolute curvature."""

    type_tag: str
    TA: str
    entries: tuple[TableEntry, ...]


def _block(type_tag: str, TA: str, *entries: tuple[Any, ...]) -> TableBlock:
    return TableBlock(type_tag, TA, tuple(TableEntry(*e) for e in entries))


_H1, _H3 = Reducibility.H1, Reducibility.H3
TABLE1: tuple[TableBlock, ...] = (
    _block("O(0)", "0", (_H3, Status.CLASSIFIED_UNIQUE, CASES["horosphere"])),
    _block("O(-4)", "4pi", (_H3, Status.CLASSIFIED, CASES["enneper_dual"])),
    _block(
        "O(-2,-2)",
        "4pi",
        (Reducibility.REDUCIBLE, Status.CLASSIFIED, CASES["catenoid_cousin"]),
    ),
    _block("O(-5)", "8pi", (_H3, Status.CLASSIFIED, o5)),
    _block("O(-6)", "8pi", (_H3, Status.CLASSIFIED, o6)),
    _block("O(-2,-2)", "8pi", (Reducibility.REDUCIBLE, Status.CLASSIFIED, o22)),
    _block("O(-1,-4)", "8pi", (_H3, Status.CLASSIFIED_UNIQUE, o14)),
    _block(
        "O(-2,-3)",
        "8pi",
        (_H1, Status.CLASSIFIED, lambda: o23_a(sympy.Rational(3, 16))),
    ),
    _block(
        "O(-2,-4)",
        "8pi",
        (_H1, Status.CLASSIFIED, lambda: o24_h1(sympy.Rational(3, 32), 2)),
        (_H3, Status.CLASSIFIED, lambda: o24_h3(2)),
    ),
    _block(
        "O(-3,-3)", "8pi", (Reducibility.REDUCIBLE, Status.EXISTENCE, o33_record)
    ),
    _block("O(-1,-1,-2)", "8pi", (_H3, Status.CLASSIFIED_UNIQUE, o112)),
    _block(
        "O(-1,-2,-2)",
        "8pi",
        (_H1, Status.CLASSIFIED, lambda: o122_h1(4)),
        (_H3, Status.CLASSIFIED, lambda: o122_h3(3)),
    ),
    _block(
        "O(-2,-2,-2)",
        "8pi",
        (Reducibility.IRREDUCIBLE, Status.CLASSIFIED, o222_irreducible),
        (_H1, Status.EXISTENCE_PLUS, lambda: o222_h1(2)),
        (_H3, Status.EXISTENCE_PLUS, lambda: o222_h3(4)),
    ),
    _block("I(-3)", "8pi", (Reducibility.NONE, Status.UNKNOWN, i3)),
    _block("I(-4)", "8pi", (Reducibility.NONE, Status.EXISTENCE, i4)),
    _block("I(-1,-1)", "8pi", (Reducibility.NONE, Status.UNKNOWN_PLUS, i11_candidate)),
    _block("I(-2,-2)", "8pi", (Reducibility.NONE, Status.EXISTENCE, i22)),
)

# cases outside the table: excluded types and the other branch patterns
EXTRA_8PI: tuple[Builder, ...] = (
    o13,
    lambda: o23_b(sympy.Rational(1, 4)),
    lambda: o23_h3_nonexistence(2),
    lambda: build_4pi("warped_catenoid"),
)


def _budget_blocks(budget: str) -> list[TableBlock]:
    if budget not in BUDGETS:
        raise ValueError(f"Unknown budget {budget}, expected one of {BUDGETS}.")
    if budget == "4pi":
        return [b for b in TABLE1 if b.TA in ("0", "4pi")]
    return list(TABLE1)


def _threads(threads: int | None) -> int:
    if threads is not None:
        value = threads
    else:
        try:
            value = int(os.environ.get(THREADS_ENV, "1"))
        except ValueError as e:
            raise ValueError(f"{THREADS_ENV} must be an integer.") from e
    if value < 1:
        raise ValueError(f"Expected at least one thread, got {value}.")
    return value


def _run(builder: Builder) -> list[CaseRecord]:
    result = builder()
    return result if isinstance(result, list) else [result]


def run_all(
    budget: str = "8pi", threads: int | None = None, show_progress: bool = False
) -> list[CaseRecord]:
    """Run every census case within a curvature budget.

    Cases are independent, so they may run in a thread pool; the output order
    does not depend on the number of threads. Only the first record per
    `(type, TA, reducibility)` is kept.

    :param budget: `4pi` or `8pi`.
    :param threads: Thread cap, by default read from `CMC_CENSUS_THREADS` (1).
    :param show_progress: Show a progress bar.
    :raises ValueError: When the budget or the thread count is invalid.
    :return: The records, in table order followed by the extra cases.
    """
    t0 = time.perf_counter()
    builders = [e.builder for b in _budget_blocks(budget) for e in b.entries]
    if budget == "8pi":
        builders += list(EXTRA_8PI)
    n_threads = _threads(threads)
    if n_threads == 1:
        batches = [
            _run(b) for b in tqdm(builders, disable=not show_progress, desc="census")
        ]
    else:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            batches = list(
                tqdm(
                    pool.map(_run, builders),
                    total=len(builders),
                    disable=not show_progress,
                    desc="census",
                )
            )

    records, seen = [], set()
    for record in (r for batch in batches for r in batch):
        key = (record.type_tag, record.TA, record.reducibility)
        if key not in seen:
            seen.add(key)
            records.append(record)
    LOGGER.info(
        "ran %s cases in %s seconds", len(builders), time.perf_counter() - t0
    )
    return records


def _entry_matches(entry: TableEntry, record: CaseRecord | None) -> bool:
    if record is None:
        return False
    return (
        record.reducibility == entry.reducibility
        and record.status == entry.status
        and record.verdict in STATUS_VERDICTS[entry.status]
    )


def table1(
    records: Sequence[CaseRecord] | None = None,
    budget: str = "8pi",
    threads: int | None = None,
    show_progress: bool = False,
) -> pd.DataFrame:
    """The census summary, one row per block of the classification table.

    Several reducibility lines of a block are joined by ` / `; a row matches when
    each line has a record with the expected reducibility and status whose verdict
    supports that status.

    :param records: Records of a previous `run_all`, computed when omitted.
    :param budget: `4pi` or `8pi`.
    :param threads: Thread cap for `run_all`.
    :param show_progress: Show a progress bar.
    :return: Columns `type`, `TA`, `reducibility`, `status`, `verdict`, `matches`.
    """
    if records is None:
        records = run_all(budget, threads, show_progress)
    by_key = {(r.type_tag, r.TA, r.reducibility): r for r in records}
    rows: list[dict[str, Any]] = []
    for block in _budget_blocks(budget):
        found = [
            by_key.get((block.type_tag, block.TA, e.reducibility))
            for e in block.entries
        ]
        rows.append(
            {
                "type": block.type_tag,
                "TA": block.TA,
                "reducibility": " / ".join(e.reducibility.value for e in block.entries),
                "status": " / ".join(e.status.value for e in block.entries),
                "verdict": " / ".join(
                    r.verdict.value if r is not None else "missing" for r in found
                ),
                "matches": all(
                    _entry_matches(e, r) for e, r in zip(block.entries, found)
                ),
            }
        )
    return pd.DataFrame(rows, columns=list(rows[0]))


_MINIMAL = (
    ("O(0)", "0", "plane"),
    ("O(-4)", "4pi", "Enneper's surface"),
    ("O(-2,-2)", "4pi", "catenoid"),
    ("O(-5)", "8pi", ""),
    ("O(-6)", "8pi", ""),
    ("O(-2,-2)", "8pi", "double cover of the catenoid"),
    ("O(-1,-3)", "8pi", ""),
    ("O(-2,-3)", "8pi", ""),
    ("O(-2,-4)", "8pi", ""),
    ("O(-3,-3)", "8pi", ""),
    ("O(-1,-2,-2)", "8pi", ""),
    ("O(-2,-2,-2)", "8pi", ""),
    ("I(-4)", "8pi", "Chen-Gackstatter surface"),
)


def minimal_analogues() -> pd.DataFrame:
    """Complete minimal surfaces in `R^3` with total absolute curvature at most 8 pi.

    The types with a minimal representative are listed for comparison with the
    census: O(-1,-3) occurs for minimal surfaces but not for CMC-1 surfaces, while
    O(-1,-4), O(-1,-1,-2) and the genus-one types besides I(-4) occur only for
    CMC-1 surfaces.

    :return: Columns `type`, `TA`, `surface`, `in_census`.
    """
    census_keys = {(b.type_tag, b.TA) for b in TABLE1}
    return pd.DataFrame(
        [
            {"type": t, "TA": ta, "surface": name, "in_census": (t, ta) in census_keys}
            for t, ta, name in _MINIMAL
        ]
    )
