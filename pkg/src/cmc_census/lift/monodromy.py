import cmath
import enum
import itertools
import logging
import math
import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from cmc_census.lift.core import (
    LiftData,
    PathError,
    Tolerances,
    _check_clearance,
    integrate_lift,
)
from cmc_census.lift.paths import Arc, Line, PathSegment
from cmc_census.symcore import SpherePoint

LOGGER = logging.getLogger(__name__)


class MonodromyClass(enum.Enum):
    """Numerical reducibility classes of a monodromy representation."""

    IDENTITY_LIKE = "identity-like"
    COMMUTING_UNITARY = "commuting-unitary"
    NON_UNITARIZABLE = "non-unitarizable"
    INDETERMINATE = "indeterminate"


def deviation(rho: np.ndarray) -> float:
    """`min(|rho - I|, |rho + I|)` in the Frobenius norm."""
    identity = np.eye(2)
    return float(min(np.linalg.norm(rho - identity), np.linalg.norm(rho + identity)))


def eigenphase(rho: np.ndarray) -> float:
    """Phase of an eigenvalue of `rho`, folded to `[0, pi/2]`.

    The eigenvalues of `rho` and `-rho` as well as both members of a pair
    `e^(+-i phi)` give the same folded value, so it can be compared with
    `fold(pi * gap)` for the indicial gap at an end.
    """
    values = np.linalg.eigvals(np.asarray(rho, dtype=complex))
    return fold_phase(cmath.phase(values[0]))


def fold_phase(phi: float) -> float:
    """`min(phi mod pi, pi - phi mod pi)`."""
    r = phi % math.pi
    return min(r, math.pi - r)


@dataclass(frozen=True)
class MonodromyLoop:
    """One loop from the base point around an end, and its matrix."""

    end: str
    base: complex
    rho: np.ndarray
    segments: tuple[PathSegment, ...]

    @property
    def deviation(self) -> float:
        """Distance of `rho` from `+-I`."""
        return deviation(self.rho)

    @property
    def direction(self) -> float:
        """Angle at which the loop leaves the base point."""
        return cmath.phase(self.segments[0].velocity(0.0))

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            "end": self.end,
            "base": [self.base.real, self.base.imag],
            "rho": [[[x.real, x.imag] for x in row] for row in self.rho],
            "deviation": self.deviation,
            "eigenphase": eigenphase(self.rho),
            "path": [repr(s) for s in self.segments],
        }


@dataclass(frozen=True)
class MonodromyReport:
    """Loop matrices of a surface and their classification."""

    loops: list[MonodromyLoop]
    classification: MonodromyClass
    product_deviation: float | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def deviations(self) -> list[float]:
        """Per-loop distances from `+-I`."""
        return [loop.deviation for loop in self.loops]

    def loop(self, end: Any) -> MonodromyLoop:
        """The loop around an end.

        :param end: The end.
        :raises ValueError: When there is no loop around it.
        :return: The loop.
        """
        label = SpherePoint.coerce(end).to_json()
        for loop in self.loops:
            if loop.end == label:
                return loop
        raise ValueError(f"No loop around {label}.")

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            "loops": [loop.to_json() for loop in self.loops],
            "class": self.classification.value,
            "deviations": self.deviations,
            "product_deviation": self.product_deviation,
            "metadata": self.metadata,
        }


def _clears(
    data: LiftData, segments: Sequence[PathSegment], clearance: float
) -> bool:
    try:
        _check_clearance(data, segments, clearance)
    except PathError:
        return False
    return True


def _detour_vertices(base: complex, scale: float) -> list[complex]:
    return [
        base + scale * k / 4 * cmath.exp(1j * math.pi * j / 8)
        for k in (1, 2, 4)
        for j in range(16)
    ]


def _finite_loop(
    data: LiftData, base: complex, p: complex, clearance: float
) -> list[PathSegment]:
    others = [abs(p - q) for q in data.singular_points if abs(p - q) > 1e-12]
    radius = 0.5 * min([abs(base - p), *others])
    for start in [base, *_detour_vertices(base, abs(base - p))]:
        if abs(start - p) <= radius:
            continue
        angle = cmath.phase(start - p)
        on_circle = p + radius * cmath.exp(1j * angle)
        if start == base:
            head = [Line(base, on_circle)]
        else:
            head = [Line(base, start), Line(start, on_circle)]
        back = [_reverse(s) for s in head[::-1]]
        segments = [*head, Arc(p, radius, angle), *back]
        if _clears(data, segments, clearance):
            return segments
    raise PathError(f"No admissible loop from {base} around {p}.")


def _infinite_loop(
    data: LiftData, base: complex, clearance: float
) -> list[PathSegment]:
    reach = max([abs(base), *(abs(q) for q in data.singular_points)])
    radius = 1.25 * reach + 0.5
    first = cmath.phase(base) if base != 0 else 0.0
    for angle in [first + math.pi * j / 8 for j in range(16)]:
        far = radius * cmath.exp(1j * angle)
        segments = [
            Line(base, far),
            Arc(0, radius, angle, -2 * math.pi),
            Line(far, base),
        ]
        if _clears(data, segments, clearance):
            return segments
    raise PathError(f"No admissible loop from {base} around infinity.")


def _reverse(segment: PathSegment) -> PathSegment:
    assert isinstance(segment, Line)
    return Line(segment.b, segment.a)


def default_base(data: LiftData) -> complex:
    """A base point off the line through the singular points' centroid."""
    points = list(data.singular_points) or [0j]
    center = sum(points) / len(points)
    spread = max(abs(p - center) for p in points)
    return center + complex(0.13, 0.5) * (spread + 1)


def _commute(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    return bool(np.linalg.norm(a @ b - b @ a) < tol)


def _unitary_candidate(rho: np.ndarray, tol: float) -> bool:
    """Unimodular eigenvalues and diagonalizable (not parabolic)."""
    values = np.linalg.eigvals(rho)
    if np.any(np.abs(np.abs(values) - 1) > tol):
        return False
    if abs(values[0] - values[1]) < math.sqrt(tol):
        return deviation(rho) < tol
    return True


def classify(rhos: Sequence[np.ndarray], tol: float) -> MonodromyClass:
    """Classify loop matrices.

    Only commuting families are tested for unitarizability; a non-commuting family
    is indeterminate.

    :param rhos: The loop matrices.
    :param tol: The classification threshold.
    :return: The class.
    """
    if all(deviation(rho) < tol for rho in rhos):
        return MonodromyClass.IDENTITY_LIKE
    if not all(_commute(a, b, tol) for a, b in itertools.combinations(rhos, 2)):
        return MonodromyClass.INDETERMINATE
    if all(_unitary_candidate(rho, tol) for rho in rhos):
        return MonodromyClass.COMMUTING_UNITARY
    return MonodromyClass.NON_UNITARIZABLE


def product_relation(loops: Sequence[MonodromyLoop]) -> float:
    """Distance of the ordered product of the loop matrices from `+-I`.

    The loops are ordered by the angle at which they leave the base point; the
    smaller value of both orientations is returned.
    """
    ordered = sorted(loops, key=lambda loop: loop.direction)
    values = []
    for sequence in (ordered, ordered[::-1]):
        product = np.eye(2, dtype=complex)
        for loop in sequence:
            product = product @ loop.rho
        values.append(deviation(product))
    return min(values)


def monodromy(
    G: Any,
    Q_density: Any = None,
    base: complex | None = None,
    ends: Sequence[Any] = (),
    tolerances: Tolerances = Tolerances(),
) -> MonodromyReport:
    """Monodromy matrices of the lift around the ends.

    Continuing `F` with `F(base) = I` along a loop gives `F_loop = rho^-1`. Each
    finite end is encircled counterclockwise by a circle of half the distance to
    the nearest other singular point (or to the base), joined to the base by a
    straight line; infinity is encircled by a large clockwise circle. The loops are
    recorded in the report since `rho` is only defined up to conjugation.

    :param G: The hyperbolic Gauss map, or `LiftData`.
    :param Q_density: The density of `Q`.
    :param base: The base point (chosen off the singular points when omitted).
    :param ends: The ends to encircle.
    :param tolerances: Numerical tolerances.
    :raises PathError: When the base point or a loop violates the clearance.
    :raises IntegrationError: When an integration fails.
    :return: The report.
    """
    t0 = time.perf_counter()
    data = LiftData.coerce(G, Q_density, ends)
    base = default_base(data) if base is None else complex(base)
    clearance = data.clearance(tolerances)
    if any(abs(base - p) < clearance for p in data.singular_points):
        raise PathError(f"Base point {base} is too close to a singular point.")

    loops = []
    for end in data.ends:
        if end.is_infinite:
            segments = _infinite_loop(data, base, clearance)
        else:
            segments = _finite_loop(data, base, complex(end), clearance)
        state = integrate_lift(data, path=segments, tolerances=tolerances)
        rho = np.linalg.inv(state.F)
        loops.append(MonodromyLoop(end.to_json(), base, rho, tuple(segments)))
        LOGGER.debug("loop around %s: deviation %s", end, loops[-1].deviation)

    tol = tolerances.monodromy
    classification = classify([loop.rho for loop in loops], tol)
    product = product_relation(loops) if loops else None
    LOGGER.info(
        "monodromy %s over %s loops in %s seconds",
        classification.value,
        len(loops),
        time.perf_counter() - t0,
    )
    metadata = {"tolerance": tol, "base": [base.real, base.imag]}
    return MonodromyReport(loops, classification, product, metadata)
