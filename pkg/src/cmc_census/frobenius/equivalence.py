import logging
from dataclasses import dataclass
from typing import Any

import sympy

from cmc_census.frobenius.ode import FORMS
from cmc_census.frobenius.solver import GapClass, frobenius_report
from cmc_census.symcore.rational import (
    RationalFunction,
    SpherePoint,
    branch_order,
    chart,
    is_zero,
    laurent_at,
    order_at,
)
from cmc_census.symcore.scalar import exact_sqrt, scalar_to_str

LOGGER = logging.getLogger(__name__)


def _normalized_local(
    G: Any, Q_density: Any, end: Any
) -> tuple[RationalFunction, RationalFunction]:
    """`G` and `Q` in the local coordinate, translated so `G(0)` is 0 or a pole.

    A translation of `G` is a rigid motion; it leaves `S(G)` and `-Q/dG` unchanged.
    """
    point = SpherePoint.coerce(end)
    G_loc = chart(RationalFunction.coerce(G), point, 0)
    Q_loc = chart(RationalFunction.coerce(Q_density), point, 2)
    if order_at(G_loc, 0) == 0:
        G_loc = G_loc - G_loc.value_at(0)
    return G_loc, Q_loc


def exponent_gaps(G: Any, Q_density: Any, end: Any) -> dict[str, sympy.Expr]:
    """Gaps predicted from the local exponents of `G` and `w = -Q/dG`.

    With `G = z^mu G^`, `w = z^nu w^ dz`: if `ord Q = -2` and `Q = theta z^-2 + ...`
    all three gaps are `sqrt(mu^2 - 4 theta)`; otherwise they are `|nu + 1|`,
    `|2 mu + nu + 1|` and `|mu|` for the `E1sharp`, `E2sharp` and `E0` forms. At
    a pole of `G` the `E2sharp` form is built from `1/G`, so its gap is `|nu + 1|`.

    :param G: The hyperbolic Gauss map.
    :param Q_density: The density of the Hopf differential.
    :param end: The end.
    :raises ValueError: When `ord Q < -2` at the end.
    :return: Predicted gap per form name.
    """
    G_loc, Q_loc = _normalized_local(G, Q_density, end)
    mu = order_at(G_loc, 0)
    d = order_at(Q_loc, 0)
    if d < -2:
        raise ValueError(f"ord Q = {d} < -2 at {end}.")
    if d == -2:
        theta = laurent_at(Q_loc, 0, 1).coefficient(-2)
        gap = exact_sqrt(mu**2 - 4 * theta)
        return {name: gap for name in FORMS}
    nu = order_at(-Q_loc / G_loc.derivative(), 0)
    return {
        "E0": sympy.Integer(abs(mu)),
        "E1sharp": sympy.Integer(abs(nu + 1)),
        "E2sharp": sympy.Integer(abs(2 * max(mu, 0) + nu + 1)),
    }


@dataclass(frozen=True)
class FormEntry:
    """Summary of one equation form at an end."""

    gap: sympy.Expr
    gap_class: GapClass
    predicted_gap: sympy.Expr
    log_coeff: Any
    log_free: bool | None

    @property
    def integer_gap(self) -> bool | None:
        """Whether the gap is a positive integer (`None` when parametric)."""
        if self.gap_class == GapClass.PARAMETRIC:
            return None
        return self.gap_class == GapClass.POSITIVE_INTEGER

    @property
    def single_valued(self) -> bool | None:
        """Positive integer gap with vanishing log term."""
        if self.integer_gap is None:
            return None
        return bool(self.integer_gap and self.log_free)

    @property
    def real_gap(self) -> bool | None:
        """Whether the gap is real (`None` when parametric)."""
        if self.gap_class == GapClass.PARAMETRIC:
            return None
        return self.gap_class != GapClass.NON_REAL

    @property
    def matches_prediction(self) -> bool:
        """Whether the gap agrees with the exponent prediction (up to sign)."""
        return is_zero(self.gap**2 - self.predicted_gap**2)

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            "gap": scalar_to_str(self.gap),
            "gap_class": self.gap_class.value,
            "predicted_gap": scalar_to_str(self.predicted_gap),
            "log_coeff": scalar_to_str(self.log_coeff),
            "integer_gap": self.integer_gap,
            "log_free": self.log_free,
        }


@dataclass(frozen=True)
class EquivalenceReport:
    """The three equation forms at one end, checked against each other."""

    end: str
    forms: dict[str, FormEntry]

    def _agree(self, values: list[bool | None]) -> bool:
        decided = {v for v in values if v is not None}
        return len(decided) <= 1

    @property
    def consistent(self) -> bool:
        """Whether all decidable conditions agree and every gap matches prediction."""
        entries = list(self.forms.values())
        return (
            self._agree([e.single_valued for e in entries])
            and self._agree([e.real_gap for e in entries])
            and all(e.matches_prediction for e in entries)
        )

    @property
    def gaps_all_real(self) -> bool | None:
        """Whether all gaps are real; `None` when undecidable."""
        values = {e.real_gap for e in self.forms.values()}
        if None in values:
            return None
        return values == {True}

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            "end": self.end,
            "forms": {k: v.to_json() for k, v in self.forms.items()},
            "consistent": self.consistent,
            "gaps_all_real": self.gaps_all_real,
        }


def equivalence_report(G: Any, Q_density: Any, end: Any) -> EquivalenceReport:
    """Analyze `E0` and both dual forms at one end.

    A positive integer gap with vanishing log term means the secondary Gauss map is
    single-valued around the end, so the three forms must agree on it, and their
    gaps must be real simultaneously. A disagreement indicates a bug.

    :param G: The hyperbolic Gauss map.
    :param Q_density: The density of the Hopf differential (`ord >= -2` at the end).
    :param end: The end.
    :return: The report.
    """
    point = SpherePoint.coerce(end)
    G_loc, Q_loc = _normalized_local(G, Q_density, point)
    predicted = exponent_gaps(G, Q_density, point)
    forms = {}
    for name, form in FORMS.items():
        # built at 0 in the normalized local coordinate
        ode = form.build(G_loc, Q_loc, 0)
        report = frobenius_report(ode, n_terms=0)
        forms[name] = FormEntry(
            gap=report.indicial.gap,
            gap_class=report.indicial.gap_class,
            predicted_gap=predicted[name],
            log_coeff=report.log_coeff,
            log_free=report.log_free,
        )
    result = EquivalenceReport(point.to_json(), forms)
    if not result.consistent:
        LOGGER.warning("equation forms disagree at %s", point)
    return result
