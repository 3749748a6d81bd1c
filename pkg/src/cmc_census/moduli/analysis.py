import logging
from collections.abc import Sequence
from dataclasses import dataclass, replace
from typing import Any

import sympy

from cmc_census.frobenius.solver import FrobeniusReport, GapClass
from cmc_census.moduli.spec import SurfaceSpec
from cmc_census.symcore.rational import (
    RationalFunction,
    SpherePoint,
    branch_order,
    differential_order_at,
    divisor,
    is_zero,
    mobius,
)
from cmc_census.symcore.scalar import Z, scalar_to_str

LOGGER = logging.getLogger(__name__)


class CompatibilityError(ValueError):
    """Raised when `(G, Q)` violates the umbilic or completeness conditions."""


@dataclass(frozen=True)
class EndReport:
    """Orders at one end."""

    point: SpherePoint | None
    d: int
    mu_sharp: int
    label: str = ""

    @property
    def slack(self) -> int:
        """`mu_sharp - d`."""
        return self.mu_sharp - self.d

    @property
    def regular_singular(self) -> bool:
        """Whether the equations at this end are regular singular."""
        return self.d >= -2

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            "point": self.point.to_json() if self.point is not None else self.label,
            "d": self.d,
            "mu_sharp": self.mu_sharp,
            "slack": self.slack,
            "regular_singular": self.regular_singular,
        }


@dataclass(frozen=True)
class UmbilicReport:
    """An umbilic point, or an irreducible factor standing for several of them."""

    point: SpherePoint | None
    xi: int
    factor: sympy.Expr | None = None

    @property
    def count(self) -> int:
        """Number of umbilic points the report stands for."""
        if self.factor is None:
            return 1
        return sympy.Poly(self.factor, Z).degree()

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        if self.point is not None:
            return {"point": self.point.to_json(), "xi": self.xi}
        return {"factor": scalar_to_str(self.factor), "xi": self.xi}


@dataclass(frozen=True)
class CurvatureReport:
    """Total curvature bookkeeping of a surface.

    `TA_dual_over_4pi` is the dual total absolute curvature in units of `4 pi`,
    which equals the degree of `G`.
    """

    genus: int
    n_ends: int
    degG: int
    TA_dual_over_4pi: int
    gauss_bonnet_residual: int
    riemann_roch_residual: int
    ta_residual: int
    osserman_slack: int

    @property
    def embedded_ends(self) -> bool:
        """Whether equality holds in the Osserman-type inequality."""
        return self.osserman_slack == 0

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            "genus": self.genus,
            "n_ends": self.n_ends,
            "degG": self.degG,
            "TA_dual_over_4pi": self.TA_dual_over_4pi,
            "gauss_bonnet_residual": self.gauss_bonnet_residual,
            "riemann_roch_residual": self.riemann_roch_residual,
            "ta_residual": self.ta_residual,
            "osserman_slack": self.osserman_slack,
        }


def _strip(poly_expr: sympy.Expr, root: sympy.Expr) -> sympy.Expr:
    """Remove every factor `z - root` from a polynomial."""
    poly_expr = sympy.expand(poly_expr)
    while Z in poly_expr.free_symbols:
        quotient, remainder = sympy.div(poly_expr, Z - root, Z)
        if not is_zero(remainder):
            break
        poly_expr = sympy.expand(quotient)
    return poly_expr


def _ramification(G: RationalFunction) -> sympy.Expr:
    """`N'D - ND'`, whose order at a finite point is the branch order of `G`."""
    n, d = G.num, G.den
    return sympy.expand(sympy.diff(n, Z) * d - n * sympy.diff(d, Z))


def _end_reports(spec: SurfaceSpec) -> list[EndReport]:
    if spec.descriptor is not None:
        labels = list(spec.descriptor.end_labels)
        labels += [f"p{j + 1}" for j in range(len(labels), spec.n_ends)]
        return [
            EndReport(None, d, mu, label)
            for (d, mu), label in zip(spec.descriptor.end_orders, labels)
        ]
    assert spec.G is not None and spec.Q is not None
    reports = []
    for p in spec.ends:
        d = differential_order_at(spec.Q, 2, p)
        mu = branch_order(spec.G, p)
        reports.append(EndReport(p, d, mu, str(p)))
    return reports


def _check_ends(reports: Sequence[EndReport], degree: int) -> None:
    for r in reports:
        if r.slack < 2:
            raise CompatibilityError(
                f"End {r.label} has mu# - d = {r.slack}; complete ends need at least 2."
            )
        if r.mu_sharp > degree - 1:
            raise CompatibilityError(
                f"End {r.label} has mu# = {r.mu_sharp} > deg G - 1 = {degree - 1}."
            )


def _interior_umbilics(spec: SurfaceSpec) -> list[UmbilicReport]:
    assert spec.G is not None and spec.Q is not None
    G, Q = spec.G, spec.Q
    qnum, qden, ram = Q.num, Q.den, _ramification(G)
    for p in spec.ends:
        if p.value is not None:
            qnum, qden, ram = (_strip(x, p.value) for x in (qnum, qden, ram))
    if Z in qden.free_symbols:
        raise CompatibilityError(f"Q has a pole away from the ends: {qden}.")
    ratio = sympy.cancel(qnum / ram)
    if Z in ratio.free_symbols or is_zero(ratio):
        mismatch = RationalFunction(qnum, ram)
        points = [str(e.point or e.factor) for e in _mismatch_points(mismatch)]
        raise CompatibilityError(
            f"ord Q differs from the branch order of G at {', '.join(points)}."
        )

    umbilics = _zero_entries(qnum)
    infinity = SpherePoint.infinity()
    if infinity not in spec.ends:
        xi = differential_order_at(Q, 2, infinity)
        b = branch_order(G, infinity)
        if xi != b:
            raise CompatibilityError(
                f"At infinity ord Q = {xi} but the branch order of G is {b}."
            )
        if xi > 0:
            umbilics.append(UmbilicReport(infinity, xi))
    return umbilics


def _zero_entries(poly_expr: sympy.Expr) -> list[UmbilicReport]:
    if Z not in poly_expr.free_symbols:
        return []
    return [
        UmbilicReport(e.point, e.order, e.factor)
        for e in divisor(RationalFunction(poly_expr))
        if e.order > 0 and (e.point is None or not e.point.is_infinite)
    ]


def _mismatch_points(f: RationalFunction) -> list[Any]:
    return [e for e in divisor(f) if e.point is None or not e.point.is_infinite]


def analyze(spec: SurfaceSpec) -> tuple[list[EndReport], list[UmbilicReport]]:
    """Compute the orders at the ends and the umbilic points.

    In genus one the reports are read off the descriptor; pointwise checks of the
    elliptic data are numeric and live in the census and flatlab packages.

    :param spec: The surface.
    :raises CompatibilityError: When an interior zero of `Q` does not match a branch
        point of `G` or an end is not complete.
    :return: End reports (in the order of `spec.ends`) and umbilic reports.
    """
    ends = _end_reports(spec)
    _check_ends(ends, spec.degree)
    if spec.descriptor is not None:
        umbilics = [UmbilicReport(None, xi) for xi in spec.descriptor.umbilic_orders]
    else:
        umbilics = _interior_umbilics(spec)
    LOGGER.debug(
        "analyzed %s: d=%s, mu#=%s, xi=%s",
        spec.label or "spec",
        [e.d for e in ends],
        [e.mu_sharp for e in ends],
        [u.xi for u in umbilics],
    )
    return ends, umbilics


def curvature_report(spec: SurfaceSpec) -> CurvatureReport:
    """Check the Gauss-Bonnet, Riemann-Roch and total curvature identities.

    :param spec: The surface.
    :raises CompatibilityError: When `analyze` fails or a residual is nonzero.
    :return: The report.
    """
    ends, umbilics = analyze(spec)
    chi = 2 - 2 * spec.genus
    deg = spec.degree
    n = len(ends)
    sum_mu = sum(e.mu_sharp for e in ends)
    sum_d = sum(e.d for e in ends)
    sum_xi = sum(u.xi * u.count for u in umbilics)
    report = CurvatureReport(
        genus=spec.genus,
        n_ends=n,
        degG=deg,
        TA_dual_over_4pi=deg,
        gauss_bonnet_residual=2 * deg - (chi + sum_mu + sum_xi),
        riemann_roch_residual=sum_xi + sum_d + 2 * chi,
        ta_residual=2 * deg - (2 * spec.genus - 2 + sum(e.slack for e in ends)),
        osserman_slack=2 * deg - 2 * (spec.genus + n - 1),
    )
    residuals = (
        report.gauss_bonnet_residual,
        report.riemann_roch_residual,
        report.ta_residual,
    )
    if any(residuals) or report.osserman_slack < 0:
        raise CompatibilityError(
            f"Curvature identities fail for {spec.label}: {report}."
        )
    return report


def _invert_point(p: SpherePoint) -> SpherePoint:
    if p.is_infinite:
        return SpherePoint.finite(0)
    if is_zero(p.value):
        return SpherePoint.infinity()
    return SpherePoint.finite(sympy.radsimp(1 / p.value))


def apply_chart_inversion(spec: SurfaceSpec) -> SurfaceSpec:
    """Rewrite a genus-zero spec in the coordinate `w = 1/z`.

    :param spec: The surface.
    :raises ValueError: For genus-one specs.
    :return: The same surface in the new coordinate.
    """
    if spec.G is None or spec.Q is None:
        raise ValueError("Chart changes need genus-zero data.")
    G = RationalFunction(spec.G.expr.subs(Z, 1 / Z))
    Q = RationalFunction(spec.Q.expr.subs(Z, 1 / Z) * Z**-4)
    ends = tuple(_invert_point(p) for p in spec.ends)
    return replace(spec, G=G, Q=Q, ends=ends)


def apply_rigid_motion(spec: SurfaceSpec, a: Sequence[Sequence[Any]]) -> SurfaceSpec:
    """Replace `G` by `a * G`, which moves the surface by an isometry.

    :param spec: The surface.
    :param a: An exact `SL(2, C)` matrix.
    :raises ValueError: For genus-one specs or when `det a != 1`.
    :return: The moved surface.
    """
    if spec.G is None:
        raise ValueError("Rigid motions need genus-zero data.")
    return replace(spec, G=mobius(a, spec.G))


@dataclass(frozen=True)
class ExistencePattern:
    """Reducibility predicted from the Frobenius reports at the ends."""

    reducibility: str | None
    family_dimension: int
    reason: str

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            "reducibility": self.reducibility,
            "family_dimension": self.family_dimension,
            "reason": self.reason,
        }


def _single_valued(report: FrobeniusReport) -> bool:
    return report.indicial.gap_class == GapClass.POSITIVE_INTEGER and bool(
        report.log_free
    )


def existence_pattern(reports: Sequence[FrobeniusReport]) -> ExistencePattern:
    """Read off H3- or H1-reducibility from per-end Frobenius reports.

    The reports belong to all ends but the last one, in order. If each has an
    integer gap and no log term the surface is H3-reducible with a 3-parameter
    deformation family. If that holds for all but the last report and the last one
    has a real non-integer gap it is H1-reducible with a 1-parameter family.

    :param reports: Reports for the first `n - 1` ends.
    :raises ValueError: When no report is given.
    :return: The predicted pattern (reducibility `None` when neither applies).
    """
    if not reports:
        raise ValueError("At least one end report is needed.")
    if all(_single_valued(r) for r in reports):
        return ExistencePattern("H3", 3, "all ends single-valued")
    *head, last = reports
    if all(_single_valued(r) for r in head) and (
        last.indicial.gap_class == GapClass.REAL_NON_INTEGER
    ):
        return ExistencePattern("H1", 1, f"real non-integer gap at {last.end}")
    return ExistencePattern(None, 0, "no reducible pattern")
