import cmath
import logging
from typing import Any

import sympy

from cmc_census.census.base import (
    CaseRecord,
    ConstraintKind,
    ConstraintViolation,
    Reducibility,
    Status,
    ThetaConstraint,
    Verdict,
    exact_param,
    record_params,
    verdict_from,
)
from cmc_census.census.checks import (
    geometry_checks,
    sampled_schwarzian_residual,
    schwarzian_identity,
    schwarzian_identity_expr,
)
from cmc_census.moduli import SurfaceSpec
from cmc_census.symcore import THETA, Z, RationalFunction, is_zero

LOGGER = logging.getLogger(__name__)

FOUR_PI_CASES = ("horosphere", "enneper_dual", "catenoid_cousin", "warped_catenoid")

# 20 points inside the disk where tan(sqrt(theta) z) is holomorphic
_SAMPLE_ANGLES = [2 * cmath.pi * k / 20 for k in range(20)]


def _nonzero(name: str, value: sympy.Expr) -> None:
    if is_zero(value):
        raise ConstraintViolation(f"{name} must not be zero.")


def _horosphere() -> CaseRecord:
    return CaseRecord(
        tag="horosphere",
        type_tag="O(0)",
        TA="0",
        reducibility=Reducibility.H3,
        verdict=Verdict.VERIFIED,
        status=Status.CLASSIFIED_UNIQUE,
        checks={"G_constant": True, "TA_zero": True},
        notes="G is constant; both the surface and its dual are horospheres.",
    )


def _enneper_dual(theta: Any = 1) -> CaseRecord:
    theta = exact_param(theta)
    _nonzero("theta", theta)
    spec = SurfaceSpec.genus_zero(Z, THETA, ["inf"], "O(-4)", {"theta": theta})
    g = sympy.tan(sympy.sqrt(theta) * Z)
    radius = 0.5 / max(1.0, abs(complex(sympy.sqrt(theta))))
    points = [
        radius * (0.3 + 0.7 * k / 19) * cmath.exp(1j * angle)
        for k, angle in enumerate(_SAMPLE_ANGLES)
    ]
    residual = sampled_schwarzian_residual(g, spec.G, spec.Q, points)
    checks, meta = geometry_checks(spec)
    checks["schwarzian_sampled"] = residual < 1e-10
    meta.update({"schwarzian_residual": residual, "numeric_check": True})
    return CaseRecord(
        tag="enneper_dual",
        type_tag="O(-4)",
        TA="4pi",
        reducibility=Reducibility.H3,
        verdict=verdict_from(checks, "enneper_dual"),
        status=Status.CLASSIFIED,
        params=record_params({"theta": theta}),
        spec=spec,
        secondary_g=sympy.sstr(g),
        checks=checks,
        notes="Dual of the Enneper cousin; g is transcendental, checked numerically.",
        metadata=meta,
    )


def _catenoid_cousin(a: Any = 1, mu: Any = sympy.Rational(1, 2)) -> CaseRecord:
    a, mu = exact_param(a), exact_param(mu)
    _nonzero("a", a)
    ThetaConstraint(ConstraintKind.EXCLUDED_SET, (mu, 1), "mu != 1").require()
    if not (mu.is_real and mu.is_positive):
        raise ConstraintViolation(f"mu must be a positive real, got {mu}.")
    theta = (1 - mu**2) / 4
    spec = SurfaceSpec.genus_zero(Z, theta / Z**2, [0, "inf"], "O(-2,-2)")
    g_expr = a * Z**mu
    checks, meta = geometry_checks(spec)
    if mu.is_integer:
        g: RationalFunction | str = RationalFunction(g_expr)
        checks["schwarzian_identity"] = schwarzian_identity(g, spec.G, spec.Q)
    else:
        g = sympy.sstr(g_expr)
        checks["schwarzian_identity"] = schwarzian_identity_expr(
            g_expr, spec.G, spec.Q
        )
    meta["monodromy"] = "H3" if mu.is_integer else "H1"
    return CaseRecord(
        tag="catenoid_cousin",
        type_tag="O(-2,-2)",
        TA="4pi",
        reducibility=Reducibility.REDUCIBLE,
        verdict=verdict_from(checks, "catenoid_cousin"),
        status=Status.CLASSIFIED,
        params=record_params({"a": a, "mu": mu}),
        spec=spec,
        secondary_g=g,
        checks=checks,
        notes="Catenoid cousin, g = a z^mu.",
        metadata=meta,
    )


def _warped_catenoid(a: Any = 1, b: Any = 1, l: Any = 2) -> CaseRecord:  # noqa: E741
    a, b, l = exact_param(a), exact_param(b), exact_param(l)  # noqa: E741
    _nonzero("a", a)
    _nonzero("b", b)
    if not (l.is_integer and l >= 2):
        raise ConstraintViolation(f"l must be an integer >= 2, got {l}.")
    spec = SurfaceSpec.genus_zero(Z, (1 - l**2) / (4 * Z**2), [0, "inf"], "O(-2,-2)")
    g = RationalFunction(a * Z**l + b)
    checks, meta = geometry_checks(spec)
    checks["schwarzian_identity"] = schwarzian_identity(g, spec.G, spec.Q)
    meta["monodromy"] = "H3"
    return CaseRecord(
        tag="warped_catenoid",
        type_tag="O(-2,-2)",
        TA="4pi",
        reducibility=Reducibility.REDUCIBLE,
        verdict=verdict_from(checks, "warped_catenoid"),
        status=Status.CLASSIFIED,
        params=record_params({"a": a, "b": b, "l": l}),
        spec=spec,
        secondary_g=g,
        checks=checks,
        notes="Warped catenoid cousin, g = a z^l + b.",
        metadata=meta,
    )


_BUILDERS = {
    "horosphere": _horosphere,
    "enneper_dual": _enneper_dual,
    "catenoid_cousin": _catenoid_cousin,
    "warped_catenoid": _warped_catenoid,
}


def build_4pi(case: str, **params: Any) -> CaseRecord:
    """Build one of the surfaces with dual total absolute curvature at most `4 pi`.

    With `G = z` the relation `S(g) - S(G) = 2Q` determines `g`: `a z^mu` for the
    catenoid cousins (`mu > 0`, `mu != 1`), `a z^l + b` for the warped ones
    (`l >= 2` an integer) and `tan(sqrt(theta) z)` for the dual of the Enneper
    cousin. The horosphere has constant `G`.

    :param case: `horosphere`, `enneper_dual`, `catenoid_cousin` or
        `warped_catenoid`.
    :param params: Parameters of the case.
    :raises ValueError: When the case is unknown.
    :raises ConstraintViolation: When parameters are out of range.
    :return: The record.
    """
    if case not in _BUILDERS:
        raise ValueError(f"Unknown case {case}, expected one of {FOUR_PI_CASES}.")
    record = _BUILDERS[case](**params)
    LOGGER.debug("built %s: %s", case, record.verdict.value)
    return record
