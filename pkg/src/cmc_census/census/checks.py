import logging
from collections.abc import Sequence
from typing import Any

import numpy as np
import sympy
from sympy.polys.polyerrors import BasePolynomialError

from cmc_census.frobenius import (
    FrobeniusReport,
    equivalence_report,
    from_E0,
    frobenius_report,
)
from cmc_census.moduli import (
    CompatibilityError,
    SurfaceSpec,
    analyze,
    curvature_report,
)
from cmc_census.symcore import (
    THETA,
    Z,
    ParamScalar,
    RationalFunction,
    SpherePoint,
    differential_order_at,
    is_zero,
    residue_at,
    schwarzian,
    schwarzian_expr,
)

LOGGER = logging.getLogger(__name__)


def geometry_checks(spec: SurfaceSpec) -> tuple[dict[str, bool], dict[str, Any]]:
    """Run `curvature_report` (which runs `analyze`) on a spec.

    :param spec: The surface.
    :return: The check results and the report (or the error) as metadata.
    """
    try:
        report = curvature_report(spec)
    except CompatibilityError as e:
        LOGGER.warning("curvature identities fail for %s: %s", spec.label, e)
        return {"curvature_identities": False}, {"curvature_error": str(e)}
    return {"curvature_identities": True}, {"curvature": report.to_json()}


def _fraction_polys(f: RationalFunction) -> tuple[sympy.Poly, sympy.Poly]:
    return (
        sympy.Poly(f.num, Z, extension=True),
        sympy.Poly(f.den, Z, extension=True),
    )


def _schwarzian_polys(n: sympy.Poly, d: sympy.Poly) -> tuple[sympy.Poly, sympy.Poly]:
    """Unreduced numerator and denominator of `S(n/d)`."""
    # (n/d)' = a/b and (n/d)'' / (n/d)' = hn/hd
    a, b = n.diff(Z) * d - n * d.diff(Z), d**2
    hn, hd = a.diff(Z) * b - a * b.diff(Z), a * b
    return 2 * (hn.diff(Z) * hd - hn * hd.diff(Z)) - hn**2, 2 * hd**2


def schwarzian_identity(g: Any, G: Any, Q: Any) -> bool:
    """Exact test of `S(g) - S(G) = 2Q` for rational `g`.

    Without free parameters the test runs on unreduced fractions of polynomials
    over `Q(i, sqrt(d))`, which skips the gcd computations of `RationalFunction`.

    :raises ValueError: When `g` or `G` is constant.
    """
    g, G, Q = (RationalFunction.coerce(x) for x in (g, G, Q))
    if g.is_constant or G.is_constant:
        raise ValueError("The Schwarzian of a constant is undefined.")
    if not (g.parameters or G.parameters or Q.parameters):
        try:
            a, b = _schwarzian_polys(*_fraction_polys(g))
            c, d = _schwarzian_polys(*_fraction_polys(G))
            e, f = _fraction_polys(Q)
            return (a * d * f - c * b * f - 2 * e * b * d).is_zero
        except BasePolynomialError:
            LOGGER.debug("no common coefficient field, cancelling instead")
    return (schwarzian(g) - schwarzian(G) - Q * 2).is_zero


def schwarzian_identity_expr(g: Any, G: Any, Q: Any) -> bool:
    """`S(g) - S(G) = 2Q` for a multivalued `g` given as a sympy expression."""
    G, Q = RationalFunction.coerce(G), RationalFunction.coerce(Q)
    difference = schwarzian_expr(g) - schwarzian(G).expr - 2 * Q.expr
    return is_zero(sympy.simplify(difference))


def sampled_schwarzian_residual(
    g: sympy.Expr, G: Any, Q: Any, points: Sequence[complex]
) -> float:
    """Largest `|S(g) - S(G) - 2Q|` over sample points, for transcendental `g`.

    :param g: The map, a sympy expression in `z` without free parameters.
    :param G: The hyperbolic Gauss map.
    :param Q: The density of the Hopf differential.
    :param points: The sample points.
    :return: The maximal residual.
    """
    d1 = sympy.diff(g, Z)
    h = sympy.diff(d1, Z) / d1
    s_g = sympy.lambdify(Z, sympy.diff(h, Z) - h**2 / 2, modules="numpy")
    rest = (schwarzian(G) + RationalFunction.coerce(Q) * 2).lambdify()
    z = np.asarray(points, dtype=complex)
    return float(np.max(np.abs(s_g(z) - rest(z))))


def residue_free(dg: Any, points: Sequence[Any]) -> bool:
    """Whether `dg` has zero residue at each of the given points."""
    return all(is_zero(residue_at(dg, p)) for p in points)


def plane_domain(spec: SurfaceSpec) -> bool:
    """Whether the surface is parametrized by the plane.

    `analyze` must find one end, at infinity, and `Q` regular on the plane. The
    plane is simply connected, so the lift is single-valued and no period problem
    arises.
    """
    if spec.genus != 0:
        return False
    try:
        ends, _ = analyze(spec)
    except CompatibilityError:
        return False
    return len(ends) == 1 and ends[0].point == SpherePoint.infinity()


def single_valued_ends(spec: SurfaceSpec) -> tuple[bool, list[dict[str, Any]]]:
    """Check the three equation forms at every regular-singular end.

    :param spec: A genus-zero surface without free parameters.
    :return: Whether every form at every end with `ord Q >= -2` has an integer gap
        and no log term, and the per-end reports.
    """
    assert spec.G is not None and spec.Q is not None
    ok, reports = True, []
    for end in spec.ends:
        if differential_order_at(spec.Q, 2, end) < -2:
            continue
        report = equivalence_report(spec.G, spec.Q, end)
        reports.append(report.to_json())
        ok = ok and report.consistent
        ok = ok and all(e.single_valued for e in report.forms.values())
    return ok, reports


def e0_report(spec: SurfaceSpec, end: Any) -> FrobeniusReport:
    """Frobenius report of the `E0` form at an end."""
    assert spec.G is not None and spec.Q is not None
    return frobenius_report(from_E0(spec.G, spec.Q, end))


def theta_polynomial(c: Any) -> sympy.Poly:
    """A log-term coefficient as a sympy polynomial in `theta`."""
    expr = c.to_sympy() if hasattr(c, "to_sympy") else sympy.sympify(c)
    return sympy.Poly(sympy.expand(expr), THETA)


def nonzero_roots(c: ParamScalar) -> set[sympy.Expr]:
    """Roots of `c(theta)` other than 0 (`theta = 0` is never admissible).

    :raises ValueError: When `c` vanishes identically.
    """
    poly = theta_polynomial(c)
    if poly.is_zero:
        raise ValueError("The log term vanishes identically.")
    return {r for r in sympy.roots(poly) if not is_zero(r)}
