import logging
import time
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
    e0_report,
    geometry_checks,
    nonzero_roots,
    schwarzian_identity,
    schwarzian_identity_expr,
    single_valued_ends,
    theta_polynomial,
)
from cmc_census.flatlab import o33_data, o33_period, o33_report, weier_integrate
from cmc_census.frobenius import (
    GapClass,
    from_E0,
    from_E1sharp,
    from_E2sharp,
    indicial,
    log_coefficients,
    log_term_theta_poly,
)
from cmc_census.frobenius.solver import factorial_monomial
from cmc_census.moduli import SurfaceSpec, existence_pattern
from cmc_census.symcore import THETA, Z, RationalFunction, is_zero

LOGGER = logging.getLogger(__name__)

Q_SYMBOL = sympy.Symbol("q")

O14_G, O14_Q = Z**2, THETA / (Z * (Z - 1) ** 4)
O13_G, O13_Q = Z**2, THETA / Z
O23A_G, O23A_Q = Z**2, THETA * Z / (Z - 1) ** 2
O23B_G, O23B_Q = ((Z - 1) / Z) ** 2, THETA * (Z - 1) / Z**2
O24_G = ((Z - Q_SYMBOL) / (Z - 1)) ** 2
O24_Q = THETA * (Z - 1) * (Z - Q_SYMBOL) / Z**2


def _require_theta(theta: Any) -> sympy.Expr:
    theta = exact_param(theta)
    if is_zero(theta):
        raise ConstraintViolation("theta must not be zero.")
    return theta


def o14() -> CaseRecord:
    """Type O(-1,-4): the log term at `z = 0` vanishes only for `theta = -4`.

    :return: A verified H3 record with `Q = -4 dz^2 / (z (z-1)^4)`.
    """
    c = log_term_theta_poly(from_E0(O14_G, O14_Q, 0))
    roots = nonzero_roots(c)
    checks = {"unique_theta": roots == {sympy.Integer(-4)}}
    spec = SurfaceSpec.genus_zero(O14_G, O14_Q, [0, 1], "O(-1,-4)", {"theta": -4})
    geometry, meta = geometry_checks(spec)
    checks.update(geometry)
    checks["single_valued_ends"], meta["ends"] = single_valued_ends(spec)
    meta["log_term"] = sympy.sstr(theta_polynomial(c).as_expr())
    return CaseRecord(
        tag="o14",
        type_tag="O(-1,-4)",
        TA="8pi",
        reducibility=Reducibility.H3,
        verdict=verdict_from(checks, "o14"),
        status=Status.CLASSIFIED_UNIQUE,
        params=record_params({"theta": -4}),
        spec=spec,
        checks=checks,
        metadata=meta,
    )


def o13() -> CaseRecord:
    """Type O(-1,-3) does not occur.

    With `G = z^2` and `Q = theta dz^2 / z` the log term at `z = 0` is a multiple
    of `theta^2`, so it vanishes only for the excluded value `theta = 0`.

    :return: A record with the verdict `nonexistent`.
    """
    c = log_term_theta_poly(from_E0(O13_G, O13_Q, 0))
    poly = theta_polynomial(c)
    roots = set(sympy.roots(poly))
    spec = SurfaceSpec.genus_zero(O13_G, O13_Q, [0, "inf"], "O(-1,-3)")
    checks, meta = geometry_checks(spec)
    checks["only_root_zero"] = not poly.is_zero and roots == {sympy.Integer(0)}
    meta["log_term"] = sympy.sstr(poly.as_expr())
    verdict = Verdict.NONEXISTENT if all(checks.values()) else Verdict.UNKNOWN
    return CaseRecord(
        tag="o13",
        type_tag="O(-1,-3)",
        TA="8pi",
        reducibility=Reducibility.REDUCIBLE,
        verdict=verdict,
        status=Status.CLASSIFIED,
        spec=spec,
        checks=checks,
        notes="The log term vanishes only at theta = 0, which is excluded.",
        metadata=meta,
    )


def _h1_record(
    tag: str, spec: SurfaceSpec, end: Any, radicand: sympy.Expr
) -> CaseRecord:
    report = e0_report(spec, end)
    pattern = existence_pattern([report])
    checks, meta = geometry_checks(spec)
    checks["gap_real_non_integer"] = (
        report.indicial.gap_class == GapClass.REAL_NON_INTEGER
    )
    checks["gap_value"] = is_zero(report.indicial.gap**2 - radicand)
    checks["existence_pattern"] = pattern.reducibility == "H1"
    meta.update({"indicial": report.to_json(), "pattern": pattern.to_json()})
    return CaseRecord(
        tag=tag,
        type_tag=spec.label,
        TA="8pi",
        reducibility=Reducibility.H1,
        verdict=verdict_from(checks, tag),
        status=Status.CLASSIFIED,
        params=dict(spec.params),
        spec=spec,
        checks=checks,
        metadata=meta,
    )


def o23_a(theta: Any) -> CaseRecord:
    """Type O(-2,-3) with `mu# = (0, 1)`: `G = z^2`, `Q = theta z dz^2/(z-1)^2`.

    :param theta: Requires `sqrt(1 - 4 theta)` real and not an integer.
    :raises ConstraintViolation: When the constraint fails.
    :return: An H1 record; the gap at `z = 1` is `sqrt(1 - 4 theta)`.
    """
    theta = _require_theta(theta)
    radicand = 1 - 4 * theta
    ThetaConstraint(
        ConstraintKind.SQRT_REAL_NON_INTEGER, (radicand,), "sqrt(1 - 4 theta)"
    ).require()
    spec = SurfaceSpec.genus_zero(
        O23A_G, O23A_Q, [1, "inf"], "O(-2,-3)", {"theta": theta}
    )
    return _h1_record("o23_a", spec, 1, radicand)


def o23_b(theta: Any) -> CaseRecord:
    """Type O(-2,-3) with `mu# = (1, 0)`: `G = ((z-1)/z)^2`, `Q = theta (z-1) dz^2/z^2`.

    :param theta: Requires `sqrt(4 + 4 theta)` real and not an integer.
    :raises ConstraintViolation: When the constraint fails.
    :return: An H1 record; the gap at `z = 0` is `sqrt(4 + 4 theta)`.
    """
    theta = _require_theta(theta)
    radicand = 4 + 4 * theta
    ThetaConstraint(
        ConstraintKind.SQRT_REAL_NON_INTEGER, (radicand,), "sqrt(4 + 4 theta)"
    ).require()
    spec = SurfaceSpec.genus_zero(
        O23B_G, O23B_Q, [0, "inf"], "O(-2,-3)", {"theta": theta}
    )
    return _h1_record("o23_b", spec, 0, radicand)


def _equal_theta_polys(a: Any, b: Any) -> bool:
    return is_zero((theta_polynomial(a) - theta_polynomial(b)).as_expr())


def o23_h3_nonexistence(m: int) -> CaseRecord:
    """No H3-reducible surface of type O(-2,-3) has integer gap `m`.

    At the regular end the `E1sharp` equation (pattern `mu# = (0, 1)`) and the
    `E2sharp` equation (pattern `mu# = (1, 0)`) read `X'' + p X' + q X = 0` with
    constant `p` and `q = q0 + theta z`. Fixing `q0` so that the gap is `m` leaves
    the log term `-theta^m / (m! (m-1)!)` for both patterns, which never vanishes
    for `theta != 0`.

    :param m: The gap, a positive integer.
    :raises ValueError: When `m < 1`.
    :return: A record with the verdict `nonexistent`.
    """
    if int(m) != m or m < 1:
        raise ValueError(f"Expected a positive integer gap, got {m}.")
    m = int(m)
    ode_a = from_E1sharp(O23A_G, O23A_Q, 1).pin_indicial(q0=sympy.Rational(1 - m**2, 4))
    ode_b = from_E2sharp(O23B_G, O23B_Q, 0).pin_indicial(q0=sympy.Rational(4 - m**2, 4))
    c_a, c_b = log_term_theta_poly(ode_a), log_term_theta_poly(ode_b)
    checks = {
        "gap_a": indicial(ode_a).gap == m,
        "gap_b": indicial(ode_b).gap == m,
        "factorial_monomial_a": _equal_theta_polys(c_a, factorial_monomial(m)),
        "factorial_monomial_b": _equal_theta_polys(c_b, factorial_monomial(m)),
    }
    verdict = Verdict.NONEXISTENT if all(checks.values()) else Verdict.UNKNOWN
    return CaseRecord(
        tag="o23_h3_nonexistence",
        type_tag="O(-2,-3)",
        TA="8pi",
        reducibility=Reducibility.H3,
        verdict=verdict,
        status=Status.CLASSIFIED,
        params=record_params({"m": m}),
        checks=checks,
        notes="The log term is a nonzero monomial in theta for both branch patterns.",
        metadata={
            "log_term_a": sympy.sstr(theta_polynomial(c_a).as_expr()),
            "log_term_b": sympy.sstr(theta_polynomial(c_b).as_expr()),
        },
    )


def o24_h1(theta: Any, q: Any) -> CaseRecord:
    """Type O(-2,-4), H1-reducible: `G = ((z-q)/(z-1))^2`, `Q = theta (z-1)(z-q)/z^2`.

    :param theta: Nonzero.
    :param q: Not 0 or 1; `sqrt(1 - 4 theta q)` must be real and not an integer.
    :raises ConstraintViolation: When a constraint fails.
    :return: The record.
    """
    theta, q = _require_theta(theta), exact_param(q)
    ThetaConstraint(ConstraintKind.EXCLUDED_SET, (q, 0, 1), "q not in {0, 1}").require()
    radicand = 1 - 4 * theta * q
    ThetaConstraint(
        ConstraintKind.SQRT_REAL_NON_INTEGER, (radicand,), "sqrt(1 - 4 theta q)"
    ).require()
    spec = SurfaceSpec.genus_zero(
        O24_G, O24_Q, [0, "inf"], "O(-2,-4)", {"theta": theta, "q": q}
    )
    return _h1_record("o24_h1", spec, 0, radicand)


def _leading_recursion(a: list[Any], c_poly: sympy.Poly, m: int) -> bool:
    """Check `t_j = -mu_j t_{j-1}` for the leading coefficients of `a_j` and `c`."""
    t = sympy.S.One
    for j in range(1, m):
        t = -t / (j * (m - j))
        if not is_zero(theta_polynomial(a[j]).coeff_monomial(THETA**j) - t):
            return False
    t = t / m
    return is_zero(c_poly.coeff_monomial(THETA**m) - t)


def _admissible_roots(c_poly: sympy.Poly, s: sympy.Expr) -> list[sympy.Expr]:
    """Distinct roots of `c(theta)` other than 0 and `s`, isolated exactly."""
    stripped = c_poly
    for bad in (sympy.S.Zero, s):
        factor = sympy.Poly(THETA - bad, THETA)
        while stripped.degree() > 0 and is_zero(stripped.eval(bad)):
            stripped = stripped.quo(factor)
    if stripped.degree() < 1:
        return []
    return list(stripped.sqf_part().all_roots(radicals=False))


def o24_h3(m: int) -> list[CaseRecord]:
    """Type O(-2,-4), H3-reducible surfaces with gap `m` at `z = 0`.

    With `s = theta q = (1 - m^2)/4` the second-row equation at 0 has `p0 = 2`,
    `q0 = s` and `lambda2 = -(m+1)/2`; its log term is a polynomial `c(theta)` of
    degree `m` whose two top coefficients satisfy `u_m / t_m = m (49 - m^2)/12`.
    Each distinct root other than 0 and `s` gives one surface.

    :param m: The gap, an integer `>= 2`.
    :raises ValueError: When `m < 2`.
    :raises RuntimeError: When no admissible root exists.
    :return: One record per admissible root.
    """
    if int(m) != m or m < 2:
        raise ValueError(f"Expected an integer m >= 2, got {m}.")
    t0 = time.perf_counter()
    m = int(m)
    s = sympy.Rational(1 - m**2, 4)
    ode = from_E1sharp(O24_G, O24_Q, 0).subs({Q_SYMBOL: s / THETA})
    data = indicial(ode)
    c, a = log_coefficients(ode)
    c_poly = theta_polynomial(c)
    t_m = c_poly.coeff_monomial(THETA**m)
    u_m = c_poly.coeff_monomial(THETA ** (m - 1))
    lambda_m = sympy.Rational(m * (49 - m**2), 12)
    roots = _admissible_roots(c_poly, s)
    if not roots:
        raise RuntimeError(f"No admissible root of c(theta) for m = {m}.")

    spec = SurfaceSpec.genus_zero(
        O24_G.subs(Q_SYMBOL, s / THETA),
        O24_Q.subs(Q_SYMBOL, s / THETA),
        [0, "inf"],
        "O(-2,-4)",
    )
    base_checks, base_meta = geometry_checks(spec)
    base_checks.update(
        {
            "indicial_gap": data.gap == m
            and is_zero(data.lambda2 + sympy.Rational(m + 1, 2)),
            "lambda_identity": c_poly.degree() == m and is_zero(u_m / t_m - lambda_m),
            "leading_recursion": _leading_recursion(a, c_poly, m),
            "root_count": 1 <= len(roots) <= m,
        }
    )
    base_meta.update(
        {
            "log_term": sympy.sstr(c_poly.as_expr()),
            "lambda_m": sympy.sstr(lambda_m),
            "root_count": len(roots),
        }
    )
    records = []
    for k, root in enumerate(roots):
        value = complex(sympy.N(root, 30))
        records.append(
            CaseRecord(
                tag="o24_h3",
                type_tag="O(-2,-4)",
                TA="8pi",
                reducibility=Reducibility.H3,
                verdict=verdict_from(base_checks, "o24_h3"),
                status=Status.CLASSIFIED,
                params=record_params({"m": m, "s": s, "theta": root}),
                spec=spec,
                checks=dict(base_checks),
                notes="q = s / theta; theta is a root of the log term.",
                metadata={
                    **base_meta,
                    "root_index": k,
                    "theta_numeric": [value.real, value.imag],
                },
            )
        )
    LOGGER.info(
        "o24_h3(%s): %s roots in %s seconds", m, len(roots), time.perf_counter() - t0
    )
    return records


def o22(mu: Any = 4, a: Any = 1, b: Any = 0) -> CaseRecord:
    """Type O(-2,-2) with `TA = 8 pi`: covers of catenoid cousins.

    `G = z^2`, `Q = theta dz^2 / z^2` and `g = a z^mu + b`. The Schwarzian relation
    `S(z^mu) - S(z^2) = (4 - mu^2)/(2 z^2) = 2Q` forces `theta = (4 - mu^2)/4`, so
    `mu = 2` gives `Q = 0` and is excluded. The monodromy `g -> e^(2 pi i mu)(g - b)
    + b` is unitary exactly when `mu` is an integer or `b = 0`.

    :param mu: Positive real exponent, not 2.
    :param a: Nonzero.
    :param b: Arbitrary; must vanish unless `mu` is an integer.
    :raises ConstraintViolation: When the dichotomy or a range condition fails.
    :return: The record.
    """
    mu, a, b = exact_param(mu), exact_param(a), exact_param(b)
    if not (mu.is_real and mu.is_positive):
        raise ConstraintViolation(f"mu must be a positive real, got {mu}.")
    ThetaConstraint(ConstraintKind.EXCLUDED_SET, (mu, 2), "mu != 2").require()
    if is_zero(a):
        raise ConstraintViolation("a must not be zero.")
    if not (mu.is_integer or is_zero(b)):
        raise ConstraintViolation(f"mu = {mu} is not an integer, so b must vanish.")
    theta = (4 - mu**2) / 4
    spec = SurfaceSpec.genus_zero(
        Z**2, THETA / Z**2, [0, "inf"], "O(-2,-2)", {"theta": theta}
    )
    assert spec.G is not None and spec.Q is not None
    checks, meta = geometry_checks(spec)
    g_expr = a * Z**mu + b
    if mu.is_integer:
        g: RationalFunction | str = RationalFunction(g_expr)
        checks["schwarzian_identity"] = schwarzian_identity(g, spec.G, spec.Q)
        checks["single_valued_ends"], meta["ends"] = single_valued_ends(spec)
    else:
        g = sympy.sstr(g_expr)
        checks["schwarzian_identity"] = schwarzian_identity_expr(g_expr, spec.G, spec.Q)
    checks["gap_equals_mu"] = is_zero(e0_report(spec, 0).indicial.gap - mu)
    checks["unitary_monodromy"] = bool(mu.is_integer) or is_zero(b)
    meta["monodromy"] = "H3" if mu.is_integer else "H1"
    return CaseRecord(
        tag="o22",
        type_tag="O(-2,-2)",
        TA="8pi",
        reducibility=Reducibility.REDUCIBLE,
        verdict=verdict_from(checks, "o22"),
        status=Status.CLASSIFIED,
        params=record_params({"mu": mu, "a": a, "b": b, "theta": theta}),
        spec=spec,
        secondary_g=g,
        checks=checks,
        notes="Double cover of a catenoid cousin, or a warped one for integer mu.",
        metadata=meta,
    )


def o33_record(a: Any = 0, grid: tuple[float, ...] = (-0.2, 0.0, 0.1)) -> CaseRecord:
    """Type O(-3,-3), deformed from a minimal surface with two ends.

    Checks the hypotheses of the deformation: the period around `z = 0` agrees
    with `-2 pi nu (2 + 2a + nu)`, its derivative at `nu = 0` does not vanish,
    and for `nu = 0` the real axis is mapped into a plane `x2 = const`.

    :param a: The deformation parameter, not `-1` or `-1 +- sqrt(2)`.
    :param grid: Values of `nu` at which the period is compared.
    :raises ValueError: When `a` is excluded.
    :return: The record.
    """
    periods = [o33_period(a, nu) for nu in grid]
    report = o33_report(a, 0)
    planar = weier_integrate(o33_data(a, 0), [1, 2])
    checks = {
        "period_closed_form": all(abs(x - y) < 1e-8 for x, y in periods),
        "derivative_nonzero": abs(float(report.jacobian[0, 0])) > 1e-6,
        "real_axis_planar": abs(float(planar[1])) < 1e-9,
    }
    return CaseRecord(
        tag="o33",
        type_tag="O(-3,-3)",
        TA="8pi",
        reducibility=Reducibility.REDUCIBLE,
        verdict=verdict_from(checks, "o33"),
        status=Status.EXISTENCE,
        params=record_params({"a": exact_param(a)}),
        checks=checks,
        notes="The deformed CMC-1 family exists by an external deformation theorem.",
        metadata={"period": report.to_json(), "periods": [list(p) for p in periods]},
    )
