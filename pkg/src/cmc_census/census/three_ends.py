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
    e0_report,
    geometry_checks,
    nonzero_roots,
    residue_free,
    schwarzian_identity,
    single_valued_ends,
    theta_polynomial,
)
from cmc_census.frobenius import GapClass, from_E0, log_term_theta_poly
from cmc_census.frobenius.solver import closed_form_condition, indicial
from cmc_census.moduli import SurfaceSpec, existence_pattern
from cmc_census.symcore import (
    THETA,
    Z,
    RationalFunction,
    integrate_exact,
    is_zero,
)

LOGGER = logging.getLogger(__name__)

P_SYMBOL = sympy.Symbol("p")

O112_G, O112_Q = ((Z - 1) / Z) ** 2, THETA / (Z * (Z - 1))
O122_G = Z**2
O122_Q = THETA / (Z * (Z - 1) ** 2 * (Z - P_SYMBOL) ** 2)


def _pattern_check(spec: SurfaceSpec, expected: str) -> tuple[bool, dict[str, Any]]:
    """Compare the existence pattern of the first two ends with `expected`."""
    pattern = existence_pattern([e0_report(spec, e) for e in spec.ends[:-1]])
    return pattern.reducibility == expected, pattern.to_json()


def o112() -> CaseRecord:
    """Type O(-1,-1,-2): unique, with `G = ((z-1)/z)^2` and `Q = -2 dz^2/(z(z-1))`.

    The gap of `E0` is 2 at both `z = 0` and `z = 1`, and both log terms vanish
    only for `theta = -2`.

    :return: A verified H3 record.
    """
    roots, closed = {}, {}
    for end in (0, 1):
        ode = from_E0(O112_G, O112_Q, end)
        roots[end] = nonzero_roots(log_term_theta_poly(ode))
        condition = theta_polynomial(closed_form_condition(ode, 2))
        closed[end] = {r for r in sympy.roots(condition) if not is_zero(r)}
    spec = SurfaceSpec.genus_zero(
        O112_G, O112_Q, [0, 1, "inf"], "O(-1,-1,-2)", {"theta": -2}
    )
    checks, meta = geometry_checks(spec)
    checks["unique_theta"] = all(r == {sympy.Integer(-2)} for r in roots.values())
    checks["closed_form_agrees"] = closed == roots
    checks["single_valued_ends"], meta["ends"] = single_valued_ends(spec)
    checks["existence_pattern"], meta["pattern"] = _pattern_check(spec, "H3")
    return CaseRecord(
        tag="o112",
        type_tag="O(-1,-1,-2)",
        TA="8pi",
        reducibility=Reducibility.H3,
        verdict=verdict_from(checks, "o112"),
        status=Status.CLASSIFIED_UNIQUE,
        params=record_params({"theta": -2}),
        spec=spec,
        checks=checks,
        metadata=meta,
    )


def _o122_p(p: Any) -> sympy.Expr:
    p = exact_param(p)
    if not p.is_real:
        raise ConstraintViolation(f"p must be real, got {p}.")
    ThetaConstraint(ConstraintKind.EXCLUDED_SET, (p, 0, 1), "p not in {0, 1}").require()
    return p


def _o122_spec(p: sympy.Expr) -> SurfaceSpec:
    theta = -2 * p * (p + 1)
    return SurfaceSpec.genus_zero(
        O122_G, O122_Q, [0, 1, P_SYMBOL], "O(-1,-2,-2)", {"p": p, "theta": theta}
    )


def _o122_root_check(p: sympy.Expr) -> bool:
    ode = from_E0(O122_G, O122_Q.subs(P_SYMBOL, p), 0)
    roots = nonzero_roots(log_term_theta_poly(ode))
    return len(roots) == 1 and is_zero(roots.pop() + 2 * p * (p + 1))


def o122_h1(p: Any) -> CaseRecord:
    """Type O(-1,-2,-2), H1-reducible: ends `0, 1, p` with `theta = -2p(p+1)`.

    :param p: Real, not 0 or 1, with `4/(p-1)` not an integer.
    :raises ConstraintViolation: When a constraint fails.
    :return: The record; the gap at `z = 1` is `|3 + 4/(p-1)|`.
    """
    p = _o122_p(p)
    shift = 4 / (p - 1)
    if shift.is_integer:
        raise ConstraintViolation(f"4/(p-1) = {shift} is an integer.")
    spec = _o122_spec(p)
    checks, meta = geometry_checks(spec)
    at_one = e0_report(spec, 1)
    checks["unique_theta_at_0"] = _o122_root_check(p)
    checks["gap_at_1"] = at_one.indicial.gap_class == GapClass.REAL_NON_INTEGER and (
        is_zero(at_one.indicial.gap - abs(3 + shift))
    )
    checks["existence_pattern"], meta["pattern"] = _pattern_check(spec, "H1")
    return CaseRecord(
        tag="o122_h1",
        type_tag="O(-1,-2,-2)",
        TA="8pi",
        reducibility=Reducibility.H1,
        verdict=verdict_from(checks, "o122_h1"),
        status=Status.CLASSIFIED,
        params=dict(spec.params),
        spec=spec,
        checks=checks,
        metadata=meta,
    )


def o122_h3(r: int) -> CaseRecord:
    """Type O(-1,-2,-2), H3-reducible, with `p = (r+2)/(r-2)`.

    The secondary Gauss map is the rational antiderivative of
    `z (z-p)^(r-2) / (z-1)^(r+2) dz`, which has no residue.

    :param r: An integer `>= 3`.
    :raises ValueError: When `r < 3`.
    :return: The record with `g` attached.
    """
    if int(r) != r or r < 3:
        raise ValueError(f"Expected an integer r >= 3, got {r}.")
    r = int(r)
    p = sympy.Rational(r + 2, r - 2)
    spec = _o122_spec(p)
    assert spec.G is not None and spec.Q is not None
    dg = RationalFunction(Z * (Z - p) ** (r - 2), (Z - 1) ** (r + 2))
    checks, meta = geometry_checks(spec)
    checks["residue_free"] = residue_free(dg, [1, "inf"])
    if not checks["residue_free"]:
        raise RuntimeError(f"dg has a residue for r = {r}.")
    g = integrate_exact(dg)
    checks["unique_theta_at_0"] = _o122_root_check(p)
    checks["schwarzian_identity"] = schwarzian_identity(g, spec.G, spec.Q)
    checks["gap_at_1"] = e0_report(spec, 1).indicial.gap == r + 1
    checks["gap_at_p"] = e0_report(spec, p).indicial.gap == r - 1
    checks["single_valued_ends"], meta["ends"] = single_valued_ends(spec)
    return CaseRecord(
        tag="o122_h3",
        type_tag="O(-1,-2,-2)",
        TA="8pi",
        reducibility=Reducibility.H3,
        verdict=verdict_from(checks, "o122_h3"),
        status=Status.CLASSIFIED,
        params={**spec.params, **record_params({"r": r})},
        spec=spec,
        secondary_g=g,
        checks=checks,
        metadata=meta,
    )


def o222_spec(q1: Any, q2: Any, theta: Any) -> SurfaceSpec:
    """`G = ((z-q1)/(z-q2))^2`, `Q = theta (z-q1)(z-q2) dz^2/(z^2 (z-1)^2)`.

    Ends are at 0, 1 and infinity; the umbilics sit at `q1` and `q2`.
    """
    G = ((Z - q1) / (Z - q2)) ** 2
    Q = theta * (Z - q1) * (Z - q2) / (Z**2 * (Z - 1) ** 2)
    return SurfaceSpec.genus_zero(G, Q, [0, 1, "inf"], "O(-2,-2,-2)")


def o222_irreducible() -> CaseRecord:
    """Irreducible surfaces of type O(-2,-2,-2), classified externally."""
    return CaseRecord(
        tag="o222_irreducible",
        type_tag="O(-2,-2,-2)",
        TA="8pi",
        reducibility=Reducibility.IRREDUCIBLE,
        verdict=Verdict.EXTERNAL,
        status=Status.CLASSIFIED,
        notes="Classified by an external result on surfaces with three regular ends.",
    )


def o222_h1_values(s: sympy.Expr) -> tuple[sympy.Expr, sympy.Expr, sympy.Expr]:
    """`q1`, `q2` and `theta = -3/(4 q1 q2)` of the H1 family."""
    k = 1 + 10 * s + s**2
    q1, q2 = k / (4 * s * (1 - s)), k / (4 * (s - 1))
    return q1, q2, -sympy.Rational(3, 4) / (q1 * q2)


def o222_h1(s: Any) -> CaseRecord:
    """Type O(-2,-2,-2), H1-reducible, parametrized by real `s`.

    :param s: Real, not 0 or 1, with `-4(1+4s+s^2)/(1+10s+s^2)` not an integer.
    :raises ConstraintViolation: When a constraint fails.
    :return: The record; its 1-parameter family rescales `g`.
    """
    s = exact_param(s)
    if not s.is_real:
        raise ConstraintViolation(f"s must be real, got {s}.")
    ThetaConstraint(ConstraintKind.EXCLUDED_SET, (s, 0, 1), "s not in {0, 1}").require()
    k = 1 + 10 * s + s**2
    if is_zero(k):
        raise ConstraintViolation(f"1 + 10s + s^2 vanishes at s = {s}.")
    gap = -4 * (1 + 4 * s + s**2) / k
    ThetaConstraint(
        ConstraintKind.SQRT_REAL_NON_INTEGER,
        (gap**2,),
        "-4(1+4s+s^2)/(1+10s+s^2) not an integer",
    ).require()
    q1, q2, theta = o222_h1_values(s)
    spec = o222_spec(q1, q2, theta)
    ode = from_E0(spec.G, spec.Q, 0)
    data = indicial(ode)
    checks, meta = geometry_checks(spec)
    checks["roots_at_0"] = {data.lambda1, data.lambda2} == {
        sympy.Rational(3, 2),
        sympy.Rational(-1, 2),
    }
    checks["log_free_at_0"] = is_zero(sympy.sympify(closed_form_condition(ode, 2)))
    checks["gap_at_1"] = is_zero(e0_report(spec, 1).indicial.gap - abs(gap))
    checks["existence_pattern"], meta["pattern"] = _pattern_check(spec, "H1")
    meta["family"] = "g -> t g for real t > 0"
    return CaseRecord(
        tag="o222_h1",
        type_tag="O(-2,-2,-2)",
        TA="8pi",
        reducibility=Reducibility.H1,
        verdict=verdict_from(checks, "o222_h1"),
        status=Status.EXISTENCE_PLUS,
        params=record_params({"s": s, "q1": q1, "q2": q2, "theta": theta}),
        spec=spec,
        checks=checks,
        metadata=meta,
    )


def o222_h3(m: int) -> CaseRecord:
    """Type O(-2,-2,-2), H3-reducible with a polynomial secondary Gauss map.

    `q1, q2 = (1 +- 1/sqrt(m))/2`, `theta = -m(m+1)` and
    `dg = z^(m-1) (z-1)^(m-1) (z-q1)(z-q2) dz`.

    :param m: An integer `>= 2`.
    :raises ValueError: When `m < 2`.
    :return: The record with `g` attached.
    """
    if int(m) != m or m < 2:
        raise ValueError(f"Expected an integer m >= 2, got {m}.")
    m = int(m)
    root = 1 / sympy.sqrt(m)
    q1, q2 = (1 + root) / 2, (1 - root) / 2
    theta = -m * (m + 1)
    spec = o222_spec(q1, q2, theta)
    assert spec.G is not None and spec.Q is not None
    # (z - q1)(z - q2) has rational coefficients
    dg = RationalFunction(
        Z ** (m - 1) * (Z - 1) ** (m - 1) * (Z**2 - Z + sympy.Rational(m - 1, 4 * m))
    )
    g = integrate_exact(dg)
    checks, meta = geometry_checks(spec)
    checks["schwarzian_identity"] = schwarzian_identity(g, spec.G, spec.Q)
    checks["single_valued_ends"], meta["ends"] = single_valued_ends(spec)
    checks["existence_pattern"], meta["pattern"] = _pattern_check(spec, "H3")
    return CaseRecord(
        tag="o222_h3",
        type_tag="O(-2,-2,-2)",
        TA="8pi",
        reducibility=Reducibility.H3,
        verdict=verdict_from(checks, "o222_h3"),
        status=Status.EXISTENCE_PLUS,
        params=record_params({"m": m, "q1": q1, "q2": q2, "theta": theta}),
        spec=spec,
        secondary_g=g,
        checks=checks,
        metadata=meta,
    )
