import enum
import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from typing import Any

import sympy

from cmc_census.frobenius.ode import RegularSingularODE, vanishes
from cmc_census.symcore.rational import is_zero
from cmc_census.symcore.scalar import (
    THETA,
    ExactnessError,
    ExactScalar,
    ParamScalar,
    exact_sqrt,
    scalar_to_str,
    to_scalar,
)

LOGGER = logging.getLogger(__name__)


class ResonanceError(ArithmeticError):
    """Raised when `phi(lambda + j)` vanishes during the series recursion."""


class GapClass(enum.Enum):
    """Classification of the exponent gap `m = lambda1 - lambda2`."""

    NON_REAL = "non-real"
    REAL_NON_INTEGER = "real-non-integer"
    POSITIVE_INTEGER = "positive-integer"
    ZERO = "zero"
    PARAMETRIC = "parametric"


def _tidy(x: Any) -> Any:
    if isinstance(x, sympy.Basic):
        if x.free_symbols:
            return sympy.cancel(sympy.expand(x))
        return sympy.expand(sympy.radsimp(x))
    return x


def _ring(values: Sequence[Any]) -> tuple[list[Any], bool]:
    """Move coefficients into the scalar domain when possible.

    :return: The converted values and whether the scalar domain is used. Otherwise
        the values stay sympy expressions.
    """
    try:
        return [to_scalar(v) for v in values], True
    except (ValueError, ExactnessError):
        exprs = [v if isinstance(v, sympy.Basic) else sympy.sympify(v) for v in values]
        return exprs, False


def _div(a: Any, b: Any) -> Any:
    """Exact division that only ever divides by constants in the scalar domain."""
    if isinstance(b, ParamScalar):
        b = b.constant()
    if isinstance(a, sympy.Basic) or isinstance(b, sympy.Basic):
        return _tidy(_expr(a) / _expr(b))
    return a / b


def _expr(x: Any) -> sympy.Expr:
    if isinstance(x, ExactScalar | ParamScalar):
        return x.to_sympy()
    return sympy.sympify(x)


@dataclass(frozen=True)
class IndicialData:
    """Indicial data `phi(t) = t(t-1) + t p0 + q0` at a regular singular point."""

    p0: sympy.Expr
    q0: sympy.Expr
    lambda1: sympy.Expr
    lambda2: sympy.Expr
    gap: sympy.Expr
    radicand: sympy.Expr
    gap_class: GapClass

    @property
    def is_integer_gap(self) -> bool:
        """Whether the gap is a non-negative integer."""
        return self.gap_class in (GapClass.POSITIVE_INTEGER, GapClass.ZERO)

    @property
    def is_real_gap(self) -> bool:
        """Whether the gap is real (the parametric class counts as undecided)."""
        return self.gap_class not in (GapClass.NON_REAL, GapClass.PARAMETRIC)

    @property
    def m(self) -> int:
        """The gap as an integer.

        :raises ValueError: When the gap is not a non-negative integer.
        """
        if not self.is_integer_gap:
            raise ValueError(f"The gap {self.gap} is not a non-negative integer.")
        return int(self.gap)

    def phi(self, t: Any) -> Any:
        """Evaluate the indicial polynomial."""
        return t * (t - 1) + t * self.p0 + self.q0


def _classify(radicand: sympy.Expr) -> tuple[GapClass, sympy.Expr]:
    if radicand.free_symbols:
        return GapClass.PARAMETRIC, exact_sqrt(radicand)
    value = ExactScalar.from_sympy(radicand)
    if value.is_zero:
        return GapClass.ZERO, sympy.S.Zero
    if not value.is_real or value.sign() < 0:
        return GapClass.NON_REAL, exact_sqrt(radicand)
    root = exact_sqrt(radicand)
    if root.is_Integer:
        return GapClass.POSITIVE_INTEGER, root
    return GapClass.REAL_NON_INTEGER, root


def indicial(ode: RegularSingularODE) -> IndicialData:
    """Solve the indicial equation.

    The gap `m = sqrt((1-p0)^2 - 4 q0)` is classified by exact tests: a positive
    integer needs a rational radicand which is a perfect square, a negative or
    non-real radicand gives a non-real gap. Radicands with free parameters are
    reported as parametric.

    :param ode: The equation.
    :return: The indicial data.
    """
    p0, q0 = _tidy(ode.p0), _tidy(ode.q0)
    radicand = _tidy((1 - p0) ** 2 - 4 * q0)
    gap_class, gap = _classify(radicand)
    lambda1 = _tidy((1 - p0 + gap) / 2)
    lambda2 = _tidy((1 - p0 - gap) / 2)
    return IndicialData(p0, q0, lambda1, lambda2, gap, radicand, gap_class)


def _r(lam: Any, k: int, j: int, p: Sequence[Any], q: Sequence[Any]) -> Any:
    """`r_{j,k}(lam) = (lam + k) p_{j-k} + q_{j-k}`."""
    return (lam + k) * p[j - k] + q[j - k]


def series_solution(ode: RegularSingularODE, lam: Any, N: int) -> list[Any]:
    """Coefficients `zeta_0..zeta_N` of the formal solution `z^lam sum zeta_j z^j`.

    :param ode: The equation.
    :param lam: The exponent (usually an indicial root).
    :param N: The highest index.
    :raises ResonanceError: When `phi(lam + j) = 0` for some `1 <= j <= N`.
    :return: The coefficients, in the scalar domain when possible.
    """
    p, q = ode.coefficients(N + 1)
    data = [sympy.sympify(lam), *p, *q]
    values, scalar = _ring(data)
    try:
        return _series(values[0], values[1 : N + 2], values[N + 2 :], N)
    except (ValueError, TypeError, ExactnessError):
        if not scalar:
            raise
        LOGGER.debug("series recursion falls back to symbolic coefficients")
        return _series(data[0], data[1 : N + 2], data[N + 2 :], N)


def _series(lam: Any, p: Sequence[Any], q: Sequence[Any], N: int) -> list[Any]:
    p0, q0 = p[0], q[0]
    zeta: list[Any] = [_one_like(lam)]
    for j in range(1, N + 1):
        t = lam + j
        phi = _tidy(t * (t - 1) + t * p0 + q0)
        if vanishes(phi):
            raise ResonanceError(f"phi(lambda + {j}) vanishes; use the log-term path.")
        acc = sum((_r(lam, k, j, p, q) * zeta[k] for k in range(j)), _zero_like(lam))
        zeta.append(_div(-acc, phi))
    return zeta


def _one_like(x: Any) -> Any:
    return sympy.S.One if isinstance(x, sympy.Basic) else ExactScalar(1)


def _zero_like(x: Any) -> Any:
    return sympy.S.Zero if isinstance(x, sympy.Basic) else ExactScalar(0)


def _require_integer_gap(data: IndicialData) -> int:
    if not data.is_integer_gap:
        raise ValueError(
            f"The gap {data.gap} ({data.gap_class.value}) is not a non-negative "
            "integer."
        )
    return data.m


def _log_recursion(
    lam2: Any, p: Sequence[Any], q: Sequence[Any], m: int
) -> tuple[Any, list[Any]]:
    a: list[Any] = [_one_like(lam2)]
    for j in range(1, m):
        acc = sum((_r(lam2, k, j, p, q) * a[k] for k in range(j)), _zero_like(lam2))
        a.append(_div(acc, j * (m - j)))
    acc = sum((_r(lam2, k, m, p, q) * a[k] for k in range(m)), _zero_like(lam2))
    return _div(-acc, m), a


def log_coefficients(ode: RegularSingularODE) -> tuple[Any, list[Any]]:
    """The log-term coefficient together with the auxiliary `a_0..a_{m-1}`.

    :param ode: The equation.
    :raises ValueError: When the gap is not a non-negative integer.
    :return: `c` and the list of `a_j` (just `[1]` for a zero gap).
    """
    data = indicial(ode)
    m = _require_integer_gap(data)
    if m == 0:
        return ExactScalar(1), [ExactScalar(1)]
    p, q = ode.coefficients(m + 1)
    values, scalar = _ring([data.lambda2, *p, *q])
    if scalar:
        try:
            return _log_recursion(values[0], values[1 : m + 2], values[m + 2 :], m)
        except (ValueError, TypeError, ExactnessError):
            LOGGER.debug("log recursion falls back to symbolic coefficients")
    c, a = _log_recursion(data.lambda2, p, q, m)
    return _tidy(c), a


def log_term(ode: RegularSingularODE) -> Any:
    """The log-term coefficient `c`.

    For a positive integer gap `m` this is `-(1/m) sum_k r_{m,k}(lambda2) a_k` with
    `a_0 = 1` and `a_j = (1/(j(m-j))) sum_k r_{j,k}(lambda2) a_k`. For a zero gap the
    second solution is `dX/dlambda`, whose logarithmic coefficient is 1.

    :param ode: The equation.
    :raises ValueError: When the gap is not a non-negative integer.
    :return: `c` as an exact scalar, a polynomial in `theta`, or a sympy expression
        when other parameters are unbound.
    """
    return log_coefficients(ode)[0]


def log_term_theta_poly(ode: RegularSingularODE) -> ParamScalar:
    """The log-term coefficient as an exact polynomial in `theta`.

    :param ode: An equation whose indicial data does not depend on `theta`.
    :raises ValueError: When the indicial data depends on `theta`, the gap is not a
        positive integer, or other parameters are unbound.
    :return: The polynomial `c(theta)`.
    """
    data = indicial(ode)
    if data.p0.free_symbols or data.q0.free_symbols:
        symbols = data.p0.free_symbols | data.q0.free_symbols
        raise ValueError(f"Indicial data depends on {sorted(map(str, symbols))}.")
    m = _require_integer_gap(data)
    extra = ode.parameters - {THETA}
    if extra:
        raise ValueError(f"Unbound parameters {sorted(map(str, extra))}.")
    c = log_coefficients(ode)[0] if m > 0 else ExactScalar(1)
    return c if isinstance(c, ParamScalar) else ParamScalar((c,))


def closed_form_condition(ode: RegularSingularODE, m: int) -> Any:
    """The closed-form log-free condition for `p = 0` and small gaps.

    The log term vanishes iff the returned value does: `q1` for `m = 1`,
    `q2 + q1^2` for `m = 2` and `q3 + q1 q2 + q1^3/4` for `m = 3`.

    :param ode: An equation with `p = 0`.
    :param m: The gap.
    :raises ValueError: When `p` is nonzero or `m` is not 1, 2 or 3.
    :return: The condition value.
    """
    if m not in (1, 2, 3):
        raise ValueError("Closed forms exist for m = 1, 2, 3 only.")
    p, q = ode.coefficients(m + 1)
    if not all(vanishes(x) for x in p):
        raise ValueError("Closed forms require p = 0.")
    if m == 1:
        value = q[1]
    elif m == 2:
        value = q[2] + q[1] ** 2
    else:
        value = q[3] + q[1] * q[2] + q[1] ** 3 / 4
    return _tidy(value)


class _Jet:
    """Truncated power series in `eps` of order 2, over scalars or expressions."""

    __slots__ = ("c",)

    def __init__(self, c0: Any, c1: Any = 0, c2: Any = 0) -> None:
        self.c = (c0, c1, c2)

    def __add__(self, o: "_Jet") -> "_Jet":
        return _Jet(*(a + b for a, b in zip(self.c, o.c, strict=True)))

    def __mul__(self, o: "_Jet") -> "_Jet":
        a, b = self.c, o.c
        return _Jet(
            a[0] * b[0],
            a[0] * b[1] + a[1] * b[0],
            a[0] * b[2] + a[1] * b[1] + a[2] * b[0],
        )

    def scaled(self, f: Callable[[Any], Any]) -> "_Jet":
        return _Jet(*(f(x) for x in self.c))

    def over_linear(self, a: int) -> "_Jet":
        """Divide by `a + eps` for a nonzero integer `a`."""
        inv = (sympy.Rational(1, a), sympy.Rational(-1, a * a), sympy.Rational(1, a**3))
        return _Jet(
            _mul_rat(self.c[0], inv[0]),
            _mul_rat(self.c[1], inv[0]) + _mul_rat(self.c[0], inv[1]),
            _mul_rat(self.c[2], inv[0])
            + _mul_rat(self.c[1], inv[1])
            + _mul_rat(self.c[0], inv[2]),
        )

    def over_eps(self) -> "_Jet":
        """Divide by `eps`; the constant term must vanish."""
        if not vanishes(self.c[0]):
            raise ArithmeticError("Jet is not divisible by eps.")
        return _Jet(self.c[1], self.c[2], _zero_like(self.c[1]))


def _mul_rat(x: Any, r: sympy.Rational) -> Any:
    if isinstance(x, sympy.Basic):
        return x * r
    return x * ExactScalar(r)


@dataclass(frozen=True)
class FormalSolution:
    """`z^exponent sum coeffs[j] z^j + log_coeff * log(z) * z^log_exponent sum ...`."""

    exponent: Any
    coeffs: tuple[Any, ...]
    log_coeff: Any = field(default_factory=lambda: ExactScalar(0))
    log_exponent: Any = None
    log_series: tuple[Any, ...] = ()


def second_solution(ode: RegularSingularODE, N: int) -> FormalSolution:
    """The second Frobenius solution `X2` at an integer gap.

    For `m > 0`, `X2 = d/dlambda [(lambda - lambda2) X(lambda)]` at `lambda2`; for
    `m = 0`, `X2 = dX/dlambda` at `lambda1`. Both are evaluated with first-order
    jets in `lambda`.

    :param ode: The equation.
    :param N: Highest coefficient index of the power part.
    :raises ValueError: When the gap is not a non-negative integer.
    :return: The solution, with the power part at `lambda2` and the log part
        `c X1 log z`.
    """
    data = indicial(ode)
    m = _require_integer_gap(data)
    N = max(N, m)
    p, q = ode.coefficients(N + 1)
    values, scalar = _ring([data.lambda2, *p, *q])
    if not scalar:
        values = [data.lambda2, *p, *q]
    lam, ps, qs = values[0], values[1 : N + 2], values[N + 2 :]
    zero, one = _zero_like(lam), _one_like(lam)
    eta = [_Jet(zero, one, zero) if m > 0 else _Jet(one, zero, zero)]
    for j in range(1, N + 1):
        acc = _Jet(zero, zero, zero)
        for k in range(j):
            r = _Jet(_r(lam, k, j, ps, qs), ps[j - k], zero)
            acc = acc + r * eta[k]
        acc = acc.scaled(lambda x: _tidy(-x))
        # phi(lambda2 + j + eps) = (j + eps)(j - m + eps)
        if j == m:
            nxt = acc.over_eps().over_linear(m)
        elif m == 0:
            nxt = acc.over_linear(j).over_linear(j)
        else:
            nxt = acc.over_linear(j).over_linear(j - m)
        eta.append(nxt.scaled(_tidy))
    x1 = series_solution(ode, data.lambda1, N)
    if m == 0:
        return FormalSolution(
            exponent=data.lambda1,
            coeffs=tuple(e.c[1] for e in eta),
            log_coeff=ExactScalar(1),
            log_exponent=data.lambda1,
            log_series=tuple(x1),
        )
    return FormalSolution(
        exponent=data.lambda2,
        coeffs=tuple(e.c[1] for e in eta),
        log_coeff=eta[m].c[0],
        log_exponent=data.lambda1,
        log_series=tuple(x1),
    )


def residual(
    ode: RegularSingularODE, solution: FormalSolution, n_terms: int
) -> tuple[list[Any], list[Any]]:
    """Apply the operator to a truncated formal solution.

    :param ode: The equation.
    :param solution: The formal solution.
    :param n_terms: Number of leading coefficients to return.
    :raises ValueError: When the solution has fewer coefficients than requested or
        the two exponents do not differ by a non-negative integer.
    :return: Coefficients of `z^(exponent + n)` of the power part and of
        `z^(exponent + n) log z` of the log part, `n < n_terms`.
    """
    if len(solution.coeffs) < n_terms:
        raise ValueError("Not enough coefficients for the requested residual.")
    p, q = ode.coefficients(n_terms)
    lam = sympy.sympify(_expr(solution.exponent))
    a = [_expr(x) for x in solution.coeffs]
    p0, q0 = p[0], q[0]

    def phi(t: Any) -> Any:
        return t * (t - 1) + t * p0 + q0

    power = []
    for n in range(n_terms):
        acc = phi(lam + n) * a[n]
        acc += sum((_r(lam, k, n, p, q) * a[k] for k in range(n)), sympy.S.Zero)
        power.append(acc)
    log_part = [sympy.S.Zero] * n_terms
    c = _expr(solution.log_coeff)
    if not is_zero(c) and solution.log_series:
        lam1 = sympy.sympify(_expr(solution.log_exponent))
        shift = _tidy(lam1 - lam)
        if not (shift.is_Integer and shift >= 0):
            raise ValueError("Exponents of the two parts must differ by an integer.")
        b = [_expr(x) for x in solution.log_series]
        for i in range(n_terms - int(shift)):
            n = i + int(shift)
            if i >= len(b):
                raise ValueError("Not enough log-series coefficients.")
            extra = (2 * (lam1 + i) - 1) * b[i]
            extra += sum((p[i - k] * b[k] for k in range(i + 1)), sympy.S.Zero)
            power[n] += c * extra
            value = phi(lam1 + i) * b[i]
            value += sum((_r(lam1, k, i, p, q) * b[k] for k in range(i)), sympy.S.Zero)
            log_part[n] = c * value
    return [_tidy(x) for x in power], [_tidy(x) for x in log_part]


@dataclass(frozen=True)
class FrobeniusReport:
    """Indicial data, the first series solution and the log-term coefficient."""

    indicial: IndicialData
    zeta1: tuple[Any, ...]
    log_coeff: Any
    x2_coeffs: tuple[Any, ...]
    a_coeffs: tuple[Any, ...]
    form: str = "raw"
    end: str = "0"

    @property
    def log_free(self) -> bool | None:
        """Whether the log term vanishes; `None` when undecidable."""
        if self.indicial.gap_class == GapClass.POSITIVE_INTEGER:
            return vanishes(self.log_coeff)
        if self.indicial.gap_class == GapClass.ZERO:
            return False
        if self.indicial.gap_class == GapClass.PARAMETRIC:
            return None
        return True

    def to_json(self) -> dict[str, Any]:
        """JSON object with exact values as strings."""
        return {
            "end": self.end,
            "form": self.form,
            "lambda1": scalar_to_str(self.indicial.lambda1),
            "lambda2": scalar_to_str(self.indicial.lambda2),
            "gap": scalar_to_str(self.indicial.gap),
            "gap_class": self.indicial.gap_class.value,
            "log_coeff": scalar_to_str(self.log_coeff),
            "log_free": self.log_free,
        }


def frobenius_report(
    ode: RegularSingularODE, n_terms: int | None = None
) -> FrobeniusReport:
    """Run the full analysis of an equation.

    :param ode: The equation.
    :param n_terms: Number of series coefficients; defaults to `m + 8` for integer
        gaps and 8 otherwise.
    :return: The report.
    """
    data = indicial(ode)
    if data.is_integer_gap:
        N = n_terms if n_terms is not None else data.m + 8
        c, a = log_coefficients(ode)
        x2 = second_solution(ode, N)
        zeta1 = series_solution(ode, data.lambda1, N)
        return FrobeniusReport(
            data,
            tuple(zeta1),
            c,
            x2.coeffs,
            tuple(a),
            ode.provenance,
            ode.base.to_json(),
        )
    N = n_terms if n_terms is not None else 8
    first: list[Any] = []
    if data.gap_class != GapClass.PARAMETRIC:
        first = series_solution(ode, data.lambda1, N)
    return FrobeniusReport(
        data, tuple(first), ExactScalar(0), (), (), ode.provenance, ode.base.to_json()
    )


def factorial_monomial(m: int) -> ParamScalar:
    """`-theta^m / (m! (m-1)!)`, the log term of a pure `q0 + q1 z` equation."""
    coeffs = [0] * m + [sympy.Rational(-1, math.factorial(m) * math.factorial(m - 1))]
    return ParamScalar(coeffs)
