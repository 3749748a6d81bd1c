import logging
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import sympy
from sympy.polys.polyerrors import BasePolynomialError

from cmc_census.symcore.scalar import (
    THETA,
    Z,
    ExactScalar,
    Scalar,
    scalar_from_str,
    scalar_to_str,
    to_scalar,
)

LOGGER = logging.getLogger(__name__)


def is_zero(expr: Any) -> bool:
    """Exact zero test for expressions over `Q(i, sqrt(d))` with parameters.

    :param expr: The expression.
    :return: Whether the expression vanishes identically.
    """
    expr = sympy.expand(sympy.sympify(expr))
    if expr == 0:
        return True
    return sympy.expand(sympy.numer(sympy.together(expr))) == 0


def _canon(expr: Any) -> sympy.Expr:
    expr = sympy.sympify(expr)
    if expr.free_symbols - {Z}:
        return sympy.expand(expr)
    return sympy.expand(sympy.radsimp(expr))


def _algebraic_options(expr: sympy.Expr) -> dict[str, Any]:
    """Options that let sympy's polynomial code work over `Q(i, sqrt(d))`."""
    if expr.free_symbols - {Z}:
        return {}
    # 1/sqrt(d) is stored as d**(-1/2)
    roots = {
        sympy.sqrt(a.base)
        for a in expr.atoms(sympy.Pow)
        if abs(a.exp) == sympy.S.Half and a.base.is_Integer and a.base > 0
    }
    extension = sorted(roots, key=sympy.default_sort_key)
    if expr.has(sympy.I):
        extension.append(sympy.I)
    return {"extension": extension} if extension else {}


def _poly(expr: Any, gen: sympy.Symbol = Z) -> sympy.Poly:
    return sympy.Poly(sympy.expand(expr), gen)


def _low_order(expr: sympy.Expr) -> int:
    """Lowest power of `z` with a nonzero coefficient in a nonzero polynomial."""
    terms = [m[0] for m, c in _poly(expr).terms() if not is_zero(c)]
    return min(terms)


def _coeffs(expr: sympy.Expr) -> list[sympy.Expr]:
    """Coefficients by ascending degree."""
    return list(reversed(_poly(expr).all_coeffs()))


class RationalFunction:
    """A reduced ratio of polynomials in `z` with exact coefficients.

    Coefficients lie in `Q(i, sqrt(d))`, possibly depending on named parameters such
    as `theta`. After construction numerator and denominator are coprime and the
    denominator is monic in `z`; zero is stored as `0/1`.
    """

    __slots__ = ("_num", "_den")

    def __init__(self, num: Any, den: Any = 1) -> None:
        """Create a rational function.

        :param num: Numerator (any exact sympy expression in `z`).
        :param den: Denominator.
        :raises ZeroDivisionError: When the denominator vanishes.
        :raises ValueError: When the input is not rational in `z`.
        """
        num, den = sympy.sympify(num), sympy.sympify(den)
        if is_zero(den):
            raise ZeroDivisionError("Rational function with zero denominator.")
        expr = sympy.together(num / den)
        if not expr.is_rational_function(Z):
            raise ValueError(f"{expr} is not rational in z.")
        n, d = sympy.fraction(expr)
        if is_zero(n):
            self._num, self._den = sympy.S.Zero, sympy.S.One
            return
        opts = _algebraic_options(n * d)
        try:
            reduced = sympy.cancel(n / d, Z, **opts)
        except (BasePolynomialError, NotImplementedError):
            LOGGER.debug("falling back to plain cancellation for %s", expr)
            reduced = sympy.cancel(n / d, Z)
        n, d = sympy.fraction(sympy.together(reduced))
        lc = _poly(d).LC()
        inv = sympy.radsimp(1 / lc) if not lc.free_symbols else 1 / lc
        self._num = _canon(n * inv)
        self._den = _canon(d * inv)

    @classmethod
    def from_coeffs(
        cls, num: Sequence[Any], den: Sequence[Any] = (1,)
    ) -> "RationalFunction":
        """Build from coefficient lists by ascending degree.

        :param num: Numerator coefficients.
        :param den: Denominator coefficients.
        :return: The rational function.
        """
        n = sum((sympy.sympify(c) * Z**k for k, c in enumerate(num)), sympy.S.Zero)
        d = sum((sympy.sympify(c) * Z**k for k, c in enumerate(den)), sympy.S.Zero)
        return cls(n, d)

    @classmethod
    def coerce(cls, value: Any) -> "RationalFunction":
        """Return `value` as a rational function."""
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, ExactScalar):
            value = value.to_sympy()
        return cls(value)

    @property
    def num(self) -> sympy.Expr:
        """Numerator (expanded polynomial in `z`)."""
        return self._num

    @property
    def den(self) -> sympy.Expr:
        """Denominator (expanded monic polynomial in `z`)."""
        return self._den

    @property
    def expr(self) -> sympy.Expr:
        """The quotient as a single sympy expression."""
        return self._num / self._den

    @property
    def is_zero(self) -> bool:
        """Whether this is the zero function."""
        return self._num == 0

    @property
    def is_constant(self) -> bool:
        """Whether the function does not depend on `z`."""
        return Z not in self._num.free_symbols and Z not in self._den.free_symbols

    @property
    def parameters(self) -> set[sympy.Symbol]:
        """Free symbols other than `z`."""
        return (self._num.free_symbols | self._den.free_symbols) - {Z}

    def degrees(self) -> tuple[int, int]:
        """Degrees of numerator and denominator in `z`."""
        dn = -1 if self.is_zero else _poly(self._num).degree()
        return dn, _poly(self._den).degree()

    @property
    def degree(self) -> int:
        """Degree as a map of the sphere, i.e. the larger of the two degrees."""
        return max(self.degrees())

    def __add__(self, other: Any) -> "RationalFunction":
        o = RationalFunction.coerce(other)
        num = self._num * o._den + o._num * self._den
        return RationalFunction(num, self._den * o._den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self._num, self._den)

    def __sub__(self, other: Any) -> "RationalFunction":
        return self + (-RationalFunction.coerce(other))

    def __rsub__(self, other: Any) -> "RationalFunction":
        return RationalFunction.coerce(other) - self

    def __mul__(self, other: Any) -> "RationalFunction":
        o = RationalFunction.coerce(other)
        return RationalFunction(self._num * o._num, self._den * o._den)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "RationalFunction":
        o = RationalFunction.coerce(other)
        if o.is_zero:
            raise ZeroDivisionError("Division by the zero function.")
        return RationalFunction(self._num * o._den, self._den * o._num)

    def __rtruediv__(self, other: Any) -> "RationalFunction":
        return RationalFunction.coerce(other) / self

    def __pow__(self, exponent: int) -> "RationalFunction":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return RationalFunction(self._den**-exponent, self._num**-exponent)
        return RationalFunction(self._num**exponent, self._den**exponent)

    def derivative(self) -> "RationalFunction":
        """Formal derivative with respect to `z`."""
        n, d = self._num, self._den
        return RationalFunction(sympy.diff(n, Z) * d - n * sympy.diff(d, Z), d * d)

    def subs(self, mapping: Mapping[Any, Any]) -> "RationalFunction":
        """Substitute values for parameters.

        :param mapping: Parameter symbols (or their names) mapped to values.
        :return: The substituted function.
        """
        m = {
            (sympy.Symbol(k) if isinstance(k, str) else k): (
                v.to_sympy() if isinstance(v, ExactScalar) else sympy.sympify(v)
            )
            for k, v in mapping.items()
        }
        return RationalFunction(self._num.subs(m), self._den.subs(m))

    def compose(self, inner: Any) -> "RationalFunction":
        """Return `f(inner(z))`."""
        i = RationalFunction.coerce(inner)
        return RationalFunction(self.expr.subs(Z, i.expr))

    def value_at(self, point: Any) -> sympy.Expr:
        """Exact value at a finite point which is not a pole.

        :param point: The point.
        :raises ValueError: When the point is a pole.
        :return: The value.
        """
        den = self._den.subs(Z, point)
        if is_zero(den):
            raise ValueError(f"{point} is a pole of {self}.")
        return _canon(self._num.subs(Z, point) / den)

    def __eq__(self, other: object) -> bool:
        try:
            o = RationalFunction.coerce(other)
        except (ValueError, TypeError, ZeroDivisionError, sympy.SympifyError):
            return False
        return is_zero(self._num * o._den - o._num * self._den)

    def __hash__(self) -> int:
        return hash((self._num, self._den))

    def lambdify(self) -> Callable[[Any], Any]:
        """Return a numpy-vectorised evaluator.

        :raises ValueError: When unbound parameters remain.
        :return: The evaluator.
        """
        if self.parameters:
            raise ValueError(f"Unbound parameters {sorted(map(str, self.parameters))}.")
        f = sympy.lambdify(Z, self.expr, modules="numpy")

        def _f(z: Any) -> Any:
            values = np.asarray(f(np.asarray(z, dtype=complex)), dtype=complex)
            return values * np.ones_like(z, dtype=complex)

        return _f

    def to_json(self) -> dict[str, list[str]]:
        """Serialize as `{num: [...], den: [...]}`, coefficients by ascending degree."""
        return {
            "num": [scalar_to_str(c) for c in _coeffs(self._num)],
            "den": [scalar_to_str(c) for c in _coeffs(self._den)],
        }

    @classmethod
    def from_json(
        cls, data: Mapping[str, Sequence[str]], params: Mapping[str, Any] | None = None
    ) -> "RationalFunction":
        """Deserialize the format produced by `RationalFunction.to_json`.

        :param data: The JSON object.
        :param params: Values substituted for named parameters.
        :raises ValueError: When the object is malformed.
        :return: The rational function.
        """
        if "num" not in data:
            raise ValueError("Rational function JSON needs a 'num' field.")
        f = cls.from_coeffs(
            [scalar_from_str(c) for c in data["num"]],
            [scalar_from_str(c) for c in data.get("den", ["1"])],
        )
        if params:
            f = f.subs({k: scalar_from_str(str(v)) for k, v in params.items()})
        return f

    def __str__(self) -> str:
        """Human readable form."""
        return scalar_to_str(sympy.factor(self.expr) if self.parameters else self.expr)

    def __repr__(self) -> str:
        """Representation."""
        return f"RationalFunction({self})"


def rational_arithmetic(
    a: RationalFunction, b: RationalFunction | None, op: str
) -> RationalFunction:
    """Apply one of `add`, `mul`, `div` or `derivative`.

    :param a: First operand.
    :param b: Second operand (ignored for `derivative`).
    :param op: The operation.
    :raises ValueError: When the operation is unknown or an operand is missing.
    :raises ZeroDivisionError: When dividing by the zero function.
    :return: The reduced result.
    """
    if op == "derivative":
        return a.derivative()
    if b is None:
        raise ValueError(f"Operation {op} needs two operands.")
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"Unknown operation {op}.")


@dataclass(frozen=True)
class SpherePoint:
    """A point of the Riemann sphere: a finite exact value or infinity."""

    value: sympy.Expr | None

    @classmethod
    def finite(cls, value: Any) -> "SpherePoint":
        """A finite point."""
        if isinstance(value, ExactScalar):
            value = value.to_sympy()
        return cls(_canon(value))

    @classmethod
    def infinity(cls) -> "SpherePoint":
        """The point at infinity."""
        return cls(None)

    @classmethod
    def coerce(cls, value: Any) -> "SpherePoint":
        """Accept points, `"inf"`/`"oo"` strings and finite values."""
        if isinstance(value, SpherePoint):
            return value
        if value is None or (isinstance(value, str) and value in ("inf", "oo", "∞")):
            return cls.infinity()
        if value == sympy.oo:
            return cls.infinity()
        if isinstance(value, str):
            return cls.finite(scalar_from_str(value))
        return cls.finite(value)

    @property
    def is_infinite(self) -> bool:
        """Whether this is the point at infinity."""
        return self.value is None

    def __complex__(self) -> complex:
        """Floating point position.

        :raises ValueError: For the point at infinity.
        """
        if self.value is None:
            raise ValueError("The point at infinity has no finite position.")
        return complex(sympy.N(self.value, 17))

    def to_json(self) -> str:
        """Serialized form (`"inf"` for infinity)."""
        return "inf" if self.value is None else scalar_to_str(self.value)

    def __str__(self) -> str:
        """Readable form."""
        return "∞" if self.value is None else scalar_to_str(self.value)


def chart(f: RationalFunction, p: Any, weight: int = 0) -> RationalFunction:
    """Express a density in the local coordinate centred at `p`.

    For finite `p` this is the translation `z -> z + p`. At infinity the chart
    `w = 1/z` is used and a density of the given weight (0 for functions, 1 for
    1-forms, 2 for quadratic differentials) is multiplied by `w^(-2*weight)`. The
    result is again written in the variable `z`, now the local coordinate.

    :param f: The density.
    :param p: The centre.
    :param weight: Differential weight.
    :return: The local density.
    """
    point = SpherePoint.coerce(p)
    f = RationalFunction.coerce(f)
    if point.is_infinite:
        return RationalFunction(f.expr.subs(Z, 1 / Z) * Z ** (-2 * weight))
    if point.value == 0:
        return f
    return RationalFunction(f.expr.subs(Z, Z + point.value))


def order_at(f: RationalFunction, p: Any) -> int:
    """Order of a function at a point of the sphere.

    :param f: The function.
    :param p: The point (infinity via `w = 1/z`).
    :raises ValueError: When `f` is the zero function.
    :return: Zero order (positive) or pole order (negative).
    """
    f = RationalFunction.coerce(f)
    if f.is_zero:
        raise ValueError("The zero function has no order.")
    local = chart(f, p)
    return _low_order(local.num) - _low_order(local.den)


def differential_order_at(q_density: RationalFunction, weight: int, p: Any) -> int:
    """Order of a 1-form (`weight=1`) or 2-differential (`weight=2`).

    :param q_density: The density.
    :param weight: The weight.
    :param p: The point.
    :raises ValueError: When the weight is unsupported or the density is zero.
    :return: The order.
    """
    if weight not in (1, 2):
        raise ValueError(f"Unsupported weight {weight}.")
    q_density = RationalFunction.coerce(q_density)
    if q_density.is_zero:
        raise ValueError("The zero density has no order.")
    local = chart(q_density, p, weight)
    return _low_order(local.num) - _low_order(local.den)


def _simplify_coeff(x: sympy.Expr) -> sympy.Expr:
    if x.free_symbols:
        return sympy.cancel(x)
    return sympy.expand(sympy.radsimp(x))


def _taylor(num: Sequence[Any], den: Sequence[Any], n: int) -> list[sympy.Expr]:
    """First `n` Taylor coefficients of `num/den` at 0, given `den[0] != 0`."""
    d0 = den[0]
    out: list[sympy.Expr] = []
    for k in range(n):
        acc = num[k] if k < len(num) else sympy.S.Zero
        for i in range(1, min(k, len(den) - 1) + 1):
            acc -= den[i] * out[k - i]
        out.append(_simplify_coeff(acc / d0))
    return out


@dataclass(frozen=True)
class LaurentSeries:
    """A truncated Laurent expansion `sum coeffs[k] t^(min_order + k)`.

    `source` keeps the local density the series was expanded from, so more terms
    can be computed on demand.
    """

    base: SpherePoint
    min_order: int
    coeffs: tuple[sympy.Expr, ...]
    source: RationalFunction | None = None

    @property
    def truncation_order(self) -> int:
        """Highest power whose coefficient is exact."""
        return self.min_order + len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        """Whether the series vanishes identically."""
        return self.source is not None and self.source.is_zero

    def coefficient(self, k: int) -> sympy.Expr:
        """Coefficient of `t^k`, expanding further when needed.

        :param k: The power.
        :raises IndexError: When `k` lies beyond the truncation of a series without
            a source.
        :return: The coefficient.
        """
        if self.is_zero or k < self.min_order:
            return sympy.S.Zero
        if k > self.truncation_order:
            if self.source is None:
                raise IndexError(f"Coefficient {k} beyond truncation.")
            return self.extended(k - self.min_order + 1).coefficient(k)
        return self.coeffs[k - self.min_order]

    def extended(self, n_terms: int) -> "LaurentSeries":
        """Re-expand from the source with more terms."""
        if self.source is None or n_terms <= len(self.coeffs):
            return self
        return _local_series(self.source, self.base, n_terms)

    def scalars(self, upto: int) -> list[Scalar]:
        """Coefficients of `t^0, ..., t^upto` in the scalar domain."""
        return [to_scalar(self.coefficient(k)) for k in range(upto + 1)]

    def subs(self, mapping: Mapping[Any, Any]) -> "LaurentSeries":
        """Substitute parameters in the source and re-expand.

        :raises ValueError: When the series has no source.
        """
        if self.source is None:
            raise ValueError("Cannot substitute into a series without source.")
        return _local_series(self.source.subs(mapping), self.base, len(self.coeffs))

    def as_expr(self) -> sympy.Expr:
        """The truncated series as an expression in the local coordinate."""
        return sum(
            (c * Z ** (self.min_order + k) for k, c in enumerate(self.coeffs)),
            sympy.S.Zero,
        )


def _local_series(
    local: RationalFunction, base: SpherePoint, n_terms: int
) -> LaurentSeries:
    if local.is_zero:
        return LaurentSeries(base, 0, (), local)
    a, b = _low_order(local.num), _low_order(local.den)
    num = _coeffs(local.num)[a:]
    den = _coeffs(local.den)[b:]
    return LaurentSeries(base, a - b, tuple(_taylor(num, den, n_terms)), local)


def laurent_at(
    f: RationalFunction, p: Any, n_terms: int, weight: int = 0
) -> LaurentSeries:
    """Laurent expansion at a point.

    :param f: The density.
    :param p: The point (infinity via `w = 1/z`).
    :param n_terms: Number of terms, starting at the leading one.
    :param weight: Differential weight used for the chart at infinity.
    :raises ValueError: When `f` is zero or `n_terms < 1`.
    :return: The series.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be positive.")
    f = RationalFunction.coerce(f)
    if f.is_zero:
        raise ValueError("The zero function has no Laurent expansion.")
    point = SpherePoint.coerce(p)
    return _local_series(chart(f, point, weight), point, n_terms)


def local_series(
    f: RationalFunction, p: Any, n_terms: int, weight: int = 0
) -> LaurentSeries:
    """Like `laurent_at`, but the zero density gives the zero series."""
    point = SpherePoint.coerce(p)
    f = RationalFunction.coerce(f)
    if f.is_zero:
        return LaurentSeries(point, 0, (), f)
    return _local_series(chart(f, point, weight), point, n_terms)


def schwarzian(g: RationalFunction) -> RationalFunction:
    """Density of `S(g) = (g''/g')' - (g''/g')^2/2`.

    :param g: A non-constant rational function.
    :raises ValueError: When `g` is constant.
    :return: The Schwarzian density.
    """
    g = RationalFunction.coerce(g)
    if g.is_constant:
        raise ValueError("The Schwarzian of a constant is undefined.")
    d1 = g.derivative()
    h = d1.derivative() / d1
    return h.derivative() - h * h / 2


def schwarzian_expr(expr: Any) -> sympy.Expr:
    """Schwarzian of an arbitrary symbolic function of `z`.

    Used for multivalued and transcendental maps such as `a*z**mu` or
    `tan(sqrt(theta)*z)`.

    :param expr: The function.
    :raises ValueError: When the expression does not depend on `z`.
    :return: The simplified Schwarzian density.
    """
    expr = sympy.sympify(expr)
    if Z not in expr.free_symbols:
        raise ValueError("The Schwarzian of a constant is undefined.")
    d1 = sympy.diff(expr, Z)
    h = sympy.simplify(sympy.powsimp(sympy.diff(d1, Z) / d1, force=True))
    return sympy.simplify(sympy.diff(h, Z) - h**2 / 2)


def mobius(a: Sequence[Sequence[Any]], g: RationalFunction) -> RationalFunction:
    """Return `a * g = (a11 g + a12) / (a21 g + a22)`.

    :param a: A 2x2 exact matrix with determinant 1.
    :param g: The function.
    :raises ValueError: When `det a != 1`.
    :return: The transformed function.
    """
    (a11, a12), (a21, a22) = [[_as_sympy(x) for x in row] for row in a]
    if not is_zero(a11 * a22 - a12 * a21 - 1):
        raise ValueError("Moebius matrices must have determinant 1.")
    g = RationalFunction.coerce(g)
    return (g * a11 + a12) / (g * a21 + a22)


def _as_sympy(x: Any) -> sympy.Expr:
    if isinstance(x, ExactScalar):
        return x.to_sympy()
    if isinstance(x, str):
        return scalar_from_str(x)
    return sympy.sympify(x)


def residue_at(f: RationalFunction, p: Any) -> sympy.Expr:
    """Residue of the 1-form `f dz` at a point.

    At infinity this is minus the coefficient of `1/w` of `f(1/w) w^-2`.

    :param f: The 1-form density.
    :param p: The point.
    :raises ValueError: When `f` is zero.
    :return: The exact residue.
    """
    f = RationalFunction.coerce(f)
    if f.is_zero:
        raise ValueError("The zero form has no residue.")
    point = SpherePoint.coerce(p)
    series = laurent_at(f, point, 1, weight=1)
    if series.min_order >= 0:
        return sympy.S.Zero
    series = series.extended(-series.min_order)
    value = series.coefficient(-1)
    return _simplify_coeff(-value if point.is_infinite else value)


@dataclass(frozen=True)
class DivisorEntry:
    """A point with its order, or an irreducible factor whose roots are not split."""

    order: int
    point: SpherePoint | None = None
    factor: sympy.Expr | None = None

    @property
    def degree(self) -> int:
        """Number of points the entry stands for."""
        if self.factor is None:
            return 1
        return _poly(self.factor).degree()

    def to_json(self) -> dict[str, Any]:
        """Serialize the entry."""
        if self.point is not None:
            return {"point": self.point.to_json(), "order": self.order}
        return {"factor": scalar_to_str(self.factor), "order": self.order}


def _factor_entries(poly_expr: sympy.Expr, sign: int) -> list[DivisorEntry]:
    if Z not in poly_expr.free_symbols:
        return []
    opts = _algebraic_options(poly_expr)
    try:
        _, factors = sympy.factor_list(poly_expr, Z, **opts)
    except (BasePolynomialError, NotImplementedError):
        _, factors = sympy.factor_list(poly_expr, Z)
    entries = []
    for base, mult in factors:
        p = _poly(base)
        if p.degree() <= 0:
            continue
        if p.degree() == 1:
            c1, c0 = p.all_coeffs()
            root = SpherePoint.finite(_simplify_coeff(-c0 / c1))
            entries.append(DivisorEntry(sign * mult, point=root))
        else:
            monic = sympy.expand(base / p.LC())
            entries.append(DivisorEntry(sign * mult, factor=monic))
    return entries


def divisor(f: RationalFunction) -> list[DivisorEntry]:
    """Zeros and poles of a nonzero rational function, including infinity.

    Factors that do not split over the coefficient field are reported unsplit.

    :param f: The function.
    :raises ValueError: When `f` is zero.
    :return: The divisor entries.
    """
    f = RationalFunction.coerce(f)
    if f.is_zero:
        raise ValueError("The zero function has no divisor.")
    entries = _factor_entries(f.num, 1) + _factor_entries(f.den, -1)
    dn, dd = f.degrees()
    if dn != dd:
        entries.append(DivisorEntry(dd - dn, point=SpherePoint.infinity()))
    return entries


def branch_order(G: RationalFunction, p: Any) -> int:
    """Local multiplicity of `G` at `p` minus one.

    :param G: A non-constant rational function.
    :param p: The point.
    :raises ValueError: When `G` is constant.
    :return: The branch order.
    """
    G = RationalFunction.coerce(G)
    if G.is_constant:
        raise ValueError("A constant map has no branch order.")
    local = chart(G, p)
    k = order_at(local, 0)
    if k < 0:
        return -k - 1
    return order_at(local - local.value_at(0), 0) - 1


def integrate_exact(f: RationalFunction) -> RationalFunction:
    """Rational antiderivative of a residue-free density.

    :param f: The density.
    :raises ValueError: When the antiderivative is not rational (a residue is
        nonzero).
    :return: An antiderivative with zero constant of integration in sympy's
        normalization.
    """
    f = RationalFunction.coerce(f)
    exact = not f.parameters and not f.expr.has(sympy.I)
    parts = sympy.apart(f.expr, Z) if exact else f.expr
    result = sympy.integrate(parts, Z)
    if result.has(sympy.log, sympy.atan, sympy.RootSum, sympy.Integral):
        raise ValueError(f"{f} has a nonzero residue; its integral is not rational.")
    return RationalFunction(result)


def theta_poly(expr: Any) -> sympy.Poly:
    """Return a sympy polynomial in `theta`."""
    return sympy.Poly(sympy.expand(sympy.sympify(expr)), THETA)
