import logging
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import Any, Union

import sympy
from sympy import QQ
from sympy.ntheory.factor_ import core

LOGGER = logging.getLogger(__name__)

Z = sympy.Symbol("z")
THETA = sympy.Symbol("theta")

# names that may appear in coefficient strings of spec files
PARAMETER_SYMBOLS = {
    "theta": THETA,
    "p": sympy.Symbol("p"),
    "q": sympy.Symbol("q"),
    "s": sympy.Symbol("s"),
    "a": sympy.Symbol("a"),
    "b": sympy.Symbol("b"),
    "mu": sympy.Symbol("mu"),
}


class ExactnessError(ValueError):
    """Raised when a value cannot be represented in the exact scalar domain."""


def _q(x: Any) -> Any:
    """Convert an integer, a sympy rational or a domain element to `QQ`."""
    if isinstance(x, sympy.Basic):
        if not x.is_Rational:
            raise ExactnessError(f"{x} is not rational.")
        return QQ.from_sympy(x)
    return QQ.convert(x)


def _float(x: Any) -> float:
    return float(QQ.to_sympy(x))


def _surd_mul(a1: Any, b1: Any, a2: Any, b2: Any, d: int) -> tuple[Any, Any]:
    return a1 * a2 + b1 * b2 * d, a1 * b2 + a2 * b1


def _surd_sign(a: Any, b: Any, d: int) -> int:
    """Sign of the real number `a + b*sqrt(d)`."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return (b > 0) - (b < 0)
    if (a > 0) == (b > 0):
        return 1 if a > 0 else -1
    # opposite signs: the larger square wins
    lhs, rhs = a * a, b * b * d
    if lhs == rhs:
        return 0
    dominant = a if lhs > rhs else b
    return 1 if dominant > 0 else -1


@dataclass(frozen=True, eq=False)
class ExactScalar:
    """An element `(re + re_surd*sqrt(d)) + i*(im + im_surd*sqrt(d))`.

    The components are exact rationals. At most one square-free discriminant `d` is
    involved; it is dropped whenever both surd components vanish, so equal values
    always have equal components.
    """

    re: Any = field(default_factory=lambda: QQ(0))
    im: Any = field(default_factory=lambda: QQ(0))
    re_surd: Any = field(default_factory=lambda: QQ(0))
    im_surd: Any = field(default_factory=lambda: QQ(0))
    surd: int | None = None

    def __post_init__(self) -> None:
        for name in ("re", "im", "re_surd", "im_surd"):
            object.__setattr__(self, name, _q(getattr(self, name)))
        if self.re_surd == 0 and self.im_surd == 0:
            object.__setattr__(self, "surd", None)
        elif self.surd is None:
            raise ExactnessError("Surd components given without a discriminant.")
        elif self.surd < 2 or core(self.surd) != self.surd:
            raise ExactnessError(f"{self.surd} is not a square-free integer >= 2.")

    @classmethod
    def of(cls, value: Any) -> "ExactScalar":
        """Coerce integers, rationals, sympy numbers and exact scalars.

        :param value: The value.
        :raises ExactnessError: When the value is outside the scalar domain.
        :return: The exact scalar.
        """
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, sympy.Basic):
            return cls.from_sympy(value)
        if isinstance(value, str):
            return cls.from_sympy(scalar_from_str(value))
        return cls(re=value)

    @classmethod
    def from_sympy(cls, expr: Any) -> "ExactScalar":
        """Decompose a symbolic number built from rationals, `I` and one square root.

        :param expr: The symbolic number.
        :raises ExactnessError: When the number contains symbols, nested radicals or
            more than one square-free surd.
        :return: The exact scalar.
        """
        expr = sympy.sympify(expr)
        if expr.free_symbols:
            names = sorted(map(str, expr.free_symbols))
            raise ExactnessError(f"{expr} depends on {names}.")
        expr = sympy.expand(sympy.radsimp(expr))
        surds = set()
        for atom in expr.atoms(sympy.Pow):
            if atom.exp == sympy.S.Half and atom.base.is_Integer and atom.base > 0:
                surds.add(atom)
            else:
                raise ExactnessError(f"{atom} is not a square root of an integer.")
        if len(surds) > 1:
            raise ExactnessError(f"{expr} mixes the surds {sorted(map(str, surds))}.")
        if expr.atoms(sympy.Function) or expr.has(sympy.pi, sympy.E):
            raise ExactnessError(f"{expr} is transcendental.")

        s, j = sympy.Dummy("s"), sympy.Dummy("j")
        replacements: dict[Any, Any] = {sympy.I: j}
        d = None
        if surds:
            (root,) = surds
            d = int(root.base)
            replacements[root] = s
        try:
            poly = sympy.Poly(expr.xreplace(replacements), s, j)
        except sympy.PolynomialError as e:
            raise ExactnessError(f"{expr} is not in the scalar domain.") from e
        parts = {(0, 0): 0, (1, 0): 0, (0, 1): 0, (1, 1): 0}
        for monom, coeff in poly.terms():
            if monom not in parts or not coeff.is_Rational:
                raise ExactnessError(f"{expr} is not in the scalar domain.")
            parts[monom] = coeff
        return cls(
            re=parts[(0, 0)],
            re_surd=parts[(1, 0)],
            im=parts[(0, 1)],
            im_surd=parts[(1, 1)],
            surd=d,
        )

    def to_sympy(self) -> sympy.Expr:
        """Return the value as a sympy expression.

        :return: The expression.
        """
        root = sympy.sqrt(self.surd) if self.surd is not None else sympy.S.Zero
        real = QQ.to_sympy(self.re) + QQ.to_sympy(self.re_surd) * root
        imag = QQ.to_sympy(self.im) + QQ.to_sympy(self.im_surd) * root
        return sympy.expand(real + sympy.I * imag)

    def __complex__(self) -> complex:
        """Floating point value."""
        root = float(sympy.sqrt(self.surd)) if self.surd is not None else 0.0
        return complex(
            _float(self.re) + _float(self.re_surd) * root,
            _float(self.im) + _float(self.im_surd) * root,
        )

    def _common_surd(self, other: "ExactScalar") -> int:
        if self.surd is not None and other.surd is not None and self.surd != other.surd:
            raise ExactnessError(
                f"Cannot combine sqrt({self.surd}) and sqrt({other.surd})."
            )
        return self.surd or other.surd or 0

    def __add__(self, other: Any) -> "ExactScalar":
        if isinstance(other, ParamScalar):
            return NotImplemented
        try:
            other = ExactScalar.of(other)
        except (ExactnessError, TypeError, sympy.SympifyError):
            return NotImplemented
        d = self._common_surd(other)
        return ExactScalar(
            re=self.re + other.re,
            im=self.im + other.im,
            re_surd=self.re_surd + other.re_surd,
            im_surd=self.im_surd + other.im_surd,
            surd=d or None,
        )

    __radd__ = __add__

    def __neg__(self) -> "ExactScalar":
        return ExactScalar(-self.re, -self.im, -self.re_surd, -self.im_surd, self.surd)

    def __sub__(self, other: Any) -> "ExactScalar":
        if isinstance(other, ParamScalar):
            return NotImplemented
        return self + (-ExactScalar.of(other))

    def __rsub__(self, other: Any) -> "ExactScalar":
        return ExactScalar.of(other) + (-self)

    def __mul__(self, other: Any) -> "ExactScalar":
        if isinstance(other, ParamScalar):
            return NotImplemented
        try:
            other = ExactScalar.of(other)
        except (ExactnessError, TypeError, sympy.SympifyError):
            return NotImplemented
        d = self._common_surd(other)
        # (A1 + i B1)(A2 + i B2) with A, B in Q(sqrt(d))
        a1, b1 = self.re, self.re_surd
        c1, e1 = self.im, self.im_surd
        a2, b2 = other.re, other.re_surd
        c2, e2 = other.im, other.im_surd
        rr = _surd_mul(a1, b1, a2, b2, d)
        ii = _surd_mul(c1, e1, c2, e2, d)
        ri = _surd_mul(a1, b1, c2, e2, d)
        ir = _surd_mul(c1, e1, a2, b2, d)
        return ExactScalar(
            re=rr[0] - ii[0],
            re_surd=rr[1] - ii[1],
            im=ri[0] + ir[0],
            im_surd=ri[1] + ir[1],
            surd=d or None,
        )

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        """Multiplicative inverse.

        :raises ZeroDivisionError: When the value is zero.
        :return: The inverse.
        """
        if self.is_zero:
            raise ZeroDivisionError("ExactScalar division by zero.")
        d = self.surd or 0
        # |x|^2 = A^2 + B^2 lies in the real field Q(sqrt(d))
        n = _surd_mul(self.re, self.re_surd, self.re, self.re_surd, d)
        m = _surd_mul(self.im, self.im_surd, self.im, self.im_surd, d)
        na, nb = n[0] + m[0], n[1] + m[1]
        norm = na * na - nb * nb * d
        inv_a, inv_b = na / norm, -nb / norm
        re = _surd_mul(self.re, self.re_surd, inv_a, inv_b, d)
        im = _surd_mul(self.im, self.im_surd, inv_a, inv_b, d)
        return ExactScalar(re[0], -im[0], re[1], -im[1], self.surd)

    def __truediv__(self, other: Any) -> "ExactScalar":
        if isinstance(other, ParamScalar):
            return NotImplemented
        return self * ExactScalar.of(other).inverse()

    def __rtruediv__(self, other: Any) -> "ExactScalar":
        return ExactScalar.of(other) * self.inverse()

    def __pow__(self, exponent: int) -> "ExactScalar":
        if not isinstance(exponent, int):
            return NotImplemented
        base = self if exponent >= 0 else self.inverse()
        result = ExactScalar(1)
        for _ in range(abs(exponent)):
            result = result * base
        return result

    def conjugate(self) -> "ExactScalar":
        """Complex conjugate."""
        return ExactScalar(self.re, -self.im, self.re_surd, -self.im_surd, self.surd)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, ParamScalar):
            return other == self
        try:
            other = ExactScalar.of(other)
        except (ExactnessError, TypeError, sympy.SympifyError):
            return False
        return self._key() == other._key()

    def __hash__(self) -> int:
        if self.is_rational:
            return hash(QQ.to_sympy(self.re))
        return hash(self._key())

    def _key(self) -> tuple:
        return (self.re, self.im, self.re_surd, self.im_surd, self.surd)

    @property
    def is_zero(self) -> bool:
        """Whether the value is exactly zero."""
        return self.re == 0 and self.im == 0 and self.surd is None

    @property
    def is_real(self) -> bool:
        """Whether the imaginary part vanishes."""
        return self.im == 0 and self.im_surd == 0

    @property
    def is_rational(self) -> bool:
        """Whether the value is a rational number."""
        return self.is_real and self.surd is None

    @property
    def is_integer(self) -> bool:
        """Whether the value is a rational integer."""
        return self.is_rational and self.re.denominator == 1

    def sign(self) -> int:
        """Sign of a real value, decided exactly.

        :raises ValueError: When the value is not real.
        :return: -1, 0 or 1.
        """
        if not self.is_real:
            raise ValueError(f"{self} is not real.")
        return _surd_sign(self.re, self.re_surd, self.surd or 0)

    def __str__(self) -> str:
        """Serialized form, e.g. `1/2 + sqrt(2)/3 + i/4`."""
        return scalar_to_str(self.to_sympy())

    def __repr__(self) -> str:
        """Representation."""
        return f"ExactScalar({self})"


class ParamScalar:
    """A polynomial in the formal parameter `theta` with `ExactScalar` coefficients.

    Coefficients are stored densely by ascending degree with trailing zeros removed.
    Division is only possible by nonzero constants.
    """

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Iterable[Any] = ()) -> None:
        """Create a parametric scalar.

        :param coeffs: Coefficients of `theta^0, theta^1, ...`.
        """
        c = [ExactScalar.of(x) for x in coeffs]
        while c and c[-1].is_zero:
            c.pop()
        self._coeffs: tuple[ExactScalar, ...] = tuple(c)

    @classmethod
    def theta(cls) -> "ParamScalar":
        """The parameter itself."""
        return cls((0, 1))

    @classmethod
    def from_sympy(cls, expr: Any) -> "ParamScalar":
        """Read a polynomial in `theta`.

        :param expr: A sympy expression polynomial in `theta`.
        :raises ValueError: When the expression is not polynomial in `theta` or has
            other free symbols.
        :return: The parametric scalar.
        """
        expr = sympy.sympify(expr)
        extra = expr.free_symbols - {THETA}
        if extra:
            raise ValueError(f"Unbound parameters {sorted(map(str, extra))} in {expr}.")
        expr = sympy.cancel(expr)
        if not sympy.denom(expr).is_number:
            raise ValueError(f"{expr} divides by a theta-dependent quantity.")
        poly = sympy.Poly(sympy.expand(expr), THETA)
        return cls(ExactScalar.from_sympy(c) for c in reversed(poly.all_coeffs()))

    @property
    def coeffs(self) -> tuple[ExactScalar, ...]:
        """Coefficients by ascending degree."""
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree in `theta`; -1 for the zero polynomial."""
        return len(self._coeffs) - 1

    @property
    def leading(self) -> ExactScalar:
        """Leading coefficient (zero for the zero polynomial)."""
        return self._coeffs[-1] if self._coeffs else ExactScalar(0)

    @property
    def is_zero(self) -> bool:
        """Whether this is the zero polynomial."""
        return not self._coeffs

    @property
    def is_constant(self) -> bool:
        """Whether the value does not depend on `theta`."""
        return len(self._coeffs) <= 1

    def coefficient(self, k: int) -> ExactScalar:
        """Coefficient of `theta^k`."""
        return self._coeffs[k] if 0 <= k < len(self._coeffs) else ExactScalar(0)

    def constant(self) -> ExactScalar:
        """The value of a constant polynomial.

        :raises ValueError: When the value depends on `theta`.
        :return: The constant.
        """
        if not self.is_constant:
            raise ValueError(f"{self} depends on theta.")
        return self.coefficient(0)

    @staticmethod
    def _lift(value: Any) -> "ParamScalar":
        if isinstance(value, ParamScalar):
            return value
        return ParamScalar((ExactScalar.of(value),))

    def __add__(self, other: Any) -> "ParamScalar":
        o = self._lift(other)
        n = max(len(self._coeffs), len(o._coeffs))
        return ParamScalar(self.coefficient(k) + o.coefficient(k) for k in range(n))

    __radd__ = __add__

    def __neg__(self) -> "ParamScalar":
        return ParamScalar(-c for c in self._coeffs)

    def __sub__(self, other: Any) -> "ParamScalar":
        return self + (-self._lift(other))

    def __rsub__(self, other: Any) -> "ParamScalar":
        return self._lift(other) + (-self)

    def __mul__(self, other: Any) -> "ParamScalar":
        o = self._lift(other)
        if self.is_zero or o.is_zero:
            return ParamScalar()
        out = [ExactScalar(0)] * (len(self._coeffs) + len(o._coeffs) - 1)
        for i, a in enumerate(self._coeffs):
            if a.is_zero:
                continue
            for j, b in enumerate(o._coeffs):
                out[i + j] = out[i + j] + a * b
        return ParamScalar(out)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "ParamScalar":
        divisor = self._lift(other)
        if not divisor.is_constant:
            raise ValueError(f"Division by the theta-dependent quantity {divisor}.")
        inv = divisor.constant().inverse()
        return ParamScalar(c * inv for c in self._coeffs)

    def __pow__(self, exponent: int) -> "ParamScalar":
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = ParamScalar((1,))
        for _ in range(exponent):
            result = result * self
        return result

    def __call__(self, value: Any) -> ExactScalar:
        """Evaluate at an exact value of `theta` (Horner scheme)."""
        x = ExactScalar.of(value)
        result = ExactScalar(0)
        for c in reversed(self._coeffs):
            result = result * x + c
        return result

    def __eq__(self, other: object) -> bool:
        try:
            o = self._lift(other)
        except (ExactnessError, TypeError, sympy.SympifyError):
            return False
        return self._coeffs == o._coeffs

    def __hash__(self) -> int:
        if self.is_constant:
            return hash(self.coefficient(0))
        return hash(self._coeffs)

    def to_sympy(self) -> sympy.Expr:
        """Return the polynomial as a sympy expression in `theta`."""
        return sympy.expand(
            sum(
                (c.to_sympy() * THETA**k for k, c in enumerate(self._coeffs)),
                sympy.S.Zero,
            )
        )

    def to_poly(self) -> sympy.Poly:
        """Return the polynomial as a `sympy.Poly` in `theta`."""
        return sympy.Poly(self.to_sympy(), THETA)

    def __str__(self) -> str:
        """Serialized form."""
        return scalar_to_str(self.to_sympy())

    def __repr__(self) -> str:
        """Representation."""
        return f"ParamScalar({self})"


Scalar = Union[ExactScalar, ParamScalar]


def to_scalar(expr: Any) -> Scalar:
    """Convert an exact symbolic coefficient into the scalar domain.

    :param expr: The coefficient.
    :raises ValueError: When parameters other than `theta` remain unbound.
    :return: An `ExactScalar`, or a `ParamScalar` when the value depends on `theta`.
    """
    if isinstance(expr, ExactScalar | ParamScalar):
        return expr
    expr = sympy.sympify(expr)
    if not expr.free_symbols:
        return ExactScalar.from_sympy(expr)
    return ParamScalar.from_sympy(expr)


def scalar_to_str(value: Any) -> str:
    """Serialize an exact value; the imaginary unit is written `i`.

    :param value: A scalar or sympy expression.
    :return: The string.
    """
    if isinstance(value, ExactScalar | ParamScalar):
        value = value.to_sympy()
    return sympy.sstr(sympy.sympify(value)).replace("I", "i")


def scalar_from_str(text: str) -> sympy.Expr:
    """Parse a serialized exact value.

    :param text: The string, e.g. `"3/4"`, `"1/2 + sqrt(3)/2*i"` or `"-2*theta"`.
    :raises ValueError: When the string cannot be parsed.
    :return: The sympy expression.
    """
    try:
        expr = sympy.parse_expr(
            str(text), local_dict={"i": sympy.I, **PARAMETER_SYMBOLS}, evaluate=True
        )
    except (SyntaxError, TypeError, sympy.SympifyError) as e:
        raise ValueError(f"Cannot parse scalar {text!r}.") from e
    return sympy.sympify(expr)


def exact_sqrt(expr: Any) -> sympy.Expr:
    """Square root that stays exact when the radicand is a perfect square.

    Numbers are handled by sympy's radical simplification. Symbolic radicands are
    factored; when every factor occurs with even multiplicity the root is assembled
    from halved multiplicities, otherwise an unevaluated square root is returned.

    :param expr: The radicand.
    :return: A square root of the radicand.
    """
    expr = sympy.cancel(sympy.sympify(expr))
    if not expr.free_symbols:
        return sympy.expand(sympy.radsimp(sympy.sqrt(expr)))
    num, den = sympy.fraction(expr)
    root = sympy.S.One
    for part, sign in ((num, 1), (den, -1)):
        coeff, factors = sympy.factor_list(part)
        if any(mult % 2 for _, mult in factors):
            return sympy.sqrt(expr)
        value = sympy.sqrt(coeff) * sympy.Mul(*(f ** (m // 2) for f, m in factors))
        root *= value**sign
    return root
