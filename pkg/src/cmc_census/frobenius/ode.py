import abc
import logging
from collections.abc import Mapping
from typing import Any

import sympy

from cmc_census.symcore.rational import (
    LaurentSeries,
    RationalFunction,
    SpherePoint,
    chart,
    is_zero,
    local_series,
    order_at,
    schwarzian,
)
from cmc_census.symcore.scalar import Z

LOGGER = logging.getLogger(__name__)


class IrregularSingularityError(ValueError):
    """Raised when an equation is not regular singular at the requested point."""


class RegularSingularODE:
    """The equation `z^2 u'' + z p(z) u' + q(z) u = 0` in a local coordinate.

    `p` and `q` are kept as rational functions of the local coordinate, holomorphic
    at 0, so any number of Taylor coefficients can be produced. The indicial pair
    `(p0, q0)` may be pinned to values that differ from the generating functions;
    this is how a gap is imposed while the higher coefficients stay parametric.
    """

    def __init__(
        self,
        p: Any,
        q: Any,
        base: Any = 0,
        provenance: str = "raw",
        pinned: Mapping[str, Any] | None = None,
    ) -> None:
        """Create an equation.

        :param p: The function `p` (holomorphic at 0).
        :param q: The function `q` (holomorphic at 0).
        :param base: The point of the sphere the local coordinate is centred at.
        :param provenance: One of `E0`, `E1sharp`, `E2sharp` and `raw`.
        :param pinned: Values replacing `p0` and/or `q0`.
        :raises IrregularSingularityError: When `p` or `q` has a pole at 0.
        """
        self._p = RationalFunction.coerce(p)
        self._q = RationalFunction.coerce(q)
        for name, f in (("p", self._p), ("q", self._q)):
            if not f.is_zero and order_at(f, 0) < 0:
                raise IrregularSingularityError(
                    f"{name}(z) = {f} has a pole at the singular point."
                )
        self.base = SpherePoint.coerce(base)
        self.provenance = provenance
        self._pinned = {
            k: sympy.sympify(v) for k, v in (pinned or {}).items() if k in ("p0", "q0")
        }

    @classmethod
    def from_coefficients(
        cls, p: list[Any], q: list[Any], provenance: str = "raw"
    ) -> "RegularSingularODE":
        """Create an equation with polynomial `p` and `q`.

        :param p: Coefficients `p_0, p_1, ...`.
        :param q: Coefficients `q_0, q_1, ...`.
        :param provenance: Provenance tag.
        :return: The equation.
        """
        return cls(
            RationalFunction.from_coeffs(p or [0]),
            RationalFunction.from_coeffs(q or [0]),
            provenance=provenance,
        )

    @property
    def p_function(self) -> RationalFunction:
        """The generating function `p`, ignoring pins."""
        return self._p

    @property
    def q_function(self) -> RationalFunction:
        """The generating function `q`, ignoring pins."""
        return self._q

    @property
    def pinned(self) -> dict[str, sympy.Expr]:
        """Pinned indicial coefficients."""
        return dict(self._pinned)

    @property
    def parameters(self) -> set[sympy.Symbol]:
        """Free parameters of the coefficients."""
        out = self._p.parameters | self._q.parameters
        for v in self._pinned.values():
            out |= v.free_symbols
        return out

    def p_series(self, n_terms: int) -> LaurentSeries:
        """Taylor expansion of `p` (without pins)."""
        return local_series(self._p, 0, n_terms)

    def q_series(self, n_terms: int) -> LaurentSeries:
        """Taylor expansion of `q` (without pins)."""
        return local_series(self._q, 0, n_terms)

    def coefficients(self, n_terms: int) -> tuple[list[sympy.Expr], list[sympy.Expr]]:
        """Return `p_0..p_{n-1}` and `q_0..q_{n-1}` with pins applied.

        :param n_terms: Number of coefficients.
        :return: The two coefficient lists.
        """
        ps = self.p_series(n_terms)
        qs = self.q_series(n_terms)
        p = [ps.coefficient(k) for k in range(n_terms)]
        q = [qs.coefficient(k) for k in range(n_terms)]
        if "p0" in self._pinned:
            p[0] = self._pinned["p0"]
        if "q0" in self._pinned:
            q[0] = self._pinned["q0"]
        return p, q

    @property
    def p0(self) -> sympy.Expr:
        """Constant coefficient of `p`."""
        return self.coefficients(1)[0][0]

    @property
    def q0(self) -> sympy.Expr:
        """Constant coefficient of `q`."""
        return self.coefficients(1)[1][0]

    @property
    def is_regular_point(self) -> bool:
        """Whether 0 is an ordinary point (`p/z` and `q/z^2` holomorphic)."""
        if self._pinned:
            return False
        p_ok = self._p.is_zero or order_at(self._p, 0) >= 1
        q_ok = self._q.is_zero or order_at(self._q, 0) >= 2
        return p_ok and q_ok

    def pin_indicial(self, p0: Any = None, q0: Any = None) -> "RegularSingularODE":
        """Return a copy with `p0` and/or `q0` fixed.

        :param p0: New `p0`, or `None` to keep it.
        :param q0: New `q0`, or `None` to keep it.
        :return: The pinned equation.
        """
        pins = dict(self._pinned)
        if p0 is not None:
            pins["p0"] = sympy.sympify(p0)
        if q0 is not None:
            pins["q0"] = sympy.sympify(q0)
        return RegularSingularODE(self._p, self._q, self.base, self.provenance, pins)

    def subs(self, mapping: Mapping[Any, Any]) -> "RegularSingularODE":
        """Substitute values or expressions for parameters.

        :param mapping: Parameters mapped to values.
        :return: The substituted equation.
        """
        m = {
            (sympy.Symbol(k) if isinstance(k, str) else k): v
            for k, v in mapping.items()
        }
        pins = {k: sympy.cancel(v.subs(m)) for k, v in self._pinned.items()}
        return RegularSingularODE(
            self._p.subs(m), self._q.subs(m), self.base, self.provenance, pins
        )

    def __str__(self) -> str:
        """Readable form."""
        return f"z^2 u'' + z ({self._p}) u' + ({self._q}) u = 0 at {self.base}"

    def __repr__(self) -> str:
        """Representation."""
        return f"RegularSingularODE({self.provenance}, {self})"


class EquationForm(abc.ABC):
    """One of the linear equations attached to a pair `(G, Q)` at an end."""

    name: str = ""

    @abc.abstractmethod
    def _local_coefficients(
        self, G: RationalFunction, Q: RationalFunction
    ) -> tuple[RationalFunction, RationalFunction]:
        """Return `p` and `q` from the local forms of `G` and `Q`.

        :param G: `G` in the local coordinate centred at 0.
        :param Q: The density of `Q` in the same coordinate.
        :return: The functions `p` and `q`.
        """
        pass

    def build(self, G: Any, Q_density: Any, end: Any) -> RegularSingularODE:
        """Build the equation at an end.

        :param G: The hyperbolic Gauss map.
        :param Q_density: The density of the Hopf differential.
        :param end: The end (a finite point or infinity).
        :raises ValueError: When `G` is constant, `Q` vanishes, or the point is not a
            singular point of the equation.
        :raises IrregularSingularityError: When the equation is irregular there.
        :return: The equation in the local coordinate.
        """
        G = RationalFunction.coerce(G)
        Q = RationalFunction.coerce(Q_density)
        if G.is_constant:
            raise ValueError("G must not be constant.")
        if Q.is_zero:
            raise ValueError("Q must not vanish identically.")
        point = SpherePoint.coerce(end)
        G_loc = chart(G, point, 0)
        Q_loc = chart(Q, point, 2)
        if order_at(Q_loc, 0) < -2:
            raise IrregularSingularityError(
                f"ord Q = {order_at(Q_loc, 0)} < -2 at {point}; "
                "Frobenius analysis does not apply."
            )
        p, q = self._local_coefficients(G_loc, Q_loc)
        ode = RegularSingularODE(p, q, point, self.name)
        if ode.is_regular_point:
            raise ValueError(
                f"{point} is not a singular point of the {self.name} form."
            )
        LOGGER.debug("built %s form at %s", self.name, point)
        return ode


class E0Form(EquationForm):
    """`u'' + r u = 0` with `r dz^2 = S(G)/2 + Q`."""

    name = "E0"

    def _local_coefficients(
        self, G: RationalFunction, Q: RationalFunction
    ) -> tuple[RationalFunction, RationalFunction]:
        r = schwarzian(G) / 2 + Q
        if not r.is_zero and order_at(r, 0) < -2:
            raise IrregularSingularityError(f"r = {r} is irregular at the end.")
        return RationalFunction(0), r * RationalFunction(Z**2)


def _log_derivative_p(f: RationalFunction) -> RationalFunction:
    """Return `-z (log f)'`."""
    return -(f.derivative() / f) * RationalFunction(Z)


class E1SharpForm(EquationForm):
    """`X'' - (log w)' X' + Q X = 0` with `w dz = -Q/dG`."""

    name = "E1sharp"

    def _local_coefficients(
        self, G: RationalFunction, Q: RationalFunction
    ) -> tuple[RationalFunction, RationalFunction]:
        omega = -Q / G.derivative()
        return _log_derivative_p(omega), Q * RationalFunction(Z**2)


class E2SharpForm(EquationForm):
    """`Y'' - (log G^2 w)' Y' + Q Y = 0` with `w dz = -Q/dG`.

    `G` must be finite at the end. A pole of `G` is first moved away by the rigid
    motion `G -> 1/G`, which leaves `Q` unchanged and turns `G^2 w` into `-w`.
    """

    name = "E2sharp"

    def _local_coefficients(
        self, G: RationalFunction, Q: RationalFunction
    ) -> tuple[RationalFunction, RationalFunction]:
        if order_at(G, 0) < 0:
            G = RationalFunction(1) / G
        omega = -Q / G.derivative()
        return _log_derivative_p(G * G * omega), Q * RationalFunction(Z**2)


FORMS: dict[str, EquationForm] = {
    f.name: f for f in (E0Form(), E1SharpForm(), E2SharpForm())
}


def from_E0(G: Any, Q_density: Any, end: Any) -> RegularSingularODE:
    """The equation `u'' + r u = 0` at an end, `r dz^2 = S(G)/2 + Q`.

    :param G: The hyperbolic Gauss map.
    :param Q_density: The density of the Hopf differential.
    :param end: The end.
    :return: The local equation.
    """
    return FORMS["E0"].build(G, Q_density, end)


def from_E1sharp(G: Any, Q_density: Any, end: Any) -> RegularSingularODE:
    """The equation satisfied by the second row of the lift at an end.

    :param G: The hyperbolic Gauss map.
    :param Q_density: The density of the Hopf differential.
    :param end: The end.
    :return: The local equation.
    """
    return FORMS["E1sharp"].build(G, Q_density, end)


def from_E2sharp(G: Any, Q_density: Any, end: Any) -> RegularSingularODE:
    """The equation satisfied by the first row of the lift at an end.

    :param G: The hyperbolic Gauss map.
    :param Q_density: The density of the Hopf differential.
    :param end: The end.
    :return: The local equation.
    """
    return FORMS["E2sharp"].build(G, Q_density, end)


def build_form(form: str, G: Any, Q_density: Any, end: Any) -> RegularSingularODE:
    """Build the equation of the named form.

    :param form: `E0`, `E1sharp` or `E2sharp`.
    :param G: The hyperbolic Gauss map.
    :param Q_density: The density of the Hopf differential.
    :param end: The end.
    :raises ValueError: When the form is unknown.
    :return: The local equation.
    """
    if form not in FORMS:
        raise ValueError(f"Unknown equation form {form}.")
    return FORMS[form].build(G, Q_density, end)


def vanishes(x: Any) -> bool:
    """Exact zero test for scalars and sympy expressions."""
    if isinstance(x, sympy.Basic | int):
        return is_zero(x)
    return x == 0
