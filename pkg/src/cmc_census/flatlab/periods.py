import logging
import math
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np
import sympy

from cmc_census.flatlab.weierstrass import WeierstrassData
from cmc_census.symcore.rational import RationalFunction, residue_at
from cmc_census.symcore.scalar import Z

LOGGER = logging.getLogger(__name__)

DEFAULT_NODES = 128
HALF_PI = math.pi / 2


class ConvergenceError(RuntimeError):
    """Newton iteration or quadrature refinement did not converge."""


def _gauss(f: Callable[[np.ndarray], np.ndarray], nodes: int) -> float:
    """Gauss-Legendre quadrature of `f` over `[0, pi/2]`."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    t = HALF_PI * (x + 1) / 2
    return float(HALF_PI / 2 * np.sum(w * f(t)))


# All integrals over [0, 1] below are taken after x = sin^2(t), which removes the
# x^(-1/2) and (1-x)^(-1/2) endpoint singularities.


def b_integrals(nodes: int = DEFAULT_NODES) -> tuple[float, float]:
    """The numerator and denominator integrals defining `B`.

    `int_0^1 x dx / sqrt(x(1-x^2))` and `int_0^1 (1-x^2) dx / sqrt(x(1-x^2))`.
    """

    def num(t: np.ndarray) -> np.ndarray:
        x = np.sin(t) ** 2
        return 2 * x / np.sqrt(1 + x)

    def den(t: np.ndarray) -> np.ndarray:
        x = np.sin(t) ** 2
        return 2 * np.cos(t) ** 2 * np.sqrt(1 + x)

    return _gauss(num, nodes), _gauss(den, nodes)


def B_constant(nodes: int = DEFAULT_NODES) -> float:
    """The constant `B` with `Per(1, sqrt(B)) = 0` for the Chen-Gackstatter data."""
    num, den = b_integrals(nodes)
    return num / den


def cg_periods(
    nu1: float, nu2: float, nodes: int = DEFAULT_NODES
) -> tuple[float, float]:
    """The two period integrals of the Chen-Gackstatter deformation.

    :param nu1: Branch point parameter.
    :param nu2: Scale of the Gauss map.
    :param nodes: Number of Gauss-Legendre nodes.
    :raises ValueError: When `nu1` is not positive.
    :return: `(Per1, Per2)`.
    """
    if nu1 <= 0:
        raise ValueError(f"Expected nu1 > 0, got {nu1}.")
    nu2_sq = nu2**2

    def per1(t: np.ndarray) -> np.ndarray:
        x = np.sin(t) ** 2
        c2 = np.cos(t) ** 2
        return 2 * (x - nu2_sq * c2 * (x + nu1)) / np.sqrt(x + nu1)

    def per2(t: np.ndarray) -> np.ndarray:
        x = np.sin(t) ** 2
        c2 = np.cos(t) ** 2
        return 2 * nu1 * (x - nu2_sq * c2 * (nu1 * x + 1)) / np.sqrt(nu1 * x + 1)

    return _gauss(per1, nodes), _gauss(per2, nodes)


def cg_jacobian_exact(nodes: int = DEFAULT_NODES) -> dict[str, float]:
    """Partial derivatives of the periods at `(1, sqrt(B))` from their integrals.

    :return: `dPer1/dnu1`, `dPer2/dnu1` and the common `dPer/dnu2`.
    """
    b = B_constant(nodes)

    def d1(t: np.ndarray) -> np.ndarray:
        x = np.sin(t) ** 2
        return -(x + b * (1 - x**2)) / (1 + x) ** 1.5

    def d2(t: np.ndarray) -> np.ndarray:
        x = np.sin(t) ** 2
        return (x * (x + 2) - b * (2 + 3 * x) * (1 - x**2)) / (1 + x) ** 1.5

    def dnu2(t: np.ndarray) -> np.ndarray:
        x = np.sin(t) ** 2
        return -4 * math.sqrt(b) * np.cos(t) ** 2 * np.sqrt(1 + x)

    return {
        "dPer1_dnu1": _gauss(d1, nodes),
        "dPer2_dnu1": _gauss(d2, nodes),
        "dPer_dnu2": _gauss(dnu2, nodes),
    }


@dataclass(frozen=True)
class PeriodReport:
    """Outcome of a period computation or a Newton solve."""

    values: dict[str, float]
    jacobian: np.ndarray
    residual: float
    solved_at: tuple[float, ...]
    iterations: int = 0
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def determinant(self) -> float:
        """Determinant of the Jacobian."""
        return float(np.linalg.det(self.jacobian))

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            "values": dict(self.values),
            "jacobian": self.jacobian.tolist(),
            "determinant": self.determinant,
            "residual": self.residual,
            "solved_at": list(self.solved_at),
            "iterations": self.iterations,
            "metadata": dict(self.metadata),
        }


def _fd_jacobian(
    f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, step: float
) -> np.ndarray:
    cols = []
    for k in range(len(x)):
        e = np.zeros_like(x)
        e[k] = step
        cols.append((f(x + e) - f(x - e)) / (2 * step))
    return np.stack(cols, axis=1)


def cg_solve(
    start: Sequence[float] | None = None,
    tol: float = 1e-11,
    max_iter: int = 20,
    step: float = 1e-6,
    nodes: int = DEFAULT_NODES,
) -> PeriodReport:
    """Solve `Per1 = Per2 = 0` by damped Newton iteration.

    The Jacobian is taken by central differences; a step is halved up to 8 times
    while the residual does not decrease.

    :param start: Starting point `(nu1, nu2)`, by default `(1.1, 1.1 sqrt(B))`.
    :param tol: Target for `max |Per|`.
    :param max_iter: Maximal number of Newton steps.
    :param step: Finite-difference step.
    :param nodes: Number of Gauss-Legendre nodes.
    :raises ValueError: When the start is not in the positive quadrant.
    :raises ConvergenceError: When the iteration stalls or leaves the quadrant.
    :return: The report at the solution.
    """
    t0 = time.perf_counter()
    b = B_constant(nodes)
    if start is None:
        start = (1.1, 1.1 * math.sqrt(b))
    x = np.array(start, dtype=float)
    if x.shape != (2,) or np.any(x <= 0):
        raise ValueError(f"Expected a start in the positive quadrant, got {start}.")

    def per(v: np.ndarray) -> np.ndarray:
        return np.array(cg_periods(float(v[0]), float(v[1]), nodes))

    values = per(x)
    iterations = 0
    while np.max(np.abs(values)) >= tol:
        if iterations == max_iter:
            raise ConvergenceError(f"No convergence after {max_iter} Newton steps.")
        iterations += 1
        delta = np.linalg.solve(_fd_jacobian(per, x, step), -values)
        damping = 1.0
        for _ in range(9):
            candidate = x + damping * delta
            if np.all(candidate > 0):
                new_values = per(candidate)
                if np.linalg.norm(new_values) < np.linalg.norm(values):
                    break
            damping /= 2
        else:
            raise ConvergenceError(f"Newton step {iterations} did not reduce residual.")
        x, values = candidate, new_values
        LOGGER.debug("newton step %s: %s, residual %s", iterations, x, values)

    jacobian = _fd_jacobian(per, x, step)
    LOGGER.info(
        "chen-gackstatter periods solved in %s steps, %s seconds",
        iterations,
        time.perf_counter() - t0,
    )
    return PeriodReport(
        values={"Per1": float(values[0]), "Per2": float(values[1])},
        jacobian=jacobian,
        residual=float(np.max(np.abs(values))),
        solved_at=(float(x[0]), float(x[1])),
        iterations=iterations,
        metadata={"B": b, "start": [float(s) for s in start]},
    )


def _exact(value: Any) -> sympy.Expr:
    if isinstance(value, float):
        return sympy.Rational(repr(value))
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    return sympy.nsimplify(value)


def o33_excluded(a: Any) -> bool:
    """Whether `a` is one of the values `-1`, `-1 +- sqrt(2)` refused for O(-3,-3)."""
    a_exact = _exact(a)
    return any(
        sympy.simplify(a_exact - bad) == 0
        for bad in (-1, -1 + sympy.sqrt(2), -1 - sympy.sqrt(2))
    ) or any(abs(float(a_exact) - bad) < 1e-12 for bad in (-1 + 2**0.5, -1 - 2**0.5))


def o33_gauss_map(a: Any, nu: Any) -> RationalFunction:
    """`g = (2z^2 + 2az - a^2 - 1) / (2(z+1)) + nu`."""
    a, nu = _exact(a), _exact(nu)
    return RationalFunction(2 * Z**2 + 2 * a * Z - a**2 - 1, 2 * (Z + 1)) + nu


O33_OMEGA = RationalFunction((Z + 1) ** 2, Z**3)


def o33_data(a: Any, nu: Any) -> WeierstrassData:
    """Weierstrass data of the O(-3,-3) deformation, ends at 0 and infinity."""
    return WeierstrassData.from_rational(
        o33_gauss_map(a, nu), O33_OMEGA, ends=(0,), label=f"o33({a}, {nu})"
    )


def o33_period(a: Any, nu: Any) -> tuple[float, float]:
    """The period of the O(-3,-3) deformation around the end at 0.

    :param a: The deformation parameter.
    :param nu: The period-killing parameter.
    :raises ValueError: When `a` is `-1` or `-1 +- sqrt(2)`.
    :return: The residue computation and the closed form `-2 pi nu (2 + 2a + nu)`.
    """
    if o33_excluded(a):
        raise ValueError(f"The parameter a = {a} is excluded.")
    g = o33_gauss_map(a, nu)
    density = (1 + g**2) * O33_OMEGA * sympy.I
    res = residue_at(density, 0)
    numeric = float(sympy.re(2 * sympy.pi * sympy.I * res))
    a_f, nu_f = float(_exact(a)), float(_exact(nu))
    closed = -2 * math.pi * nu_f * (2 + 2 * a_f + nu_f)
    LOGGER.debug("o33 period at a=%s, nu=%s: %s (closed %s)", a, nu, numeric, closed)
    return numeric, closed


def o33_report(a: Any, nu: Any = 0, step: float = 1e-6) -> PeriodReport:
    """Period with its derivative in `nu`, which must not vanish at `nu = 0`."""
    numeric, closed = o33_period(a, nu)
    derivative = (
        o33_period(a, float(_exact(nu)) + step)[0]
        - o33_period(a, float(_exact(nu)) - step)[0]
    ) / (2 * step)
    return PeriodReport(
        values={"Per": numeric, "closed_form": closed},
        jacobian=np.array([[derivative]]),
        residual=abs(numeric),
        solved_at=(float(_exact(a)), float(_exact(nu))),
        metadata={"dPer_dnu_closed_form": -2 * math.pi * (2 + 2 * float(_exact(a)))},
    )
