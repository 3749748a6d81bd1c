import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
import sympy
from scipy.integrate import quad_vec

from cmc_census.symcore.rational import RationalFunction
from cmc_census.symcore.scalar import Z

LOGGER = logging.getLogger(__name__)

ComplexMap = Callable[[np.ndarray], np.ndarray]


def _poles(f: RationalFunction) -> tuple[complex, ...]:
    coeffs = [complex(sympy.N(c)) for c in sympy.Poly(f.den, Z).all_coeffs()]
    if len(coeffs) < 2:
        return ()
    return tuple(complex(r) for r in np.roots(coeffs))


def _segment_distance(point: complex, a: complex, b: complex) -> float:
    d = b - a
    if d == 0:
        return abs(point - a)
    t = ((point - a) * d.conjugate()).real / abs(d) ** 2
    t = min(max(t, 0.0), 1.0)
    return abs(point - (a + t * d))


@dataclass(frozen=True)
class WeierstrassData:
    """Weierstrass data `(g, omega)` of a minimal surface in R^3.

    `g` and `omega` are vectorised callables on complex arrays; `omega` is the
    density of the 1-form with respect to `dz`. `singular_points` are avoided by
    `weier_integrate`.
    """

    g: ComplexMap
    omega: ComplexMap
    singular_points: tuple[complex, ...] = ()
    ends: tuple[complex, ...] = ()
    label: str = ""

    @classmethod
    def from_rational(
        cls, g: Any, omega: Any, ends: Sequence[complex] = (), label: str = ""
    ) -> "WeierstrassData":
        """Create data from rational `g` and `omega`.

        :param g: The Gauss map.
        :param omega: The density of the 1-form.
        :param ends: Marked ends.
        :param label: A name.
        :return: The data.
        """
        g_rf, omega_rf = RationalFunction.coerce(g), RationalFunction.coerce(omega)
        if g_rf.parameters or omega_rf.parameters:
            raise ValueError("Weierstrass data must not contain free parameters.")
        singular = _poles(g_rf) + _poles(omega_rf) + tuple(complex(e) for e in ends)
        return cls(
            g=g_rf.lambdify(),
            omega=omega_rf.lambdify(),
            singular_points=singular,
            ends=tuple(complex(e) for e in ends),
            label=label,
        )

    @classmethod
    def enneper(cls) -> "WeierstrassData":
        """Enneper's surface, `g = z`, `omega = dz`."""
        return cls.from_rational(Z, 1, label="enneper")

    @classmethod
    def chen_gackstatter(cls, nu1: float, nu2: float) -> "WeierstrassData":
        """Chen-Gackstatter data on the half-sheet of `w^2 = z(z-1)(z+nu1)`.

        `g = nu2 w / z` and `omega = z dz / w`, where `w = w1 w2 w3` is the product
        of the principal square roots of `z`, `z - 1`, `z + nu1`. On the closed
        upper half plane each factor has argument in `[0, pi)`.

        :param nu1: Branch point parameter, positive.
        :param nu2: Scale of the Gauss map, positive.
        :raises ValueError: When a parameter is not positive.
        :return: The data.
        """
        if nu1 <= 0 or nu2 <= 0:
            raise ValueError(f"Expected nu1, nu2 > 0, got {nu1}, {nu2}.")

        def w(z: np.ndarray) -> np.ndarray:
            z = np.asarray(z, dtype=complex)
            return np.sqrt(z) * np.sqrt(z - 1) * np.sqrt(z + nu1)

        return cls(
            g=lambda z: nu2 * w(z) / z,
            omega=lambda z: z / w(z),
            singular_points=(0j, 1 + 0j, complex(-nu1)),
            ends=(),
            label=f"chen-gackstatter({nu1}, {nu2})",
        )

    def integrand(self, z: Any) -> np.ndarray:
        """The three components `(1 - g^2, i(1 + g^2), 2g) omega`."""
        z = np.asarray(z, dtype=complex)
        g, omega = self.g(z), self.omega(z)
        return np.stack([(1 - g**2) * omega, 1j * (1 + g**2) * omega, 2 * g * omega])

    def metric_factor(self, z: Any) -> np.ndarray:
        """Conformal factor `(1 + |g|^2) |omega| / 2` of the induced metric."""
        z = np.asarray(z, dtype=complex)
        g, omega = self.g(z), self.omega(z)
        return (1 + np.abs(g) ** 2) * np.abs(omega) / 2

    def is_nondegenerate(self, samples: Sequence[complex]) -> bool:
        """Whether the induced metric is finite and positive at the samples."""
        factor = self.metric_factor(np.asarray(samples, dtype=complex))
        return bool(np.all(np.isfinite(factor)) and np.all(factor > 0))


def weier_integrate(
    data: WeierstrassData,
    path: Sequence[complex],
    tol: float = 1e-10,
    clearance: float = 1e-8,
) -> np.ndarray:
    """Integrate the Weierstrass representation along a polyline.

    :param data: The Weierstrass data.
    :param path: Vertices of the polyline, at least two.
    :param tol: Absolute and relative quadrature tolerance.
    :param clearance: Minimal distance to singular points.
    :raises ValueError: When the path is too short or passes a singular point.
    :return: `Re` of the three component integrals from the first to the last
        vertex.
    """
    vertices = [complex(v) for v in path]
    if len(vertices) < 2:
        raise ValueError("A path needs at least two vertices.")
    total = np.zeros(3)
    for a, b in zip(vertices[:-1], vertices[1:]):
        for point in data.singular_points:
            if _segment_distance(point, a, b) < clearance:
                raise ValueError(f"Singularity {point} on path segment {a} -> {b}.")

        def f(t: float, a: complex = a, b: complex = b) -> np.ndarray:
            return np.real(data.integrand(a + t * (b - a)) * (b - a))

        value, err = quad_vec(f, 0.0, 1.0, epsabs=tol, epsrel=tol)
        if not np.all(np.isfinite(value)):
            raise ValueError(f"Non-finite integrand on segment {a} -> {b}.")
        LOGGER.debug("segment %s -> %s, error estimate %s", a, b, err)
        total += value
    return total
