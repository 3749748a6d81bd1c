import logging
from typing import Any

import mpmath
import numpy as np

LOGGER = logging.getLogger(__name__)


class EllipticLattice:
    """The lattice `Z v1 + Z v2` with its Weierstrass functions.

    `sigma`, `zeta`, `wp` and `wp_prime` are evaluated through the Jacobi theta
    function `theta_1` with nome `exp(i pi v2/v1)`, so double periodicity holds to
    working precision everywhere.
    """

    def __init__(self, v1: Any, v2: Any, dps: int = 30) -> None:
        """Create a lattice.

        :param v1: First period.
        :param v2: Second period.
        :param dps: Decimal digits used by mpmath.
        :raises ValueError: When the periods are not R-linearly independent.
        """
        v1, v2 = complex(v1), complex(v2)
        if v1 == 0 or abs((v2 / v1).imag) < 1e-12:
            raise ValueError(f"Periods {v1} and {v2} do not span a lattice.")
        self.v1, self.v2 = v1, v2
        self.dps = dps
        # the lattice is unchanged by v2 -> -v2; the nome needs Im(tau) > 0
        oriented = v2 if (v2 / v1).imag > 0 else -v2
        with mpmath.workdps(dps):
            self._omega1 = mpmath.mpc(v1) / 2
            tau = mpmath.mpc(oriented) / mpmath.mpc(v1)
            self._q = mpmath.exp(1j * mpmath.pi * tau)
            d1 = mpmath.jtheta(1, 0, self._q, 1)
            d3 = mpmath.jtheta(1, 0, self._q, 3)
            self._theta1_prime = d1
            self._eta1 = -(mpmath.pi**2) * d3 / (12 * self._omega1 * d1)
        LOGGER.debug("lattice (%s, %s), nome %s", v1, v2, complex(self._q))

    @property
    def half_periods(self) -> tuple[complex, complex, complex]:
        """`v1/2`, `v2/2` and `(v1+v2)/2`."""
        return self.v1 / 2, self.v2 / 2, (self.v1 + self.v2) / 2

    def _arg(self, z: Any) -> Any:
        return mpmath.pi * mpmath.mpc(complex(z)) / (2 * self._omega1)

    def _theta(self, z: Any, k: int) -> Any:
        return mpmath.jtheta(1, self._arg(z), self._q, k)

    def is_lattice_point(self, z: Any, tol: float = 1e-12) -> bool:
        """Whether `z` lies (numerically) on the lattice."""
        basis = np.array([[self.v1.real, self.v2.real], [self.v1.imag, self.v2.imag]])
        z = complex(z)
        coords = np.linalg.solve(basis, np.array([z.real, z.imag]))
        nearest = np.round(coords)
        point = nearest[0] * self.v1 + nearest[1] * self.v2
        return abs(z - point) < tol * max(abs(self.v1), abs(self.v2))

    def sigma(self, z: Any) -> complex:
        """Weierstrass sigma function (odd, entire)."""
        with mpmath.workdps(self.dps):
            z_mp = mpmath.mpc(complex(z))
            value = (
                (2 * self._omega1 / mpmath.pi)
                * mpmath.exp(self._eta1 * z_mp**2 / (2 * self._omega1))
                * self._theta(z, 0)
                / self._theta1_prime
            )
            return complex(value)

    def _require_regular(self, z: Any) -> None:
        if self.is_lattice_point(z):
            raise ValueError(f"{z} is a lattice point.")

    def zeta(self, z: Any) -> complex:
        """Weierstrass zeta function.

        :raises ValueError: At lattice points.
        """
        self._require_regular(z)
        with mpmath.workdps(self.dps):
            scale = mpmath.pi / (2 * self._omega1)
            value = self._eta1 * mpmath.mpc(complex(z)) / self._omega1 + scale * (
                self._theta(z, 1) / self._theta(z, 0)
            )
            return complex(value)

    def wp(self, z: Any) -> complex:
        """Weierstrass `wp` function.

        :raises ValueError: At lattice points.
        """
        self._require_regular(z)
        with mpmath.workdps(self.dps):
            t0, t1, t2 = (self._theta(z, k) for k in range(3))
            scale = mpmath.pi / (2 * self._omega1)
            value = -self._eta1 / self._omega1 - scale**2 * (t2 / t0 - (t1 / t0) ** 2)
            return complex(value)

    def wp_prime(self, z: Any) -> complex:
        """Derivative of `wp`.

        :raises ValueError: At lattice points.
        """
        self._require_regular(z)
        with mpmath.workdps(self.dps):
            t0, t1, t2, t3 = (self._theta(z, k) for k in range(4))
            scale = mpmath.pi / (2 * self._omega1)
            a, b, c = t1 / t0, t2 / t0, t3 / t0
            value = -(scale**3) * (c - 3 * b * a + 2 * a**3)
            return complex(value)

    def to_json(self) -> dict[str, Any]:
        """JSON form."""
        return {
            "v1": [self.v1.real, self.v1.imag],
            "v2": [self.v2.real, self.v2.imag],
            "dps": self.dps,
        }


def wp(z: Any, lattice: EllipticLattice) -> complex:
    """`wp(z)` for the given lattice."""
    return lattice.wp(z)


def wp_prime(z: Any, lattice: EllipticLattice) -> complex:
    """`wp'(z)` for the given lattice."""
    return lattice.wp_prime(z)


def zeta(z: Any, lattice: EllipticLattice) -> complex:
    """`zeta(z)` for the given lattice."""
    return lattice.zeta(z)


def sigma(z: Any, lattice: EllipticLattice) -> complex:
    """`sigma(z)` for the given lattice."""
    return lattice.sigma(z)


def i11_density(z: Any, lattice: EllipticLattice, theta: Any) -> complex:
    """Density of the genus-one Hopf differential with two simple ends.

    `theta sigma(z - v1/2) sigma(z - v2/2) / (sigma(z) sigma(z - (v1+v2)/2))`, an
    elliptic function with simple zeros at `v1/2`, `v2/2` and simple poles at `0`
    and `(v1+v2)/2`.

    :param z: The point.
    :param lattice: The lattice.
    :param theta: The scale factor.
    :raises ZeroDivisionError: At the poles.
    :return: The value.
    """
    h1, h2, h3 = lattice.half_periods
    num = lattice.sigma(complex(z) - h1) * lattice.sigma(complex(z) - h2)
    den = lattice.sigma(z) * lattice.sigma(complex(z) - h3)
    if den == 0:
        raise ZeroDivisionError(f"{z} is a pole of the density.")
    return complex(theta) * num / den
