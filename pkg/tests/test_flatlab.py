import math
import unittest

import numpy as np
import sympy

from cmc_census.flatlab import (
    B_constant,
    EllipticLattice,
    WeierstrassData,
    cg_periods,
    cg_solve,
    o33_excluded,
    o33_period,
    o33_report,
    weier_integrate,
)
from cmc_census.symcore import Z


class TestElliptic(unittest.TestCase):
    def setUp(self):
        self.lattice = EllipticLattice(1, 1j)
        self.z = 0.23 + 0.17j

    def test_periodicity(self):
        for v in (self.lattice.v1, self.lattice.v2):
            self.assertAlmostEqual(self.lattice.wp(self.z + v), self.lattice.wp(self.z))

    def test_zeta_quasi_periods(self):
        lattice, w = self.lattice, 0.31 - 0.12j
        d1, d2 = (lattice.zeta(self.z + v) - lattice.zeta(self.z) for v in (1, 1j))
        self.assertAlmostEqual(lattice.zeta(w + 1) - lattice.zeta(w), d1)
        # Legendre relation
        self.assertAlmostEqual(d1 * 1j - d2 * 1, 2j * math.pi)

    def test_parity(self):
        self.assertAlmostEqual(self.lattice.wp(-self.z), self.lattice.wp(self.z))
        self.assertAlmostEqual(self.lattice.sigma(-self.z), -self.lattice.sigma(self.z))

    def test_derivative(self):
        h = 1e-5
        fd = (self.lattice.wp(self.z + h) - self.lattice.wp(self.z - h)) / (2 * h)
        self.assertAlmostEqual(fd, self.lattice.wp_prime(self.z), places=4)

    def test_laurent_leading_term(self):
        z = 1e-3
        self.assertAlmostEqual(self.lattice.wp(z) * z**2, 1, places=5)
        self.assertAlmostEqual(self.lattice.sigma(z) / z, 1, places=5)

    def test_lattice_points(self):
        self.assertTrue(self.lattice.is_lattice_point(2 - 1j))
        self.assertFalse(self.lattice.is_lattice_point(0.5))
        with self.assertRaises(ValueError):
            self.lattice.wp(1 + 1j)
        with self.assertRaises(ValueError):
            EllipticLattice(1, 2)


class TestWeierstrass(unittest.TestCase):
    def test_enneper(self):
        data = WeierstrassData.enneper()
        x = weier_integrate(data, [0, 1])
        # Re int_0^1 (1 - z^2, i(1 + z^2), 2z) dz
        np.testing.assert_allclose(x, [2 / 3, 0, 1], atol=1e-9)

    def test_path_through_singularity(self):
        data = WeierstrassData.from_rational(sympy.Integer(1), 1 / Z)
        with self.assertRaises(ValueError):
            weier_integrate(data, [-1, 1])
        with self.assertRaises(ValueError):
            weier_integrate(data, [1])


class TestPeriods(unittest.TestCase):
    def test_o33_closed_form(self):
        for a in (-0.5, 0, sympy.Rational(1, 3), 1, 2):
            for nu in (-1, -0.25, 0, 0.5, 2):
                numeric, closed = o33_period(a, nu)
                self.assertAlmostEqual(numeric, closed, delta=1e-8)

    def test_o33_derivative(self):
        report = o33_report(0)
        self.assertAlmostEqual(report.values["Per"], 0, places=12)
        self.assertAlmostEqual(
            report.jacobian[0, 0], report.metadata["dPer_dnu_closed_form"], places=5
        )
        self.assertAlmostEqual(report.metadata["dPer_dnu_closed_form"], -4 * math.pi)

    def test_o33_excluded(self):
        self.assertTrue(o33_excluded(-1))
        self.assertTrue(o33_excluded(-1 + sympy.sqrt(2)))
        self.assertFalse(o33_excluded(0))
        with self.assertRaises(ValueError):
            o33_period(-1, 0)

    def test_cg_periods_vanish(self):
        b = B_constant()
        per1, per2 = cg_periods(1.0, math.sqrt(b))
        self.assertLess(abs(per1), 1e-8)
        self.assertLess(abs(per2), 1e-8)
        with self.assertRaises(ValueError):
            cg_periods(0.0, 1.0)

    def test_cg_solve(self):
        b = B_constant()
        report = cg_solve()
        self.assertLess(report.residual, 1e-6)
        self.assertAlmostEqual(report.solved_at[0], 1, places=6)
        self.assertAlmostEqual(report.solved_at[1], math.sqrt(b), places=6)
        self.assertGreater(abs(report.determinant), 1e-3)
        self.assertAlmostEqual(
            abs(report.jacobian[0, 1]), abs(report.jacobian[1, 1]), delta=1e-6
        )

    def test_cg_solve_start(self):
        with self.assertRaises(ValueError):
            cg_solve(start=(-1.0, 1.0))


if __name__ == "__main__":
    unittest.main()
