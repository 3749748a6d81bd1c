import unittest

import numpy as np
import sympy

from cmc_census.symcore import (
    THETA,
    Z,
    ExactnessError,
    ExactScalar,
    ParamScalar,
    RationalFunction,
    SpherePoint,
    branch_order,
    differential_order_at,
    divisor,
    exact_sqrt,
    integrate_exact,
    laurent_at,
    mobius,
    order_at,
    rational_arithmetic,
    residue_at,
    scalar_from_str,
    scalar_to_str,
    schwarzian,
    schwarzian_expr,
    to_scalar,
)


class TestRationalFunction(unittest.TestCase):
    def test_cancellation(self):
        f = RationalFunction(Z**2 - 1, Z - 1)
        self.assertEqual(f, RationalFunction(Z + 1))
        self.assertEqual(f.degrees(), (1, 0))
        self.assertEqual(f.den, 1)

    def test_monic_denominator(self):
        f = RationalFunction(1, 2 * Z)
        self.assertEqual(f.den, Z)
        self.assertEqual(f.num, sympy.Rational(1, 2))

    def test_degree(self):
        self.assertEqual(RationalFunction(((Z - 1) / Z) ** 2).degree, 2)
        self.assertEqual(RationalFunction(Z**3 + 1).degree, 3)
        self.assertTrue(RationalFunction(5).is_constant)

    def test_arithmetic(self):
        a, b = RationalFunction(1 / Z), RationalFunction(Z)
        self.assertEqual(rational_arithmetic(a, b, "mul"), RationalFunction(1))
        self.assertEqual(rational_arithmetic(a, b, "add"), RationalFunction((1 + Z**2) / Z))
        self.assertEqual(rational_arithmetic(a, None, "derivative"), -(a**2))
        with self.assertRaises(ZeroDivisionError):
            rational_arithmetic(a, RationalFunction(0), "div")
        with self.assertRaises(ValueError):
            rational_arithmetic(a, b, "pow")
        with self.assertRaises(ValueError):
            rational_arithmetic(a, None, "add")

    def test_not_rational(self):
        with self.assertRaises(ValueError):
            RationalFunction(sympy.sqrt(Z))

    def test_parameters(self):
        f = RationalFunction(THETA / Z**2)
        self.assertEqual(f.parameters, {THETA})
        self.assertEqual(f.subs({"theta": 2}), RationalFunction(2 / Z**2))
        with self.assertRaises(ValueError):
            f.lambdify()

    def test_lambdify(self):
        f = RationalFunction((Z - 1) / (Z + 2)).lambdify()
        np.testing.assert_allclose(f(np.array([0, 1, 1j])), [-0.5, 0, (1j - 1) / (1j + 2)])

    def test_value_at(self):
        f = RationalFunction(1 / (Z - 1))
        self.assertEqual(f.value_at(2), 1)
        with self.assertRaises(ValueError):
            f.value_at(1)

    def test_json(self):
        f = RationalFunction((Z**2 + sympy.sqrt(2) * sympy.I) / (Z - 3))
        self.assertEqual(RationalFunction.from_json(f.to_json()), f)
        self.assertEqual(
            RationalFunction.from_json({"num": ["theta"], "den": ["0", "0", "1"]}, {"theta": 2}),
            RationalFunction(2 / Z**2),
        )
        with self.assertRaises(ValueError):
            RationalFunction.from_json({"den": ["1"]})


class TestSphere(unittest.TestCase):
    def test_points(self):
        self.assertTrue(SpherePoint.coerce("inf").is_infinite)
        self.assertEqual(SpherePoint.coerce("inf").to_json(), "inf")
        self.assertEqual(SpherePoint.coerce("1/2").value, sympy.Rational(1, 2))
        self.assertEqual(complex(SpherePoint.coerce(2)), 2)
        with self.assertRaises(ValueError):
            complex(SpherePoint.infinity())

    def test_orders(self):
        g = RationalFunction(Z**2)
        self.assertEqual(order_at(g, 0), 2)
        self.assertEqual(order_at(g, "inf"), -2)
        self.assertEqual(order_at(g, 1), 0)
        with self.assertRaises(ValueError):
            order_at(RationalFunction(0), 0)

    def test_differential_order(self):
        # dz^2 has a pole of order 4 at infinity
        self.assertEqual(differential_order_at(RationalFunction(1), 2, "inf"), -4)
        self.assertEqual(differential_order_at(RationalFunction(1 / Z**2), 2, 0), -2)
        self.assertEqual(differential_order_at(RationalFunction(1 / Z**2), 2, "inf"), -2)
        self.assertEqual(differential_order_at(RationalFunction(1), 1, "inf"), -2)
        with self.assertRaises(ValueError):
            differential_order_at(RationalFunction(1), 3, 0)

    def test_branch_order(self):
        G = RationalFunction(Z**2)
        self.assertEqual(branch_order(G, 0), 1)
        self.assertEqual(branch_order(G, "inf"), 1)
        self.assertEqual(branch_order(G, 1), 0)
        G = RationalFunction(((Z - 1) / Z) ** 2)
        self.assertEqual(branch_order(G, 0), 1)
        self.assertEqual(branch_order(G, 1), 1)
        self.assertEqual(branch_order(G, "inf"), 0)
        with self.assertRaises(ValueError):
            branch_order(RationalFunction(3), 0)

    def test_divisor(self):
        entries = divisor(RationalFunction(Z**2 * (Z - 1) / (Z**2 + 1)))
        by_point = {e.point.to_json(): e.order for e in entries if e.point is not None}
        self.assertEqual(by_point, {"0": 2, "1": 1, "inf": -1})
        (factor,) = [e for e in entries if e.factor is not None]
        self.assertEqual(factor.order, -1)
        self.assertEqual(factor.degree, 2)

    def test_laurent(self):
        series = laurent_at(RationalFunction(1 / (Z * (Z - 1))), 0, 3)
        self.assertEqual(series.min_order, -1)
        self.assertEqual(series.coefficient(-1), -1)
        self.assertEqual(series.coefficient(0), -1)
        self.assertEqual(series.coefficient(5), -1)
        with self.assertRaises(ValueError):
            laurent_at(RationalFunction(1), 0, 0)

    def test_residues(self):
        self.assertEqual(residue_at(RationalFunction(1 / Z), 0), 1)
        self.assertEqual(residue_at(RationalFunction(1 / Z), "inf"), -1)
        self.assertEqual(residue_at(RationalFunction(1 / Z**2), 0), 0)
        f = RationalFunction(1 / (Z * (Z - 1)))
        self.assertEqual(residue_at(f, 0) + residue_at(f, 1) + residue_at(f, "inf"), 0)


class TestSchwarzian(unittest.TestCase):
    def test_moebius_invariance(self):
        self.assertTrue(schwarzian(RationalFunction(Z)).is_zero)
        self.assertTrue(schwarzian(RationalFunction((2 * Z + 1) / (Z - 3))).is_zero)
        g = RationalFunction(Z**3 / (Z - 1))
        a = [[1, 2], [0, 1]]
        self.assertEqual(schwarzian(mobius(a, g)), schwarzian(g))

    def test_power(self):
        self.assertEqual(
            schwarzian(RationalFunction(Z**2)), RationalFunction(-sympy.Rational(3, 2) / Z**2)
        )
        mu = sympy.Rational(1, 3)
        self.assertEqual(
            sympy.simplify(schwarzian_expr(Z**mu) - (1 - mu**2) / (2 * Z**2)), 0
        )
        with self.assertRaises(ValueError):
            schwarzian(RationalFunction(1))
        with self.assertRaises(ValueError):
            schwarzian_expr(sympy.Integer(4))

    def test_mobius(self):
        self.assertEqual(mobius([[1, 1], [0, 1]], RationalFunction(Z)), RationalFunction(Z + 1))
        self.assertEqual(mobius([[0, -1], [1, 0]], RationalFunction(Z)), RationalFunction(-1 / Z))
        with self.assertRaises(ValueError):
            mobius([[2, 0], [0, 1]], RationalFunction(Z))

    def test_integrate_exact(self):
        self.assertEqual(integrate_exact(RationalFunction(1 / Z**2)), RationalFunction(-1 / Z))
        dg = RationalFunction(Z * (Z - 2) / (Z - 1) ** 2)
        self.assertEqual(integrate_exact(dg).derivative(), dg)
        with self.assertRaises(ValueError):
            integrate_exact(RationalFunction(1 / Z))


class TestScalars(unittest.TestCase):
    def test_exact_scalar(self):
        root = ExactScalar.of(sympy.sqrt(2))
        self.assertEqual(root * root, ExactScalar.of(2))
        self.assertEqual(
            ExactScalar.of("1/2 + i"), ExactScalar.of(sympy.Rational(1, 2) + sympy.I)
        )
        self.assertTrue(ExactScalar.of(0).is_zero)
        self.assertEqual(ExactScalar.of(-3).sign(), -1)

    def test_exactness_errors(self):
        with self.assertRaises(ExactnessError):
            ExactScalar.of(sympy.sqrt(2) + sympy.sqrt(3))
        with self.assertRaises(ExactnessError):
            ExactScalar.of(sympy.pi)
        self.assertTrue(issubclass(ExactnessError, ValueError))

    def test_param_scalar(self):
        p = to_scalar(THETA**2 - 1)
        self.assertIsInstance(p, ParamScalar)
        self.assertEqual(p.degree, 2)
        self.assertIsInstance(to_scalar(sympy.Rational(3, 4)), ExactScalar)

    def test_strings(self):
        for text in ("3/4", "-2*theta", "1/2 + sqrt(3)*i/2"):
            value = scalar_from_str(text)
            self.assertEqual(sympy.simplify(scalar_from_str(scalar_to_str(value)) - value), 0)
        with self.assertRaises(ValueError):
            scalar_from_str("1/*2")

    def test_exact_sqrt(self):
        self.assertEqual(exact_sqrt(sympy.Rational(9, 4)), sympy.Rational(3, 2))
        self.assertEqual(exact_sqrt(4 * THETA**2), 2 * THETA)
        self.assertEqual(sympy.expand(exact_sqrt(1 - 4 * THETA) ** 2), 1 - 4 * THETA)


if __name__ == "__main__":
    unittest.main()
