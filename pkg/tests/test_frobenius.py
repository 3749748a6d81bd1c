import random
import unittest

import sympy

from cmc_census.census.checks import nonzero_roots
from cmc_census.census.three_ends import O112_G, O112_Q, O122_G, O122_Q, P_SYMBOL
from cmc_census.census.two_ends import O14_G, O14_Q, O23B_G, O23B_Q
from cmc_census.frobenius import (
    FormalSolution,
    GapClass,
    IrregularSingularityError,
    RegularSingularODE,
    build_form,
    closed_form_condition,
    equivalence_report,
    exponent_gaps,
    factorial_monomial,
    frobenius_report,
    from_E0,
    from_E1sharp,
    from_E2sharp,
    indicial,
    log_term,
    log_term_theta_poly,
    residual,
    second_solution,
    series_solution,
)
from cmc_census.frobenius.ode import vanishes
from cmc_census.symcore import THETA, Z, is_zero

from ._constants import SEED


def _sym(x):
    return x.to_sympy() if hasattr(x, "to_sympy") else sympy.sympify(x)


def _q0(m):
    return sympy.Rational(1 - m * m, 4)


class TestIndicial(unittest.TestCase):
    def _gap_class(self, q0):
        return indicial(RegularSingularODE.from_coefficients([0], [q0, 1])).gap_class

    def test_gap_classes(self):
        self.assertEqual(self._gap_class(sympy.Rational(-3, 4)), GapClass.POSITIVE_INTEGER)
        self.assertEqual(self._gap_class(sympy.Rational(3, 16)), GapClass.REAL_NON_INTEGER)
        self.assertEqual(self._gap_class(1), GapClass.NON_REAL)
        self.assertEqual(self._gap_class(sympy.Rational(1, 4)), GapClass.ZERO)
        self.assertEqual(self._gap_class(THETA), GapClass.PARAMETRIC)

    def test_exponents(self):
        data = indicial(RegularSingularODE.from_coefficients([0], [sympy.Rational(-3, 4)]))
        self.assertEqual(data.lambda1, sympy.Rational(3, 2))
        self.assertEqual(data.lambda2, sympy.Rational(-1, 2))
        self.assertEqual(data.m, 2)
        self.assertTrue(is_zero(data.phi(data.lambda1)))
        self.assertTrue(is_zero(data.phi(data.lambda2)))

    def test_non_integer_gap_has_no_m(self):
        data = indicial(RegularSingularODE.from_coefficients([0], [sympy.Rational(3, 16)]))
        with self.assertRaises(ValueError):
            data.m

    def test_pole_in_coefficients(self):
        with self.assertRaises(IrregularSingularityError):
            RegularSingularODE(1 / Z, 0)


class TestLogTerm(unittest.TestCase):
    def setUp(self):
        self.rng = random.Random(SEED)

    def _rational(self):
        return sympy.Rational(self.rng.randint(-9, 9), self.rng.randint(1, 5))

    def test_closed_forms_agree_on_random_equations(self):
        for m in (1, 2, 3):
            for _ in range(70):
                q = [_q0(m)] + [self._rational() for _ in range(3)]
                ode = RegularSingularODE.from_coefficients([0], q)
                self.assertEqual(
                    vanishes(log_term(ode)), vanishes(closed_form_condition(ode, m))
                )

    def test_closed_forms_vanish_on_their_zero_sets(self):
        for _ in range(10):
            q1, q2 = self._rational(), self._rational()
            cases = {
                1: [_q0(1), 0, q2],
                2: [_q0(2), q1, -(q1**2)],
                3: [_q0(3), q1, q2, -q1 * q2 - q1**3 / 4],
            }
            for m, q in cases.items():
                ode = RegularSingularODE.from_coefficients([0], q)
                self.assertTrue(vanishes(log_term(ode)), f"m={m}, q={q}")

    def test_closed_form_values(self):
        ode = RegularSingularODE.from_coefficients([0], [_q0(2), 1, 0])
        self.assertEqual(_sym(log_term(ode)), sympy.Rational(-1, 2))
        ode = RegularSingularODE.from_coefficients([0], [_q0(1), 3])
        self.assertEqual(_sym(log_term(ode)), -3)

    def test_closed_form_domain(self):
        ode = RegularSingularODE.from_coefficients([0], [_q0(4), 1])
        with self.assertRaises(ValueError):
            closed_form_condition(ode, 4)
        ode = RegularSingularODE.from_coefficients([0, 1], [_q0(2), 1])
        with self.assertRaises(ValueError):
            closed_form_condition(ode, 2)

    def test_factorial_monomial(self):
        for m in (1, 2, 3, 4):
            ode = RegularSingularODE.from_coefficients([0], [_q0(m), THETA])
            c = log_term_theta_poly(ode)
            expected = factorial_monomial(m)
            self.assertEqual(sympy.expand(_sym(c) - _sym(expected)), 0)
        self.assertEqual(_sym(factorial_monomial(3)), -(THETA**3) / 12)

    def test_theta_in_indicial_data(self):
        ode = RegularSingularODE.from_coefficients([0], [THETA, 1])
        with self.assertRaises(ValueError):
            log_term_theta_poly(ode)

    def test_non_integer_gap(self):
        ode = RegularSingularODE.from_coefficients([0], [sympy.Rational(3, 16), 1])
        with self.assertRaises(ValueError):
            log_term(ode)


class TestSeries(unittest.TestCase):
    def setUp(self):
        self.ode = RegularSingularODE.from_coefficients(
            [0, 1], [sympy.Rational(-3, 4), 1, 2]
        )

    def test_first_solution_residual(self):
        data = indicial(self.ode)
        coeffs = series_solution(self.ode, data.lambda1, 6)
        self.assertEqual(_sym(coeffs[0]), 1)
        power, log_part = residual(self.ode, FormalSolution(data.lambda1, tuple(coeffs)), 6)
        self.assertTrue(all(is_zero(x) for x in power))
        self.assertTrue(all(is_zero(x) for x in log_part))

    def test_residual_needs_coefficients(self):
        data = indicial(self.ode)
        coeffs = series_solution(self.ode, data.lambda1, 2)
        with self.assertRaises(ValueError):
            residual(self.ode, FormalSolution(data.lambda1, tuple(coeffs)), 6)

    def test_second_solution_log_coefficient(self):
        ode = RegularSingularODE.from_coefficients([0], [_q0(2), 1, 0])
        x2 = second_solution(ode, 6)
        self.assertEqual(sympy.expand(_sym(x2.log_coeff) - _sym(log_term(ode))), 0)
        self.assertEqual(x2.log_exponent, indicial(ode).lambda1)

    def test_report(self):
        ode = RegularSingularODE.from_coefficients([0], [_q0(1), 0, 1])
        report = frobenius_report(ode)
        self.assertTrue(report.log_free)
        self.assertEqual(report.to_json()["gap_class"], "positive-integer")
        ode = RegularSingularODE.from_coefficients([0], [_q0(1), 1])
        self.assertFalse(frobenius_report(ode).log_free)


class TestForms(unittest.TestCase):
    def test_o112_log_term_roots(self):
        for end in (0, 1):
            c = log_term_theta_poly(from_E0(O112_G, O112_Q, end))
            self.assertEqual(nonzero_roots(c), {sympy.Integer(-2)})

    def test_o14_log_term_roots(self):
        c = log_term_theta_poly(from_E0(O14_G, O14_Q, 0))
        self.assertEqual(nonzero_roots(c), {sympy.Integer(-4)})

    def test_o122_log_term_roots(self):
        values = [sympy.Rational(k, 3) for k in range(-11, 12) if k not in (-3, 0, 3)]
        self.assertEqual(len(values), 20)
        for p in values:
            c = log_term_theta_poly(from_E0(O122_G, O122_Q.subs(P_SYMBOL, p), 0))
            self.assertEqual(nonzero_roots(c), {-2 * p * (p + 1)}, f"p={p}")

    def test_o112_exponent_gaps(self):
        gaps = exponent_gaps(O112_G, O112_Q, 0)
        self.assertEqual(gaps["E0"], 2)

    def test_o112_forms_agree(self):
        Q = O112_Q.subs(THETA, -2)
        report = equivalence_report(O112_G, Q, 0)
        self.assertTrue(report.forms["E0"].single_valued)
        self.assertTrue(report.consistent)

    def test_e2sharp_at_pole_of_G(self):
        # G = ((z-1)/z)^2 is rotated to z^2/(z-1)^2 and G^2 w becomes theta z/2
        p, q = from_E2sharp(O23B_G, O23B_Q, 0).coefficients(3)
        self.assertEqual([_sym(c) for c in p], [-1, 0, 0])
        self.assertTrue(is_zero(_sym(q[0]) + THETA))
        self.assertTrue(is_zero(_sym(q[1]) - THETA))
        self.assertTrue(is_zero(_sym(q[2])))

    def test_exponent_gaps_at_pole_of_G(self):
        gaps = exponent_gaps(1 / Z, 1 / Z, 0)
        self.assertEqual(gaps, {"E0": 1, "E1sharp": 2, "E2sharp": 2})
        report = equivalence_report(1 / Z, 1 / Z, 0)
        for name, gap in gaps.items():
            self.assertEqual(report.forms[name].gap, gap)

    def test_sharp_forms_agree_at_pole_of_G(self):
        p1, q1 = from_E1sharp(O23B_G, O23B_Q, 0).coefficients(3)
        p2, q2 = from_E2sharp(O23B_G, O23B_Q, 0).coefficients(3)
        for a, b in zip(p1 + q1, p2 + q2):
            self.assertTrue(is_zero(_sym(a) - _sym(b)))

    def test_e2sharp_log_term(self):
        for m in range(1, 11):
            ode = from_E2sharp(O23B_G, O23B_Q, 0).pin_indicial(q0=sympy.Rational(4 - m * m, 4))
            self.assertEqual(indicial(ode).gap, m)
            c = log_term_theta_poly(ode)
            self.assertEqual(sympy.expand(_sym(c) - _sym(factorial_monomial(m))), 0)

    def test_unknown_form(self):
        with self.assertRaises(ValueError):
            build_form("E3", O112_G, O112_Q, 0)

    def test_regular_point(self):
        with self.assertRaises(ValueError):
            from_E0(O112_G, O112_Q, 2)

    def test_irregular_end(self):
        with self.assertRaises(IrregularSingularityError):
            from_E0(Z**2, 1 / Z**3, 0)


if __name__ == "__main__":
    unittest.main()
