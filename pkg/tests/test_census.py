import unittest

import sympy

from cmc_census.census import (
    FOUR_PI_CASES,
    TABLE1,
    CaseRecord,
    ConstraintKind,
    ConstraintViolation,
    Reducibility,
    Status,
    ThetaConstraint,
    Verdict,
    build_4pi,
    i4,
    i11_candidate,
    minimal_analogues,
    o5,
    o6,
    o13,
    o14,
    o22,
    o23_a,
    o23_h3_nonexistence,
    o24_h3,
    o33_record,
    o112,
    o122_h3,
    o222_h3,
    run_all,
    run_case,
    table1,
)
from cmc_census.census.checks import plane_domain, schwarzian_identity
from cmc_census.symcore import Z

from ._constants import O14_THETA, O112_THETA, TABLE1_ROWS, TABLE1_ROWS_4PI


class TestThetaConstraint(unittest.TestCase):
    def test_kinds(self):
        self.assertTrue(ThetaConstraint(ConstraintKind.EQUALS, (2, 2)).holds)
        self.assertFalse(ThetaConstraint(ConstraintKind.EQUALS, (2, 3)).holds)
        root_ge_2 = ConstraintKind.SQRT_INTEGER_GE_2
        self.assertTrue(ThetaConstraint(root_ge_2, (4,)).holds)
        self.assertFalse(ThetaConstraint(root_ge_2, (1,)).holds)
        self.assertFalse(ThetaConstraint(root_ge_2, (-4,)).holds)
        non_integer = ConstraintKind.SQRT_REAL_NON_INTEGER
        self.assertTrue(ThetaConstraint(non_integer, (sympy.Rational(1, 4),)).holds)
        self.assertFalse(ThetaConstraint(non_integer, (9,)).holds)
        excluded = ConstraintKind.EXCLUDED_SET
        self.assertFalse(ThetaConstraint(excluded, (1, 0, 1)).holds)
        self.assertTrue(ThetaConstraint(excluded, (2, 0, 1)).holds)

    def test_undecidable(self):
        constraint = ThetaConstraint(ConstraintKind.EQUALS, (sympy.Symbol("t"), 1))
        with self.assertRaises(ValueError):
            constraint.holds

    def test_require(self):
        with self.assertRaises(ConstraintViolation):
            ThetaConstraint(ConstraintKind.EQUALS, (0, 1), "0 = 1").require()


class TestCaseRecord(unittest.TestCase):
    def test_verified_needs_passing_checks(self):
        with self.assertRaises(ValueError):
            CaseRecord(
                tag="x",
                type_tag="O(-4)",
                TA="4pi",
                reducibility=Reducibility.H3,
                verdict=Verdict.VERIFIED,
                status=Status.CLASSIFIED,
                checks={"a": True, "b": False},
            )

    def test_family_dimension(self):
        record = CaseRecord(
            tag="x",
            type_tag="O(-2,-3)",
            TA="8pi",
            reducibility=Reducibility.H1,
            verdict=Verdict.VERIFIED,
            status=Status.CLASSIFIED,
        )
        self.assertEqual(record.family_dimension, 1)
        self.assertEqual(record.to_json()["reducibility"], "H1")


class TestCases(unittest.TestCase):
    def test_o112(self):
        record = o112()
        self.assertEqual(record.verdict, Verdict.VERIFIED)
        self.assertEqual(record.status, Status.CLASSIFIED_UNIQUE)
        self.assertEqual(record.params, {"theta": str(O112_THETA)})
        self.assertTrue(record.checks["unique_theta"])
        self.assertTrue(record.checks["closed_form_agrees"])
        self.assertEqual(record.family_dimension, 3)

    def test_o14(self):
        record = o14()
        self.assertEqual(record.verdict, Verdict.VERIFIED)
        self.assertEqual(record.params, {"theta": str(O14_THETA)})

    def test_o13_does_not_exist(self):
        record = o13()
        self.assertEqual(record.verdict, Verdict.NONEXISTENT)
        self.assertEqual(record.family_dimension, 0)

    def test_o23_h3_does_not_exist(self):
        for m in range(1, 11):
            record = o23_h3_nonexistence(m)
            self.assertEqual(record.verdict, Verdict.NONEXISTENT)
            self.assertTrue(record.checks["factorial_monomial_a"])
            self.assertTrue(record.checks["factorial_monomial_b"])
        with self.assertRaises(ValueError):
            o23_h3_nonexistence(0)

    def test_o23_a(self):
        record = o23_a(sympy.Rational(3, 16))
        self.assertEqual(record.reducibility, Reducibility.H1)
        self.assertTrue(record.checks["gap_real_non_integer"])
        self.assertTrue(record.checks["gap_value"])

    def test_o23_a_constraints(self):
        with self.assertRaises(ConstraintViolation):
            o23_a(0)
        # sqrt(1 - 4 theta) = 3
        with self.assertRaises(ConstraintViolation):
            o23_a(-2)


    def test_one_ended(self):
        for build in (o5, o6):
            record = build()
            self.assertEqual(record.verdict, Verdict.VERIFIED)
            self.assertTrue(record.checks["plane_domain"])
            self.assertEqual(record.reducibility, Reducibility.H3)
            with self.assertRaises(ConstraintViolation):
                build(0)

    def test_o22(self):
        record = o22()
        self.assertEqual(record.verdict, Verdict.VERIFIED)
        self.assertEqual(record.params["theta"], "-3")
        self.assertEqual(record.metadata["monodromy"], "H3")
        record = o22(sympy.Rational(1, 2))
        self.assertEqual(record.verdict, Verdict.VERIFIED)
        self.assertEqual(record.metadata["monodromy"], "H1")

    def test_o22_constraints(self):
        # S(z^2) - S(z^2) = 0 = 2Q
        with self.assertRaises(ConstraintViolation):
            o22(mu=2, a=1, b=1)
        with self.assertRaises(ConstraintViolation):
            o22(mu=sympy.Rational(1, 2), b=1)
        with self.assertRaises(ConstraintViolation):
            o22(a=0)

    def test_o24_h3(self):
        for m in range(2, 13):
            records = o24_h3(m)
            self.assertTrue(1 <= len(records) <= m, f"m={m}")
            for record in records:
                self.assertEqual(record.verdict, Verdict.VERIFIED, f"m={m}")
                self.assertTrue(record.checks["lambda_identity"])
        with self.assertRaises(ValueError):
            o24_h3(1)

    def test_o122_h3(self):
        for r in range(3, 11):
            record = o122_h3(r)
            self.assertEqual(record.verdict, Verdict.VERIFIED, f"r={r}")
            self.assertTrue(record.checks["residue_free"])
            self.assertTrue(record.checks["schwarzian_identity"])

    def test_o222_h3(self):
        for m in range(2, 10):
            record = o222_h3(m)
            self.assertEqual(record.verdict, Verdict.VERIFIED, f"m={m}")
            self.assertTrue(record.checks["schwarzian_identity"])
        with self.assertRaises(ValueError):
            o222_h3(1)

    def test_o33(self):
        record = o33_record()
        self.assertEqual(record.verdict, Verdict.VERIFIED)
        self.assertEqual(record.status, Status.EXISTENCE)
        self.assertTrue(record.checks["period_closed_form"])


class TestChecks(unittest.TestCase):
    def test_schwarzian_identity(self):
        # S(z^3) - S(z^2) = -5 / (2 z^2)
        Q = sympy.Rational(-5, 4) / Z**2
        self.assertTrue(schwarzian_identity(Z**3, Z**2, Q))
        self.assertFalse(schwarzian_identity(Z**3, Z**2, -Q))
        # a Moebius image of z^2 with coefficients in Q(sqrt(2))
        root = sympy.sqrt(2)
        G = (Z**2 + root) / (Z**2 - root)
        self.assertTrue(schwarzian_identity(Z**3, G, Q))
        self.assertFalse(schwarzian_identity(Z**3 + root * Z, G, Q))
        with self.assertRaises(ValueError):
            schwarzian_identity(1, G, Q)

    def test_plane_domain(self):
        self.assertTrue(plane_domain(o5().spec))
        self.assertFalse(plane_domain(o13().spec))


class TestFourPi(unittest.TestCase):
    def test_cases(self):
        for case in FOUR_PI_CASES:
            record = build_4pi(case)
            self.assertEqual(record.verdict, Verdict.VERIFIED, case)
            self.assertIn(record.TA, ("0", "4pi"))

    def test_constraints(self):
        with self.assertRaises(ValueError):
            build_4pi("helicoid")
        with self.assertRaises(ConstraintViolation):
            build_4pi("catenoid_cousin", mu=1)
        with self.assertRaises(ConstraintViolation):
            build_4pi("warped_catenoid", l=1)
        with self.assertRaises(ConstraintViolation):
            build_4pi("enneper_dual", theta=0)


class TestGenusOne(unittest.TestCase):
    def test_i4(self):
        record = i4()
        self.assertEqual(record.verdict, Verdict.VERIFIED)
        self.assertTrue(record.checks["jacobian_nondegenerate"])
        self.assertTrue(record.checks["solution_at_symmetric_point"])

    def test_i11_candidate(self):
        record = i11_candidate()
        self.assertEqual(record.verdict, Verdict.UNKNOWN)
        self.assertEqual(record.status, Status.UNKNOWN_PLUS)
        self.assertTrue(all(record.checks.values()), record.checks)
        self.assertLess(record.metadata["periodicity_residual"], 1e-6)
        with self.assertRaises(ConstraintViolation):
            i11_candidate(theta=0)



class TestRunCase(unittest.TestCase):
    def test_defaults(self):
        (record,) = run_case("o23_a")
        self.assertEqual(record.params["theta"], "3/16")

    def test_string_params(self):
        (record,) = run_case("o23_a", theta="1/8")
        self.assertEqual(record.params["theta"], "1/8")
        with self.assertRaises(ConstraintViolation):
            run_case("o23_a", theta="-2")

    def test_unknown_case(self):
        with self.assertRaises(ValueError):
            run_case("o99")


class TestTable(unittest.TestCase):
    def test_blocks(self):
        self.assertEqual(len(TABLE1), TABLE1_ROWS)
        self.assertEqual(len({(b.type_tag, b.TA) for b in TABLE1}), TABLE1_ROWS)

    def test_missing_records(self):
        df = table1(records=[])
        self.assertEqual(len(df), TABLE1_ROWS)
        self.assertFalse(df["matches"].any())
        self.assertTrue((df["verdict"].str.contains("missing")).all())

    def test_partial_records(self):
        df = table1(records=[o112(), o14()])
        matched = set(df.loc[df["matches"], "type"])
        self.assertEqual(matched, {"O(-1,-1,-2)", "O(-1,-4)"})

    def test_budget(self):
        df = table1(records=[], budget="4pi")
        self.assertEqual(len(df), TABLE1_ROWS_4PI)
        with self.assertRaises(ValueError):
            table1(records=[], budget="12pi")

    def test_full_census(self):
        df = table1(records=run_all())
        self.assertEqual(len(df), TABLE1_ROWS)
        self.assertTrue(df["matches"].all(), df.loc[~df["matches"], "type"].tolist())

    def test_minimal_analogues(self):
        df = minimal_analogues()
        row = df[df["type"] == "O(-1,-3)"].iloc[0]
        self.assertFalse(row["in_census"])
        row = df[df["type"] == "I(-4)"].iloc[0]
        self.assertEqual(row["surface"], "Chen-Gackstatter surface")


if __name__ == "__main__":
    unittest.main()
