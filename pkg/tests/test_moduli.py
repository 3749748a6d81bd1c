import json
import tempfile
import unittest
from pathlib import Path

import sympy

from cmc_census.census.three_ends import O112_G, O112_Q
from cmc_census.frobenius import frobenius_report, from_E0
from cmc_census.moduli import (
    CompatibilityError,
    GenusOneDescriptor,
    SurfaceSpec,
    analyze,
    apply_chart_inversion,
    apply_rigid_motion,
    curvature_report,
    enumerate_types,
    existence_pattern,
    type_tag,
)
from cmc_census.symcore import THETA, Z

from ._constants import O112_THETA


def _o112_spec():
    return SurfaceSpec.genus_zero(
        O112_G, O112_Q, [0, 1, "inf"], "O(-1,-1,-2)", {"theta": O112_THETA}
    )


class TestEnumeration(unittest.TestCase):
    def test_zero_budget(self):
        self.assertEqual(enumerate_types(0).tags, ["O(0)"])

    def test_4pi(self):
        self.assertEqual(sorted(enumerate_types(1).tags), ["O(-2,-2)", "O(-4)"])

    def test_8pi(self):
        enumeration = enumerate_types(2)
        expected = {
            "O(-5)",
            "O(-6)",
            "O(-2,-2)",
            "O(-1,-4)",
            "O(-2,-3)",
            "O(-2,-4)",
            "O(-3,-3)",
            "O(-1,-1,-2)",
            "O(-1,-2,-2)",
            "O(-2,-2,-2)",
            "I(-3)",
            "I(-4)",
            "I(-1,-1)",
            "I(-2,-2)",
        }
        self.assertEqual(set(enumeration.tags), expected)
        self.assertTrue(all(t.check() for t in enumeration.types))
        excluded = {e.record.tag for e in enumeration.exclusions}
        self.assertIn("O(-1,-3)", excluded)
        self.assertIn("I(-1,-2)", excluded)

    def test_frame(self):
        df = enumerate_types(2).to_frame()
        self.assertIn("excluded_by", df.columns)
        row = df[df["type"] == "O(-1,-3)"].iloc[0]
        self.assertEqual(row["excluded_by"], "log term at the simple end")

    def test_unsupported_budget(self):
        with self.assertRaises(ValueError):
            enumerate_types(3)

    def test_type_tag(self):
        self.assertEqual(type_tag(0, (-2, -4)), "O(-2,-4)")
        self.assertEqual(type_tag(1, (-3,)), "I(-3)")


class TestSurfaceSpec(unittest.TestCase):
    def test_params_are_substituted(self):
        spec = _o112_spec()
        self.assertNotIn(THETA, spec.Q.parameters)
        self.assertEqual(spec.params, {"theta": "-2"})
        self.assertEqual(spec.degree, 2)
        self.assertEqual(spec.n_ends, 3)

    def test_json(self):
        spec = _o112_spec()
        again = SurfaceSpec.from_json(json.loads(json.dumps(spec.to_json())))
        self.assertEqual(again.spec_hash(), spec.spec_hash())
        other = SurfaceSpec.genus_zero(O112_G, O112_Q, [0, 1, "inf"], params={"theta": 1})
        self.assertNotEqual(other.spec_hash(), spec.spec_hash())

    def test_load(self):
        with tempfile.TemporaryDirectory() as d:
            path = Path(d) / "spec.json"
            path.write_text(json.dumps(_o112_spec().to_json()), encoding="utf-8")
            self.assertEqual(SurfaceSpec.load(path).spec_hash(), _o112_spec().spec_hash())
            path.write_text("{", encoding="utf-8")
            with self.assertRaises(ValueError):
                SurfaceSpec.load(path)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            SurfaceSpec.genus_zero(Z, 1, [0, 0])
        with self.assertRaises(ValueError):
            SurfaceSpec.genus_zero(3, 1, ["inf"])
        with self.assertRaises(ValueError):
            SurfaceSpec.from_json({"genus": 0, "ends": ["inf"], "G": {"num": "z"}})
        with self.assertRaises(ValueError):
            SurfaceSpec(2, ())

    def test_genus_one(self):
        descriptor = GenusOneDescriptor(
            v1=1,
            v2=1j,
            theta=1,
            degree=2,
            end_orders=((-4, 0),),
            umbilic_orders=(1, 1, 1, 1),
        )
        spec = SurfaceSpec(1, (), label="I(-4)", descriptor=descriptor)
        again = SurfaceSpec.from_json(json.loads(json.dumps(spec.to_json())))
        self.assertEqual(again.descriptor, descriptor)
        report = curvature_report(spec)
        self.assertEqual(report.degG, 2)
        self.assertEqual(report.osserman_slack, 2)


class TestAnalysis(unittest.TestCase):
    def test_o112_orders(self):
        ends, umbilics = analyze(_o112_spec())
        self.assertEqual([e.d for e in ends], [-1, -1, -2])
        self.assertEqual([e.mu_sharp for e in ends], [1, 1, 0])
        self.assertEqual(umbilics, [])

    def test_o112_curvature(self):
        report = curvature_report(_o112_spec())
        self.assertEqual(report.degG, 2)
        self.assertEqual(report.TA_dual_over_4pi, 2)
        self.assertEqual(report.gauss_bonnet_residual, 0)
        self.assertEqual(report.riemann_roch_residual, 0)
        self.assertEqual(report.osserman_slack, 0)
        self.assertTrue(report.embedded_ends)

    def test_umbilic(self):
        # an umbilic of order 2 at z = 0
        spec = SurfaceSpec.genus_zero(Z**3, Z**2, ["inf"])
        ends, umbilics = analyze(spec)
        self.assertEqual(len(umbilics), 1)
        self.assertEqual(umbilics[0].xi, 2)
        self.assertEqual(ends[0].d, -6)

    def test_incompatible_umbilic(self):
        with self.assertRaises(CompatibilityError):
            analyze(SurfaceSpec.genus_zero(Z, Z, ["inf"]))

    def test_incomplete_end(self):
        with self.assertRaises(CompatibilityError):
            analyze(SurfaceSpec.genus_zero(Z**2, 1, [0, "inf"]))

    def test_chart_inversion(self):
        spec = _o112_spec()
        inverted = apply_chart_inversion(spec)
        self.assertEqual([p.to_json() for p in inverted.ends], ["inf", "1", "0"])
        self.assertEqual(curvature_report(inverted), curvature_report(spec))
        twice = apply_chart_inversion(inverted)
        self.assertEqual(twice.spec_hash(), spec.spec_hash())

    def test_rigid_motion(self):
        spec = _o112_spec()
        moved = apply_rigid_motion(spec, [[1, 1], [0, 1]])
        self.assertEqual(curvature_report(moved), curvature_report(spec))
        with self.assertRaises(ValueError):
            apply_rigid_motion(spec, [[2, 0], [0, 1]])

    def test_existence_pattern(self):
        Q = sympy.sympify(O112_Q).subs(THETA, O112_THETA)
        reports = [frobenius_report(from_E0(O112_G, Q, end)) for end in (0, 1)]
        pattern = existence_pattern(reports)
        self.assertEqual(pattern.reducibility, "H3")
        self.assertEqual(pattern.family_dimension, 3)
        with self.assertRaises(ValueError):
            existence_pattern([])


if __name__ == "__main__":
    unittest.main()
