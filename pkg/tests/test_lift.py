import math
import tempfile
import unittest
from pathlib import Path

import numpy as np
import sympy

from cmc_census.census import (
    Reducibility,
    o112,
    o122_h1,
    o122_h3,
    o222_h1,
    o222_h3,
)
from cmc_census.census.two_ends import O23A_G, O23A_Q
from cmc_census.lift import (
    Annulus,
    Arc,
    LiftData,
    Line,
    Mesh,
    MonodromyClass,
    PathError,
    Rectangle,
    Tolerances,
    classify,
    coefficient_matrix,
    deviation,
    domain_from_json,
    dual_mesh,
    eigenphase,
    fold_phase,
    immerse,
    integrate_lift,
    loop_around,
    mesh,
    monodromy,
    numeric_TA,
    sample_lift,
    secondary_gauss,
    secondary_gauss_numeric,
    su2_pole_gauge,
)
from cmc_census.symcore import THETA, Z

from ._constants import LIFT_TOL, MONODROMY_TOL

TOLERANCES = Tolerances(monodromy=MONODROMY_TOL)


def _o23_a():
    theta = sympy.Rational(3, 16)
    return LiftData(O23A_G, sympy.sympify(O23A_Q).subs(THETA, theta), [1, "inf"])


def _lift_data(record):
    spec = record.spec
    return LiftData(spec.G, spec.Q, spec.ends)


def _cross_ratios(w, refs=(0, 24, 49)):
    a, b, c = (w[k] for k in refs)
    x = np.delete(w, refs)
    return (x - a) * (b - c) / ((x - c) * (b - a))


class TestCoefficients(unittest.TestCase):
    def test_matrix(self):
        z = 0.3 - 0.7j
        m = coefficient_matrix(Z, 1, z)
        np.testing.assert_allclose(m, [[z, -(z**2)], [1, -z]])
        self.assertAlmostEqual(np.trace(m), 0)

    def test_finite_at_poles_of_G(self):
        m = coefficient_matrix(1 / Z, 1, 0)
        self.assertTrue(np.all(np.isfinite(m)))

    def test_singular_points(self):
        data = _o23_a()
        np.testing.assert_allclose(data.singular_points, [1])
        with self.assertRaises(PathError):
            data.matrix(1)

    def test_invalid_data(self):
        with self.assertRaises(ValueError):
            LiftData(3, 1)
        with self.assertRaises(ValueError):
            LiftData(Z, THETA)
        with self.assertRaises(ValueError):
            Tolerances(integration=0)


class TestIntegration(unittest.TestCase):
    def test_zero_hopf_differential(self):
        state = integrate_lift(Z, 0, [0, 1 + 1j])
        np.testing.assert_allclose(state.F, np.eye(2), atol=1e-12)

    def test_path_independence(self):
        direct = integrate_lift(Z, 1, [0, 1 + 1j]).F
        bent = integrate_lift(Z, 1, [0, 1, 1 + 1j]).F
        np.testing.assert_allclose(direct, bent, atol=LIFT_TOL)
        self.assertAlmostEqual(np.linalg.det(direct), 1, places=8)

    def test_closed_loop_without_singularities(self):
        path = [Arc(0.5, 1.0, 0.0)]
        F = integrate_lift(Z, 1, path).F
        np.testing.assert_allclose(F, np.eye(2), atol=LIFT_TOL)

    def test_initial_value(self):
        F0 = np.array([[2, 0], [0, 0.5]], dtype=complex)
        F = integrate_lift(Z, 1, [0, 1j], F0=F0).F
        unit = integrate_lift(Z, 1, [0, 1j]).F
        np.testing.assert_allclose(F, unit @ F0, atol=LIFT_TOL)
        with self.assertRaises(ValueError):
            integrate_lift(Z, 1, [0, 1j], F0=2 * np.eye(2))

    def test_gauge_near_pole(self):
        # G = 1/z has a pole at 0, but no singular point of the equation
        near = integrate_lift(1 / Z, 1, [-1 + 0.01j, 1 + 0.01j]).F
        around = integrate_lift(1 / Z, 1, [-1 + 0.01j, -1 + 1j, 1 + 1j, 1 + 0.01j]).F
        np.testing.assert_allclose(near, around, atol=LIFT_TOL)

    def test_su2_gauge(self):
        a = su2_pole_gauge(0.3 + 2j)
        np.testing.assert_allclose(a @ a.conj().T, np.eye(2), atol=1e-14)
        self.assertAlmostEqual(np.linalg.det(a), 1)
        # the pole of a * G sits where G = w
        self.assertAlmostEqual(a[1, 0] * (0.3 + 2j) + a[1, 1], 0)

    def test_clearance(self):
        with self.assertRaises(PathError):
            integrate_lift(_o23_a(), path=[0, 2])

    def test_samples(self):
        points, matrices = sample_lift(Z, 1, [0, 1], n_samples=20)
        self.assertEqual(points.shape, (21,))
        self.assertEqual(matrices.shape, (21, 2, 2))
        g, flags = secondary_gauss_numeric(points, matrices)
        self.assertEqual(g.shape, (19,))
        self.assertFalse(flags.any())
        self.assertTrue(np.all(np.isfinite(g)))
        with self.assertRaises(ValueError):
            secondary_gauss_numeric(points[:2], matrices[:2])


class TestSecondaryGauss(unittest.TestCase):
    def test_matches_exact_map(self):
        record = o222_h3(4)
        data = _lift_data(record)
        path = [0.2 + 1.5j, 0.8 + 1.5j]
        points, matrices = sample_lift(data, path=path, n_samples=49)
        self.assertEqual(len(points), 50)
        g = secondary_gauss(data, points=points, matrices=matrices)
        exact = record.secondary_g.lambdify()(points)
        # both maps agree up to a Moebius transformation
        np.testing.assert_allclose(_cross_ratios(g), _cross_ratios(exact), rtol=1e-6)

    def test_differences_agree(self):
        Q = sympy.Rational(1, 100)
        points, matrices = sample_lift(Z, Q, [1, 2], n_samples=200)
        differenced, flags = secondary_gauss_numeric(points, matrices)
        self.assertFalse(flags.any())
        g = secondary_gauss(Z, Q, points, matrices)
        np.testing.assert_allclose(differenced, g[1:-1], rtol=1e-3)

    def test_mismatched_samples(self):
        points, matrices = sample_lift(Z, 1, [0, 1], n_samples=4)
        with self.assertRaises(ValueError):
            secondary_gauss(Z, 1, points[:-1], matrices)


class TestImmersion(unittest.TestCase):
    def test_identity(self):
        np.testing.assert_allclose(immerse(np.eye(2)), [0, 0, 0])

    def test_boost(self):
        t = 1.3
        F = np.diag([math.exp(t / 2), math.exp(-t / 2)])
        np.testing.assert_allclose(immerse(F), [0, 0, math.tanh(t / 2)], atol=1e-14)

    def test_unitary_invariance(self):
        F = np.array([[1, 2 - 1j], [0.5j, (1 + 0.5j * (2 - 1j))]], dtype=complex)
        F = F / np.sqrt(np.linalg.det(F))
        u = su2_pole_gauge(-0.4 + 0.9j)
        np.testing.assert_allclose(immerse(F @ u), immerse(F), atol=1e-12)
        self.assertLess(np.linalg.norm(immerse(F)), 1)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            immerse(2 * np.eye(2))
        with self.assertRaises(ValueError):
            immerse(np.array([[np.nan, 0], [0, 1]]))


class TestCurvature(unittest.TestCase):
    def test_degree(self):
        self.assertAlmostEqual(numeric_TA(Z), 4 * math.pi, places=5)
        self.assertAlmostEqual(numeric_TA(Z**2), 8 * math.pi, places=5)
        self.assertAlmostEqual(numeric_TA(((Z - 1) / Z) ** 2), 8 * math.pi, places=5)

    def test_constant(self):
        with self.assertRaises(ValueError):
            numeric_TA(2)

    def test_o222_gauss_map(self):
        G = o222_h1(2).spec.G
        self.assertLess(abs(numeric_TA(G) / (8 * math.pi) - 1), 1e-3)


class TestMonodromy(unittest.TestCase):
    def test_helpers(self):
        self.assertAlmostEqual(deviation(-np.eye(2)), 0)
        self.assertAlmostEqual(fold_phase(3 * math.pi / 4), math.pi / 4)
        rho = np.diag([1j, -1j])
        self.assertAlmostEqual(eigenphase(rho), math.pi / 2)
        self.assertEqual(classify([np.eye(2)], 1e-6), MonodromyClass.IDENTITY_LIKE)
        self.assertEqual(classify([rho, -rho], 1e-6), MonodromyClass.COMMUTING_UNITARY)
        shear = np.array([[1, 1], [0, 1]], dtype=complex)
        self.assertEqual(classify([shear], 1e-6), MonodromyClass.NON_UNITARIZABLE)
        self.assertEqual(
            classify([rho, np.array([[0, 1], [-1, 0]])], 1e-6),
            MonodromyClass.INDETERMINATE,
        )

    def test_h3_is_identity_like(self):
        report = monodromy(_lift_data(o222_h3(2)), tolerances=TOLERANCES)
        self.assertEqual(report.classification, MonodromyClass.IDENTITY_LIKE)
        self.assertEqual([loop.end for loop in report.loops], ["0", "1", "inf"])
        self.assertLess(max(report.deviations), MONODROMY_TOL)

    def test_h1_is_unitary(self):
        report = monodromy(_o23_a(), tolerances=TOLERANCES)
        self.assertEqual(report.classification, MonodromyClass.COMMUTING_UNITARY)
        # the gap at z = 1 is 1/2
        self.assertAlmostEqual(eigenphase(report.loop(1).rho), math.pi / 2, places=5)
        self.assertLess(report.product_deviation, MONODROMY_TOL)
        self.assertEqual(report.to_json()["class"], "commuting-unitary")
        with self.assertRaises(ValueError):
            report.loop(0)

    def test_three_ended_census(self):
        records = [o112(), o122_h1(4), o122_h3(3), o222_h1(2), o222_h3(4)]
        for record in records:
            with self.subTest(record.tag):
                report = monodromy(_lift_data(record), tolerances=TOLERANCES)
                self.assertEqual(len(report.loops), 3)
                if record.reducibility == Reducibility.H3:
                    expected = {MonodromyClass.IDENTITY_LIKE}
                else:
                    expected = {
                        MonodromyClass.IDENTITY_LIKE,
                        MonodromyClass.COMMUTING_UNITARY,
                    }
                self.assertIn(report.classification, expected)
                self.assertLess(report.product_deviation, MONODROMY_TOL)

    def test_bad_base(self):
        with self.assertRaises(PathError):
            monodromy(_o23_a(), base=1.001)


class TestPaths(unittest.TestCase):
    def test_loop(self):
        segments = loop_around(2j, 0, 0.5)
        self.assertAlmostEqual(segments[0].start, 2j)
        self.assertAlmostEqual(segments[-1].end, 2j)
        self.assertAlmostEqual(segments[1].length, math.pi)
        with self.assertRaises(ValueError):
            loop_around(2j, 0, 3)

    def test_line_distance(self):
        self.assertAlmostEqual(Line(-1, 1).distance_to(0.5j), 0.5)
        self.assertAlmostEqual(Line(-1, 1).distance_to(3), 2)


class TestMesh(unittest.TestCase):
    def test_rectangle(self):
        result = mesh(Z, 1, Rectangle(-0.5, 0.5, -0.5, 0.5), resolution=4)
        self.assertEqual(result.vertices.shape, (25, 3))
        self.assertEqual(result.faces.shape, (32, 3))
        self.assertTrue(np.all(np.linalg.norm(result.vertices, axis=1) < 1))
        np.testing.assert_allclose(result.vertices[0], [0, 0, 0], atol=1e-14)
        self.assertEqual(result.attributes["abs_G"].shape, (25,))

    def test_dual(self):
        result = dual_mesh(Z, 1, Rectangle(-0.5, 0.5, -0.5, 0.5), resolution=2)
        self.assertTrue(result.metadata["dual"])
        self.assertTrue(np.all(np.linalg.norm(result.vertices, axis=1) < 1))

    def test_domain_with_singular_point(self):
        with self.assertRaises(PathError):
            mesh(_o23_a(), domain=Rectangle(0, 2, -1, 1), resolution=2)

    def test_annulus_seam(self):
        domain = Annulus(0j, 0.3, 0.45)
        result = mesh(_lift_data(o112()), domain=domain, resolution=2, tolerances=TOLERANCES)
        self.assertEqual(result.vertices.shape, (27, 3))
        self.assertLess(result.metadata["seam_mismatch"], MONODROMY_TOL)

    def test_files(self):
        result = mesh(Z, 1, Rectangle(-0.5, 0.5, -0.5, 0.5), resolution=2)
        with tempfile.TemporaryDirectory() as d:
            obj = Path(d) / "surface.obj"
            result.save(obj)
            lines = obj.read_text(encoding="utf-8").splitlines()
            self.assertEqual(sum(line.startswith("v ") for line in lines), 9)
            self.assertEqual(sum(line.startswith("f ") for line in lines), 8)

            archive = Path(d) / "surface.h5"
            result.save(archive)
            loaded = Mesh.load(archive)
            np.testing.assert_array_equal(loaded.vertices, result.vertices)
            np.testing.assert_array_equal(loaded.faces, result.faces)
            self.assertEqual(loaded.metadata["resolution"], 2)

            with self.assertRaises(ValueError):
                result.save(Path(d) / "surface.ply")
            with self.assertRaises(ValueError):
                Mesh.load(obj)

    def test_domains(self):
        self.assertEqual(domain_from_json({"rectangle": [0, 1, 0, 2]}), Rectangle(0, 1, 0, 2))
        annulus = domain_from_json({"annulus": [1, 0, 0.5, 1]})
        self.assertEqual(annulus, Annulus(1 + 0j, 0.5, 1.0, 0.0))
        with self.assertRaises(ValueError):
            domain_from_json({"disk": [0, 1]})
        with self.assertRaises(ValueError):
            Annulus(0j, 1.0, 0.5)
        with self.assertRaises(ValueError):
            Rectangle(1, 0)


if __name__ == "__main__":
    unittest.main()
