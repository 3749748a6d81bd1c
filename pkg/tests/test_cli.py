import json
import math
import tempfile
import unittest
from pathlib import Path

from cmc_census.census import o112
from cmc_census.cli import (
    EXIT_ERROR,
    EXIT_NONEXISTENT,
    EXIT_OK,
    RunConfig,
    dumps,
    parse_domain,
    run,
)
from cmc_census.lift import Annulus, Rectangle


class TestCLI(unittest.TestCase):
    def setUp(self):
        self._dir = tempfile.TemporaryDirectory()
        self.dir = Path(self._dir.name)
        self.spec = self.dir / "o112.json"
        self.spec.write_text(json.dumps(o112().spec.to_json()), encoding="utf-8")

    def tearDown(self):
        self._dir.cleanup()

    def _run(self, *argv):
        out = self.dir / "out.json"
        code = run([*argv, "--out", str(out)])
        return code, out

    def test_census_nonexistent(self):
        code, out = self._run("census", "o13")
        self.assertEqual(code, EXIT_NONEXISTENT)
        document = json.loads(out.read_text(encoding="utf-8"))
        self.assertEqual(document["subcommand"], "census")
        self.assertEqual(document["records"][0]["verdict"], "nonexistent")

    def test_census_verified(self):
        code, out = self._run("census", "o112")
        self.assertEqual(code, EXIT_OK)
        record = json.loads(out.read_text(encoding="utf-8"))["records"][0]
        self.assertEqual(record["verdict"], "verified")
        self.assertEqual(record["params"], {"theta": "-2"})

    def test_census_errors(self):
        self.assertEqual(self._run("census", "o23_a", "--param", "theta=-2")[0], EXIT_ERROR)
        self.assertEqual(self._run("census", "o23_a", "--param", "theta")[0], EXIT_ERROR)
        self.assertEqual(self._run("census", "o99")[0], EXIT_ERROR)

    def test_analyze(self):
        code, out = self._run("analyze", str(self.spec))
        self.assertEqual(code, EXIT_OK)
        document = json.loads(out.read_text(encoding="utf-8"))
        self.assertEqual(document["spec_hash"], o112().spec.spec_hash())
        self.assertEqual(len(document["ends"]), 3)
        self.assertEqual(document["umbilics"], [])

    def test_analyze_invalid_spec(self):
        broken = self.dir / "broken.json"
        broken.write_text("{", encoding="utf-8")
        self.assertEqual(self._run("analyze", str(broken))[0], EXIT_ERROR)
        self.assertEqual(self._run("analyze", str(self.dir / "nope.json"))[0], EXIT_ERROR)

    def test_frobenius(self):
        code, out = self._run("frobenius", str(self.spec), "--end", "0")
        self.assertEqual(code, EXIT_OK)
        document = json.loads(out.read_text(encoding="utf-8"))
        self.assertEqual(document["form"], "E0")
        self.assertEqual(len(document["reports"]), 1)

    def test_mesh_obj(self):
        out = self.dir / "surface.obj"
        argv = ["mesh", str(self.spec), "--domain", "rect:0.2,0.4,0.2,0.4"]
        code = run([*argv, "--res", "2", "--format", "obj", "--out", str(out)])
        self.assertEqual(code, EXIT_OK)
        lines = out.read_text(encoding="utf-8").splitlines()
        self.assertEqual(sum(line.startswith("v ") for line in lines), 9)

    def test_mesh_through_singular_point(self):
        argv = ["mesh", str(self.spec), "--domain", "rect:-0.5,0.5,-0.5,0.5"]
        self.assertEqual(self._run(*argv, "--res", "2")[0], EXIT_ERROR)

    def test_periods(self):
        code, out = self._run("periods", "o33", "--a", "1/2")
        self.assertEqual(code, EXIT_OK)
        document = json.loads(out.read_text(encoding="utf-8"))
        self.assertEqual(document["problem"], "o33")
        self.assertIn("jacobian", document)
        self.assertEqual(self._run("periods", "o33", "--a", "-1")[0], EXIT_ERROR)


class TestConfig(unittest.TestCase):
    def test_tolerances(self):
        with self.assertRaises(ValueError):
            RunConfig("census", tol_int=0)
        with self.assertRaises(ValueError):
            RunConfig("plot")
        config = RunConfig("monodromy", tol_int=1e-9, tol_mono=1e-4)
        self.assertEqual(config.tolerances.integration, 1e-9)
        self.assertEqual(config.tolerances.monodromy, 1e-4)

    def test_parse_domain(self):
        self.assertEqual(parse_domain("rect:0,1,0,2"), Rectangle(0, 1, 0, 2))
        self.assertEqual(
            parse_domain("annulus:1,0,0.5,1", cut=0.25),
            Annulus(1 + 0j, 0.5, 1.0, 0.25),
        )
        with self.assertRaises(ValueError):
            parse_domain("rect:0,1")
        with self.assertRaises(ValueError):
            parse_domain("disk:0,0,1")

    def test_dumps(self):
        text = dumps({"b": 1 + 2j, "a": [math.nan, 0.1]})
        self.assertEqual(json.loads(text), {"a": [None, 0.1], "b": [1.0, 2.0]})
        self.assertLess(text.index('"a"'), text.index('"b"'))


if __name__ == "__main__":
    unittest.main()
