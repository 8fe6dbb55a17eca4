import io
import json
import tempfile
import unittest
from contextlib import redirect_stdout
from pathlib import Path

from sbrp.cli.sbrp import GENERIC_ERROR_RETURN, INFEASIBLE_RETURN, build_parser, main
from sbrp.model import CostModel, Instance, Student, dump_instance
from sbrp.utilities import data_file_path

TINY = str(data_file_path("samples/tiny.json"))

def run(argv) -> tuple[int, str]:
    out = io.StringIO()
    with redirect_stdout(out):
        code = main(argv)
    return code, out.getvalue()

class TestCli(unittest.TestCase):
    def test_parser_requires_command(self):
        with self.assertRaises(SystemExit):
            with redirect_stdout(io.StringIO()):
                build_parser().parse_args([])

    def test_solve_table(self):
        code, out = run(["solve", TINY, "--exact-tsp"])
        self.assertEqual(code, 0)
        self.assertIn("objective", out)
        self.assertIn("optimal", out)

    def test_solve_emits_json(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp, "tiny.json")
            code, _ = run(["solve", TINY, "--beta", "2", "--emit", f"json:{path}", "--timings"])
            self.assertEqual(code, 0)
            data = json.loads(path.read_text())
        self.assertEqual(data["instance"], "tiny")
        self.assertEqual(data["diagnostics"]["beta"], 2.0)
        self.assertIn("runtimes", data["diagnostics"])

    def test_oracle(self):
        code, out = run(["oracle", TINY, "--emit", "json"])
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)["diagnostics"]["compressed"], False)

    def test_infeasible_exit_code(self):
        points = {"school": (0.0, 0.0), "h1": (10.0, 0.0), "h2": (-10.0, 0.0)}
        students = (Student("s1", "h1", 1.0, False), Student("s2", "h2", 1.0, False))
        inst = Instance(name="fleet", students=students, candidate_stops=(), school="school", depot="school",
                        cost=CostModel(5.0, 1.0, {}), capacity=4, t_max=15.0, fleet_limit=1,
                        stop_delay=(0.0, 0.0), points=points)
        with tempfile.TemporaryDirectory() as tmp:
            path = dump_instance(inst, Path(tmp, "fleet.json"))
            code, out = run(["solve", str(path), "--no-compress"])
        self.assertEqual(code, INFEASIBLE_RETURN)
        self.assertIn("Infeasible", out)

    def test_errors(self):
        code, out = run(["solve", "missing.json"])
        self.assertEqual(code, GENERIC_ERROR_RETURN)
        code, out = run(["solve", TINY, "--format", "xml"])
        self.assertEqual(code, GENERIC_ERROR_RETURN)
        code, out = run(["solve", TINY, "--beta", "0.5"])
        self.assertEqual(code, GENERIC_ERROR_RETURN)
        self.assertIn("beta", out)

    def test_sweep(self):
        code, out = run(["sweep", TINY, "--param", "gamma", "--grid", "0,0.3"])
        self.assertEqual(code, 0)
        self.assertEqual(len(out.splitlines()), 3)

if __name__ == '__main__':
    unittest.main()
