import json
import sys
import unittest
from pathlib import Path

from typer.testing import CliRunner

sys.path.insert(0, str(Path(__file__).parents[1] / "src"))

from autloop.cli import app
from autloop.core.storage import get_workspace, read_manifest
from autloop.core.telemetry import load_runs

runner = CliRunner()

T5 = "5\n0 1 2 3 4\n1 0 3 4 2\n2 3 4 0 1\n3 4 1 2 0\n4 2 0 1 3\n"
SQUARE_ZERO_BETA = '{"format": "beta-v1", "k_dim": 2, "h_dim": 1, "matrices": [[[0, 1], [0, 0]]]}'


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


class TestLieCommands(unittest.TestCase):
    def test_make_validate_props(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["lie", "make", "heisenberg", "-o", "h.lief2"])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertEqual(read_json("h.lief2")["dim"], 3)

            result = runner.invoke(app, ["lie", "validate", "h.lief2"])
            self.assertEqual(result.exit_code, 0, result.output)

            result = runner.invoke(app, ["lie", "props", "h.lief2", "-o", "props.json"])
            self.assertEqual(result.exit_code, 0, result.output)
            report = read_json("props.json")
            self.assertTrue(report["w2"])
            self.assertTrue(report["w2plus"])
            self.assertEqual(report["series"]["lower_central_dims"], [3, 1, 0])
            self.assertEqual(report["classification"]["verdict"], "consistent")

    def test_make_free_nilpotent(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["lie", "make", "free-nilpotent", "--gens", "2", "--class", "3", "-o", "f.lief2"])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertEqual(read_json("f.lief2")["dim"], 5)

    def test_unsupported_params(self):
        result = runner.invoke(app, ["lie", "make", "abelian"])
        self.assertEqual(result.exit_code, 2)

    def test_parse_error_exit_code(self):
        with runner.isolated_filesystem():
            Path("bad.lief2").write_text('{"format": "lief2-v1", "dim": 2, "brackets": [{"i": 1, "j": 0}]}')
            result = runner.invoke(app, ["lie", "validate", "bad.lief2"])
            self.assertEqual(result.exit_code, 2)

    def test_jacobi_failure_exit_code(self):
        with runner.isolated_filesystem():
            Path("j.lief2").write_text(json.dumps({"format": "lief2-v1", "dim": 3, "brackets": [
                {"i": 0, "j": 1, "out": [2]}, {"i": 0, "j": 2, "out": [0]}]}))
            result = runner.invoke(app, ["lie", "validate", "j.lief2"])
            self.assertEqual(result.exit_code, 2)
            self.assertIn("JacobiError", result.output)

    def test_to_loop_w1_violation(self):
        with runner.isolated_filesystem():
            Path("w1.lief2").write_text('{"format": "lief2-v1", "dim": 2, "brackets": [{"i": 0, "j": 1, "out": [1]}]}')
            result = runner.invoke(app, ["lie", "to-loop", "w1.lief2", "-o", "w1.cayley"])
            self.assertEqual(result.exit_code, 2)
            self.assertIn("W1Violation", result.output)
            self.assertFalse(Path("w1.cayley").exists())

    def test_to_loop(self):
        with runner.isolated_filesystem():
            runner.invoke(app, ["lie", "make", "heisenberg", "-o", "h.lief2"])
            result = runner.invoke(app, ["lie", "to-loop", "h.lief2", "-o", "h.cayley"])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertTrue(Path("h.cayley").read_text().startswith("8\n"))
            result = runner.invoke(app, ["loop", "analyze", "h.cayley", "-o", "a.json"])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertTrue(read_json("a.json")["associative"])


class TestLoopCommands(unittest.TestCase):
    def test_t5_not_automorphic(self):
        with runner.isolated_filesystem():
            Path("t5.cayley").write_text(T5)
            result = runner.invoke(app, ["loop", "analyze", "t5.cayley", "--no-split", "-o", "a.json"])
            self.assertEqual(result.exit_code, 1)
            report = read_json("a.json")
            self.assertFalse(report["automorphic"])
            self.assertFalse(report["associative"])

    def test_not_a_loop(self):
        with runner.isolated_filesystem():
            Path("bad.cayley").write_text("2\n0 1\n1 1\n")
            result = runner.invoke(app, ["loop", "analyze", "bad.cayley"])
            self.assertEqual(result.exit_code, 2)

    def test_analyze_reads_lie_and_beta_files(self):
        with runner.isolated_filesystem():
            runner.invoke(app, ["lie", "make", "heisenberg", "-o", "h.lief2"])
            result = runner.invoke(app, ["loop", "analyze", "h.lief2", "--no-split", "-o", "h.json"])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertTrue(read_json("h.json")["associative"])

            Path("b.json").write_text(SQUARE_ZERO_BETA)
            result = runner.invoke(app, ["loop", "analyze", "b.json", "--no-split", "-o", "b.report.json"])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertEqual(read_json("b.report.json")["center"], list(range(8)))

    def test_example2_analyze_and_split(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["construct", "example2", "--m", "2", "--d", "1", "-o", "q.cayley"])
            self.assertEqual(result.exit_code, 0, result.output)

            result = runner.invoke(app, ["loop", "analyze", "q.cayley", "-o", "a.json"])
            self.assertEqual(result.exit_code, 0, result.output)
            report = read_json("a.json")
            self.assertTrue(report["commutative"])
            self.assertTrue(report["exponent2"])
            self.assertFalse(report["associative"])
            self.assertEqual(report["center"], [0])
            self.assertEqual(report["nucleus_middle"], [0, 1, 2, 3])
            self.assertEqual(report["split"], {"K": [0, 1, 2, 3], "H": [0, 4]})

            result = runner.invoke(app, ["loop", "split", "q.cayley", "-o", "s.json"])
            self.assertEqual(result.exit_code, 0, result.output)
            split = read_json("s.json")
            self.assertTrue(split["splits"])
            self.assertEqual(split["H"], [0, 4])
            self.assertEqual(split["phi"]["0,4"], [0, 1, 2, 3])

    def test_nonsplit_exit_code(self):
        with runner.isolated_filesystem():
            runner.invoke(app, ["lie", "make", "free-nilpotent", "--gens", "2", "--class", "3", "-o", "f.lief2"])
            runner.invoke(app, ["lie", "to-loop", "f.lief2", "-o", "f.cayley"])
            result = runner.invoke(app, ["loop", "split", "f.cayley", "-o", "s.json"])
            self.assertEqual(result.exit_code, 1)
            self.assertFalse(read_json("s.json")["splits"])


class TestConstructCommands(unittest.TestCase):
    def test_beta(self):
        with runner.isolated_filesystem():
            Path("b.json").write_text(SQUARE_ZERO_BETA)
            result = runner.invoke(app, ["construct", "beta", "b.json", "-o", "b.cayley"])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertTrue(Path("b.cayley").read_text().startswith("8\n"))

    def test_non_commuting_beta(self):
        with runner.isolated_filesystem():
            Path("b.json").write_text(json.dumps({"format": "beta-v1", "k_dim": 2, "h_dim": 2,
                                                  "matrices": [[[0, 1], [0, 0]], [[0, 0], [1, 0]]]}))
            result = runner.invoke(app, ["construct", "beta", "b.json"])
            self.assertEqual(result.exit_code, 2)

    def test_example1(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["construct", "example1", "--m", "2", "--delta", "2", "-o", "e1.cayley"])
            self.assertEqual(result.exit_code, 0, result.output)
            runner.invoke(app, ["construct", "example2", "--m", "2", "--d", "1", "-o", "e2.cayley"])
            self.assertEqual(Path("e1.cayley").read_text(), Path("e2.cayley").read_text())
            result = runner.invoke(app, ["construct", "example1", "--m", "2", "--delta", "1"])
            self.assertEqual(result.exit_code, 2)
            result = runner.invoke(app, ["construct", "example1", "--m", "2", "--delta", "x"])
            self.assertEqual(result.exit_code, 2)

    def test_bad_subfield(self):
        result = runner.invoke(app, ["construct", "example2", "--m", "4", "--d", "3"])
        self.assertEqual(result.exit_code, 2)

    def test_horajed(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["construct", "horajed", "--seed", "1", "-o", "hj.cayley"])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertTrue(Path("hj.cayley").read_text().startswith("8\n"))
            alias = runner.invoke(app, ["construct", "fixed-vector", "--seed", "1", "-o", "fv.cayley"])
            self.assertEqual(alias.exit_code, 0, alias.output)
            self.assertEqual(Path("fv.cayley").read_text(), Path("hj.cayley").read_text())


class TestScanCommands(unittest.TestCase):
    def test_problem1(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["scan", "problem1", "--dim", "3", "--exhaustive", "--jobs", "1", "-o", "p.json"])
            self.assertEqual(result.exit_code, 0, result.output)
            report = read_json("p.json")
            self.assertEqual(report["candidates"], 2)
            self.assertEqual(report["counterexamples"], [])

    def test_problem1_range_and_table(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["scan", "problem1", "--dim", "3..4", "--exhaustive", "--jobs", "1",
                                         "--table", "rows.csv", "-o", "p.json"])
            self.assertEqual(result.exit_code, 0, result.output)
            reports = read_json("p.json")
            self.assertEqual([r["jacobi_passed"] for r in reports], [2, 16])
            lines = Path("rows.csv").read_text().strip().splitlines()
            self.assertEqual(lines[0], "pattern,dim,w2,w2plus,w2minus,verdict,skipped")
            self.assertEqual(len(lines), 1 + 2 + 16)

    def test_sampled_warns_on_missed_branch(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["scan", "problem1", "--dim", "3", "--samples", "20", "--seed", "0",
                                         "--jobs", "1", "-o", "p.json"])
            self.assertEqual(result.exit_code, 0, result.output)
            text = " ".join(result.output.split())
            self.assertIn("no sampled algebra with w2=false", text)
            self.assertNotIn("no sampled algebra with w2=true", text)
            self.assertNotIn("nothing was classified", text)

    def test_sampled_warns_when_nothing_classified(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["scan", "problem1", "--dim", "8", "--samples", "200", "--seed", "0",
                                         "--jobs", "1", "-o", "p.json"])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertEqual(read_json("p.json")["jacobi_passed"], 0)
            text = " ".join(result.output.split())
            self.assertIn("nothing was classified", text)
            self.assertIn("no sampled algebra with w2=true", text)
            self.assertIn("no sampled algebra with w2=false", text)

    def test_mode_required(self):
        result = runner.invoke(app, ["scan", "problem1", "--dim", "3"])
        self.assertEqual(result.exit_code, 2)
        result = runner.invoke(app, ["scan", "problem1", "--dim", "3", "--exhaustive", "--samples", "4"])
        self.assertEqual(result.exit_code, 2)

    def test_bad_dims(self):
        result = runner.invoke(app, ["scan", "problem1", "--dim", "5..3", "--exhaustive"])
        self.assertEqual(result.exit_code, 2)

    def test_dim_too_large(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["scan", "problem1", "--dim", "7", "--exhaustive"])
            self.assertEqual(result.exit_code, 2)

    def test_nonsplit_small(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["scan", "nonsplit", "--dim", "2..3", "--exhaustive", "--jobs", "1", "-o", "n.json"])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertEqual([r["witnesses"] for r in read_json("n.json")], [[], []])

    def test_coverage(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["scan", "coverage", "--dim", "3", "-o", "c.json"])
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertEqual(read_json("c.json")["uncovered"], [])
        result = runner.invoke(app, ["scan", "coverage", "--dim", "5"])
        self.assertEqual(result.exit_code, 2)


class TestWorkspaceCommands(unittest.TestCase):
    def test_init_status_records_runs(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["init"])
            self.assertEqual(result.exit_code, 0, result.output)
            ws = get_workspace(Path.cwd())
            self.assertTrue(ws.is_valid())
            self.assertTrue(ws.config_path.exists())

            runner.invoke(app, ["lie", "make", "heisenberg", "-o", "h.lief2"])
            runner.invoke(app, ["lie", "validate", "h.lief2"])
            runner.invoke(app, ["scan", "problem1", "--dim", "3", "--exhaustive", "--jobs", "1", "-o", "p.json"])
            self.assertEqual([e.event for e in read_manifest(ws)], ["lie.validate"])
            runs = load_runs(ws)
            self.assertEqual(len(runs), 1)
            self.assertEqual(runs[0].dims, [3])
            self.assertEqual(runs[0].candidates, 2)

            result = runner.invoke(app, ["status"])
            self.assertEqual(result.exit_code, 0, result.output)

    def test_status_outside_workspace(self):
        with runner.isolated_filesystem():
            result = runner.invoke(app, ["status"])
            self.assertEqual(result.exit_code, 1)
            self.assertIn("autloop init", result.output)

    def test_doctor(self):
        result = runner.invoke(app, ["doctor"])
        self.assertEqual(result.exit_code, 0, result.output)


if __name__ == '__main__':
    unittest.main()
