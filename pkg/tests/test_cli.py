"""Test the qparallel command line through click's runner."""

import json
import re
import sys
import unittest
from pathlib import Path

from click.testing import CliRunner

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from qparallel.cli import SWEEP_HEADER, cli  # noqa: E402
from qparallel.flamegraph import SPEEDSCOPE_SCHEMA  # noqa: E402
from qparallel.stdlib import CORPUS_DIR  # noqa: E402

MCX = str(CORPUS_DIR / "mcx.qpl")
ADDER = str(CORPUS_DIR / "controlled_adder.qpl")

# Writing to the fanned control makes the replicas disagree with the serial loop.
DIVERGENT = """
operation Main() : Unit {
    use c = Qubit();
    use ts = Qubit[2];
    parallel for t in ts fanout(c, 2) {
        CNOT(c, t);
        X(c);
    }
}
"""

MEASURED = """
operation Main() : Unit {
    use q = Qubit();
    use r = Qubit();
    H(q);
    if MResetZ(q) == One { X(r); }
}
"""


def depth_of(output):
    match = re.search(r"^depth\s+(\d+)\s*$", output, re.MULTILINE)
    return int(match.group(1)) if match else None


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.runner = CliRunner()

    def invoke(self, *args):
        return self.runner.invoke(cli, list(args))


class TestEstimate(CliTestCase):
    """qparallel estimate."""

    def test_mcx_depths(self):
        """C^8X has t-depth 3 in parallel and 7 with --force-serial."""
        result = self.invoke("estimate", MCX, "--arg", "n=8")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(depth_of(result.output), 3)
        self.assertIn("t-depth", result.output)
        serial = self.invoke("estimate", MCX, "--arg", "n=8", "--force-serial")
        self.assertEqual(depth_of(serial.output), 7)

    def test_full_depth_metric(self):
        """A preset name selects the metric."""
        result = self.invoke("estimate", MCX, "--arg", "n=4", "--metric", "full-depth")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("full-depth", result.output)
        self.assertGreater(depth_of(result.output), 2)

    def test_metric_file(self):
        """A GATE=COST file is accepted in place of a preset."""
        with self.runner.isolated_filesystem():
            Path("heavy.cost").write_text("T=2\nTdg=2\n", encoding="utf-8")
            result = self.invoke("estimate", MCX, "--arg", "n=8", "--metric", "heavy.cost")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(depth_of(result.output), 6)

    def test_exit_codes(self):
        """Configuration, syntax and trace failures map to exit codes 2, 3 and 4."""
        with self.runner.isolated_filesystem():
            Path("broken.qpl").write_text("operation Main( : Unit { }", encoding="utf-8")
            cases = [
                (("estimate", MCX), 2),
                (("estimate", MCX, "--arg", "n=8", "--arg", "m=1"), 2),
                (("estimate", MCX, "--arg", "n=8", "--metric", "wall-clock"), 2),
                (("estimate", "missing.qpl"), 2),
                (("estimate", "broken.qpl"), 3),
                (("estimate", MCX, "--arg", "n=8", "--entry", "Nope"), 2),
                (("estimate", MCX, "--arg", "n=8", "--max-qubits", "4"), 4),
                (("estimate", MCX, "--bogus"), 2),
            ]
            for args, code in cases:
                with self.subTest(args=args):
                    result = self.invoke(*args)
                    self.assertEqual(result.exit_code, code, result.output)
        self.assertIn("error:", self.invoke("estimate", MCX).output)


class TestFlamegraph(CliTestCase):
    """qparallel flamegraph."""

    def test_writes_document(self):
        """The document lands at --output and spans the reported depth."""
        with self.runner.isolated_filesystem():
            result = self.invoke("flamegraph", MCX, "--arg", "n=8", "-o", "mcx.json")
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertIn("depth 3", result.output)
            doc = json.loads(Path("mcx.json").read_text(encoding="utf-8"))
        self.assertEqual(doc["$schema"], SPEEDSCOPE_SCHEMA)
        self.assertEqual(doc["profiles"][0]["endValue"], 3)

    def test_default_output_name(self):
        """Without --output the file is named after the source."""
        with self.runner.isolated_filesystem():
            result = self.invoke("flamegraph", MCX, "--arg", "n=4")
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertTrue(Path("mcx.speedscope.json").is_file())


class TestSimulate(CliTestCase):
    """qparallel simulate."""

    def test_check_parallel_passes(self):
        """The controlled adder keeps its meaning under parallel lowering."""
        result = self.invoke(
            "simulate", ADDER, "--arg", "n=2", "--arg", "k=2", "--check-parallel"
        )
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue(result.output.startswith("PASS"), result.output)
        self.assertIn("over 64 runs", result.output)

    def test_check_parallel_mcx(self):
        """C^3X passes on every basis input of its six-qubit node register."""
        result = self.invoke("simulate", MCX, "--arg", "n=3", "--check-parallel")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertTrue(result.output.startswith("PASS"), result.output)
        self.assertIn("over 128 runs", result.output)

    def test_check_parallel_fails(self):
        """A fanout loop that writes its control is caught with exit code 5."""
        with self.runner.isolated_filesystem():
            Path("divergent.qpl").write_text(DIVERGENT, encoding="utf-8")
            result = self.invoke("simulate", "divergent.qpl", "--check-parallel")
        self.assertEqual(result.exit_code, 5, result.output)
        self.assertIn("FAIL", result.output)

    def test_state_and_measurements(self):
        """A plain run prints the state table and the measurement record."""
        with self.runner.isolated_filesystem():
            Path("measured.qpl").write_text(MEASURED, encoding="utf-8")
            first = self.invoke("simulate", "measured.qpl", "--seed", "3")
            second = self.invoke("simulate", "measured.qpl", "--seed", "3")
        self.assertEqual(first.exit_code, 0, first.output)
        self.assertIn("amplitude", first.output)
        self.assertRegex(first.output, r"measurements: r0=[01]")
        self.assertEqual(first.output, second.output)


class TestSweep(CliTestCase):
    """qparallel sweep."""

    def rows(self, *args):
        result = self.invoke("sweep", *args)
        self.assertEqual(result.exit_code, 0, result.output)
        lines = result.output.strip().splitlines()
        self.assertEqual(lines[0], ",".join(SWEEP_HEADER))
        return [line.split(",") for line in lines[1:]]

    def test_mcx_rows(self):
        """Each size yields a parallel and a serial row in order."""
        rows = self.rows("mcx", "--sizes", "4,8")
        self.assertEqual(
            rows,
            [
                ["mcx", "4", "parallel", "cutoff=2", "2", "12", "10"],
                ["mcx", "4", "serial", "cutoff=0", "3", "12", "9"],
                ["mcx", "8", "parallel", "cutoff=3", "3", "28", "20"],
                ["mcx", "8", "serial", "cutoff=0", "7", "28", "17"],
            ],
        )

    def test_jobs_keep_order(self):
        """Concurrent rows come out in the same order as sequential ones."""
        args = ("controlled-rz", "--sizes", "2,3,4,5")
        self.assertEqual(self.rows(*args, "--jobs", "4"), self.rows(*args))

    def test_cutoffs_and_registers(self):
        """--cutoff expands parallel mcx rows and --q expands givens rows."""
        rows = self.rows("mcx", "--sizes", "8", "--cutoff", "0,3", "--modes", "parallel")
        self.assertEqual([(r[3], r[4]) for r in rows], [("cutoff=0", "7"), ("cutoff=3", "3")])
        rows = self.rows("givens", "--sizes", "4", "--q", "1,2", "--bitwidth", "2")
        self.assertEqual([r[3] for r in rows], ["q=1;bitwidth=2", "q=2;bitwidth=2"] * 2)
        parallel = [int(r[4]) for r in rows if r[2] == "parallel"]
        self.assertEqual(parallel[0], 2 * parallel[1])

    def test_bad_sweeps(self):
        """Out-of-range cutoffs and missing sizes are usage errors."""
        self.assertEqual(self.invoke("sweep", "mcx", "--sizes", "4", "--cutoff", "5").exit_code, 2)
        self.assertEqual(self.invoke("sweep", "mcx").exit_code, 2)
        self.assertEqual(self.invoke("sweep", "mcx", "--sizes", "four").exit_code, 2)


class TestExamples(CliTestCase):
    """qparallel examples."""

    def test_listing(self):
        """Programs are listed with their classical entry points."""
        result = self.invoke("examples")
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn("Main(n)", result.output)
        self.assertIn("ApplyRotations(n)", result.output)

    def test_write(self):
        """--write copies the corpus and the generated samples."""
        with self.runner.isolated_filesystem():
            result = self.invoke("examples", "--write", "corpus")
            self.assertEqual(result.exit_code, 0, result.output)
            self.assertTrue(Path("corpus/mcx.qpl").is_file())
            self.assertTrue(Path("corpus/cla_adder_4_parallel.qpl").is_file())


if __name__ == "__main__":
    unittest.main()
