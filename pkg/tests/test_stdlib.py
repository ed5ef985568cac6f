"""Test the circuit generators against their depth, count and width laws."""

import math
import sys
import tempfile
import unittest
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import qparallel  # noqa: E402
from qparallel.core.ir import count_gates, t_like, validate_trace  # noqa: E402
from qparallel.core.scheduler import schedule, t_depth_metric  # noqa: E402
from qparallel.errors import ConfigError  # noqa: E402
from qparallel.parser import parse  # noqa: E402
from qparallel.stdlib import (  # noqa: E402
    AND_GATE,
    CLA_ADDER,
    CONTROLLED_ADDER,
    CONTROLLED_RZ,
    FAMILIES,
    FANOUT_DEMO,
    GIVENS,
    MCX,
    PARALLEL,
    RIPPLE_ADDER,
    SAMPLES,
    SERIAL,
    CircuitSpec,
    build,
    corpus_programs,
    gen_mcx,
    qubit_width,
    sample_name,
    trace_circuit,
    write_corpus,
)


def t_depth(spec, serial=False):
    return schedule(trace_circuit(spec, serial=serial), t_depth_metric()).depth


class TestGadgets(unittest.TestCase):
    """AND gadget and controlled rotations."""

    def test_and_costs(self):
        """Compute is four T gates in one layer; uncompute has no T gates."""
        compute = trace_circuit(CircuitSpec(AND_GATE, variant="compute"))
        self.assertEqual(count_gates(compute, t_like), 4)
        self.assertEqual(schedule(compute, t_depth_metric()).depth, 1)
        uncompute = trace_circuit(CircuitSpec(AND_GATE, variant="uncompute"))
        self.assertEqual(count_gates(uncompute, t_like), 0)
        self.assertEqual(schedule(uncompute, t_depth_metric()).depth, 0)

    def test_controlled_rotations_depth(self):
        """Eight rotations take one layer with private helpers and eight with a shared one."""
        self.assertEqual(t_depth(CircuitSpec(CONTROLLED_RZ, 8)), 1)
        self.assertEqual(t_depth(CircuitSpec(CONTROLLED_RZ, 8, SERIAL)), 8)


class TestMcx(unittest.TestCase):
    """Multi-controlled NOT."""

    def test_depth_law(self):
        """Parallel t-depth is ceil(log2 n) and serial t-depth is n - 1."""
        for n in (2, 3, 4, 5, 8, 16, 32, 64):
            with self.subTest(n=n):
                self.assertEqual(t_depth(CircuitSpec(MCX, n)), math.ceil(math.log2(n)))
                self.assertEqual(t_depth(CircuitSpec(MCX, n, SERIAL)), n - 1)

    def test_t_count(self):
        """The T-count is 4 (n - 1) in either mode."""
        for mode in (PARALLEL, SERIAL):
            with self.subTest(mode=mode):
                trace = trace_circuit(CircuitSpec(MCX, 8, mode))
                self.assertEqual(count_gates(trace, t_like), 28)

    def test_width(self):
        """Serial keeps one AND helper live; parallel keeps one per first-layer AND."""
        self.assertEqual(qubit_width(CircuitSpec(MCX, 8, SERIAL)), 17)
        self.assertEqual(qubit_width(CircuitSpec(MCX, 8)), 20)

    def test_cutoff_trades_depth(self):
        """Raising the cutoff never deepens the circuit, from n - 1 down to ceil(log2 n)."""
        depths = [t_depth(CircuitSpec(MCX, 8, cutoff=c)) for c in range(4)]
        self.assertEqual(depths[0], 7)
        self.assertEqual(depths[-1], 3)
        for shallower, deeper in zip(depths[1:], depths):
            self.assertLessEqual(shallower, deeper)
        self.assertEqual(CircuitSpec(MCX, 8, cutoff=2).extras(), "cutoff=2")
        self.assertEqual(CircuitSpec(MCX, 8, SERIAL).extras(), "cutoff=0")

    def test_serial_flag_matches_serial_source(self):
        """Tracing the parallel source serially gives the serial depth."""
        spec = CircuitSpec(MCX, 8)
        self.assertEqual(t_depth(spec, serial=True), t_depth(CircuitSpec(MCX, 8, SERIAL)))

    def test_invalid_parameters(self):
        """Out-of-range cutoffs and too few controls are configuration errors."""
        for kwargs in ({"n": 1}, {"n": 8, "cutoff": 4}, {"n": 8, "cutoff": -1}):
            with self.subTest(**kwargs):
                with self.assertRaises(ConfigError):
                    gen_mcx(**kwargs)


class TestAdders(unittest.TestCase):
    """Carry-lookahead scaling and Givens chunking."""

    def test_carry_lookahead_scaling(self):
        """Parallel depth grows concavely while serial depth roughly doubles per doubling."""
        sizes = (4, 8, 16, 32)
        parallel = {n: t_depth(CircuitSpec(CLA_ADDER, n)) for n in sizes}
        serial = {n: t_depth(CircuitSpec(CLA_ADDER, n, SERIAL)) for n in sizes}
        for small, large in zip(sizes, sizes[1:]):
            with self.subTest(n=large):
                self.assertGreaterEqual(serial[large] / serial[small], 1.8)
                self.assertLessEqual(parallel[large], serial[large])
        for a, b, c in zip(sizes, sizes[1:], sizes[2:]):
            with self.subTest(n=c):
                self.assertLessEqual(parallel[c] - parallel[b], parallel[b] - parallel[a] + 2)

    def test_ripple_is_linear(self):
        """The ripple adder has one AND per carry in sequence."""
        trace = trace_circuit(CircuitSpec(RIPPLE_ADDER, 6))
        self.assertEqual(count_gates(trace, t_like), 4 * 5)
        self.assertEqual(schedule(trace, t_depth_metric()).depth, 5)

    def test_givens_chunking(self):
        """Parallel depth is ceil(N / q) single-adder depths; serial depth ignores q."""
        single = t_depth(CircuitSpec(GIVENS, 1, bitwidth=4))
        serial = set()
        for q in (1, 2, 4, 3):
            with self.subTest(q=q):
                spec = CircuitSpec(GIVENS, 8, bitwidth=4, q=q)
                self.assertEqual(t_depth(spec), math.ceil(8 / q) * single)
                serial.add(t_depth(CircuitSpec(GIVENS, 8, SERIAL, bitwidth=4, q=q)))
        self.assertEqual(serial, {8 * single})

    def test_controlled_adder_extras(self):
        """Fanout families report their replica count."""
        self.assertEqual(CircuitSpec(CONTROLLED_ADDER, 3, k=4).extras(), "k=4")
        self.assertEqual(CircuitSpec(GIVENS, 3, q=2, bitwidth=8).extras(), "q=2;bitwidth=8")
        with self.assertRaises(ConfigError):
            CircuitSpec(FANOUT_DEMO, 3, k=0).validate()
        with self.assertRaises(ConfigError):
            CircuitSpec(GIVENS, 3, q=0).validate()


class TestCatalogue(unittest.TestCase):
    """build, corpus and samples."""

    def test_every_family_builds_a_valid_trace(self):
        """Each family at a small size parses, traces and validates."""
        for family in FAMILIES:
            spec = CircuitSpec(family, 3, bitwidth=3)
            with self.subTest(family=family):
                source, entry, args = build(spec)
                self.assertIn(f"operation {entry}(", source)
                self.assertEqual(validate_trace(trace_circuit(spec)), [])
        with self.assertRaisesRegex(ConfigError, "unknown family"):
            build(CircuitSpec("toffoli-ladder", 3))
        with self.assertRaisesRegex(ConfigError, "unknown mode"):
            build(CircuitSpec(MCX, 3, "eager"))

    def test_corpus_and_samples_parse(self):
        """Shipped programs and generated samples are valid QPL."""
        programs = corpus_programs()
        self.assertEqual(
            sorted(programs),
            ["and_gate", "controlled_adder", "controlled_rz", "fanout", "mcx", "ripple_adder"],
        )
        for name, text in programs.items():
            with self.subTest(program=name):
                self.assertTrue(parse(text).operations)
        for spec in SAMPLES:
            with self.subTest(sample=sample_name(spec)):
                parse(build(spec)[0])

    def test_write_corpus(self):
        """Writing the corpus produces one file per program and sample."""
        with tempfile.TemporaryDirectory() as tmp:
            written = write_corpus(Path(tmp) / "out")
            names = {path.name for path in written}
            self.assertEqual(len(written), len(corpus_programs()) + len(SAMPLES))
            self.assertIn("mcx.qpl", names)
            self.assertIn("mcx_8_serial.qpl", names)
            for path in written:
                self.assertTrue(path.is_file())


class TestPackage(unittest.TestCase):
    """Top-level convenience API."""

    def test_estimate(self):
        """qparallel.estimate traces the entry and returns its depth."""
        source = qparallel.corpus_programs()["mcx"]
        self.assertEqual(qparallel.estimate(source, n=8), 3)
        self.assertGreater(qparallel.estimate(source, metric=qparallel.FULL_DEPTH, n=8), 3)
        self.assertEqual(qparallel.__version__, "0.1.0")


if __name__ == "__main__":
    unittest.main()
