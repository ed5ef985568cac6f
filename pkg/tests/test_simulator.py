"""Test the statevector simulator and the parallel/serial equivalence check."""

import cmath
import itertools
import random
import sys
import unittest
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from qparallel.core.ir import Gate, Instruction, Op, Trace, gate, invert_gates  # noqa: E402
from qparallel.errors import SimulationError  # noqa: E402
from qparallel.lowering import expand_fanout_gates, trace_program  # noqa: E402
from qparallel.parser import parse  # noqa: E402
from qparallel.simulator import (  # noqa: E402
    MAX_SLOTS,
    basis_index,
    equivalent,
    input_qubits,
    read_register,
    run,
    slots_for,
)
from qparallel.stdlib import (  # noqa: E402
    CLA_ADDER,
    CONTROLLED_ADDER,
    FANOUT_DEMO,
    MCX,
    SERIAL,
    CircuitSpec,
    corpus_programs,
    gen_controlled_rz,
    trace_circuit,
)


def lower(source, entry="Main", args=None, serial=False):
    return trace_program(parse(source), entry, args, serial=serial)


def run_inputs(trace, bits, seed=0):
    registers = input_qubits(trace)
    inputs = dict(zip(registers, bits))
    return run(trace, slots_for(trace), seed=seed, inputs=inputs)


class TestBasics(unittest.TestCase):
    """Gate application, slots and measurement."""

    def test_bell_pair(self):
        """H then CNOT leaves equal weight on |00> and |11>."""
        trace = lower(
            "operation Main() : Unit { use a = Qubit(); use b = Qubit(); H(a); CNOT(a, b); }"
        )
        state = run(trace, 2).state
        expected = np.array([1, 0, 0, 1]) / np.sqrt(2)
        np.testing.assert_allclose(state, expected, atol=1e-12)
        self.assertIsNone(basis_index(state))

    def test_measurement_is_seeded_and_resets(self):
        """Equal seeds give equal outcomes and the measured qubit ends in |0>."""
        trace = lower(
            """
            operation Main() : Unit {
                use q = Qubit();
                use r = Qubit();
                for i in 1..8 {
                    H(q);
                    if MResetZ(q) == One { X(r); }
                    X(r);
                }
            }
            """
        )
        first = run(trace, 2, seed=5)
        second = run(trace, 2, seed=5)
        self.assertEqual(first.outcomes, second.outcomes)
        self.assertEqual(len(first.outcomes), 8)
        index = basis_index(first.state)
        self.assertIsNotNone(index)
        self.assertEqual(index & 1, 0)
        flips = sum(first.outcomes.values()) + 8
        self.assertEqual((index >> 1) & 1, flips % 2)

    def test_dirty_helper_is_caught(self):
        """A helper released in |1> fails the clean-release check."""
        source = """
        operation F() : Unit { use h = Qubit(); X(h); }
        operation Main() : Unit { use q = Qubit(); F(); }
        """
        trace = lower(source)
        with self.assertRaisesRegex(SimulationError, "not clean at Release"):
            run(trace, 2)
        run(trace, 2, check_release=False)

    def test_slot_budget(self):
        """Too many slots, or too few for the live qubits, raise SimulationError."""
        trace = lower("operation Main() : Unit { use qs = Qubit[3]; H(qs[2]); }")
        with self.assertRaisesRegex(SimulationError, "slot budget"):
            run(trace, MAX_SLOTS + 1)
        with self.assertRaisesRegex(SimulationError, "no free slot"):
            run(trace, 2)

    def test_released_slots_are_reused(self):
        """Finished helpers give their slot back, so slots_for counts live qubits only."""
        trace = lower(
            """
            operation F(q : Qubit) : Unit { use h = Qubit(); CNOT(q, h); CNOT(q, h); }
            operation Main() : Unit {
                use a = Qubit();
                use b = Qubit();
                parallel sections { section { F(a); } section { F(b); } }
            }
            """
        )
        self.assertEqual(slots_for(trace), 3)
        self.assertEqual(trace.high_watermark, 4)
        run(trace, 3)

    def test_read_register(self):
        """Registers are read least significant slot first."""
        self.assertEqual(read_register(0b1010, [1, 3]), 3)
        self.assertEqual(read_register(0b1010, [3, 2, 1]), 0b101)


class TestGadgets(unittest.TestCase):
    """Functional behavior of the corpus gadgets."""

    def test_and_gadget_truth_table(self):
        """And writes a AND b into a clean target, and RoundTrip restores it."""
        source = corpus_programs()["and_gate"]
        compute = lower(source, "Compute")
        roundtrip = lower(source, "RoundTrip")
        for a, b in itertools.product((0, 1), repeat=2):
            with self.subTest(a=a, b=b):
                result = run_inputs(compute, (a, b, 0))
                a_id, b_id, t_id = input_qubits(compute)
                self.assertEqual(result.read([a_id, b_id, t_id]), a + 2 * b + 4 * (a & b))
                for seed in range(4):
                    restored = run_inputs(roundtrip, (a, b, 0), seed=seed)
                    self.assertEqual(restored.read(input_qubits(roundtrip)), a + 2 * b)

    def test_controlled_rz_is_controlled_phase(self):
        """The Fredkin construction equals CPhase(angle) up to a global phase."""
        angle = 0.7
        trace = lower(gen_controlled_rz(), "RotateOnce", {"angle": angle})
        phases = {}
        for control, target in itertools.product((0, 1), repeat=2):
            result = run_inputs(trace, (control, target))
            index = basis_index(result.state)
            self.assertIsNotNone(index)
            self.assertEqual(result.read(input_qubits(trace)), control + 2 * target)
            phases[(control, target)] = result.state[index]
        reference = phases[(0, 0)]
        for key, amplitude in phases.items():
            expected = cmath.exp(1j * angle) if key == (1, 1) else 1
            with self.subTest(inputs=key):
                self.assertAlmostEqual(amplitude / reference, expected, places=9)

    def test_mcx_flips_only_on_all_ones(self):
        """C^4X toggles the target exactly when every control is set."""
        for mode in ("parallel", SERIAL):
            trace = trace_circuit(CircuitSpec(MCX, 4, mode))
            registers = input_qubits(trace)
            for bits in itertools.product((0, 1), repeat=5):
                with self.subTest(mode=mode, bits=bits):
                    result = run_inputs(trace, bits, seed=sum(bits))
                    controls = sum(bit << i for i, bit in enumerate(bits[:4]))
                    target = bits[4] ^ int(all(bits[:4]))
                    self.assertEqual(result.read(registers), controls + (target << 4))

    def test_carry_lookahead_adds(self):
        """Three-bit carry-lookahead addition is correct on all 64 inputs in both modes."""
        for mode in ("parallel", SERIAL):
            trace = trace_circuit(CircuitSpec(CLA_ADDER, 3, mode))
            registers = input_qubits(trace)
            a_ids, b_ids = registers[:3], registers[3:]
            for x, y in itertools.product(range(8), repeat=2):
                bits = [(x >> i) & 1 for i in range(3)] + [(y >> i) & 1 for i in range(3)]
                with self.subTest(mode=mode, a=x, b=y):
                    result = run_inputs(trace, bits, seed=x * 8 + y)
                    self.assertEqual(result.read(a_ids), x)
                    self.assertEqual(result.read(b_ids), (x + y) % 8)

    def test_controlled_adder(self):
        """Two-bit controlled addition only adds when the control is set."""
        trace = trace_circuit(CircuitSpec(CONTROLLED_ADDER, 2, k=2))
        registers = input_qubits(trace)
        ctl, a_ids, b_ids = registers[0], registers[1:3], registers[3:5]
        for c, x, y in itertools.product((0, 1), range(4), range(4)):
            bits = [c] + [(x >> i) & 1 for i in range(2)] + [(y >> i) & 1 for i in range(2)]
            with self.subTest(ctl=c, a=x, b=y):
                result = run_inputs(trace, bits)
                self.assertEqual(result.read([ctl]), c)
                self.assertEqual(result.read(a_ids), x)
                self.assertEqual(result.read(b_ids), (y + c * x) % 4)


class TestEquivalence(unittest.TestCase):
    """Parallel and serial lowerings agree on every basis input."""

    def test_corpus_programs(self):
        """Corpus programs are equivalent across lowering modes."""
        programs = corpus_programs()
        runs = {
            "mcx": ("Main", {"n": 4}),
            "fanout": ("Main", {"n": 3, "k": 2}),
            "controlled_rz": ("ApplyRotations", {"n": 3}),
            "controlled_adder": ("Main", {"n": 2, "k": 2}),
        }
        for name, (entry, args) in runs.items():
            with self.subTest(program=name):
                ast = parse(programs[name])
                parallel = trace_program(ast, entry, args)
                serial = trace_program(ast, entry, args, serial=True)
                verdict = equivalent(parallel, serial)
                self.assertTrue(verdict.equivalent, verdict)
                self.assertGreater(verdict.inputs_checked, 0)

    def test_generated_circuits(self):
        """Generated parallel circuits match their serial counterparts."""
        for spec in (CircuitSpec(CLA_ADDER, 2), CircuitSpec(FANOUT_DEMO, 3, k=3)):
            with self.subTest(family=spec.family):
                verdict = equivalent(trace_circuit(spec), trace_circuit(spec, serial=True))
                self.assertTrue(verdict.equivalent, verdict)

    def test_three_bit_carry_lookahead(self):
        """The three-bit carry-lookahead adder agrees with its serial lowering on all inputs."""
        spec = CircuitSpec(CLA_ADDER, 3)
        verdict = equivalent(trace_circuit(spec), trace_circuit(spec, serial=True))
        self.assertTrue(verdict.equivalent, verdict)
        self.assertEqual(verdict.inputs_checked, 2**6 * 2)

    def test_difference_is_detected(self):
        """An extra T gate is a real difference, not a global phase."""
        left = lower("operation Main() : Unit { use q = Qubit(); H(q); }")
        right = lower("operation Main() : Unit { use q = Qubit(); H(q); T(q); }")
        verdict = equivalent(left, right)
        self.assertFalse(verdict.equivalent)
        self.assertGreater(verdict.max_deviation, 0.1)
        self.assertEqual(verdict.inputs_checked, 4)

    def test_global_phase_is_ignored(self):
        """Z X Z X is -I, which is equivalent to doing nothing."""
        left = lower("operation Main() : Unit { use q = Qubit(); H(q); }")
        right = lower(
            "operation Main() : Unit { use q = Qubit(); Z(q); X(q); Z(q); X(q); H(q); }"
        )
        self.assertTrue(equivalent(left, right).equivalent)

    def test_register_mismatch(self):
        """Traces with different entry registers cannot be compared."""
        left = lower("operation Main() : Unit { use q = Qubit(); }")
        right = lower("operation Main() : Unit { use qs = Qubit[2]; }")
        with self.assertRaises(SimulationError):
            equivalent(left, right)


class TestFanout(unittest.TestCase):
    """Fanout trees and their registers."""

    def test_fanout_and_unfanout_on_plus(self):
        """Fanning |+> out to four holders makes a GHZ state; the inverse tree restores it."""
        alloc = Instruction(Op.ALLOC, qubits=(0, 1, 2, 3))
        tree = expand_fanout_gates(0, [1, 2, 3])
        fanned = Trace((alloc, gate(Gate.H, 0), *tree))
        state = run(fanned, 4, validate=False).state
        expected = np.zeros(16, dtype=complex)
        expected[0] = expected[15] = 1 / np.sqrt(2)
        np.testing.assert_allclose(state, expected, atol=1e-12)

        release = Instruction(Op.RELEASE, qubits=(3, 2, 1))
        restored = Trace(fanned.instructions + tuple(invert_gates(tree)) + (release,))
        state = run(restored, 4, validate=False).state
        expected = np.zeros(16, dtype=complex)
        expected[0] = expected[1] = 1 / np.sqrt(2)
        np.testing.assert_allclose(state, expected, atol=1e-12)

    def test_copies_are_not_registers(self):
        """Fanout replicas allocated at entry level are helpers, not inputs."""
        trace = trace_circuit(CircuitSpec(FANOUT_DEMO, 3, k=3))
        begin = next(inst for inst in trace.instructions if inst.op is Op.FANOUT_BEGIN)
        copies = {q for replica in begin.copies for q in replica}
        self.assertEqual(len(copies), 2)
        registers = input_qubits(trace)
        self.assertEqual(len(registers), 4)
        self.assertFalse(copies & set(registers))
        serial = trace_circuit(CircuitSpec(FANOUT_DEMO, 3, SERIAL, k=3))
        self.assertEqual(sorted(input_qubits(serial)), sorted(registers))


class TestInverse(unittest.TestCase):
    """A gate block followed by its inverse does nothing."""

    def check_identity(self, gates, n):
        alloc = Instruction(Op.ALLOC, qubits=tuple(range(n)))
        prepare = [gate(Gate.H, q) for q in range(n)] + [gate(Gate.T, 0)]
        before = run(Trace((alloc, *prepare)), n, validate=False).state
        after = run(
            Trace((alloc, *prepare, *gates, *invert_gates(gates))), n, validate=False
        ).state
        np.testing.assert_allclose(after, before, atol=1e-9)

    def test_random_blocks(self):
        """Seeded random blocks over every unitary gate kind cancel against their inverse."""
        rng = random.Random(11)
        kinds = [g for g in Gate if not g.is_measurement]
        for trial in range(20):
            gates = []
            for _ in range(30):
                kind = rng.choice(kinds)
                qubits = rng.sample(range(4), kind.arity)
                angle = rng.uniform(-3, 3) if kind is Gate.RZ else 0.0
                gates.append(gate(kind, *qubits, angle=angle))
            with self.subTest(trial=trial):
                self.check_identity(gates, 4)

    def test_lowered_rotation(self):
        """The gates of a lowered controlled rotation cancel against their inverse."""
        trace = lower(gen_controlled_rz(), "RotateOnce", {"angle": 0.7})
        gates = [inst for inst in trace.instructions if inst.is_gate]
        self.assertTrue(gates)
        self.check_identity(gates, max(trace.qubits()) + 1)


if __name__ == "__main__":
    unittest.main()
