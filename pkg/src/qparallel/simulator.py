"""Dense statevector simulation of traces, used as the semantic oracle.

Slot ``s`` is bit ``s`` of the basis index (little-endian). Trace qubits are
bound to slots when allocated, so slot numbers differ from qubit ids.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from .core.ir import Gate, Instruction, Op, QubitId, Trace, validate_trace
from .errors import SimulationError, ValidationError

MAX_SLOTS = 24
CLEAN_TOLERANCE = 1e-9

_SQRT2_INV = 1 / np.sqrt(2)
_OMEGA = np.exp(1j * np.pi / 4)
_SINGLE: Dict[Gate, np.ndarray] = {
    Gate.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    Gate.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Gate.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Gate.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    Gate.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    Gate.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    Gate.T: np.array([[1, 0], [0, _OMEGA]], dtype=complex),
    Gate.TDG: np.array([[1, 0], [0, np.conj(_OMEGA)]], dtype=complex),
}


def _rz(angle: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex)


@dataclass
class RunResult:
    """Final state, the recorded measurement outcomes by result slot, and the
    slot each entry-register qubit landed on."""

    state: np.ndarray
    outcomes: Dict[int, int] = field(default_factory=dict)
    registers: Dict[QubitId, int] = field(default_factory=dict)

    def read(self, qubits: Sequence[QubitId]) -> Optional[int]:
        """Integer held by ``qubits`` when the state is a single basis state."""
        index = basis_index(self.state)
        if index is None:
            return None
        return read_register(index, [self.registers[q] for q in qubits])


class StateVector:
    """Amplitudes of ``n`` slots held as an ``n``-axis tensor.

    Axis ``n - 1 - q`` holds slot ``q`` so that ``ravel()`` yields the
    little-endian vector.
    """

    def __init__(self, n_slots: int, basis_index: int = 0):
        if not 0 <= n_slots <= MAX_SLOTS:
            raise SimulationError(f"trace exceeds slot budget: {n_slots} > {MAX_SLOTS}")
        self.n = n_slots
        vector = np.zeros(2**n_slots, dtype=complex)
        vector[basis_index] = 1.0
        self.tensor = vector.reshape([2] * n_slots) if n_slots else vector

    def _axis(self, q: QubitId) -> int:
        if not 0 <= q < self.n:
            raise SimulationError(f"trace exceeds slot budget: qubit {q} >= {self.n} slots")
        return self.n - 1 - q

    @property
    def vector(self) -> np.ndarray:
        return self.tensor.reshape(-1)

    def apply_single(self, matrix: np.ndarray, q: QubitId) -> None:
        axis = self._axis(q)
        moved = np.tensordot(matrix, self.tensor, axes=([1], [axis]))
        self.tensor = np.moveaxis(moved, 0, axis)

    def _slice(self, assignment: Dict[QubitId, int]) -> Tuple[object, ...]:
        index: List[object] = [slice(None)] * self.n
        for q, bit in assignment.items():
            index[self._axis(q)] = bit
        return tuple(index)

    def apply_permutation(
        self, controls: Sequence[QubitId], a: QubitId, b: Optional[QubitId]
    ) -> None:
        """Controlled X on ``a`` (``b`` is None) or controlled swap of ``a`` and ``b``."""
        on = {c: 1 for c in controls}
        new = self.tensor.copy()
        if b is None:
            lo, hi = self._slice({**on, a: 0}), self._slice({**on, a: 1})
        else:
            lo, hi = self._slice({**on, a: 0, b: 1}), self._slice({**on, a: 1, b: 0})
        new[lo], new[hi] = self.tensor[hi], self.tensor[lo]
        self.tensor = new

    def apply_phase_flip(self, a: QubitId, b: QubitId) -> None:
        self.tensor[self._slice({a: 1, b: 1})] *= -1

    def probability_one(self, q: QubitId) -> float:
        return float(np.sum(np.abs(self.tensor[self._slice({q: 1})]) ** 2))

    def collapse(self, q: QubitId, outcome: int) -> None:
        keep = self.tensor[self._slice({q: outcome})]
        norm = np.sqrt(np.sum(np.abs(keep) ** 2))
        self.tensor = np.zeros_like(self.tensor)
        if norm > 0:
            # reset: the surviving branch moves to |0>
            self.tensor[self._slice({q: 0})] = keep / norm

    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))


class _Runner:
    """Maps trace qubit ids onto slots as they are allocated.

    Each Alloc takes the lowest free slot and each Release hands it back, so a
    trace needs only as many slots as it ever holds at once.
    """

    def __init__(self, n_slots: int, seed: int, inputs: Dict[QubitId, int], check_release: bool):
        self.state = StateVector(n_slots)
        self.rng = np.random.default_rng(seed)
        self.inputs = dict(inputs)
        self.check_release = check_release
        self.outcomes: Dict[int, int] = {}
        self.slot_of: Dict[QubitId, int] = {}
        self.registers: Dict[QubitId, int] = {}
        self.free = list(range(n_slots))

    def _assert_clean(self, slot: int, where: str, i: int) -> None:
        p1 = self.state.probability_one(slot)
        if p1 > CLEAN_TOLERANCE:
            raise SimulationError(
                f"slot {slot} not clean at {where} (instruction {i}, P(1)={p1:.3g})"
            )

    def _bind(self, q: QubitId, i: int) -> int:
        if not self.free:
            raise SimulationError(
                f"trace exceeds slot budget: no free slot for qubit {q} at instruction {i}"
                f" ({self.state.n} slots)"
            )
        self.free.sort()
        slot = self.free.pop(0)
        self.slot_of[q] = slot
        return slot

    def slot(self, q: QubitId) -> int:
        if q not in self.slot_of:
            raise SimulationError(f"qubit {q} used before allocation")
        return self.slot_of[q]

    def step(self, i: int, inst: Instruction) -> None:
        if inst.op is Op.ALLOC:
            for q in inst.qubits:
                if q in self.inputs and q in self.registers:
                    self.slot_of[q] = self.registers[q]
                    continue
                slot = self._bind(q, i)
                self._assert_clean(slot, "Alloc", i)
                if q in self.inputs:
                    self.registers[q] = slot
                    if self.inputs[q]:
                        self.state.apply_single(_SINGLE[Gate.X], slot)
            return
        if inst.op is Op.RELEASE:
            for q in inst.qubits:
                slot = self.slot(q)
                if q in self.inputs:
                    continue
                if self.check_release:
                    self._assert_clean(slot, "Release", i)
                del self.slot_of[q]
                self.free.append(slot)
            return
        if inst.op is not Op.GATE or inst.gate is None:
            return
        if inst.condition is not None and self.outcomes.get(inst.condition, 0) != 1:
            return
        self.apply_gate(inst)

    def apply_gate(self, inst: Instruction) -> None:
        kind = inst.gate
        qs = [self.slot(q) for q in inst.qubits]
        state = self.state
        if kind in _SINGLE:
            state.apply_single(_SINGLE[kind], qs[0])
        elif kind is Gate.RZ:
            state.apply_single(_rz(inst.angle), qs[0])
        elif kind is Gate.CNOT:
            state.apply_permutation([qs[0]], qs[1], None)
        elif kind is Gate.CCX:
            state.apply_permutation([qs[0], qs[1]], qs[2], None)
        elif kind is Gate.SWAP:
            state.apply_permutation([], qs[0], qs[1])
        elif kind is Gate.CSWAP:
            state.apply_permutation([qs[0]], qs[1], qs[2])
        elif kind is Gate.CZ:
            state.apply_phase_flip(qs[0], qs[1])
        else:
            self.measure(inst)
            return
        norm = state.norm()
        if abs(norm - 1) > CLEAN_TOLERANCE:
            raise SimulationError(f"norm drifted to {norm} after {inst.kind_name()}")

    def measure(self, inst: Instruction) -> None:
        q = self.slot(inst.qubits[0])
        if inst.gate is Gate.MEASURE_X_RESET:
            self.state.apply_single(_SINGLE[Gate.H], q)
        p1 = self.state.probability_one(q)
        if p1 < CLEAN_TOLERANCE:
            outcome = 0
        elif p1 > 1 - CLEAN_TOLERANCE:
            outcome = 1
        else:
            outcome = 1 if self.rng.random() < p1 else 0
        self.state.collapse(q, outcome)
        if inst.result is not None:
            self.outcomes[inst.result] = outcome


def run(
    trace: Trace,
    n_slots: int,
    seed: int = 0,
    inputs: Optional[Dict[QubitId, int]] = None,
    check_release: bool = True,
    validate: bool = True,
) -> RunResult:
    """Simulate ``trace`` from the all-zero state.

    ``inputs`` maps entry-register qubits to basis bits, applied when each is
    first allocated; those qubits are exempt from the clean-release check.
    Without ``inputs`` the entry registers start at zero.
    Measurements reset their qubit to |0> after sampling.
    """
    if n_slots > MAX_SLOTS:
        raise SimulationError(f"trace exceeds slot budget: {n_slots} > {MAX_SLOTS}")
    if validate:
        diagnostics = validate_trace(trace)
        if diagnostics:
            raise ValidationError(diagnostics)
    if inputs is None:
        inputs = {q: 0 for q in input_qubits(trace)}
    runner = _Runner(n_slots, seed, inputs, check_release)
    for i, inst in enumerate(trace.instructions):
        runner.step(i, inst)
    return RunResult(runner.state.vector.copy(), runner.outcomes, dict(runner.registers))


def input_qubits(trace: Trace) -> List[QubitId]:
    """Qubits of the entry operation's leading allocations, in allocation order.

    These are the registers a program declares before doing anything else; all
    other allocations are helpers that must come back clean. Fanout copies are
    allocated at the same point but are never registers.
    """
    copies = {
        q
        for inst in trace.instructions
        if inst.op is Op.FANOUT_BEGIN
        for replica in inst.copies
        for q in replica
    }
    found: List[QubitId] = []
    for inst in trace.instructions:
        if inst.op is not Op.ALLOC:
            break
        if len(inst.stack) == 1:
            found.extend(q for q in inst.qubits if q not in copies)
    return found


def slots_for(*traces: Trace) -> int:
    """Most qubits any of ``traces`` holds allocated at one time."""
    best = 0
    for trace in traces:
        live = 0
        for inst in trace.instructions:
            if inst.op is Op.ALLOC:
                live += len(inst.qubits)
                best = max(best, live)
            elif inst.op is Op.RELEASE:
                live -= len(inst.qubits)
    return best


def _phase_aligned_deviation(a: np.ndarray, b: np.ndarray) -> float:
    pivot = int(np.argmax(np.abs(a)))
    if abs(b[pivot]) < 1e-15:
        return float(np.max(np.abs(a - b)))
    phase = (a[pivot] / abs(a[pivot])) / (b[pivot] / abs(b[pivot]))
    return float(np.max(np.abs(a - phase * b)))


@dataclass
class Equivalence:
    equivalent: bool
    max_deviation: float
    inputs_checked: int


def equivalent(
    trace_a: Trace,
    trace_b: Trace,
    n_slots: Optional[int] = None,
    tolerance: float = 1e-9,
    seeds: Sequence[int] = (1, 2),
) -> Equivalence:
    """Compare two traces on every basis input of their entry registers, up to global phase."""
    registers = input_qubits(trace_a)
    if sorted(registers) != sorted(input_qubits(trace_b)):
        raise SimulationError("traces declare different entry registers")
    n = n_slots if n_slots is not None else slots_for(trace_a, trace_b)
    worst = 0.0
    checked = 0
    for bits in itertools.product((0, 1), repeat=len(registers)):
        inputs = dict(zip(registers, bits))
        for seed in seeds:
            a = run(trace_a, n, seed, inputs).state
            b = run(trace_b, n, seed, inputs).state
            worst = max(worst, _phase_aligned_deviation(a, b))
            checked += 1
    logger.debug(f"[SIM] equivalence over {checked} runs: max deviation {worst:.3g}")
    return Equivalence(worst < tolerance, worst, checked)


def basis_index(state: np.ndarray, tolerance: float = 1e-9) -> Optional[int]:
    """Index of the single basis state holding all the weight, or None."""
    probs = np.abs(state) ** 2
    index = int(np.argmax(probs))
    return index if probs[index] > 1 - tolerance else None


def read_register(index: int, slots: Sequence[int]) -> int:
    """Integer held by ``slots`` (first slot least significant) in basis state ``index``."""
    return sum(((index >> s) & 1) << k for k, s in enumerate(slots))
