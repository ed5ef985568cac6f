"""Flat instruction traces shared by lowering, scheduling and simulation."""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Set, Tuple

from ..errors import NotAdjointableError

QubitId = int


class Gate(Enum):
    """Intrinsic gate kinds. The value is the display name used in dumps and metric files."""

    H = "H"
    X = "X"
    Y = "Y"
    Z = "Z"
    S = "S"
    SDG = "Sdg"
    T = "T"
    TDG = "Tdg"
    RZ = "Rz"
    CNOT = "CNOT"
    CZ = "CZ"
    CCX = "CCX"
    SWAP = "SWAP"
    CSWAP = "CSWAP"
    MEASURE_Z = "MeasureZ"
    MEASURE_X_RESET = "MeasureXReset"

    @property
    def arity(self) -> int:
        return _ARITY.get(self, 1)

    @property
    def is_measurement(self) -> bool:
        return self in (Gate.MEASURE_Z, Gate.MEASURE_X_RESET)

    @property
    def is_t_like(self) -> bool:
        return self in (Gate.T, Gate.TDG)

    @classmethod
    def from_name(cls, name: str) -> "Gate":
        for gate in cls:
            if gate.value == name:
                return gate
        raise KeyError(name)


_ARITY: Dict[Gate, int] = {
    Gate.CNOT: 2,
    Gate.CZ: 2,
    Gate.SWAP: 2,
    Gate.CCX: 3,
    Gate.CSWAP: 3,
}

_ADJOINT: Dict[Gate, Gate] = {
    Gate.T: Gate.TDG,
    Gate.TDG: Gate.T,
    Gate.S: Gate.SDG,
    Gate.SDG: Gate.S,
}


class Op(Enum):
    """Instruction kinds: a gate, qubit lifetime events, or a structural marker."""

    GATE = "Gate"
    ALLOC = "Alloc"
    RELEASE = "Release"
    PARALLEL_BEGIN = "ParallelBegin"
    PARALLEL_END = "ParallelEnd"
    SECTION_BEGIN = "SectionBegin"
    SECTION_END = "SectionEnd"
    FANOUT_BEGIN = "FanoutBegin"
    FANOUT_END = "FanoutEnd"


MARKERS = frozenset(
    {
        Op.PARALLEL_BEGIN,
        Op.PARALLEL_END,
        Op.SECTION_BEGIN,
        Op.SECTION_END,
        Op.FANOUT_BEGIN,
        Op.FANOUT_END,
    }
)


@dataclass(frozen=True)
class Instruction:
    """One trace entry.

    ``qubits`` holds gate operands, Alloc/Release ids, or fanout originals.
    ``result`` is the slot a measurement writes; ``condition`` is the slot a
    classically controlled gate reads. ``index`` is the section index or the
    fanout id, and ``copies`` holds the fanout replicas 1..n-1.
    """

    op: Op
    gate: Optional[Gate] = None
    qubits: Tuple[QubitId, ...] = ()
    angle: float = 0.0
    stack: Tuple[str, ...] = ()
    result: Optional[int] = None
    condition: Optional[int] = None
    index: int = 0
    copies: Tuple[Tuple[QubitId, ...], ...] = ()
    # one id per stack frame, distinguishing separate calls of the same operation
    activations: Tuple[int, ...] = ()

    @property
    def is_gate(self) -> bool:
        return self.op is Op.GATE

    @property
    def is_marker(self) -> bool:
        return self.op in MARKERS

    def kind_name(self) -> str:
        """Readable kind, e.g. ``Rz(0.5)`` or ``ClassicallyControlled(CZ,r0)``."""
        if self.op is not Op.GATE:
            if self.op in (Op.SECTION_BEGIN, Op.SECTION_END, Op.FANOUT_BEGIN, Op.FANOUT_END):
                return f"{self.op.value}({self.index})"
            return self.op.value
        assert self.gate is not None
        name = f"Rz({self.angle!r})" if self.gate is Gate.RZ else self.gate.value
        if self.condition is not None:
            return f"ClassicallyControlled({name},r{self.condition})"
        if self.result is not None:
            return f"{name}->r{self.result}"
        return name


def gate(
    kind: Gate,
    *qubits: QubitId,
    angle: float = 0.0,
    stack: Tuple[str, ...] = (),
    result: Optional[int] = None,
    condition: Optional[int] = None,
) -> Instruction:
    """Shorthand constructor for gate instructions."""
    return Instruction(
        Op.GATE,
        gate=kind,
        qubits=tuple(qubits),
        angle=angle,
        stack=stack,
        result=result,
        condition=condition,
    )


def marker(op: Op, index: int = 0, stack: Tuple[str, ...] = ()) -> Instruction:
    return Instruction(op, index=index, stack=stack)


@dataclass(frozen=True)
class Trace:
    """An immutable, fully unrolled instruction sequence."""

    instructions: Tuple[Instruction, ...] = ()
    high_watermark: int = 0
    result_count: int = 0

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self) -> Iterator[Instruction]:
        return iter(self.instructions)

    def qubits(self) -> List[QubitId]:
        """Sorted ids that any instruction references."""
        seen: Set[QubitId] = set()
        for inst in self.instructions:
            seen.update(inst.qubits)
            for replica in inst.copies:
                seen.update(replica)
        return sorted(seen)


@dataclass(frozen=True)
class Diagnostic:
    """A single invariant violation found by :func:`validate_trace`."""

    index: int
    reason: str

    def __str__(self) -> str:
        return f"#{self.index}: {self.reason}"


@dataclass
class _ParallelFrame:
    live_at_begin: Set[QubitId]
    section: Optional[int] = None
    owner: Dict[QubitId, int] = field(default_factory=dict)
    reported: Set[QubitId] = field(default_factory=set)


def validate_trace(trace: Trace) -> List[Diagnostic]:
    """Check structural invariants and section isolation.

    Returns one diagnostic per violation; an empty list means the trace is valid.
    A qubit live before a parallel block may be gated by only one of its
    sections unless it belongs to an active fanout.
    """
    diagnostics: List[Diagnostic] = []
    live: Set[QubitId] = set()
    nesting: List[Op] = []
    frames: List[_ParallelFrame] = []
    fanned: Dict[int, Set[QubitId]] = {}

    def report(index: int, reason: str) -> None:
        diagnostics.append(Diagnostic(index, reason))

    for i, inst in enumerate(trace.instructions):
        if inst.op is Op.ALLOC:
            for q in inst.qubits:
                if q in live:
                    report(i, f"qubit {q} allocated while live")
                live.add(q)
        elif inst.op is Op.RELEASE:
            for q in inst.qubits:
                if q not in live:
                    report(i, f"release of qubit {q} that is not live")
                live.discard(q)
        elif inst.op is Op.PARALLEL_BEGIN:
            nesting.append(Op.PARALLEL_BEGIN)
            frames.append(_ParallelFrame(live_at_begin=set(live)))
        elif inst.op is Op.PARALLEL_END:
            if not nesting or nesting[-1] is not Op.PARALLEL_BEGIN:
                report(i, "unbalanced ParallelEnd")
                continue
            nesting.pop()
            frames.pop()
        elif inst.op is Op.SECTION_BEGIN:
            if not nesting or nesting[-1] is not Op.PARALLEL_BEGIN:
                report(i, "SectionBegin outside a parallel block")
                nesting.append(Op.SECTION_BEGIN)
                continue
            nesting.append(Op.SECTION_BEGIN)
            frames[-1].section = inst.index
        elif inst.op is Op.SECTION_END:
            if not nesting or nesting[-1] is not Op.SECTION_BEGIN:
                report(i, "unbalanced SectionEnd")
                continue
            nesting.pop()
            if frames:
                frames[-1].section = None
        elif inst.op is Op.FANOUT_BEGIN:
            nesting.append(Op.FANOUT_BEGIN)
            members = set(inst.qubits)
            for replica in inst.copies:
                members.update(replica)
            fanned[inst.index] = members
        elif inst.op is Op.FANOUT_END:
            if not nesting or nesting[-1] is not Op.FANOUT_BEGIN:
                report(i, "unbalanced FanoutEnd")
                continue
            nesting.pop()
            fanned.pop(inst.index, None)
        else:
            _check_gate(i, inst, live, frames, fanned, report)

    if nesting:
        report(len(trace.instructions), f"{len(nesting)} unclosed marker(s): {nesting[-1].value}")
    return diagnostics


def _check_gate(
    i: int,
    inst: Instruction,
    live: Set[QubitId],
    frames: List[_ParallelFrame],
    fanned: Dict[int, Set[QubitId]],
    report: Callable[[int, str], None],
) -> None:
    assert inst.gate is not None
    if len(set(inst.qubits)) != len(inst.qubits):
        report(i, "duplicate operand")
    if len(inst.qubits) != inst.gate.arity:
        report(i, f"{inst.gate.value} expects {inst.gate.arity} operand(s), got {len(inst.qubits)}")
    for q in inst.qubits:
        if q not in live:
            report(i, f"qubit {q} used while not allocated")
    exempt: Set[QubitId] = set()
    for members in fanned.values():
        exempt |= members
    for frame in frames:
        if frame.section is None:
            continue
        for q in inst.qubits:
            if q not in frame.live_at_begin or q in exempt:
                continue
            owner = frame.owner.setdefault(q, frame.section)
            if owner != frame.section and q not in frame.reported:
                frame.reported.add(q)
                report(i, f"qubit {q} shared across sibling sections")


def adjoint(inst: Instruction) -> Instruction:
    """Inverse of a single gate instruction."""
    if inst.op is not Op.GATE or inst.gate is None:
        raise NotAdjointableError(f"not adjointable: {inst.kind_name()} is not a gate")
    if inst.gate.is_measurement or inst.condition is not None:
        raise NotAdjointableError(f"not adjointable: {inst.kind_name()}")
    if inst.gate is Gate.RZ:
        return replace(inst, angle=-inst.angle)
    return replace(inst, gate=_ADJOINT.get(inst.gate, inst.gate))


def invert_gates(block: Iterable[Instruction]) -> List[Instruction]:
    """Reverse a gate-only block and replace each gate by its inverse."""
    return [adjoint(inst) for inst in reversed(list(block))]


def t_like(kind: Gate) -> bool:
    return kind.is_t_like


def count_gates(trace: Trace, predicate: Callable[[Gate], bool]) -> int:
    """Count gate instructions whose kind matches ``predicate``.

    Classically controlled gates count as their inner kind.
    """
    return sum(
        1
        for inst in trace.instructions
        if inst.op is Op.GATE and inst.gate is not None and predicate(inst.gate)
    )


def strip_markers(trace: Trace) -> Trace:
    """Drop parallel, section and fanout markers, keeping everything else in order."""
    kept = tuple(inst for inst in trace.instructions if not inst.is_marker)
    return replace(trace, instructions=kept)


def dump_trace(trace: Trace) -> str:
    """One line per instruction: ``<index> <stack> <kind> <operands>``."""
    lines = []
    for i, inst in enumerate(trace.instructions):
        stack = ";".join(inst.stack) or "<root>"
        operands = " ".join(str(q) for q in inst.qubits)
        if inst.copies:
            operands += " | " + " | ".join(" ".join(str(q) for q in r) for r in inst.copies)
        lines.append(f"{i} {stack} {inst.kind_name()} {operands}".rstrip())
    return "\n".join(lines)
