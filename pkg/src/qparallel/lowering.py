"""Classical interpretation of QPL programs into flat instruction traces.

Parallel constructs are lowered by conjugating the body with the manager's
parallel/section scopes; a fanout clause duplicates the named qubits before the
parallel block and consolidates them after it.
"""

import math
from contextlib import contextmanager
from dataclasses import replace
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from loguru import logger

from .core.ir import (
    Gate,
    Instruction,
    Op,
    QubitId,
    Trace,
    adjoint,
    gate,
    invert_gates,
    marker,
    validate_trace,
)
from .core.qubit_manager import QubitManager
from .errors import (
    ConfigError,
    NotAdjointableError,
    QubitManagerError,
    TraceError,
    ValidationError,
)
from .parser import INTRINSICS
from .syntax import (
    DOUBLE,
    INT,
    Binary,
    Call,
    Expr,
    For,
    IfResult,
    Index,
    IntLit,
    Iterable,
    Len,
    Let,
    Name,
    OperationDef,
    ParallelFor,
    ParallelSections,
    Pi,
    Program,
    Range,
    RealLit,
    Stmt,
    Unary,
    Use,
    WithinApply,
)

Value = Union[int, float, QubitId, List[QubitId]]
EntryArgs = Mapping[str, Union[int, float]]

MAX_CALL_DEPTH = 200

_GATES: Dict[str, Gate] = {
    "H": Gate.H,
    "X": Gate.X,
    "Y": Gate.Y,
    "Z": Gate.Z,
    "S": Gate.S,
    "Sdg": Gate.SDG,
    "T": Gate.T,
    "Tdg": Gate.TDG,
    "Rz": Gate.RZ,
    "CNOT": Gate.CNOT,
    "CZ": Gate.CZ,
    "CCX": Gate.CCX,
    "SWAP": Gate.SWAP,
    "CSWAP": Gate.CSWAP,
    "MResetZ": Gate.MEASURE_Z,
    "MResetX": Gate.MEASURE_X_RESET,
}

_SWAPPED = {
    Op.ALLOC: Op.RELEASE,
    Op.RELEASE: Op.ALLOC,
    Op.PARALLEL_BEGIN: Op.PARALLEL_END,
    Op.PARALLEL_END: Op.PARALLEL_BEGIN,
    Op.SECTION_BEGIN: Op.SECTION_END,
    Op.SECTION_END: Op.SECTION_BEGIN,
    Op.FANOUT_BEGIN: Op.FANOUT_END,
    Op.FANOUT_END: Op.FANOUT_BEGIN,
}


def expand_fanout_gates(original: QubitId, copies: Sequence[QubitId]) -> List[Instruction]:
    """Balanced doubling tree of CNOTs that entangles every copy with ``original``.

    Each layer doubles the number of holders, so the CNOT depth is
    ``ceil(log2(1 + len(copies)))``.
    """
    if not copies:
        raise ValueError("fanout expansion needs at least one copy")
    if original in copies or len(set(copies)) != len(copies):
        raise ValueError("fanout copies must be distinct from each other and the original")
    holders = [original]
    pending = list(copies)
    gates: List[Instruction] = []
    while pending:
        for source in list(holders):
            if not pending:
                break
            target = pending.pop(0)
            gates.append(gate(Gate.CNOT, source, target))
            holders.append(target)
    return gates


def invert_block(block: Sequence[Instruction]) -> List[Instruction]:
    """Adjoint of a lowered block that may contain markers and qubit lifetimes.

    Gates are inverted; Alloc/Release and every begin/end marker pair swap roles.
    """
    inverted: List[Instruction] = []
    for inst in reversed(block):
        if inst.op is Op.GATE:
            inverted.append(adjoint(inst))
        else:
            inverted.append(replace(inst, op=_SWAPPED[inst.op]))
    return inverted


class _Env:
    """Lexically nested bindings for one operation activation."""

    def __init__(self, bindings: Optional[Dict[str, Value]] = None):
        self.scopes: List[Dict[str, Value]] = [dict(bindings or {})]

    def push(self, bindings: Optional[Dict[str, Value]] = None) -> None:
        self.scopes.append(dict(bindings or {}))

    def pop(self) -> None:
        self.scopes.pop()

    def bind(self, name: str, value: Value) -> None:
        self.scopes[-1][name] = value

    def lookup(self, name: str) -> Value:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        raise TraceError(f"unbound identifier {name}")


class Tracer:
    """Interprets one program against a qubit manager, appending to a flat trace."""

    def __init__(self, program: Program, manager: QubitManager, serial: bool = False):
        self.program = program
        self.manager = manager
        self.serial = serial
        self.instructions: List[Instruction] = []
        self.stack: Tuple[str, ...] = ()
        self.activations: Tuple[int, ...] = ()
        self.result_count = 0
        self._next_activation = 0

    # -- emission -----------------------------------------------------------

    def emit(self, inst: Instruction) -> None:
        self.instructions.append(replace(inst, stack=self.stack, activations=self.activations))

    def emit_marker(self, op: Op, index: int = 0) -> None:
        self.emit(marker(op, index))

    @contextmanager
    def capture(self) -> Iterator[List[Instruction]]:
        """Redirect emission into a scratch buffer."""
        saved = self.instructions
        buffer: List[Instruction] = []
        self.instructions = buffer
        try:
            yield buffer
        finally:
            self.instructions = saved

    def emit_adjoint_of(
        self, block: List[Stmt], env: _Env, where: Optional[Tuple[int, int]]
    ) -> None:
        with self.capture() as buffer:
            self.exec_block(block, env)
        try:
            inverted = invert_block(buffer)
        except NotAdjointableError as exc:
            raise NotAdjointableError(str(exc), where) from None
        self.instructions.extend(inverted)

    # -- evaluation ---------------------------------------------------------

    def eval(self, expr: Expr, env: _Env) -> Value:
        if isinstance(expr, IntLit):
            return expr.value
        if isinstance(expr, RealLit):
            return expr.value
        if isinstance(expr, Pi):
            return math.pi
        if isinstance(expr, Name):
            return env.lookup(expr.ident)
        if isinstance(expr, Index):
            array = env.lookup(expr.array)
            position = self.eval_int(expr.index, env)
            if not isinstance(array, list):
                raise TraceError(f"{expr.array} is not an array", expr.loc)
            if not 0 <= position < len(array):
                raise TraceError(
                    f"index {position} out of range for {expr.array} of length {len(array)}",
                    expr.loc,
                )
            return array[position]
        if isinstance(expr, Len):
            array = env.lookup(expr.array)
            if not isinstance(array, list):
                raise TraceError(f"{expr.array} is not an array", expr.loc)
            return len(array)
        if isinstance(expr, Unary):
            return -self.eval_number(expr.operand, env)
        left = self.eval_number(expr.left, env)
        right = self.eval_number(expr.right, env)
        return _arith(expr, left, right)

    def eval_number(self, expr: Expr, env: _Env) -> Union[int, float]:
        value = self.eval(expr, env)
        if isinstance(value, list):
            raise TraceError("expected a number", getattr(expr, "loc", None))
        return value

    def eval_int(self, expr: Expr, env: _Env) -> int:
        value = self.eval(expr, env)
        if not isinstance(value, int):
            raise TraceError("expected an Int", getattr(expr, "loc", None))
        return value

    def eval_qubit(self, expr: Expr, env: _Env) -> QubitId:
        value = self.eval(expr, env)
        if not isinstance(value, int):
            raise TraceError("expected a qubit", getattr(expr, "loc", None))
        return value

    def iterate(self, it: Iterable, env: _Env) -> List[Value]:
        if isinstance(it, Range):
            lo = self.eval_int(it.lo, env)
            hi = self.eval_int(it.hi, env)
            return list(range(lo, hi + 1))
        array = env.lookup(it.ident)
        if not isinstance(array, list):
            raise TraceError(f"cannot iterate over {it.ident}", it.loc)
        return list(array)

    # -- statements ---------------------------------------------------------

    def exec_block(
        self, stmts: List[Stmt], env: _Env, bindings: Optional[Dict[str, Value]] = None
    ) -> None:
        env.push(bindings)
        allocated: List[List[QubitId]] = []
        try:
            for stmt in stmts:
                self.exec_stmt(stmt, env, allocated)
        finally:
            env.pop()
        for ids in reversed(allocated):
            released = list(reversed(ids))
            self.manager.release(released)
            self.emit(Instruction(Op.RELEASE, qubits=tuple(released)))

    def exec_stmt(self, stmt: Stmt, env: _Env, allocated: List[List[QubitId]]) -> None:
        if isinstance(stmt, Use):
            count = 1 if stmt.size is None else self.eval_int(stmt.size, env)
            if count < 0:
                raise TraceError(f"negative qubit array size {count}", stmt.loc)
            ids = self._allocate(count, stmt.loc)
            if ids:
                allocated.append(ids)
                self.emit(Instruction(Op.ALLOC, qubits=tuple(ids)))
            env.bind(stmt.name, ids[0] if stmt.size is None else ids)
        elif isinstance(stmt, Let):
            env.bind(stmt.name, self.eval(stmt.value, env))
        elif isinstance(stmt, For):
            for value in self.iterate(stmt.iterable, env):
                self.exec_block(stmt.body, env, {stmt.var: value})
        elif isinstance(stmt, ParallelFor):
            self.exec_parallel_for(stmt, env)
        elif isinstance(stmt, ParallelSections):
            self.exec_sections(stmt, env)
        elif isinstance(stmt, WithinApply):
            self.exec_block(stmt.within, env)
            self.exec_block(stmt.apply, env)
            self.emit_adjoint_of(stmt.within, env, stmt.loc)
        elif isinstance(stmt, IfResult):
            qubit = self.eval_qubit(stmt.qubit, env)
            slot = self.measure("MReset" + stmt.basis, qubit)
            for call in stmt.body:
                assert isinstance(call, Call)
                self.exec_intrinsic(call, env, condition=slot)
        else:
            self.exec_call(stmt, env)

    def _allocate(self, count: int, where: Optional[Tuple[int, int]]) -> List[QubitId]:
        try:
            return self.manager.allocate(count)
        except QubitManagerError as exc:
            raise TraceError(str(exc), where) from None

    def exec_sections(self, stmt: ParallelSections, env: _Env) -> None:
        if self.serial:
            for section in stmt.sections:
                self.exec_block(section, env)
            return
        self.manager.begin_parallel()
        self.emit_marker(Op.PARALLEL_BEGIN)
        for section in stmt.sections:
            index = self.manager.begin_section()
            self.emit_marker(Op.SECTION_BEGIN, index)
            self.exec_block(section, env)
            self.manager.end_section()
            self.emit_marker(Op.SECTION_END, index)
        self.manager.end_parallel()
        self.emit_marker(Op.PARALLEL_END)

    def exec_parallel_for(self, stmt: ParallelFor, env: _Env) -> None:
        values = self.iterate(stmt.iterable, env)
        if self.serial:
            for value in values:
                self.exec_block(stmt.body, env, {stmt.var: value})
            return

        fanout_id: Optional[int] = None
        fanned_single = False
        if stmt.fanout is not None:
            replicas = self.eval_int(stmt.fanout.replicas, env)
            if replicas < 1:
                raise TraceError(f"fanout replica count < 1: {replicas}", stmt.fanout.loc)
            target = env.lookup(stmt.fanout.qubits)
            fanned_single = not isinstance(target, list)
            originals = [target] if isinstance(target, int) else list(target)
            fanout_id = self.manager.fanout_register(originals, replicas)
            record = self.manager.fanout_record(fanout_id)
            if record.copies:
                self.emit(Instruction(Op.ALLOC, qubits=tuple(record.all_copies())))
            self.emit(self._fanout_marker(Op.FANOUT_BEGIN, fanout_id))
            for inst in self._fanout_tree(fanout_id):
                self.emit(inst)

        self.manager.begin_parallel()
        self.emit_marker(Op.PARALLEL_BEGIN)
        for value in values:
            index = self.manager.begin_section()
            self.emit_marker(Op.SECTION_BEGIN, index)
            bindings: Dict[str, Value] = {stmt.var: value}
            if stmt.fanout is not None and fanout_id is not None:
                copies = self.manager.get_copies(fanout_id, index)
                bindings[stmt.fanout.qubits] = copies[0] if fanned_single else copies
                if stmt.var == stmt.fanout.qubits:
                    bindings[stmt.var] = value
            self.exec_block(stmt.body, env, bindings)
            self.manager.end_section()
            self.emit_marker(Op.SECTION_END, index)
        self.manager.end_parallel()
        self.emit_marker(Op.PARALLEL_END)

        if fanout_id is not None:
            for inst in invert_gates(self._fanout_tree(fanout_id)):
                self.emit(inst)
            self.emit(self._fanout_marker(Op.FANOUT_END, fanout_id))
            record = self.manager.unfanout()
            if record.copies:
                self.emit(Instruction(Op.RELEASE, qubits=tuple(reversed(record.all_copies()))))

    def _fanout_marker(self, op: Op, fanout_id: int) -> Instruction:
        record = self.manager.fanout_record(fanout_id)
        return Instruction(op, qubits=record.originals, index=fanout_id, copies=record.copies)

    def _fanout_tree(self, fanout_id: int) -> List[Instruction]:
        record = self.manager.fanout_record(fanout_id)
        gates: List[Instruction] = []
        if not record.copies:
            return gates
        for position, original in enumerate(record.originals):
            gates.extend(expand_fanout_gates(original, [r[position] for r in record.copies]))
        return gates

    # -- calls --------------------------------------------------------------

    def measure(self, callee: str, qubit: QubitId) -> int:
        slot = self.result_count
        self.result_count += 1
        self.emit(gate(_GATES[callee], qubit, result=slot))
        return slot

    def exec_intrinsic(self, call: Call, env: _Env, condition: Optional[int] = None) -> None:
        kinds = INTRINSICS[call.callee]
        if call.callee.startswith("MReset"):
            self.measure(call.callee, self.eval_qubit(call.args[0], env))
            return
        angle = 0.0
        qubits: List[QubitId] = []
        for kind, arg in zip(kinds, call.args):
            if kind == "D":
                angle = float(self.eval_number(arg, env))
            else:
                qubits.append(self.eval_qubit(arg, env))
        inst = gate(_GATES[call.callee], *qubits, angle=angle, condition=condition)
        self.emit(adjoint(inst) if call.adjoint else inst)

    def exec_call(self, call: Call, env: _Env) -> None:
        if call.callee in INTRINSICS:
            self.exec_intrinsic(call, env)
            return
        op = self.program.operation(call.callee)
        if op is None:
            raise TraceError(f"unknown callee {call.callee}", call.loc)
        if len(self.stack) >= MAX_CALL_DEPTH:
            raise TraceError(f"call depth exceeds {MAX_CALL_DEPTH}", call.loc)
        bindings = {
            p.name: self._coerce(p.type, self.eval(a, env)) for p, a in zip(op.params, call.args)
        }
        self.stack = self.stack + (op.name,)
        self.activations = self.activations + (self._activate(),)
        try:
            callee_env = _Env(bindings)
            if call.adjoint:
                self.emit_adjoint_of(op.body, callee_env, call.loc)
            else:
                self.exec_block(op.body, callee_env)
        finally:
            self.stack = self.stack[:-1]
            self.activations = self.activations[:-1]

    def _activate(self) -> int:
        self._next_activation += 1
        return self._next_activation - 1

    @staticmethod
    def _coerce(kind: str, value: Value) -> Value:
        if kind == DOUBLE and isinstance(value, int):
            return float(value)
        return value

    def run(self, entry: OperationDef, args: Dict[str, Value]) -> Trace:
        self.stack = (entry.name,)
        self.activations = (self._activate(),)
        self.exec_block(entry.body, _Env(args))
        return Trace(tuple(self.instructions), self.manager.high_watermark, self.result_count)


def _arith(expr: Binary, left: Union[int, float], right: Union[int, float]) -> Union[int, float]:
    if expr.op == "+":
        return left + right
    if expr.op == "-":
        return left - right
    if expr.op == "*":
        return left * right
    if right == 0:
        raise TraceError("division by zero", expr.loc)
    if isinstance(left, int) and isinstance(right, int):
        quotient = abs(left) // abs(right)
        return quotient if (left >= 0) == (right >= 0) else -quotient
    return left / right


def bind_entry_args(entry: OperationDef, args: EntryArgs) -> Dict[str, Value]:
    """Check ``args`` against the entry's parameters and coerce Int to Double where needed."""
    declared = {p.name: p.type for p in entry.params}
    for name in args:
        if name not in declared:
            raise ConfigError(f"unknown entry argument {name} for {entry.name}")
    bound: Dict[str, Value] = {}
    for param in entry.params:
        if param.type not in (INT, DOUBLE):
            raise ConfigError(f"entry operation {entry.name} takes qubit parameter {param.name}")
        if param.name not in args:
            raise ConfigError(f"missing entry argument {param.name}")
        value = args[param.name]
        if param.type == INT:
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError(f"entry argument {param.name} must be Int, got {value!r}")
            bound[param.name] = value
        else:
            bound[param.name] = float(value)
    return bound


def trace_program(
    ast: Program,
    entry: str,
    args: Optional[EntryArgs] = None,
    manager: Optional[QubitManager] = None,
    serial: bool = False,
) -> Trace:
    """Interpret ``entry`` with concrete arguments and return its validated trace.

    With ``serial`` every ``parallel`` keyword and fanout clause is ignored.
    """
    op = ast.operation(entry)
    if op is None:
        raise ConfigError(f"unknown entry operation {entry}")
    bound = bind_entry_args(op, args or {})
    tracer = Tracer(ast, manager or QubitManager(), serial=serial)
    try:
        trace = tracer.run(op, bound)
    except QubitManagerError as exc:
        raise TraceError(str(exc)) from None
    diagnostics = validate_trace(trace)
    if diagnostics:
        raise ValidationError(diagnostics)
    logger.debug(
        f"[TRACE] {entry}: {len(trace)} instructions, {trace.high_watermark} qubits"
        f"{' (serial)' if serial else ''}"
    )
    return trace
