"""AST node types for QPL programs and the canonical pretty printer."""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

Location = Tuple[int, int]

# Parameter and binding types
INT = "Int"
DOUBLE = "Double"
QUBIT = "Qubit"
QUBIT_ARRAY = "Qubit[]"
PARAM_TYPES = (INT, DOUBLE, QUBIT, QUBIT_ARRAY)


# -- expressions ------------------------------------------------------------


@dataclass
class IntLit:
    value: int
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class RealLit:
    value: float
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Pi:
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Name:
    ident: str
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Index:
    array: str
    index: "Expr"
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Len:
    array: str
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Unary:
    op: str
    operand: "Expr"
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    loc: Location = field(default=(0, 0), compare=False, repr=False)


Expr = Union[IntLit, RealLit, Pi, Name, Index, Len, Unary, Binary]


@dataclass
class Range:
    """Inclusive ``lo..hi`` iterable."""

    lo: Expr
    hi: Expr


Iterable = Union[Range, Name]


# -- statements -------------------------------------------------------------


@dataclass
class Use:
    name: str
    size: Optional[Expr] = None  # None for a single Qubit()
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Let:
    name: str
    value: Expr
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class For:
    var: str
    iterable: Iterable
    body: List["Stmt"]
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class FanoutClause:
    qubits: str
    replicas: Expr
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class ParallelFor:
    var: str
    iterable: Iterable
    fanout: Optional[FanoutClause]
    body: List["Stmt"]
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class ParallelSections:
    sections: List[List["Stmt"]]
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class WithinApply:
    within: List["Stmt"]
    apply: List["Stmt"]
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class IfResult:
    basis: str  # "Z" or "X"
    qubit: Expr
    body: List["Stmt"]
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Call:
    callee: str
    args: List[Expr]
    adjoint: bool = False
    loc: Location = field(default=(0, 0), compare=False, repr=False)


Stmt = Union[Use, Let, For, ParallelFor, ParallelSections, WithinApply, IfResult, Call]


@dataclass
class Param:
    name: str
    type: str


@dataclass
class OperationDef:
    name: str
    params: List[Param]
    body: List[Stmt]
    loc: Location = field(default=(0, 0), compare=False, repr=False)


@dataclass
class Program:
    operations: List[OperationDef] = field(default_factory=list)

    def operation(self, name: str) -> Optional[OperationDef]:
        for op in self.operations:
            if op.name == name:
                return op
        return None


# -- pretty printing --------------------------------------------------------

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}
_INDENT = "    "


def format_expr(expr: Expr) -> str:
    """Render an expression with the minimal parentheses that preserve its tree."""
    if isinstance(expr, IntLit):
        return str(expr.value)
    if isinstance(expr, RealLit):
        text = repr(float(expr.value))
        return text if any(c in text for c in ".e") else text + ".0"
    if isinstance(expr, Pi):
        return "pi"
    if isinstance(expr, Name):
        return expr.ident
    if isinstance(expr, Index):
        return f"{expr.array}[{format_expr(expr.index)}]"
    if isinstance(expr, Len):
        return f"len({expr.array})"
    if isinstance(expr, Unary):
        inner = format_expr(expr.operand)
        if isinstance(expr.operand, Binary):
            inner = f"({inner})"
        return f"-{inner}"
    prec = _PRECEDENCE[expr.op]
    left = format_expr(expr.left)
    right = format_expr(expr.right)
    if isinstance(expr.left, Binary) and _PRECEDENCE[expr.left.op] < prec:
        left = f"({left})"
    if isinstance(expr.right, Binary) and _PRECEDENCE[expr.right.op] <= prec:
        right = f"({right})"
    return f"{left} {expr.op} {right}"


def _format_iterable(it: Iterable) -> str:
    if isinstance(it, Range):
        return f"{format_expr(it.lo)}..{format_expr(it.hi)}"
    return it.ident


def _format_block(stmts: List[Stmt], depth: int) -> List[str]:
    lines: List[str] = []
    for stmt in stmts:
        lines.extend(_format_stmt(stmt, depth))
    return lines


def _braced(head: str, body: List[Stmt], depth: int) -> List[str]:
    pad = _INDENT * depth
    return [f"{pad}{head}{{"] + _format_block(body, depth + 1) + [f"{pad}}}"]


def _format_stmt(stmt: Stmt, depth: int) -> List[str]:
    pad = _INDENT * depth
    if isinstance(stmt, Use):
        alloc = "Qubit()" if stmt.size is None else f"Qubit[{format_expr(stmt.size)}]"
        return [f"{pad}use {stmt.name} = {alloc};"]
    if isinstance(stmt, Let):
        return [f"{pad}let {stmt.name} = {format_expr(stmt.value)};"]
    if isinstance(stmt, For):
        return _braced(f"for {stmt.var} in {_format_iterable(stmt.iterable)} ", stmt.body, depth)
    if isinstance(stmt, ParallelFor):
        head = f"parallel for {stmt.var} in {_format_iterable(stmt.iterable)} "
        if stmt.fanout is not None:
            head += f"fanout({stmt.fanout.qubits}, {format_expr(stmt.fanout.replicas)}) "
        return _braced(head, stmt.body, depth)
    if isinstance(stmt, ParallelSections):
        lines = [f"{pad}parallel sections {{"]
        for section in stmt.sections:
            lines.extend(_braced("section ", section, depth + 1))
        return lines + [f"{pad}}}"]
    if isinstance(stmt, WithinApply):
        lines = _braced("within ", stmt.within, depth)
        apply = _braced("apply ", stmt.apply, depth)
        lines[-1] = lines[-1] + " " + apply[0].lstrip()
        return lines + apply[1:]
    if isinstance(stmt, IfResult):
        head = f"if MReset{stmt.basis}({format_expr(stmt.qubit)}) == One "
        return _braced(head, stmt.body, depth)
    args = ", ".join(format_expr(a) for a in stmt.args)
    prefix = "Adjoint " if stmt.adjoint else ""
    return [f"{pad}{prefix}{stmt.callee}({args});"]


def pretty_print(node: Union[Program, OperationDef, List[Stmt]]) -> str:
    """Emit canonical source for a program, a single operation or a statement list."""
    if isinstance(node, list):
        return "\n".join(_format_block(node, 0)) + ("\n" if node else "")
    ops = node.operations if isinstance(node, Program) else [node]
    chunks = []
    for op in ops:
        params = ", ".join(f"{p.name} : {p.type}" for p in op.params)
        head = f"operation {op.name}({params}) : Unit "
        chunks.append("\n".join(_braced(head, op.body, 0)))
    return "\n\n".join(chunks) + "\n"
