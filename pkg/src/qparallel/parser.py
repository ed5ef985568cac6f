"""Recursive-descent parser and name resolution for QPL sources."""

import math
import re
from dataclasses import dataclass
from typing import Dict, List, NoReturn, Optional, Sequence, Tuple

from loguru import logger

from .errors import ArityError, QplSyntaxError, ResolutionError
from .syntax import (
    DOUBLE,
    INT,
    PARAM_TYPES,
    QUBIT,
    QUBIT_ARRAY,
    Binary,
    Call,
    Expr,
    FanoutClause,
    For,
    IfResult,
    Index,
    IntLit,
    Iterable,
    Len,
    Let,
    Location,
    Name,
    OperationDef,
    ParallelFor,
    ParallelSections,
    Param,
    Pi,
    Program,
    Range,
    RealLit,
    Stmt,
    Unary,
    Use,
    WithinApply,
)

KEYWORDS = frozenset(
    {
        "operation",
        "Unit",
        "Int",
        "Double",
        "Qubit",
        "use",
        "let",
        "for",
        "in",
        "parallel",
        "sections",
        "section",
        "fanout",
        "within",
        "apply",
        "if",
        "One",
        "Adjoint",
        "pi",
        "len",
        "MResetZ",
        "MResetX",
    }
)

# Intrinsic callee -> operand kinds ("D" angle, "Q" qubit)
INTRINSICS: Dict[str, str] = {
    "H": "Q",
    "X": "Q",
    "Y": "Q",
    "Z": "Q",
    "S": "Q",
    "Sdg": "Q",
    "T": "Q",
    "Tdg": "Q",
    "Rz": "DQ",
    "CNOT": "QQ",
    "CZ": "QQ",
    "CCX": "QQQ",
    "SWAP": "QQ",
    "CSWAP": "QQQ",
    "MResetZ": "Q",
    "MResetX": "Q",
}
MEASUREMENTS = frozenset({"MResetZ", "MResetX"})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|//[^\n]*)
    |(?P<real>(?:\d+\.\d+(?:[eE][+-]?\d+)?)|(?:\d+[eE][+-]?\d+))
    |(?P<int>\d+)
    |(?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    |(?P<op>\.\.|==|[(){}\[\],;:=+\-*/])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "real", "ident", "keyword", "op", "eof"
    text: str
    line: int
    column: int

    @property
    def loc(self) -> Location:
        return (self.line, self.column)


def tokenize(source: str) -> List[Token]:
    """Split source into tokens; comments and whitespace are dropped."""
    tokens: List[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            column = pos - line_start + 1
            raise QplSyntaxError(f"unexpected character {source[pos]!r}", line, column)
        kind = m.lastgroup or ""
        text = m.group()
        if kind != "ws":
            if kind == "ident" and text in KEYWORDS:
                kind = "keyword"
            tokens.append(Token(kind, text, line, pos - line_start + 1))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    """Grammar productions, one method each."""

    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def _fail(self, expected: Sequence[str]) -> NoReturn:
        tok = self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise QplSyntaxError(f"unexpected {found}", tok.line, tok.column, expected)

    def _at(self, text: str) -> bool:
        return self.tok.kind in ("keyword", "op") and self.tok.text == text

    def _accept(self, text: str) -> Optional[Token]:
        if self._at(text):
            tok = self.tok
            self.pos += 1
            return tok
        return None

    def _expect(self, text: str) -> Token:
        tok = self._accept(text)
        if tok is None:
            self._fail([text])
        return tok

    def _ident(self) -> Token:
        if self.tok.kind != "ident":
            self._fail(["identifier"])
        tok = self.tok
        self.pos += 1
        return tok

    # -- program structure --------------------------------------------------

    def program(self) -> Program:
        ops = []
        while self.tok.kind != "eof":
            if not self._at("operation"):
                self._fail(["operation"])
            ops.append(self.operation())
        return Program(ops)

    def operation(self) -> OperationDef:
        start = self._expect("operation")
        name = self._ident().text
        self._expect("(")
        params = []
        if not self._at(")"):
            params.append(self.param())
            while self._accept(","):
                params.append(self.param())
        self._expect(")")
        self._expect(":")
        self._expect("Unit")
        return OperationDef(name, params, self.block(), loc=start.loc)

    def param(self) -> Param:
        name = self._ident().text
        self._expect(":")
        if self._accept("Int"):
            return Param(name, INT)
        if self._accept("Double"):
            return Param(name, DOUBLE)
        if self._accept("Qubit"):
            if self._accept("["):
                self._expect("]")
                return Param(name, QUBIT_ARRAY)
            return Param(name, QUBIT)
        self._fail(list(PARAM_TYPES))

    def block(self) -> List[Stmt]:
        self._expect("{")
        stmts = []
        while not self._at("}"):
            if self.tok.kind == "eof":
                self._fail(["}"])
            stmts.append(self.stmt())
        self._expect("}")
        return stmts

    def stmt(self) -> Stmt:
        tok = self.tok
        if self._at("use"):
            return self.use_stmt()
        if self._at("let"):
            self.pos += 1
            name = self._ident().text
            self._expect("=")
            value = self.expr()
            self._expect(";")
            return Let(name, value, loc=tok.loc)
        if self._at("for"):
            self.pos += 1
            var, iterable = self.for_header()
            return For(var, iterable, self.block(), loc=tok.loc)
        if self._at("parallel"):
            self.pos += 1
            if self._accept("sections"):
                return self.sections(tok)
            if not self._accept("for"):
                self._fail(["for", "sections"])
            var, iterable = self.for_header()
            fanout = self.fanout() if self._at("fanout") else None
            return ParallelFor(var, iterable, fanout, self.block(), loc=tok.loc)
        if self._at("within"):
            self.pos += 1
            within = self.block()
            self._expect("apply")
            return WithinApply(within, self.block(), loc=tok.loc)
        if self._at("if"):
            return self.if_result()
        if self._at("Adjoint") or self.tok.kind == "ident" or self.tok.text in MEASUREMENTS:
            return self.call_stmt()
        self._fail(
            ["use", "let", "for", "parallel", "within", "if", "Adjoint", "identifier", "}"]
        )

    def use_stmt(self) -> Use:
        start = self._expect("use")
        name = self._ident().text
        self._expect("=")
        self._expect("Qubit")
        if self._accept("("):
            self._expect(")")
            size: Optional[Expr] = None
        elif self._accept("["):
            size = self.expr()
            self._expect("]")
        else:
            self._fail(["(", "["])
        self._expect(";")
        return Use(name, size, loc=start.loc)

    def for_header(self) -> Tuple[str, Iterable]:
        paren = self._accept("(") is not None
        var = self._ident().text
        self._expect("in")
        iterable = self.iterable()
        if paren:
            self._expect(")")
        return var, iterable

    def iterable(self) -> Iterable:
        start = self.pos
        if self.tok.kind == "ident" and self.tokens[self.pos + 1].text != "..":
            nxt = self.tokens[self.pos + 1]
            if not (nxt.kind == "op" and nxt.text in "+-*/["):
                tok = self._ident()
                return Name(tok.text, loc=tok.loc)
        self.pos = start
        lo = self.expr()
        self._expect("..")
        return Range(lo, self.expr())

    def fanout(self) -> FanoutClause:
        start = self._expect("fanout")
        self._expect("(")
        qubits = self._ident().text
        self._expect(",")
        replicas = self.expr()
        self._expect(")")
        return FanoutClause(qubits, replicas, loc=start.loc)

    def sections(self, start: Token) -> ParallelSections:
        self._expect("{")
        sections = []
        while self._accept("section"):
            sections.append(self.block())
        if not sections:
            self._fail(["section"])
        self._expect("}")
        return ParallelSections(sections, loc=start.loc)

    def if_result(self) -> IfResult:
        start = self._expect("if")
        if self._accept("MResetZ"):
            basis = "Z"
        elif self._accept("MResetX"):
            basis = "X"
        else:
            self._fail(["MResetZ", "MResetX"])
        self._expect("(")
        qubit = self.expr()
        self._expect(")")
        self._expect("==")
        self._expect("One")
        return IfResult(basis, qubit, self.block(), loc=start.loc)

    def call_stmt(self) -> Call:
        start = self.tok
        adjoint = self._accept("Adjoint") is not None
        if self.tok.text in MEASUREMENTS:
            callee = self.tok.text
            self.pos += 1
        else:
            callee = self._ident().text
        self._expect("(")
        args = []
        if not self._at(")"):
            args.append(self.expr())
            while self._accept(","):
                args.append(self.expr())
        self._expect(")")
        self._expect(";")
        return Call(callee, args, adjoint, loc=start.loc)

    # -- expressions --------------------------------------------------------

    def expr(self) -> Expr:
        left = self.term()
        while self._at("+") or self._at("-"):
            op = self.tok
            self.pos += 1
            left = Binary(op.text, left, self.term(), loc=op.loc)
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self._at("*") or self._at("/"):
            op = self.tok
            self.pos += 1
            left = Binary(op.text, left, self.unary(), loc=op.loc)
        return left

    def unary(self) -> Expr:
        tok = self.tok
        if self._accept("-"):
            return Unary("-", self.unary(), loc=tok.loc)
        return self.atom()

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "int":
            self.pos += 1
            return IntLit(int(tok.text), loc=tok.loc)
        if tok.kind == "real":
            value = float(tok.text)
            if not math.isfinite(value):
                raise QplSyntaxError(f"real literal out of range: {tok.text}", tok.line, tok.column)
            self.pos += 1
            return RealLit(value, loc=tok.loc)
        if self._accept("pi"):
            return Pi(loc=tok.loc)
        if self._accept("len"):
            self._expect("(")
            name = self._ident().text
            self._expect(")")
            return Len(name, loc=tok.loc)
        if self._accept("("):
            inner = self.expr()
            self._expect(")")
            return inner
        if tok.kind == "ident":
            self.pos += 1
            if self._accept("["):
                index = self.expr()
                self._expect("]")
                return Index(tok.text, index, loc=tok.loc)
            return Name(tok.text, loc=tok.loc)
        self._fail(["integer", "real", "pi", "len", "(", "identifier", "-"])


# -- resolution ---------------------------------------------------------------


class _Resolver:
    """Checks scoping, callees and intrinsic operand kinds."""

    def __init__(self, program: Program):
        self.program = program
        self.signatures: Dict[str, List[str]] = {}
        for op in program.operations:
            if op.name in INTRINSICS or op.name in self.signatures:
                raise ResolutionError(f"duplicate operation {op.name}", op.loc)
            self.signatures[op.name] = [p.type for p in op.params]

    def run(self) -> None:
        for op in self.program.operations:
            scope = {p.name: p.type for p in op.params}
            self.block(op.body, [scope], gate_only=False)

    def lookup(self, name: str, scopes: List[Dict[str, str]], loc: Location) -> str:
        for scope in reversed(scopes):
            if name in scope:
                return scope[name]
        raise ResolutionError(f"unknown identifier {name}", loc)

    def expr_type(self, expr: Expr, scopes: List[Dict[str, str]]) -> str:
        if isinstance(expr, IntLit):
            return INT
        if isinstance(expr, (RealLit, Pi)):
            return DOUBLE
        if isinstance(expr, Name):
            return self.lookup(expr.ident, scopes, expr.loc)
        if isinstance(expr, (Index, Len)):
            kind = self.lookup(expr.array, scopes, expr.loc)
            if kind != QUBIT_ARRAY:
                raise ArityError(f"{expr.array} is not a qubit array", expr.loc)
            if isinstance(expr, Index) and self.expr_type(expr.index, scopes) != INT:
                raise ArityError("array index must be Int", expr.loc)
            return QUBIT if isinstance(expr, Index) else INT
        operands = [expr.operand] if isinstance(expr, Unary) else [expr.left, expr.right]
        kinds = [self.expr_type(e, scopes) for e in operands]
        if any(k not in (INT, DOUBLE) for k in kinds):
            raise ArityError("arithmetic on a qubit value", expr.loc)
        return DOUBLE if DOUBLE in kinds else INT

    def iterable_type(self, it: Iterable, scopes: List[Dict[str, str]]) -> str:
        if isinstance(it, Name):
            if self.lookup(it.ident, scopes, it.loc) != QUBIT_ARRAY:
                raise ArityError(f"cannot iterate over {it.ident}", it.loc)
            return QUBIT
        for bound in (it.lo, it.hi):
            if self.expr_type(bound, scopes) != INT:
                raise ArityError("range bounds must be Int", getattr(bound, "loc", None))
        return INT

    def block(self, stmts: List[Stmt], scopes: List[Dict[str, str]], gate_only: bool) -> None:
        scopes = scopes + [{}]
        for stmt in stmts:
            if gate_only and not (isinstance(stmt, Call) and stmt.callee in INTRINSICS):
                raise ResolutionError(
                    "only intrinsic gates are allowed in a measurement-conditioned block",
                    getattr(stmt, "loc", None),
                )
            if gate_only and stmt.callee in MEASUREMENTS:
                raise ResolutionError(
                    f"{stmt.callee} cannot be conditioned on a measurement", stmt.loc
                )
            self.stmt(stmt, scopes)

    def stmt(self, stmt: Stmt, scopes: List[Dict[str, str]]) -> None:
        if isinstance(stmt, Use):
            if stmt.size is not None and self.expr_type(stmt.size, scopes) != INT:
                raise ArityError("qubit array size must be Int", stmt.loc)
            scopes[-1][stmt.name] = QUBIT if stmt.size is None else QUBIT_ARRAY
        elif isinstance(stmt, Let):
            scopes[-1][stmt.name] = self.expr_type(stmt.value, scopes)
        elif isinstance(stmt, (For, ParallelFor)):
            var_type = self.iterable_type(stmt.iterable, scopes)
            if isinstance(stmt, ParallelFor) and stmt.fanout is not None:
                kind = self.lookup(stmt.fanout.qubits, scopes, stmt.fanout.loc)
                if kind not in (QUBIT, QUBIT_ARRAY):
                    raise ArityError(f"cannot fan out {stmt.fanout.qubits}", stmt.fanout.loc)
                if self.expr_type(stmt.fanout.replicas, scopes) != INT:
                    raise ArityError("fanout replica count must be Int", stmt.fanout.loc)
            self.block(stmt.body, scopes + [{stmt.var: var_type}], gate_only=False)
        elif isinstance(stmt, ParallelSections):
            for section in stmt.sections:
                self.block(section, scopes, gate_only=False)
        elif isinstance(stmt, WithinApply):
            self.block(stmt.within, scopes, gate_only=False)
            self.block(stmt.apply, scopes, gate_only=False)
        elif isinstance(stmt, IfResult):
            if self.expr_type(stmt.qubit, scopes) != QUBIT:
                raise ArityError(f"MReset{stmt.basis} expects a qubit", stmt.loc)
            self.block(stmt.body, scopes, gate_only=True)
        else:
            self.call(stmt, scopes)

    def call(self, call: Call, scopes: List[Dict[str, str]]) -> None:
        if call.callee in INTRINSICS:
            expected = [DOUBLE if k == "D" else QUBIT for k in INTRINSICS[call.callee]]
            if call.adjoint and call.callee in MEASUREMENTS:
                raise ArityError(f"{call.callee} is not adjointable", call.loc)
        elif call.callee in self.signatures:
            expected = self.signatures[call.callee]
        else:
            raise ResolutionError(f"unknown callee {call.callee}", call.loc)
        if len(call.args) != len(expected):
            raise ArityError(
                f"{call.callee} expects {len(expected)} argument(s), got {len(call.args)}",
                call.loc,
            )
        for position, (arg, want) in enumerate(zip(call.args, expected)):
            got = self.expr_type(arg, scopes)
            if got != want and not (want == DOUBLE and got == INT):
                raise ArityError(
                    f"argument {position + 1} of {call.callee} must be {want}, got {got}",
                    call.loc,
                )


def parse(source: str) -> Program:
    """Parse and resolve QPL source text."""
    program = _Parser(tokenize(source)).program()
    _Resolver(program).run()
    logger.debug(f"[PARSE] {len(program.operations)} operation(s)")
    return program
