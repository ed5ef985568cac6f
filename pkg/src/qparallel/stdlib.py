"""Circuit generators and the shipped ``.qpl`` corpus.

Generators are pure source-text producers: each returns QPL text for one
size and parallelism mode. ``build`` dispatches a :class:`CircuitSpec` to the
matching generator and reports the entry operation and its arguments.
"""

import math
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from loguru import logger

from .core.ir import Trace
from .errors import ConfigError
from .lowering import EntryArgs, trace_program
from .parser import parse

PARALLEL = "parallel"
SERIAL = "serial"
MODES = (PARALLEL, SERIAL)

CONTROLLED_RZ = "controlled-rz"
AND_GATE = "and-gate"
MCX = "mcx"
CLA_ADDER = "cla-adder"
RIPPLE_ADDER = "ripple-adder"
GIVENS = "givens"
CONTROLLED_ADDER = "controlled-adder"
FANOUT_DEMO = "fanout-demo"
FAMILIES = (
    CONTROLLED_RZ,
    AND_GATE,
    MCX,
    CLA_ADDER,
    RIPPLE_ADDER,
    GIVENS,
    CONTROLLED_ADDER,
    FANOUT_DEMO,
)

CORPUS_DIR = Path(__file__).parent / "corpus"
CORPUS_SUFFIX = ".qpl"

AND_LIBRARY = """\
// Logical AND of a and b into a fresh target: four T gates in a single layer.
operation And(a : Qubit, b : Qubit, t : Qubit) : Unit {
    use h = Qubit();
    H(t);
    within {
        CNOT(a, h);
        CNOT(b, h);
        CNOT(t, h);
        CNOT(t, a);
        CNOT(t, b);
    } apply {
        T(t);
        Tdg(a);
        Tdg(b);
        T(h);
    }
    H(t);
    S(t);
}

// Measurement-based uncomputation of And; no T gates.
operation AndUncompute(a : Qubit, b : Qubit, t : Qubit) : Unit {
    if MResetX(t) == One {
        CZ(a, b);
    }
}
"""

TOFFOLI_INTO = """\
// target ^= x AND y through a temporary And.
operation ToffoliInto(x : Qubit, y : Qubit, target : Qubit) : Unit {
    use t = Qubit();
    And(x, y, t);
    CNOT(t, target);
    AndUncompute(x, y, t);
}
"""

CONTROLLED_RZ_LIBRARY = """\
// Rz(angle) on target when control is set, via one helper and two Fredkin gates.
operation ControlledRz(angle : Double, control : Qubit, target : Qubit) : Unit {
    use helper = Qubit();
    within {
        CSWAP(control, helper, target);
    } apply {
        Rz(angle, helper);
    }
}
"""

RIPPLE_LIBRARY = """\
// b := a + b mod 2^n, one And per carry; carry[0] stays zero.
operation RippleAdd(a : Qubit[], b : Qubit[]) : Unit {
    let n = len(a);
    use carry = Qubit[n];
    for i in 0..n - 2 {
        CNOT(carry[i], a[i]);
        CNOT(carry[i], b[i]);
        And(a[i], b[i], carry[i + 1]);
        CNOT(carry[i], carry[i + 1]);
    }
    CNOT(carry[n - 1], b[n - 1]);
    CNOT(a[n - 1], b[n - 1]);
    for r in 0..n - 2 {
        let i = n - 2 - r;
        CNOT(carry[i], carry[i + 1]);
        AndUncompute(a[i], b[i], carry[i + 1]);
        CNOT(carry[i], a[i]);
        CNOT(a[i], b[i]);
    }
}
"""


@dataclass(frozen=True)
class CircuitSpec:
    """One point of a tradeoff study.

    ``size`` is the control count for mcx, the rotation count for
    controlled-rz and fanout-demo, the bit width for the adders and the adder
    count for givens. ``cutoff`` defaults to full recursion depth.
    """

    family: str
    size: int = 2
    mode: str = PARALLEL
    cutoff: Optional[int] = None
    bitwidth: int = 32
    q: int = 1
    k: int = 2
    variant: str = "compute"

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown family {self.family!r} (choose from {', '.join(FAMILIES)})")
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.size < 1:
            raise ConfigError(f"{self.family} size must be >= 1, got {self.size}")
        if self.family == MCX:
            if self.size < 2:
                raise ConfigError(f"mcx requires n >= 2, got {self.size}")
            top = _ceil_log2(self.size)
            if self.cutoff is not None and not 0 <= self.cutoff <= top:
                raise ConfigError(
                    f"invalid cutoff {self.cutoff} for n={self.size}: expected 0..{top}"
                )
        if self.family == GIVENS and (self.q < 1 or self.bitwidth < 1):
            raise ConfigError(f"givens requires q >= 1 and bitwidth >= 1, got q={self.q}")
        if self.family in (CONTROLLED_ADDER, FANOUT_DEMO) and self.k < 1:
            raise ConfigError(f"fanout replica count must be >= 1, got {self.k}")
        if self.family == AND_GATE and self.variant not in ("compute", "uncompute"):
            raise ConfigError(f"unknown and-gate variant {self.variant!r}")

    def extras(self) -> str:
        """Family-specific parameters as a ``key=value`` string for sweep rows."""
        if self.family == MCX:
            return f"cutoff={self.effective_cutoff()}"
        if self.family == GIVENS:
            return f"q={self.q};bitwidth={self.bitwidth}"
        if self.family in (CONTROLLED_ADDER, FANOUT_DEMO):
            return f"k={self.k}"
        if self.family == AND_GATE:
            return f"variant={self.variant}"
        return ""

    def effective_cutoff(self) -> int:
        if self.mode == SERIAL:
            return 0
        return _ceil_log2(self.size) if self.cutoff is None else self.cutoff


def _ceil_log2(n: int) -> int:
    return max(0, math.ceil(math.log2(n))) if n > 1 else 0


class _Source:
    """Line buffer with four-space block indentation."""

    def __init__(self) -> None:
        self.lines: List[str] = []
        self.depth = 0

    def line(self, text: str = "") -> None:
        self.lines.append("    " * self.depth + text if text else "")

    def chunk(self, text: str) -> None:
        for line in text.rstrip("\n").splitlines():
            self.line(line)
        self.line()

    @contextmanager
    def block(self, header: str) -> Iterator[None]:
        self.line(header + " {")
        self.depth += 1
        yield
        self.depth -= 1
        self.line("}")

    def text(self) -> str:
        while self.lines and not self.lines[-1]:
            self.lines.pop()
        return "\n".join(self.lines) + "\n"


def _lin(coef: int, const: int, var: str) -> str:
    """Render ``coef * var + const`` with minimal punctuation."""
    if coef == 0:
        return str(const)
    if coef < 0:
        term = var if coef == -1 else f"{-coef} * {var}"
        return f"{const} - {term}" if const else f"-{term}"
    term = var if coef == 1 else f"{coef} * {var}"
    if const > 0:
        return f"{term} + {const}"
    if const < 0:
        return f"{term} - {-const}"
    return term


def _for(mode: str) -> str:
    return "parallel for" if mode == PARALLEL else "for"


# -- controlled rotations -----------------------------------------------------


def gen_controlled_rz(mode: str = PARALLEL) -> str:
    """``ControlledRz`` plus the ``ApplyRotations(n)`` driver and a single-rotation entry."""
    src = _Source()
    src.chunk(CONTROLLED_RZ_LIBRARY)
    src.line("// n independent controlled rotations, each with its own helper.")
    with src.block("operation ApplyRotations(n : Int) : Unit"):
        src.line("use ctls = Qubit[n];")
        src.line("use tgts = Qubit[n];")
        with src.block(f"{_for(mode)} i in 0..n - 1"):
            src.line("ControlledRz(pi * i / n, ctls[i], tgts[i]);")
    src.line()
    with src.block("operation RotateOnce(angle : Double) : Unit"):
        src.line("use control = Qubit();")
        src.line("use target = Qubit();")
        src.line("ControlledRz(angle, control, target);")
    return src.text()


# -- AND gadget -----------------------------------------------------------------


def gen_and(variant: str = "compute") -> str:
    """The AND gadget with an entry ``Main`` running either its compute or its uncompute half."""
    if variant not in ("compute", "uncompute"):
        raise ConfigError(f"unknown and-gate variant {variant!r}")
    src = _Source()
    src.chunk(AND_LIBRARY)
    with src.block("operation Main() : Unit"):
        src.line("use a = Qubit();")
        src.line("use b = Qubit();")
        src.line("use t = Qubit();")
        if variant == "compute":
            src.line("And(a, b, t);")
        else:
            src.line("AndUncompute(a, b, t);")
    return src.text()


# -- multi-controlled NOT -----------------------------------------------------------


@dataclass
class _AndNode:
    lo: int
    hi: int
    left: Optional["_AndNode"] = None
    right: Optional["_AndNode"] = None
    anc: int = -1

    @property
    def leaf(self) -> bool:
        return self.hi - self.lo == 1

    def value(self) -> str:
        return f"ctls[{self.lo}]" if self.leaf else f"anc[{self.anc}]"


def _and_tree(lo: int, hi: int, counter: List[int]) -> _AndNode:
    node = _AndNode(lo, hi)
    if node.leaf:
        return node
    mid = lo + (hi - lo + 1) // 2
    node.left = _and_tree(lo, mid, counter)
    node.right = _and_tree(mid, hi, counter)
    node.anc = counter[0]
    counter[0] += 1
    return node


def _emit_tree(
    src: _Source, node: _AndNode, depth: int, cutoff: int, gadget: str, uncompute: bool
) -> None:
    if node.leaf:
        return
    assert node.left is not None and node.right is not None
    call = f"{gadget}({node.left.value()}, {node.right.value()}, anc[{node.anc}]);"
    if uncompute:
        src.line(call)
    children = [node.left, node.right]
    if depth < cutoff and not node.left.leaf and not node.right.leaf:
        with src.block("parallel sections"):
            for child in children:
                with src.block("section"):
                    _emit_tree(src, child, depth + 1, cutoff, gadget, uncompute)
    else:
        for child in children:
            _emit_tree(src, child, depth + 1, cutoff, gadget, uncompute)
    if not uncompute:
        src.line(call)


def gen_mcx(n: int, cutoff: Optional[int] = None, mode: str = PARALLEL) -> str:
    """Balanced AND tree over ``n`` controls, a CNOT onto the target, then the mirrored uncompute.

    In parallel mode the two halves of every node above recursion depth
    ``cutoff`` run as sibling sections; below it the tree is serial.
    """
    spec = CircuitSpec(MCX, n, mode, cutoff)
    spec.validate()
    limit = spec.effective_cutoff()
    root = _and_tree(0, n, [0])
    src = _Source()
    src.chunk(AND_LIBRARY)
    src.line(f"// C^{n}X with parallel recursion down to depth {limit}.")
    with src.block("operation Mcx(ctls : Qubit[], target : Qubit) : Unit"):
        src.line(f"use anc = Qubit[{n - 1}];")
        _emit_tree(src, root, 0, limit, "And", uncompute=False)
        src.line(f"CNOT(anc[{root.anc}], target);")
        _emit_tree(src, root, 0, limit, "AndUncompute", uncompute=True)
    src.line()
    with src.block("operation Main() : Unit"):
        src.line(f"use ctls = Qubit[{n}];")
        src.line("use target = Qubit();")
        src.line("Mcx(ctls, target);")
    return src.text()


# -- carry-lookahead addition -------------------------------------------------------

# A linear index ``coef * m + const`` over a round's loop counter m = 1..count.
_Linear = Tuple[int, int]


class _CarryLayout:
    """Index bookkeeping for the propagate/generate rounds over ``width`` bits.

    Level-0 propagates live in ``b`` (which holds a XOR b during the rounds).
    Group propagates of level ``l >= 1`` cover 2^l bits ending at bit
    ``e * 2^l - 1`` for entry ``e = 1..width >> l`` and are stored in ``pt``.
    """

    def __init__(self, width: int):
        self.width = width
        self.levels = _ceil_log2(width)
        self.base: Dict[int, int] = {}
        size = 0
        for level in range(1, self.levels):
            self.base[level] = size
            size += width >> level
        self.size = size

    def propagate(self, level: int, entry: _Linear, render: Callable[[_Linear], str]) -> str:
        coef, const = entry
        if level == 0:
            return f"b[{render((coef, const - 1))}]"
        return f"pt[{render((coef, const + self.base[level] - 1))}]"

    def tree_count(self, level: int) -> int:
        return self.width >> level

    def up_count(self, k: int) -> int:
        return self.width >> (k + 1)

    def down_count(self, k: int) -> int:
        span = 1 << k
        return (self.width - span) >> (k + 1) if self.width > span else 0

    def tree_stmt(self, level: int, gadget: str, render: Callable[[_Linear], str]) -> str:
        upper = self.propagate(level - 1, (2, 0), render)
        lower = self.propagate(level - 1, (2, -1), render)
        target = f"pt[{render((1, self.base[level] - 1))}]"
        return f"{gadget}({upper}, {lower}, {target});"

    def up_stmt(self, k: int, render: Callable[[_Linear], str]) -> str:
        stride = 1 << (k + 1)
        group = self.propagate(k, (2, 0), render)
        lower = render((stride, -(1 << k) - 1))
        upper = render((stride, -1))
        return f"ToffoliInto({group}, g[{lower}], g[{upper}]);"

    def down_stmt(self, k: int, render: Callable[[_Linear], str]) -> str:
        stride = 1 << (k + 1)
        group = self.propagate(k, (2, 1), render)
        lower = render((stride, -1))
        upper = render((stride, (1 << k) - 1))
        return f"ToffoliInto({group}, g[{lower}], g[{upper}]);"


def _round(
    src: _Source,
    count: int,
    stmt: Callable[[Callable[[_Linear], str]], str],
    mode: str,
    reverse: bool = False,
) -> None:
    if count <= 0:
        return
    var = "r" if reverse else "m"

    def render(index: _Linear) -> str:
        coef, const = index
        if reverse:
            # m = count + 1 - r walks the same entries backwards
            coef, const = -coef, const + coef * (count + 1)
        return _lin(coef, const, var)

    with src.block(f"{_for(mode)} {var} in 1..{count}"):
        src.line(stmt(render))


def _carry_prefix(src: _Source, layout: _CarryLayout, mode: str, inverse: bool) -> None:
    name = "CarryPrefixInverse" if inverse else "CarryPrefix"
    with src.block(f"operation {name}(b : Qubit[], g : Qubit[], pt : Qubit[]) : Unit"):
        for level in range(1, layout.levels):
            _round(
                src,
                layout.tree_count(level),
                lambda r, lv=level: layout.tree_stmt(lv, "And", r),
                mode,
            )
        ups = list(range(layout.levels))
        downs = list(range(layout.levels - 2, -1, -1))
        if inverse:
            for k in reversed(downs):
                _round(src, layout.down_count(k), lambda r, k=k: layout.down_stmt(k, r), mode, True)
            for k in reversed(ups):
                _round(src, layout.up_count(k), lambda r, k=k: layout.up_stmt(k, r), mode, True)
        else:
            for k in ups:
                _round(src, layout.up_count(k), lambda r, k=k: layout.up_stmt(k, r), mode)
            for k in downs:
                _round(src, layout.down_count(k), lambda r, k=k: layout.down_stmt(k, r), mode)
        for level in range(layout.levels - 1, 0, -1):
            _round(
                src,
                layout.tree_count(level),
                lambda r, lv=level: layout.tree_stmt(lv, "AndUncompute", r),
                mode,
            )
    src.line()


def _cla_library(src: _Source, width: int, mode: str) -> None:
    """Emit ``CarryLookaheadAdd`` for ``width`` bits and everything it calls."""
    if width == 1:
        with src.block("operation CarryLookaheadAdd(a : Qubit[], b : Qubit[]) : Unit"):
            src.line("CNOT(a[0], b[0]);")
        src.line()
        return
    layout = _CarryLayout(width)
    last = width - 1
    src.chunk(AND_LIBRARY)
    src.chunk(TOFFOLI_INTO)
    src.line("// g[i] := carry out of bits 0..i, from generates in g and propagates in b.")
    _carry_prefix(src, layout, mode, inverse=False)
    _carry_prefix(src, layout, mode, inverse=True)
    src.line(f"// b := a + b mod 2^{width}.")
    src.line("// Carries are cleared by rerunning the rounds on a and ~(a + b).")
    with src.block("operation CarryLookaheadAdd(a : Qubit[], b : Qubit[]) : Unit"):
        src.line(f"use g = Qubit[{width}];")
        src.line(f"use pt = Qubit[{layout.size}];")
        with src.block(f"{_for(mode)} i in 0..{last}"):
            src.line("And(a[i], b[i], g[i]);")
        with src.block(f"for i in 0..{last}"):
            src.line("CNOT(a[i], b[i]);")
        src.line("CarryPrefix(b, g, pt);")
        with src.block(f"for i in 1..{last}"):
            src.line("CNOT(g[i - 1], b[i]);")
        with src.block(f"for i in 0..{last}"):
            src.line("X(b[i]);")
            src.line("CNOT(a[i], b[i]);")
        src.line("CarryPrefixInverse(b, g, pt);")
        with src.block(f"for i in 0..{last}"):
            src.line("CNOT(a[i], b[i]);")
        with src.block(f"{_for(mode)} i in 0..{last}"):
            src.line("AndUncompute(a[i], b[i], g[i]);")
        with src.block(f"for i in 0..{last}"):
            src.line("X(b[i]);")
    src.line()


def gen_cla_adder(width: int, mode: str = PARALLEL) -> str:
    """In-place carry-lookahead adder ``|a>|b> -> |a>|a + b mod 2^width>``.

    Every propagate/generate round is one loop over a strided index set;
    parallel mode marks those loops ``parallel for``.
    """
    CircuitSpec(CLA_ADDER, width, mode).validate()
    src = _Source()
    _cla_library(src, width, mode)
    with src.block("operation Main() : Unit"):
        src.line(f"use a = Qubit[{width}];")
        src.line(f"use b = Qubit[{width}];")
        src.line("CarryLookaheadAdd(a, b);")
    return src.text()


def gen_ripple_adder(width: int) -> str:
    """Serial ripple-carry baseline; it has no parallel form."""
    CircuitSpec(RIPPLE_ADDER, width).validate()
    src = _Source()
    src.chunk(AND_LIBRARY)
    src.chunk(RIPPLE_LIBRARY)
    with src.block("operation Main() : Unit"):
        src.line(f"use a = Qubit[{width}];")
        src.line(f"use b = Qubit[{width}];")
        src.line("RippleAdd(a, b);")
    return src.text()


def gen_controlled_adder(width: int, k: int = 2, mode: str = PARALLEL) -> str:
    """``b += a`` when ``ctl`` is set: copy ``ctl AND a`` out, add it, then clear the copy.

    The control is read by every iteration of both copy loops, so parallel
    mode fans it out into ``k`` replicas.
    """
    CircuitSpec(CONTROLLED_ADDER, width, mode, k=k).validate()
    src = _Source()
    _cla_library(src, width, mode)
    if width == 1:
        src.chunk(AND_LIBRARY)
    last = width - 1
    loop = f"for i in 0..{last}"
    if mode == PARALLEL:
        loop = f"parallel {loop} fanout(ctl, {k})"
    with src.block("operation ControlledAdd(ctl : Qubit, a : Qubit[], b : Qubit[]) : Unit"):
        src.line(f"use t = Qubit[{width}];")
        with src.block(loop):
            src.line("And(ctl, a[i], t[i]);")
        src.line("CarryLookaheadAdd(t, b);")
        with src.block(loop):
            src.line("AndUncompute(ctl, a[i], t[i]);")
    src.line()
    with src.block("operation Main() : Unit"):
        src.line("use ctl = Qubit();")
        src.line(f"use a = Qubit[{width}];")
        src.line(f"use b = Qubit[{width}];")
        src.line("ControlledAdd(ctl, a, b);")
    return src.text()


# -- Givens rotations ---------------------------------------------------------------


def gen_givens(count: int, bitwidth: int = 32, q: int = 1, mode: str = PARALLEL) -> str:
    """``count`` additions of angle registers into ``q`` Fourier-state registers.

    Adder ``i`` targets register ``i mod q``. Parallel mode runs each chunk of
    ``q`` adders as sibling sections. The adders themselves are always the
    serial carry-lookahead core, so chunking is the only source of
    parallelism.
    """
    CircuitSpec(GIVENS, count, mode, bitwidth=bitwidth, q=q).validate()
    src = _Source()
    _cla_library(src, bitwidth, SERIAL)
    src.line("// Fourier-state preparation is opaque here and costs nothing.")
    with src.block("operation PrepareResource(register : Qubit[]) : Unit"):
        pass
    src.line()
    with src.block("operation Main() : Unit"):
        for r in range(q):
            src.line(f"use f{r} = Qubit[{bitwidth}];")
        for i in range(count):
            src.line(f"use x{i} = Qubit[{bitwidth}];")
        for r in range(q):
            src.line(f"PrepareResource(f{r});")
        for start in range(0, count, q):
            chunk = range(start, min(start + q, count))
            if mode == PARALLEL:
                with src.block("parallel sections"):
                    for i in chunk:
                        with src.block("section"):
                            src.line(f"CarryLookaheadAdd(x{i}, f{i % q});")
            else:
                for i in chunk:
                    src.line(f"CarryLookaheadAdd(x{i}, f{i % q});")
    return src.text()


def gen_fanout_demo(n: int, k: int = 2, mode: str = PARALLEL) -> str:
    """``n`` rotations sharing one control, fanned out into ``k`` replicas in parallel mode."""
    CircuitSpec(FANOUT_DEMO, n, mode, k=k).validate()
    src = _Source()
    src.chunk(CONTROLLED_RZ_LIBRARY)
    header = "for t in targets"
    if mode == PARALLEL:
        header = f"parallel {header} fanout(control, {k})"
    with src.block("operation Main() : Unit"):
        src.line("use control = Qubit();")
        src.line(f"use targets = Qubit[{n}];")
        with src.block(header):
            src.line("ControlledRz(pi / 4.0, control, t);")
    return src.text()


# -- dispatch -----------------------------------------------------------------------


def build(spec: CircuitSpec) -> Tuple[str, str, EntryArgs]:
    """Source text, entry operation and entry arguments for ``spec``."""
    spec.validate()
    if spec.family == CONTROLLED_RZ:
        return gen_controlled_rz(spec.mode), "ApplyRotations", {"n": spec.size}
    if spec.family == AND_GATE:
        return gen_and(spec.variant), "Main", {}
    if spec.family == MCX:
        return gen_mcx(spec.size, spec.cutoff, spec.mode), "Main", {}
    if spec.family == CLA_ADDER:
        return gen_cla_adder(spec.size, spec.mode), "Main", {}
    if spec.family == RIPPLE_ADDER:
        return gen_ripple_adder(spec.size), "Main", {}
    if spec.family == GIVENS:
        return gen_givens(spec.size, spec.bitwidth, spec.q, spec.mode), "Main", {}
    if spec.family == CONTROLLED_ADDER:
        return gen_controlled_adder(spec.size, spec.k, spec.mode), "Main", {}
    return gen_fanout_demo(spec.size, spec.k, spec.mode), "Main", {}


def trace_circuit(spec: CircuitSpec, serial: bool = False) -> Trace:
    source, entry, args = build(spec)
    logger.debug(f"[SWEEP] tracing {spec.family} size={spec.size} mode={spec.mode} {spec.extras()}")
    return trace_program(parse(source), entry, args, serial=serial)


def qubit_width(spec: CircuitSpec) -> int:
    """High-watermark of the traced program for ``spec``."""
    return trace_circuit(spec).high_watermark


# -- corpus -------------------------------------------------------------------------


def corpus_programs() -> Dict[str, str]:
    """Shipped corpus programs by file stem."""
    return {
        path.stem: path.read_text(encoding="utf-8")
        for path in sorted(CORPUS_DIR.glob(f"*{CORPUS_SUFFIX}"))
    }


# Generated programs written next to the shipped corpus by ``write_corpus``.
SAMPLES = (
    CircuitSpec(MCX, 8),
    CircuitSpec(MCX, 8, SERIAL),
    CircuitSpec(CLA_ADDER, 4),
    CircuitSpec(CLA_ADDER, 4, SERIAL),
    CircuitSpec(GIVENS, 4, bitwidth=4, q=2),
    CircuitSpec(CONTROLLED_ADDER, 2, k=2),
)


def sample_name(spec: CircuitSpec) -> str:
    return f"{spec.family.replace('-', '_')}_{spec.size}_{spec.mode}"


def write_corpus(directory: Path) -> List[Path]:
    """Write the shipped corpus plus generated samples into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in corpus_programs().items():
        path = directory / f"{name}{CORPUS_SUFFIX}"
        path.write_text(text, encoding="utf-8")
        written.append(path)
    for spec in SAMPLES:
        path = directory / f"{sample_name(spec)}{CORPUS_SUFFIX}"
        path.write_text(build(spec)[0], encoding="utf-8")
        written.append(path)
    logger.debug(f"[SWEEP] wrote {len(written)} corpus files to {directory}")
    return written
