"""ASAP scheduling over the qubit-dependency DAG and critical-path extraction."""

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import networkx as nx
from loguru import logger
from tabulate import tabulate

from ..errors import ValidationError
from .ir import Gate, Instruction, Op, Trace, count_gates, t_like, validate_trace

T_DEPTH = "t-depth"
FULL_DEPTH = "full-depth"


@dataclass(frozen=True)
class MetricTable:
    """Per-gate costs. Markers and Alloc/Release always cost 0."""

    name: str
    costs: Dict[Gate, int] = field(default_factory=dict)

    def cost(self, inst: Instruction) -> int:
        if inst.op is not Op.GATE or inst.gate is None:
            return 0
        return self.costs.get(inst.gate, 0)

    def with_cost(self, kind: Gate, cost: int) -> "MetricTable":
        if cost < 0:
            raise ValueError(f"negative cost {cost} for {kind.value}")
        costs = dict(self.costs)
        costs[kind] = cost
        return MetricTable(self.name, costs)


def t_depth_metric(rz_cost: int = 1) -> MetricTable:
    """T and Tdg cost 1; Rz costs ``rz_cost``; everything else is free."""
    return MetricTable(T_DEPTH, {Gate.T: 1, Gate.TDG: 1, Gate.RZ: rz_cost})


def full_depth_metric() -> MetricTable:
    return MetricTable(FULL_DEPTH, {kind: 1 for kind in Gate})


PRESETS: Dict[str, Callable[[], MetricTable]] = {
    T_DEPTH: t_depth_metric,
    FULL_DEPTH: full_depth_metric,
}


def preset(name: str) -> MetricTable:
    if name not in PRESETS:
        raise KeyError(f"unknown metric preset {name!r} (choose from {', '.join(PRESETS)})")
    return PRESETS[name]()


@dataclass
class Schedule:
    """ASAP start/finish per instruction plus the critical path."""

    start: List[int]
    finish: List[int]
    depth: int
    costs: List[int]
    critical_path: List[int]
    # instruction whose finish fixed each start, None for time-0 starts
    pred: List[Optional[int]]


def schedule(trace: Trace, metric: MetricTable, validate: bool = True) -> Schedule:
    """Assign every instruction its earliest start allowed by shared qubits.

    Gates on a common qubit run in trace order; a classically controlled gate
    also waits for the measurement that fills its result slot.
    """
    if validate:
        diagnostics = validate_trace(trace)
        if diagnostics:
            raise ValidationError(diagnostics)

    n = len(trace.instructions)
    start = [0] * n
    finish = [0] * n
    costs = [0] * n
    pred: List[Optional[int]] = [None] * n
    # qubit or result slot -> (ready time, instruction that set it)
    ready: Dict[int, Tuple[int, int]] = {}
    result_ready: Dict[int, Tuple[int, int]] = {}

    for i, inst in enumerate(trace.instructions):
        candidates = [ready[q] for q in inst.qubits if q in ready]
        if inst.op is not Op.GATE:
            begin = max((t for t, _ in candidates), default=0)
            start[i] = finish[i] = begin
            continue
        if inst.condition is not None and inst.condition in result_ready:
            candidates.append(result_ready[inst.condition])
        begin = 0
        if candidates:
            begin = max(t for t, _ in candidates)
            if begin > 0:
                pred[i] = min(j for t, j in candidates if t == begin)
        costs[i] = metric.cost(inst)
        start[i] = begin
        finish[i] = begin + costs[i]
        for q in inst.qubits:
            ready[q] = (finish[i], i)
        if inst.result is not None:
            result_ready[inst.result] = (finish[i], i)

    depth = max(finish, default=0)
    path = _walk_critical_path(finish, costs, pred, depth)
    logger.debug(f"[SCHEDULE] {metric.name}: depth {depth}, path length {len(path)}")
    return Schedule(start, finish, depth, costs, path, pred)


def _walk_critical_path(
    finish: List[int], costs: List[int], pred: List[Optional[int]], depth: int
) -> List[int]:
    if depth == 0:
        return []
    current: Optional[int] = min(i for i, f in enumerate(finish) if f == depth)
    path = []
    while current is not None:
        if costs[current] > 0:
            path.append(current)
        current = pred[current]
    path.reverse()
    return path


@dataclass(frozen=True)
class PathEntry:
    index: int
    start: int
    finish: int
    stack: Tuple[str, ...]
    activations: Tuple[int, ...] = ()


def critical_path(sched: Schedule, trace: Trace) -> List[PathEntry]:
    """Cost-bearing instructions on the critical path, in time order."""
    return [
        PathEntry(
            i,
            sched.start[i],
            sched.finish[i],
            trace.instructions[i].stack,
            trace.instructions[i].activations,
        )
        for i in sched.critical_path
    ]


@dataclass
class FrameContribution:
    frame: str
    cost: int


@dataclass
class ResourceReport:
    metric: str
    depth: int
    t_count: int
    gate_count: int
    qubits: int
    frames: List[FrameContribution] = field(default_factory=list)
    stacks: List[FrameContribution] = field(default_factory=list)


def frame_contributions(
    trace: Trace, path: List[PathEntry]
) -> Tuple[List[FrameContribution], List[FrameContribution]]:
    """Critical-path cost per operation name (inclusive) and per full stack.

    Both lists are sorted by descending cost, then by name.
    """
    per_frame: Dict[str, int] = defaultdict(int)
    per_stack: Dict[str, int] = defaultdict(int)
    for entry in path:
        cost = entry.finish - entry.start
        for frame in set(entry.stack):
            per_frame[frame] += cost
        per_stack[";".join(entry.stack)] += cost

    def ranked(table: Dict[str, int]) -> List[FrameContribution]:
        return [
            FrameContribution(name, cost)
            for name, cost in sorted(table.items(), key=lambda kv: (-kv[1], kv[0]))
        ]

    return ranked(per_frame), ranked(per_stack)


def resource_report(trace: Trace, sched: Schedule, metric_name: str = "") -> ResourceReport:
    frames, stacks = frame_contributions(trace, critical_path(sched, trace))
    return ResourceReport(
        metric=metric_name,
        depth=sched.depth,
        t_count=count_gates(trace, t_like),
        gate_count=count_gates(trace, lambda _: True),
        qubits=trace.high_watermark,
        frames=frames,
        stacks=stacks,
    )


def format_report(report: ResourceReport, top: int = 5) -> str:
    """Render a report as two console tables."""
    summary = tabulate(
        [
            ["metric", report.metric],
            ["depth", report.depth],
            ["T-count", report.t_count],
            ["gate count", report.gate_count],
            ["qubits", report.qubits],
        ],
        tablefmt="simple",
    )
    if not report.frames:
        return summary
    rows = [[c.frame, c.cost] for c in report.frames[:top]]
    frames = tabulate(rows, headers=["frame", "critical-path cost"], tablefmt="simple")
    return f"{summary}\n\n{frames}"


def dependency_graph(trace: Trace, metric: MetricTable) -> "nx.DiGraph":
    """Every pair of gates sharing a qubit, plus measurement-to-condition edges.

    Nodes carry a ``cost`` attribute. This is the unreduced DAG the ASAP pass
    walks implicitly.
    """
    graph = nx.DiGraph()
    gates = [(i, inst) for i, inst in enumerate(trace.instructions) if inst.op is Op.GATE]
    for i, inst in gates:
        graph.add_node(i, cost=metric.cost(inst))
    writers: Dict[int, int] = {}
    for i, inst in gates:
        if inst.result is not None:
            writers[inst.result] = i
    for a, (i, first) in enumerate(gates):
        for j, second in gates[a + 1 :]:
            if set(first.qubits) & set(second.qubits):
                graph.add_edge(i, j)
        if first.condition is not None and first.condition in writers:
            graph.add_edge(writers[first.condition], i)
    return graph


def longest_path_depth(graph: "nx.DiGraph") -> int:
    """Largest node-weighted path cost in a DAG built by :func:`dependency_graph`."""
    best: Dict[int, int] = {}
    for node in nx.topological_sort(graph):
        incoming = max((best[p] for p in graph.predecessors(node)), default=0)
        best[node] = incoming + graph.nodes[node]["cost"]
    return max(best.values(), default=0)
