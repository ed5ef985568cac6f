"""Pool-based qubit allocation with per-section reserved pools and fanout tables."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Set, Tuple

from loguru import logger

from ..errors import QubitManagerError
from .ir import QubitId


class ScopeKind(Enum):
    """Kinds of pool scopes pushed by the lowering."""

    PARALLEL = "parallel-block"
    SECTION = "section"


@dataclass
class PoolScope:
    """A parallel block or a section together with its reserved free pool."""

    kind: ScopeKind
    uid: int
    free: List[QubitId] = field(default_factory=list)
    allocated: Set[QubitId] = field(default_factory=set)
    section_counter: int = 0
    # section pools retained until the block ends
    retained: List[List[QubitId]] = field(default_factory=list)
    section_index: int = 0


@dataclass(frozen=True)
class FanoutRecord:
    """Originals plus copies for replicas 1..n-1, one id per original in each replica."""

    fanout_id: int
    originals: Tuple[QubitId, ...]
    copies: Tuple[Tuple[QubitId, ...], ...]

    @property
    def replicas(self) -> int:
        return len(self.copies) + 1

    def all_copies(self) -> List[QubitId]:
        return [q for replica in self.copies for q in replica]


@dataclass(frozen=True)
class AllocationEvent:
    """Log entry: which ids were allocated under which chain of (block, section) scopes."""

    ids: Tuple[QubitId, ...]
    sections: Tuple[Tuple[int, int], ...]


class QubitManager:
    """Hands out qubit ids from LIFO free pools.

    Outside any parallel block allocation uses the global pool. Each section
    starts with an empty reserved pool; ids released there can only be reused
    within that section, and all section pools flow back into the enclosing
    pool when the parallel block ends.
    """

    def __init__(self, max_qubits: Optional[int] = None):
        self.next_fresh = 0
        self.global_free: List[QubitId] = []
        self.scopes: List[PoolScope] = []
        self.max_qubits = max_qubits
        self.high_watermark = 0
        self.events: List[AllocationEvent] = []
        self._owner: Dict[QubitId, Optional[PoolScope]] = {}
        self._fanouts: List[FanoutRecord] = []
        self._next_fanout_id = 0
        self._next_scope_uid = 0

    # -- allocation ---------------------------------------------------------

    def _current_pool(self) -> List[QubitId]:
        return self.scopes[-1].free if self.scopes else self.global_free

    def allocate(self, count: int) -> List[QubitId]:
        """Take ``count`` ids from the innermost pool, minting fresh ids when it runs dry."""
        if count < 0:
            raise QubitManagerError(f"cannot allocate {count} qubits")
        pool = self._current_pool()
        scope = self.scopes[-1] if self.scopes else None
        ids: List[QubitId] = []
        for _ in range(count):
            if pool:
                q = pool.pop()
            else:
                q = self.next_fresh
                self.next_fresh += 1
            self._owner[q] = scope
            if scope is not None:
                scope.allocated.add(q)
            ids.append(q)
        occupied = self.occupied()
        self.high_watermark = max(self.high_watermark, occupied)
        if self.max_qubits is not None and occupied > self.max_qubits:
            raise QubitManagerError(
                f"qubit limit exceeded: {occupied} qubits in use > max {self.max_qubits}"
            )
        if ids:
            self.events.append(AllocationEvent(tuple(ids), self.section_path()))
            logger.debug(f"[QUBITS] allocate {ids} depth={len(self.scopes)}")
        return ids

    def release(self, ids: List[QubitId]) -> None:
        """Return ids to the pool of the scope that allocated them."""
        for q in ids:
            if q not in self._owner:
                if 0 <= q < self.next_fresh:
                    raise QubitManagerError(f"double release of qubit {q}")
                raise QubitManagerError(f"release of unknown id {q}")
            scope = self._owner.pop(q)
            if scope is None:
                self.global_free.append(q)
            else:
                scope.free.append(q)
        if ids:
            logger.debug(f"[QUBITS] release {ids}")

    # -- scopes -------------------------------------------------------------

    def _push(self, kind: ScopeKind) -> PoolScope:
        scope = PoolScope(kind=kind, uid=self._next_scope_uid)
        self._next_scope_uid += 1
        self.scopes.append(scope)
        return scope

    def _pop(self) -> PoolScope:
        scope = self.scopes.pop()
        parent = self.scopes[-1] if self.scopes else None
        # live ids outlive their scope only through the enclosing one
        for q, owner in self._owner.items():
            if owner is scope:
                self._owner[q] = parent
        return scope

    def begin_parallel(self) -> None:
        self._push(ScopeKind.PARALLEL)

    def end_parallel(self) -> None:
        """Close the innermost parallel block and merge its pools into the enclosing pool."""
        if not self.scopes or self.scopes[-1].kind is not ScopeKind.PARALLEL:
            raise QubitManagerError("end_parallel without a matching begin_parallel")
        block = self._pop()
        target = self._current_pool()
        for pool in block.retained:
            target.extend(pool)
        target.extend(block.free)
        logger.debug(f"[QUBITS] end parallel block {block.uid}: {block.section_counter} section(s)")

    def begin_section(self) -> int:
        """Open a section with an empty reserved pool; returns its block-local index."""
        if not self.scopes or self.scopes[-1].kind is not ScopeKind.PARALLEL:
            raise QubitManagerError("begin_section outside a parallel block")
        block = self.scopes[-1]
        index = block.section_counter
        block.section_counter += 1
        section = self._push(ScopeKind.SECTION)
        section.section_index = index
        return index

    def end_section(self) -> None:
        if not self.scopes or self.scopes[-1].kind is not ScopeKind.SECTION:
            raise QubitManagerError("end_section without a matching begin_section")
        section = self._pop()
        self.scopes[-1].retained.append(section.free)

    def section_path(self) -> Tuple[Tuple[int, int], ...]:
        """Chain of (parallel block uid, section index) for every open section."""
        path = []
        for outer, inner in zip(self.scopes, self.scopes[1:]):
            if outer.kind is ScopeKind.PARALLEL and inner.kind is ScopeKind.SECTION:
                path.append((outer.uid, inner.section_index))
        return tuple(path)

    # -- fanout -------------------------------------------------------------

    def fanout_register(self, originals: List[QubitId], replicas: int) -> int:
        """Allocate ``(replicas - 1) * len(originals)`` copies and record them."""
        if replicas < 1:
            raise QubitManagerError(f"fanout replica count < 1: {replicas}")
        for q in originals:
            if q not in self._owner:
                raise QubitManagerError(f"fanout of qubit {q} that is not live")
        copies = tuple(tuple(self.allocate(len(originals))) for _ in range(replicas - 1))
        record = FanoutRecord(self._next_fanout_id, tuple(originals), copies)
        self._next_fanout_id += 1
        self._fanouts.append(record)
        logger.debug(f"[QUBITS] fanout {record.fanout_id}: {list(originals)} x{replicas}")
        return record.fanout_id

    def fanout_record(self, fanout_id: int) -> FanoutRecord:
        for record in self._fanouts:
            if record.fanout_id == fanout_id:
                return record
        raise QubitManagerError(f"unknown fanout id {fanout_id}")

    def get_copies(self, fanout_id: int, section_index: int) -> List[QubitId]:
        """Replica ``section_index mod replicas``; replica 0 is the originals."""
        record = self.fanout_record(fanout_id)
        replica = section_index % record.replicas
        if replica == 0:
            return list(record.originals)
        return list(record.copies[replica - 1])

    def unfanout(self) -> FanoutRecord:
        """Pop the most recent fanout and release its copies."""
        if not self._fanouts:
            raise QubitManagerError("unfanout with no active fanout")
        record = self._fanouts.pop()
        self.release(list(reversed(record.all_copies())))
        return record

    # -- inspection ---------------------------------------------------------

    def live_ids(self) -> Set[QubitId]:
        return set(self._owner)

    def occupied(self) -> int:
        """Live ids plus ids parked in the pools of open parallel blocks and sections.

        Parked ids belong to sections that run concurrently, so they count as
        physical qubits in use.
        """
        parked = sum(len(scope.free) + sum(map(len, scope.retained)) for scope in self.scopes)
        return len(self._owner) + parked

    def free_pools(self) -> List[List[QubitId]]:
        """Every free pool currently holding ids, global pool first."""
        pools = [self.global_free]
        for scope in self.scopes:
            pools.append(scope.free)
            pools.extend(scope.retained)
        return pools

    def check_conservation(self) -> bool:
        """True iff live ids and pooled ids partition ``[0, next_fresh)``."""
        seen = list(self._owner)
        for pool in self.free_pools():
            seen.extend(pool)
        return len(seen) == len(set(seen)) and set(seen) == set(range(self.next_fresh))
