"""Query results, instrumentation counters and the engine base class."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .text_index import SuffixIndex, as_pattern

# slots of the int64 counter array every query kernel updates
VISITS, RMQ_CALLS, A_ACCESSES, LF_STEPS, RECURSION, BLOCKS = range(6)
N_COUNTERS = 6


class LevelError(IndexError):
    pass


@dataclass
class QueryResult:
    level: int
    nodes: list[int] = field(default_factory=list)

    @property
    def t(self) -> int:
        return len(self.nodes)

    def to_json(self) -> dict:
        return {"level": self.level, "t": self.t, "nodes": list(self.nodes)}


@dataclass
class QueryStats:
    """Work counters of one query (filled in place when passed to ``query``)."""

    pattern_len: int = 0
    interval: int = 0
    t: int = 0
    node_visits: int = 0
    rmq_calls: int = 0
    a_accesses: int = 0
    lf_steps: int = 0
    recursion_depth: int = 0
    scanned_blocks: int = 0

    def absorb(self, counters: np.ndarray):
        self.node_visits += int(counters[VISITS])
        self.rmq_calls += int(counters[RMQ_CALLS])
        self.a_accesses += int(counters[A_ACCESSES])
        self.lf_steps += int(counters[LF_STEPS])
        self.recursion_depth = max(self.recursion_depth, int(counters[RECURSION]))
        self.scanned_blocks += int(counters[BLOCKS])


class Engine:
    """Shared front half of every engine: pattern -> suffix interval -> report."""

    kind = "engine"

    def __init__(self, text: SuffixIndex, height: int):
        self.text = text
        self.height = int(height)

    @property
    def tag(self) -> str:
        return self.kind

    def query(self, pattern, level: int, scratch=None, stats: QueryStats | None = None) -> QueryResult:
        if not 1 <= level <= self.height:
            raise LevelError(f"level {level} outside [1..{self.height}]")
        p = as_pattern(pattern)
        rows = self.text.count(p)
        if stats is not None:
            stats.pattern_len = int(p.size)
            stats.interval = len(rows)
        if not rows:
            return QueryResult(level, [])
        counters = np.zeros(N_COUNTERS, dtype=np.int64)
        nodes = self._report(rows.start - 1, rows.stop - 2, level, scratch, counters)
        nodes = sorted(int(x) for x in nodes)
        if stats is not None:
            stats.absorb(counters)
            stats.t = len(nodes)
        return QueryResult(level, nodes)

    def _report(self, ql, qr, level, scratch, counters):
        """Report the level-``level`` nodes for 0-based rows ql..qr (inclusive)."""
        raise NotImplementedError

    def space_bits(self) -> dict:
        raise NotImplementedError
