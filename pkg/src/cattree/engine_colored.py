"""Per-level colored range reporting over the virtual arrays A_i.

A_i[j] is the level-i ancestor of document A[j], read through the document
array and a level-ancestor query. Exact mode (alpha = 1) keeps the
previous-occurrence array of every level under an RMQ and reports by the
classic leftmost-minimum recursion. Sparsified mode (alpha > 1) keeps only
per-block minima of the previous-occurrence array: blocks whose minimum lies
before the query start are scanned cell by cell, as are the two boundary
blocks, and every color met in a scanned cell is reported once.
"""
from __future__ import annotations

import math

import numpy as np

from ._accel import jit
from ._bits import bit_at, clear_bit, set_bit
from .corpus import CategoryTree
from .query import A_ACCESSES, BLOCKS, LF_STEPS, RMQ_CALLS, Engine
from .succinct import RangeMinimum, rmq_kernel
from .text_index import DocumentArray, SuffixIndex, doc_at_steps_kernel
from .topology import LevelAncestorIndex, ancestor_table, laq_kernel


@jit
def _report_cell(j, dacc, tree, level_rank, lev, seen, touched, n_touched, out, n_out, counters):
    doc, steps = doc_at_steps_kernel(dacc, j)
    counters[A_ACCESSES] += 1
    counters[LF_STEPS] += steps
    if doc == 0:
        return n_touched, n_out
    color = laq_kernel(tree, tree[2][doc - 1], lev)
    slot = level_rank[color]
    if bit_at(seen, slot) == 0:
        set_bit(seen, slot)
        touched[n_touched] = slot
        out[n_out] = color
        return n_touched + 1, n_out + 1
    return n_touched, n_out


@jit
def _reset(seen, touched, n_touched):
    for k in range(n_touched):
        clear_bit(seen, touched[k])


@jit
def colored_exact_kernel(rmq, dacc, tree, level_rank, lev, ql, qr, seen, touched, out, counters):
    prev = rmq[0]
    stack = np.empty((out.shape[0] + 2, 2), dtype=np.int64)
    stack[0, 0] = ql
    stack[0, 1] = qr
    top = 1
    n_touched = 0
    n_out = 0
    while top > 0:
        top -= 1
        l = stack[top, 0]
        r = stack[top, 1]
        if l > r:
            continue
        counters[RMQ_CALLS] += 1
        m = rmq_kernel(rmq, l, r)
        # prev holds 1-based rows; <= ql means no earlier occurrence inside [ql..]
        if prev[m] > ql:
            continue
        n_touched, n_out = _report_cell(
            m, dacc, tree, level_rank, lev, seen, touched, n_touched, out, n_out, counters
        )
        stack[top, 0] = l
        stack[top, 1] = m - 1
        stack[top + 1, 0] = m + 1
        stack[top + 1, 1] = r
        top += 2
    _reset(seen, touched, n_touched)
    return n_out


@jit
def colored_sparse_kernel(rmq, alpha, dacc, tree, level_rank, lev, ql, qr, seen, touched, out, counters):
    mins = rmq[0]
    n_touched = 0
    n_out = 0
    bl = ql // alpha
    br = qr // alpha
    if br - bl <= 1:
        for j in range(ql, qr + 1):
            n_touched, n_out = _report_cell(
                j, dacc, tree, level_rank, lev, seen, touched, n_touched, out, n_out, counters
            )
        _reset(seen, touched, n_touched)
        return n_out
    for j in range(ql, (bl + 1) * alpha):
        n_touched, n_out = _report_cell(
            j, dacc, tree, level_rank, lev, seen, touched, n_touched, out, n_out, counters
        )
    for j in range(br * alpha, qr + 1):
        n_touched, n_out = _report_cell(
            j, dacc, tree, level_rank, lev, seen, touched, n_touched, out, n_out, counters
        )
    stack = np.empty((out.shape[0] + 2, 2), dtype=np.int64)
    stack[0, 0] = bl + 1
    stack[0, 1] = br - 1
    top = 1
    while top > 0:
        top -= 1
        l = stack[top, 0]
        r = stack[top, 1]
        if l > r:
            continue
        counters[RMQ_CALLS] += 1
        m = rmq_kernel(rmq, l, r)
        if mins[m] > ql:
            continue
        counters[BLOCKS] += 1
        for j in range(m * alpha, (m + 1) * alpha):
            n_touched, n_out = _report_cell(
                j, dacc, tree, level_rank, lev, seen, touched, n_touched, out, n_out, counters
            )
        stack[top, 0] = l
        stack[top, 1] = m - 1
        stack[top + 1, 0] = m + 1
        stack[top + 1, 1] = r
        top += 2
    _reset(seen, touched, n_touched)
    return n_out


class InvalidAlpha(ValueError):
    pass


class QueryScratch:
    """Writable D-bit vector shared by all levels, plus the list of set bits."""

    def __init__(self, size: int):
        self.size = int(size)
        self.seen = np.zeros(-(-max(1, self.size) // 64), dtype=np.uint64)
        self.touched = np.zeros(max(1, self.size), dtype=np.int64)

    def is_clear(self) -> bool:
        return not self.seen.any()


def previous_occurrence(colors: np.ndarray) -> np.ndarray:
    """prev[j] = 1-based position of the last earlier equal color, 0 if none."""
    order = np.argsort(colors, kind="stable")
    sc = colors[order]
    prev_sorted = np.zeros(colors.size, dtype=np.int64)
    same = np.flatnonzero(sc[1:] == sc[:-1]) + 1
    prev_sorted[same] = order[same - 1] + 1
    prev = np.empty(colors.size, dtype=np.int64)
    prev[order] = prev_sorted
    return prev


def level_colors(a: np.ndarray, tree: CategoryTree) -> np.ndarray:
    """A_i for every level as an (h, n') array; separator rows get color -1."""
    anc = ancestor_table(tree)
    out = np.full((tree.height, a.size), -1, dtype=np.int64)
    nz = a > 0
    out[:, nz] = anc[:, a[nz] - 1]
    return out


def level_ranks(tree: CategoryTree) -> np.ndarray:
    """Dense 0-based rank of every node among the nodes of its level."""
    order = np.lexsort((np.arange(tree.node_count), tree.level))
    lev = tree.level[order]
    first = np.searchsorted(lev, lev, side="left")
    rank = np.empty(tree.node_count, dtype=np.int64)
    rank[order] = np.arange(tree.node_count) - first
    return rank


class LevelReporter:
    """Colored range reporting structure for one tree level."""

    def __init__(self, level: int, colors: np.ndarray, alpha: int = 1):
        if alpha < 1:
            raise InvalidAlpha(f"alpha must be >= 1, got {alpha}")
        self.level = int(level)
        self.alpha = int(alpha)
        prev = previous_occurrence(colors)
        if self.alpha == 1:
            self.rmq = RangeMinimum(prev)
        else:
            nb = -(-prev.size // self.alpha)
            padded = np.full(nb * self.alpha, np.iinfo(np.int64).max, dtype=np.int64)
            padded[: prev.size] = prev
            self.rmq = RangeMinimum(padded.reshape(nb, self.alpha).min(axis=1))

    @property
    def indexed_cells(self) -> int:
        return int(self.rmq.size)

    def space_bits(self) -> int:
        return self.rmq.space_bits()

    def state(self):
        return {"level": self.level, "alpha": self.alpha, "values": self.rmq.values}

    @classmethod
    def from_state(cls, st) -> LevelReporter:
        rep = cls.__new__(cls)
        rep.level = int(st["level"])
        rep.alpha = int(st["alpha"])
        rep.rmq = RangeMinimum(st["values"])
        return rep


def default_alpha(height: int, sigma: int) -> int:
    return max(1, math.ceil(height / max(1.0, math.log2(sigma)))) if sigma > 1 else max(1, height)


class ColoredEngine(Engine):
    kind = "colored"

    def __init__(self, text: SuffixIndex, da: DocumentArray, laq: LevelAncestorIndex,
                 level_rank: np.ndarray, reporters: list[LevelReporter], alpha: int):
        super().__init__(text, len(reporters))
        self.da = da
        self.laq = laq
        self.level_rank = level_rank
        self.reporters = reporters
        self.alpha = int(alpha)

    @classmethod
    def build(cls, text: SuffixIndex, da: DocumentArray, a: np.ndarray, tree: CategoryTree,
              laq: LevelAncestorIndex, alpha: int = 1) -> ColoredEngine:
        if alpha < 1:
            raise InvalidAlpha(f"alpha must be >= 1, got {alpha}")
        colors = level_colors(a, tree)
        reporters = [LevelReporter(i + 1, colors[i], alpha) for i in range(tree.height)]
        return cls(text, da, laq, level_ranks(tree), reporters, alpha)

    @property
    def tag(self) -> str:
        return f"colored-a{self.alpha}-{self.da.mode}"

    def new_scratch(self) -> QueryScratch:
        return QueryScratch(self.laq.D)

    def _report(self, ql, qr, level, scratch, counters):
        if scratch is None:
            scratch = self.new_scratch()
        rep = self.reporters[level - 1]
        out = np.empty(self.laq.D, dtype=np.int64)
        if rep.alpha == 1:
            k = colored_exact_kernel(rep.rmq.arrays, self.da.arrays, self.laq.arrays,
                                     self.level_rank, level, ql, qr, scratch.seen,
                                     scratch.touched, out, counters)
        else:
            k = colored_sparse_kernel(rep.rmq.arrays, rep.alpha, self.da.arrays, self.laq.arrays,
                                      self.level_rank, level, ql, qr, scratch.seen,
                                      scratch.touched, out, counters)
        return out[:k]

    def report_distinct(self, level: int, l: int, r: int, scratch=None, counters=None):
        """Distinct level-``level`` colors of rows l..r (1-based, inclusive)."""
        if not 1 <= l <= r <= self.da.n_prime:
            raise IndexError(f"invalid row range [{l}..{r}]")
        if counters is None:
            counters = np.zeros(8, dtype=np.int64)
        return sorted(int(x) for x in self._report(l - 1, r - 1, level, scratch, counters))

    def space_bits(self) -> dict:
        return {
            "reporters": int(sum(r.space_bits() for r in self.reporters)),
            "reporter_cells": int(sum(r.indexed_cells for r in self.reporters)),
            "level_rank": int(self.level_rank.size * 64),
        }

    def state(self):
        return {
            "alpha": self.alpha,
            "level_rank": self.level_rank,
            "reporters": {str(i): r.state() for i, r in enumerate(self.reporters)},
        }

    @classmethod
    def from_state(cls, st, text, da, laq) -> ColoredEngine:
        reps = [LevelReporter.from_state(st["reporters"][str(i)]) for i in range(len(st["reporters"]))]
        return cls(text, da, laq, np.asarray(st["level_rank"], dtype=np.int64), reps, int(st["alpha"]))
