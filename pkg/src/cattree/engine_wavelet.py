"""Wavelet-tree engines over the document array.

``ShapedWaveletEngine`` builds one wavelet tree whose shape is the category
tree with unary chains contracted: every branching node and every leaf is a
shape node, carrying the level of that node (the lowest node of its chain).
Documents are renumbered by left-to-right leaf order so every shape node
covers a symbol interval. A query walks down from the root and stops at the
first shape node whose stored level reaches the query level, reporting that
node's level-i ancestor.

``HeavyPathEngine`` decomposes the category tree into heavy paths. Each path
stores the subsequence of the document array falling under its top node,
written over the path's light children (ordered by depth) plus one extra
symbol for documents of the path's own bottom leaf. A query processes one
path at a time: light children hanging at or above the query level are
enumerated by a range-distinct traversal restricted to an alphabet prefix and
recursed into; anything else in the interval lies under the path node at the
query level, which is then reported.
"""
from __future__ import annotations

import numpy as np

from ._accel import jit
from .corpus import CategoryTree
from .query import RECURSION, VISITS, Engine
from .succinct import BitVector, Shape, WaveletTree, rank1_kernel, wt_range_distinct_kernel
from .text_index import SuffixIndex
from .topology import (
    HeavyPathDecomposition,
    LevelAncestorIndex,
    decompose_heavy,
    dfs_leaf_order,
    laq_kernel,
)


def _nonsentinel(a: np.ndarray):
    """Positions/bitvector for the non-separator rows of the document array."""
    keep = a > 0
    return a[keep], BitVector(~keep)


# --------------------------------------------------------------------------
# shaped wavelet tree
# --------------------------------------------------------------------------


@jit
def shaped_query_kernel(wt, root, is_top, owner, shape_delta, shape_node, tree, lev,
                        lo_pos, hi_pos, out, stack, counters):
    bv, off, length, left, right, lo, mid, ones = wt
    n_out = 0
    stack[0, 0] = root
    stack[0, 1] = lo_pos
    stack[0, 2] = hi_pos
    top = 1
    while top > 0:
        top -= 1
        node = stack[top, 0]
        a = stack[top, 1]
        b = stack[top, 2]
        counters[VISITS] += 1
        if is_top[node]:
            s = owner[node]
            if shape_delta[s] >= lev:
                out[n_out] = laq_kernel(tree, shape_node[s], lev)
                n_out += 1
                continue
        ra = rank1_kernel(bv, off[node] + a) - ones[node]
        rb = rank1_kernel(bv, off[node] + b) - ones[node]
        if rb > ra:
            stack[top, 0] = right[node]
            stack[top, 1] = ra
            stack[top, 2] = rb
            top += 1
        if (b - rb) > (a - ra):
            stack[top, 0] = left[node]
            stack[top, 1] = a - ra
            stack[top, 2] = b - rb
            top += 1
    return n_out


def contracted_shape(tree: CategoryTree):
    """Shape of the category tree with unary nodes removed.

    Returns (shape, leaf_rank) where ``leaf_rank[doc-1]`` is the 1-based
    symbol of each document.
    """
    order, lo, hi = dfs_leaf_order(tree)
    off, kids = tree.children_csr()

    def lowest(v):
        while off[v + 1] - off[v] == 1:
            v = int(kids[off[v]])
        return v

    root = lowest(tree.root)
    built = {}
    stack = [(root, False)]
    while stack:
        v, done = stack.pop()
        if off[v] == off[v + 1]:
            built[v] = Shape.leaf(int(lo[v]) + 1, tag=v)
            continue
        children = [lowest(int(c)) for c in kids[off[v] : off[v + 1]]]
        if done:
            built[v] = Shape.node([built[c] for c in children], tag=v)
            continue
        stack.append((v, True))
        stack.extend((c, False) for c in children)
    pos = np.empty(tree.node_count, dtype=np.int64)
    pos[order] = np.arange(order.size) + 1
    leaf_rank = pos[tree.leaves]
    return built[root], leaf_rank


class ShapedWaveletEngine(Engine):
    kind = "wavelet"

    def __init__(self, text: SuffixIndex, laq: LevelAncestorIndex, wt: WaveletTree,
                 sentinels: BitVector, shape_delta: np.ndarray, height: int):
        super().__init__(text, height)
        self.laq = laq
        self.wt = wt
        self.sentinels = sentinels
        self.shape_delta = shape_delta
        self.shape_node = wt.shape_tags

    @classmethod
    def build(cls, text: SuffixIndex, a: np.ndarray, tree: CategoryTree,
              laq: LevelAncestorIndex) -> ShapedWaveletEngine:
        shape, leaf_rank = contracted_shape(tree)
        docs, sentinels = _nonsentinel(a)
        wt = WaveletTree(leaf_rank[docs - 1], shape)
        shape_delta = tree.level[wt.shape_tags].astype(np.int64)
        return cls(text, laq, wt, sentinels, shape_delta, tree.height)

    def _report(self, ql, qr, level, scratch, counters):
        zeros_before = int(rank1_kernel(self.sentinels.arrays, ql))
        lo = ql - zeros_before
        hi = qr + 1 - int(rank1_kernel(self.sentinels.arrays, qr + 1))
        out = np.empty(self.laq.D, dtype=np.int64)
        if hi <= lo:
            return out[:0]
        stack = np.empty((self.wt.max_depth + 2, 3), dtype=np.int64)
        k = shaped_query_kernel(self.wt.arrays, int(self.wt.roots[0]), self.wt.is_top,
                                self.wt.owner, self.shape_delta, self.shape_node,
                                self.laq.arrays, level, lo, hi, out, stack, counters)
        return out[:k]

    def branching_depth(self) -> int:
        """Max number of internal shape nodes on a root-to-leaf shape path."""
        return _shape_depth(self.wt)

    def max_degree(self) -> int:
        return _shape_max_degree(self.wt)

    def space_bits(self) -> dict:
        return {
            "wavelet_bitvectors": self.wt.bitvector_bits(),
            "wavelet_node_tables": self.wt.space_bits() - self.wt.bitvector_bits(),
            "shape_depths": int(self.shape_delta.size * 64 + self.wt.shape_tags.size * 64
                                + self.wt.owner.size * 64 + self.wt.is_top.size),
            "sentinels": self.sentinels.space_bits(),
        }

    def state(self):
        return {
            "height": self.height,
            "wt": self.wt.state(),
            "sentinels": self.sentinels.state(),
            "shape_delta": self.shape_delta,
        }

    @classmethod
    def from_state(cls, st, text, laq) -> ShapedWaveletEngine:
        return cls(text, laq, WaveletTree.from_state(st["wt"]), BitVector.from_state(st["sentinels"]),
                   np.asarray(st["shape_delta"], dtype=np.int64), int(st["height"]))


def _shape_depth(wt: WaveletTree) -> int:
    # count distinct internal owners along every root-to-leaf binary path
    best = 0
    stack = [(int(wt.roots[0]), 0)]
    while stack:
        k, d = stack.pop()
        if wt.left[k] < 0:
            best = max(best, d)
            continue
        d2 = d + (1 if wt.is_top[k] else 0)
        stack.append((int(wt.left[k]), d2))
        stack.append((int(wt.right[k]), d2))
    return best


def _shape_max_degree(wt: WaveletTree) -> int:
    # a shape node's degree is the number of binary children leaving its local tree
    degree = {}
    for k in range(wt.off.size):
        if wt.left[k] < 0:
            continue
        for c in (wt.left[k], wt.right[k]):
            if wt.owner[c] != wt.owner[k]:
                degree[wt.owner[k]] = degree.get(wt.owner[k], 0) + 1
    return max(degree.values(), default=1)


# --------------------------------------------------------------------------
# heavy paths
# --------------------------------------------------------------------------


@jit
def heavy_query_kernel(forest, path_root, hp, level, lev, root_lo, root_hi,
                       out, pstack, wstack, syms, slo, shi, counters):
    (marks, h, node_off, nodes, light_off, light, cum_off, cum_light,
     top_level, light_path) = hp
    n_out = 0
    pstack[0, 0] = 0
    pstack[0, 1] = root_lo
    pstack[0, 2] = root_hi
    pstack[0, 3] = 1
    ptop = 1
    while ptop > 0:
        ptop -= 1
        p = pstack[ptop, 0]
        a = pstack[ptop, 1]
        b = pstack[ptop, 2]
        depth = pstack[ptop, 3]
        if depth > counters[RECURSION]:
            counters[RECURSION] = depth
        base = p * h
        # path nodes at depths <= lev - 1; their light children sit at levels <= lev
        above = rank1_kernel(marks, base + lev - 1) - rank1_kernel(marks, base)
        r = cum_light[cum_off[p] + above]
        covered = 0
        if r > 0:
            k = wt_range_distinct_kernel(forest, path_root[p], a, b, r, syms, slo, shi,
                                         wstack, counters)
            for x in range(k):
                covered += shi[x] - slo[x]
                child = light[light_off[p] + syms[x] - 1]
                if level[child] == lev:
                    out[n_out] = child
                    n_out += 1
                else:
                    pstack[ptop, 0] = light_path[light_off[p] + syms[x] - 1]
                    pstack[ptop, 1] = slo[x]
                    pstack[ptop, 2] = shi[x]
                    pstack[ptop, 3] = depth + 1
                    ptop += 1
        if covered < b - a:
            out[n_out] = nodes[node_off[p] + lev - top_level[p]]
            n_out += 1
    return n_out


class HeavyPathEngine(Engine):
    kind = "heavy"

    def __init__(self, text: SuffixIndex, laq: LevelAncestorIndex, hpd: HeavyPathDecomposition,
                 forest: WaveletTree, light_path: np.ndarray, sentinels: BitVector, height: int):
        super().__init__(text, height)
        self.laq = laq
        self.hpd = hpd
        self.forest = forest
        self.light_path = light_path
        self.sentinels = sentinels

    @classmethod
    def build(cls, text: SuffixIndex, a: np.ndarray, tree: CategoryTree,
              laq: LevelAncestorIndex) -> HeavyPathEngine:
        hpd = decompose_heavy(tree)
        docs, sentinels = _nonsentinel(a)
        order, lo, hi = dfs_leaf_order(tree)
        rank_of_leaf = np.empty(tree.node_count, dtype=np.int64)
        rank_of_leaf[order] = np.arange(order.size)
        doc_rank = rank_of_leaf[tree.leaves]  # 0-based leaf rank per document

        n_paths = hpd.path_count
        seqs = [None] * n_paths
        seqs[0] = doc_rank[docs - 1]  # the root path sees every non-separator row
        items = []
        for p in range(n_paths):
            top = hpd.top[p]
            lights = hpd.light_children(p)
            base = lo[top]
            sym = np.full(hi[top] - lo[top], len(lights) + 1, dtype=np.int64)
            for s, c in enumerate(lights, 1):
                sym[lo[c] - base : hi[c] - base] = s
            ranks = seqs[p]
            seq = sym[ranks - base]
            items.append((seq, Shape.leaf(1, len(lights) + 1)))
            if lights:
                order_s = np.argsort(seq, kind="stable")
                bounds = np.searchsorted(seq[order_s], np.arange(1, len(lights) + 2))
                for s, c in enumerate(lights, 1):
                    seqs[hpd.path_of[c]] = ranks[order_s[bounds[s - 1] : bounds[s]]]
            seqs[p] = None
        forest = WaveletTree.forest(items)
        light_path = hpd.path_of[hpd.light].astype(np.int64)
        return cls(text, laq, hpd, forest, light_path, sentinels, tree.height)

    @property
    def hp_arrays(self):
        h = self.hpd
        return (h.depth_marks.arrays, h.height, h.node_off, h.nodes, h.light_off, h.light,
                h.cum_off, h.cum_light, h.top_level, self.light_path)

    def _report(self, ql, qr, level, scratch, counters):
        lo = ql - int(rank1_kernel(self.sentinels.arrays, ql))
        hi = qr + 1 - int(rank1_kernel(self.sentinels.arrays, qr + 1))
        D = self.laq.D
        out = np.empty(D, dtype=np.int64)
        if hi <= lo:
            return out[:0]
        pstack = np.empty((D + 2, 4), dtype=np.int64)
        wstack = np.empty((self.forest.max_depth + 2, 3), dtype=np.int64)
        syms = np.empty(D + 1, dtype=np.int64)
        slo = np.empty(D + 1, dtype=np.int64)
        shi = np.empty(D + 1, dtype=np.int64)
        k = heavy_query_kernel(self.forest.arrays, self.forest.roots, self.hp_arrays,
                               self.laq.level, level, lo, hi, out, pstack, wstack,
                               syms, slo, shi, counters)
        return out[:k]

    def sequence_lengths(self) -> np.ndarray:
        return self.forest.length[self.forest.roots]

    def space_bits(self) -> dict:
        return {
            "path_wavelet_bitvectors": self.forest.bitvector_bits(),
            "path_wavelet_node_tables": self.forest.space_bits() - self.forest.bitvector_bits(),
            "path_tables": self.hpd.space_bits() + int(self.light_path.size * 64),
            "sentinels": self.sentinels.space_bits(),
        }

    def state(self):
        h = self.hpd
        return {
            "height": self.height,
            "forest": self.forest.state(),
            "light_path": self.light_path,
            "sentinels": self.sentinels.state(),
            "hpd": {
                "weight": h.weight, "heavy": h.heavy, "path_of": h.path_of,
                "node_off": h.node_off, "nodes": h.nodes, "light_off": h.light_off,
                "light": h.light, "cum_off": h.cum_off, "cum_light": h.cum_light,
                "top": h.top, "top_level": h.top_level, "depth_marks": h.depth_marks.state(),
                "height": h.height,
            },
        }

    @classmethod
    def from_state(cls, st, text, laq) -> HeavyPathEngine:
        hs = dict(st["hpd"])
        marks = BitVector.from_state(hs.pop("depth_marks"))
        height = int(hs.pop("height"))
        arrays = {k: np.asarray(v, dtype=np.int64) for k, v in hs.items()}
        hpd = HeavyPathDecomposition(depth_marks=marks, height=height, **arrays)
        return cls(text, laq, hpd, WaveletTree.from_state(st["forest"]),
                   np.asarray(st["light_path"], dtype=np.int64),
                   BitVector.from_state(st["sentinels"]), int(st["height"]))
