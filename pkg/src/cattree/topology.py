"""Level ancestors, leaf selection and heavy-path decomposition of a category tree."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ._accel import jit
from .corpus import CategoryTree
from .succinct import BitVector


@jit
def laq_kernel(tree, v, lev):
    up, level, leaves = tree
    d = level[v] - lev
    k = 0
    while d > 0:
        if d & 1:
            v = up[k, v]
        d >>= 1
        k += 1
    return v


class LevelAncestorIndex:
    """Binary-lifting level ancestor plus leaf selection.

    ``up[k, v]`` is the 2^k-th ancestor of v (the root maps to itself).
    """

    def __init__(self, tree: CategoryTree):
        self.level = np.ascontiguousarray(tree.level, dtype=np.int64)
        self.leaves = np.ascontiguousarray(tree.leaves, dtype=np.int64)
        parent = tree.parent.copy()
        parent[tree.root] = tree.root
        k = max(1, (tree.height - 1).bit_length())
        up = np.empty((k, parent.size), dtype=np.int64)
        up[0] = parent
        for j in range(1, k):
            up[j] = up[j - 1][up[j - 1]]
        self.up = up

    @property
    def arrays(self):
        return (self.up, self.level, self.leaves)

    @property
    def D(self) -> int:
        return int(self.leaves.size)

    def laq(self, node: int, level: int) -> int:
        if not 0 <= node < self.level.size:
            raise IndexError(f"node {node} does not exist")
        if not 1 <= level <= self.level[node]:
            raise IndexError(f"level {level} outside [1..{self.level[node]}] for node {node}")
        return int(laq_kernel(self.arrays, node, level))

    def leafselect(self, j: int) -> int:
        if not 1 <= j <= self.leaves.size:
            raise IndexError(f"leaf {j} outside [1..{self.leaves.size}]")
        return int(self.leaves[j - 1])

    def space_bits(self) -> int:
        return int(self.up.size * 64 + self.level.size * 64 + self.leaves.size * 64)


def laq(idx: LevelAncestorIndex, node: int, level: int) -> int:
    return idx.laq(node, level)


def leafselect(idx: LevelAncestorIndex, j: int) -> int:
    return idx.leafselect(j)


def ancestor_table(tree: CategoryTree) -> np.ndarray:
    """anc[i-1, j-1] = level-i ancestor of document j's leaf (build-time helper)."""
    h = tree.height
    anc = np.empty((h, tree.D), dtype=np.int64)
    cur = tree.leaves.copy()
    for lev in range(h, 0, -1):
        anc[lev - 1] = cur
        cur = tree.parent[cur]
    return anc


def dfs_leaf_order(tree: CategoryTree):
    """Leaves in left-to-right DFS order (children by id) and each node's leaf interval.

    Returns (order, lo, hi): ``order[r]`` is the r-th leaf node, and the
    leaves under node v are ``order[lo[v]:hi[v]]``.
    """
    off, kids = tree.children_csr()
    n = tree.node_count
    lo = np.zeros(n, dtype=np.int64)
    hi = np.zeros(n, dtype=np.int64)
    order = []
    stack = [(tree.root, False)]
    while stack:
        v, done = stack.pop()
        if done:
            hi[v] = len(order)
            continue
        lo[v] = len(order)
        if off[v] == off[v + 1]:
            order.append(v)
            hi[v] = len(order)
            continue
        stack.append((v, True))
        for c in kids[off[v] : off[v + 1]][::-1]:
            stack.append((int(c), False))
    return np.asarray(order, dtype=np.int64), lo, hi


@dataclass
class HeavyPathDecomposition:
    """Heavy paths of the category tree.

    Paths are numbered in discovery order (root path is 0). For path P,
    ``nodes[node_off[P]:node_off[P+1]]`` lists its nodes top-down and
    ``light[light_off[P]:light_off[P+1]]`` its light children ordered by
    increasing depth (siblings by id). ``cum_light`` holds, per path, the
    number of light children hanging from the first k path nodes for
    k = 0..len(path), at offset ``cum_off[P]``. ``depth_marks`` concatenates
    one length-h bitvector per path with ones at the path-node depths.
    """

    weight: np.ndarray
    heavy: np.ndarray
    path_of: np.ndarray
    node_off: np.ndarray
    nodes: np.ndarray
    light_off: np.ndarray
    light: np.ndarray
    cum_off: np.ndarray
    cum_light: np.ndarray
    top: np.ndarray
    top_level: np.ndarray
    depth_marks: BitVector
    height: int

    @property
    def path_count(self) -> int:
        return int(self.top.size)

    def path_nodes(self, p: int) -> list[int]:
        return self.nodes[self.node_off[p] : self.node_off[p + 1]].tolist()

    def light_children(self, p: int) -> list[int]:
        return self.light[self.light_off[p] : self.light_off[p + 1]].tolist()

    def light_edges_to(self, v: int, parent: np.ndarray) -> int:
        """Number of light edges on the root-to-v path."""
        count = 0
        while parent[v] >= 0:
            if self.heavy[parent[v]] != v:
                count += 1
            v = parent[v]
        return count

    def space_bits(self) -> int:
        arrays = (self.path_of, self.node_off, self.nodes, self.light_off, self.light,
                  self.cum_off, self.cum_light, self.top, self.top_level)
        return int(sum(a.size * 64 for a in arrays)) + self.depth_marks.space_bits()


def decompose_heavy(tree: CategoryTree) -> HeavyPathDecomposition:
    n = tree.node_count
    off, kids = tree.children_csr()
    level = tree.level
    order = np.argsort(-level, kind="stable")
    weight = np.zeros(n, dtype=np.int64)
    is_leaf = np.diff(off) == 0
    weight[is_leaf] = 1
    heavy = np.full(n, -1, dtype=np.int64)
    for v in order:
        a, b = off[v], off[v + 1]
        if a == b:
            continue
        ch = kids[a:b]
        w = weight[ch]
        weight[v] = w.sum()
        heavy[v] = ch[int(np.argmax(w))]  # first max: children sorted by id

    path_of = np.full(n, -1, dtype=np.int64)
    node_chunks, light_chunks, cum_chunks, tops = [], [], [], []
    pending = deque([tree.root])
    while pending:
        start = pending.popleft()
        p = len(tops)
        tops.append(start)
        path = []
        v = start
        while v >= 0:
            path.append(v)
            path_of[v] = p
            v = heavy[v]
        lights = []
        cum = [0]
        for u in path:
            for c in kids[off[u] : off[u + 1]]:
                if c != heavy[u]:
                    lights.append(int(c))
            cum.append(len(lights))
        node_chunks.append(path)
        light_chunks.append(lights)
        cum_chunks.append(cum)
        pending.extend(lights)

    def flatten(chunks):
        offs = np.zeros(len(chunks) + 1, dtype=np.int64)
        np.cumsum([len(c) for c in chunks], out=offs[1:])
        flat = np.fromiter((x for c in chunks for x in c), dtype=np.int64, count=int(offs[-1]))
        return offs, flat

    node_off, nodes = flatten(node_chunks)
    light_off, light = flatten(light_chunks)
    cum_off, cum_light = flatten(cum_chunks)
    top = np.asarray(tops, dtype=np.int64)
    h = tree.height
    marks = np.zeros(len(tops) * h, dtype=bool)
    for p, path in enumerate(node_chunks):
        marks[p * h + level[path] - 1] = True
    return HeavyPathDecomposition(
        weight=weight,
        heavy=heavy,
        path_of=path_of,
        node_off=node_off,
        nodes=nodes,
        light_off=light_off,
        light=light,
        cum_off=cum_off,
        cum_light=cum_light,
        top=top,
        top_level=level[top].astype(np.int64),
        depth_marks=BitVector(marks),
        height=h,
    )
