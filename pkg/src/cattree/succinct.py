"""Rank/select bitvectors, packed integer arrays, RMQ and shaped wavelet trees.

Public methods use 1-based positions (rank takes a prefix length ``0..m``).
The module-level ``*_kernel`` functions work on the raw array tuples exposed
by ``.arrays`` and use 0-based positions; they are what the query engines call
from inside their own kernels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._accel import jit
from ._bits import (
    bit_at,
    pack_bits,
    popcount64,
    popcount_low,
    read_bits,
    select_in_word,
    word_popcounts,
)

WORD_BITS = 64
SUPER_WORDS = 8  # 512-bit superblocks


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------


@jit
def rank1_kernel(bv, i):
    words, supers, blocks = bv
    w = i >> 6
    c = supers[w >> 3] + np.int64(blocks[w])
    r = i & 63
    if r != 0:
        c += popcount_low(words[w], r)
    return c


@jit
def select1_kernel(bv, j):
    """0-based position of the j-th (1-based) one."""
    words, supers, blocks = bv
    lo = 0
    hi = supers.shape[0] - 1
    # last superblock whose prefix count is < j
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if supers[mid] < j:
            lo = mid
        else:
            hi = mid - 1
    w = lo * 8
    rem = j - supers[lo]
    end = min(w + 8, words.shape[0])
    while w < end:
        pc = popcount64(words[w])
        if pc >= rem:
            return w * 64 + select_in_word(words[w], rem)
        rem -= pc
        w += 1
    return -1


@jit
def select0_kernel(bv, j):
    """0-based position of the j-th (1-based) zero (padding bits count as zeros)."""
    words, supers, blocks = bv
    lo = 0
    hi = supers.shape[0] - 1
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        if mid * 512 - supers[mid] < j:
            lo = mid
        else:
            hi = mid - 1
    w = lo * 8
    rem = j - (lo * 512 - supers[lo])
    end = min(w + 8, words.shape[0])
    while w < end:
        inv = ~words[w]
        pc = popcount64(inv)
        if pc >= rem:
            return w * 64 + select_in_word(inv, rem)
        rem -= pc
        w += 1
    return -1


@jit
def intvec_get_kernel(iv, i):
    words, width = iv
    if width == 0:
        return 0
    return read_bits(words, i * width, width)


@jit
def rmq_kernel(rmq, l, r):
    """Leftmost position of the minimum of values[l..r] (0-based, inclusive)."""
    values, b, table, lg = rmq
    bl = l // b
    br = r // b
    if br - bl <= 1:
        best = l
        for k in range(l + 1, r + 1):
            if values[k] < values[best]:
                best = k
        return best
    best = l
    for k in range(l + 1, (bl + 1) * b):
        if values[k] < values[best]:
            best = k
    x = bl + 1
    y = br - 1
    j = lg[y - x + 1]
    c1 = table[j, x]
    c2 = table[j, y - (1 << j) + 1]
    cand = c1
    if values[c2] < values[c1]:
        cand = c2
    if values[cand] < values[best]:
        best = cand
    for k in range(br * b, r + 1):
        if values[k] < values[best]:
            best = k
    return best


@jit
def wt_rank_kernel(wt, root, c, i):
    """Occurrences of symbol c in the first i positions of the tree at root."""
    bv, off, length, left, right, lo, mid, ones = wt
    node = root
    while left[node] >= 0:
        r1 = rank1_kernel(bv, off[node] + i) - ones[node]
        if c >= mid[node]:
            i = r1
            node = right[node]
        else:
            i = i - r1
            node = left[node]
        if i == 0:
            return 0
    return i


@jit
def wt_access_rank_kernel(wt, root, i):
    """(symbol at 0-based i, occurrences of that symbol in positions 0..i)."""
    bv, off, length, left, right, lo, mid, ones = wt
    node = root
    while left[node] >= 0:
        p = off[node] + i
        r1 = rank1_kernel(bv, p) - ones[node]
        if bit_at(bv[0], p):
            i = r1
            node = right[node]
        else:
            i = i - r1
            node = left[node]
    return lo[node], i + 1


@jit
def wt_select_kernel(wt, root, c, j, path):
    """0-based position of the j-th occurrence of c; -1 if absent."""
    bv, off, length, left, right, lo, mid, ones = wt
    node = root
    depth = 0
    while left[node] >= 0:
        path[depth] = node
        depth += 1
        if c >= mid[node]:
            node = right[node]
        else:
            node = left[node]
    if j > length[node]:
        return -1
    # j is 1-based within the current node on the way up
    while depth > 0:
        depth -= 1
        parent = path[depth]
        if right[parent] == node:
            p = select1_kernel(bv, ones[parent] + j)
        else:
            p = select0_kernel(bv, (off[parent] - ones[parent]) + j)
        j = p - off[parent] + 1
        node = parent
    return j - 1


@jit
def wt_range_distinct_kernel(wt, root, lo_pos, hi_pos, sym_hi, out_sym, out_lo, out_hi, stack, counters):
    """Distinct symbols <= sym_hi in positions [lo_pos, hi_pos) of the tree.

    Writes (symbol, sub-interval) triples in increasing symbol order and
    returns how many were written. ``counters[0]`` is bumped once per visited
    wavelet node.
    """
    bv, off, length, left, right, lo, mid, ones = wt
    n_out = 0
    top = 0
    stack[0, 0] = root
    stack[0, 1] = lo_pos
    stack[0, 2] = hi_pos
    top = 1
    while top > 0:
        top -= 1
        node = stack[top, 0]
        a = stack[top, 1]
        b = stack[top, 2]
        counters[0] += 1
        if left[node] < 0:
            out_sym[n_out] = lo[node]
            out_lo[n_out] = a
            out_hi[n_out] = b
            n_out += 1
            continue
        ra = rank1_kernel(bv, off[node] + a) - ones[node]
        rb = rank1_kernel(bv, off[node] + b) - ones[node]
        # right first so the left child is popped first
        if rb > ra and mid[node] <= sym_hi:
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


# --------------------------------------------------------------------------
# BitVector
# --------------------------------------------------------------------------


class BitVector:
    """Static bitvector with a two-level rank directory.

    512-bit superblocks carry absolute counts (int64), 64-bit words carry
    counts relative to their superblock (uint16): 1.375 bits per input bit.
    """

    def __init__(self, bits=()):
        bits = np.asarray(bits, dtype=bool).ravel()
        self.size = int(bits.size)
        n_words = -(-self.size // WORD_BITS)
        n_words = -(-n_words // SUPER_WORDS) * SUPER_WORDS
        self.words = pack_bits(bits, n_words)
        self._build_directory()

    @classmethod
    def from_words(cls, words: np.ndarray, size: int) -> BitVector:
        bv = cls.__new__(cls)
        bv.size = int(size)
        bv.words = np.ascontiguousarray(words, dtype=np.uint64)
        bv._build_directory()
        return bv

    def _build_directory(self):
        cum = np.zeros(self.words.size + 1, dtype=np.int64)
        np.cumsum(word_popcounts(self.words), out=cum[1:])
        self.supers = np.ascontiguousarray(cum[::SUPER_WORDS])
        idx = np.arange(self.words.size + 1)
        self.blocks = (cum - self.supers[idx // SUPER_WORDS]).astype(np.uint16)
        self.ones = int(cum[-1])

    @property
    def arrays(self):
        return (self.words, self.supers, self.blocks)

    def __len__(self):
        return self.size

    def __getitem__(self, i: int) -> int:
        if not 1 <= i <= self.size:
            raise IndexError(f"position {i} outside [1..{self.size}]")
        return int(bit_at(self.words, i - 1))

    def to_numpy(self) -> np.ndarray:
        raw = np.unpackbits(self.words.view(np.uint8), bitorder="little")
        return raw[: self.size].astype(bool)

    def count(self, c: int) -> int:
        return self.ones if c else self.size - self.ones

    def rank(self, c: int, i: int) -> int:
        if not 0 <= i <= self.size:
            raise IndexError(f"prefix length {i} outside [0..{self.size}]")
        r1 = int(rank1_kernel(self.arrays, i))
        return r1 if c else i - r1

    def select(self, c: int, j: int) -> int:
        if not 1 <= j <= self.count(c):
            raise IndexError(f"no occurrence {j} of bit {c} (count {self.count(c)})")
        if c:
            return int(select1_kernel(self.arrays, j)) + 1
        return int(select0_kernel(self.arrays, j)) + 1

    def space_bits(self) -> int:
        return int(self.words.size * 64 + self.supers.size * 64 + self.blocks.size * 16)

    def state(self):
        return {"words": self.words, "size": self.size}

    @classmethod
    def from_state(cls, st) -> BitVector:
        return cls.from_words(st["words"], st["size"])


# --------------------------------------------------------------------------
# IntVector
# --------------------------------------------------------------------------


class IntVector:
    """Fixed-width packed array of non-negative integers."""

    def __init__(self, values=(), width: int | None = None):
        values = np.asarray(values, dtype=np.int64).ravel()
        if values.size and values.min() < 0:
            raise ValueError("IntVector holds non-negative values only")
        top = int(values.max()) if values.size else 0
        need = max(1, top.bit_length())
        if width is None:
            width = need
        elif width < need:
            raise ValueError(f"width {width} too small for value {top}")
        self.width = int(width)
        self.size = int(values.size)
        n_words = -(-(self.size * self.width) // 64) + 1
        if self.size:
            shifts = np.arange(self.width, dtype=np.int64)
            bits = ((values[:, None] >> shifts) & 1).astype(bool).ravel()
        else:
            bits = np.zeros(0, dtype=bool)
        self.words = pack_bits(bits, n_words)

    @property
    def arrays(self):
        return (self.words, self.width)

    def __len__(self):
        return self.size

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.size:
            raise IndexError(i)
        return int(intvec_get_kernel(self.arrays, i))

    def to_numpy(self) -> np.ndarray:
        if not self.size:
            return np.zeros(0, dtype=np.int64)
        raw = np.unpackbits(self.words.view(np.uint8), bitorder="little")
        raw = raw[: self.size * self.width].reshape(self.size, self.width).astype(np.int64)
        return (raw << np.arange(self.width, dtype=np.int64)).sum(axis=1)

    def space_bits(self) -> int:
        return int(self.words.size * 64)

    def state(self):
        return {"words": self.words, "size": self.size, "width": self.width}

    @classmethod
    def from_state(cls, st) -> IntVector:
        iv = cls.__new__(cls)
        iv.words = np.ascontiguousarray(st["words"], dtype=np.uint64)
        iv.size = int(st["size"])
        iv.width = int(st["width"])
        return iv


# --------------------------------------------------------------------------
# Range minimum
# --------------------------------------------------------------------------


class RangeMinimum:
    """Block-decomposed RMQ: in-block scans plus a sparse table over block minima.

    Block size is ceil(log2 m). Ties resolve to the leftmost position.
    """

    def __init__(self, values):
        self.values = np.ascontiguousarray(values, dtype=np.int64)
        m = self.values.size
        self.size = m
        self.block = max(1, math.ceil(math.log2(m))) if m > 1 else 1
        b = self.block
        nb = max(1, -(-m // b))
        if m:
            padded = np.full(nb * b, np.iinfo(np.int64).max, dtype=np.int64)
            padded[:m] = self.values
            first = np.argmin(padded.reshape(nb, b), axis=1)
            level0 = np.arange(nb, dtype=np.int64) * b + first
        else:
            level0 = np.zeros(1, dtype=np.int64)
        levels = [level0]
        k = 1
        while (1 << k) <= nb:
            prev = levels[-1]
            half = 1 << (k - 1)
            a = prev[: nb - (1 << k) + 1]
            c = prev[half : half + a.size]
            levels.append(np.where(self.values[c] < self.values[a], c, a))
            k += 1
        self.table = np.zeros((len(levels), nb), dtype=np.int64)
        for j, row in enumerate(levels):
            self.table[j, : row.size] = row
        lg = np.zeros(nb + 1, dtype=np.int64)
        if nb >= 2:
            lg[2:] = np.floor(np.log2(np.arange(2, nb + 1))).astype(np.int64)
        self.lg = lg

    @property
    def arrays(self):
        return (self.values, self.block, self.table, self.lg)

    def query(self, l: int, r: int) -> int:
        """1-based leftmost argmin of values[l..r]."""
        if not 1 <= l <= r <= self.size:
            raise IndexError(f"invalid range [{l}..{r}] for length {self.size}")
        return int(rmq_kernel(self.arrays, l - 1, r - 1)) + 1

    def space_bits(self, include_values: bool = True) -> int:
        bits = self.table.size * 64 + self.lg.size * 64
        if include_values:
            bits += self.values.size * 64
        return int(bits)

    def state(self):
        return {"values": self.values}

    @classmethod
    def from_state(cls, st) -> RangeMinimum:
        return cls(st["values"])


def rmq_build(values) -> RangeMinimum:
    return RangeMinimum(values)


def rmq(q: RangeMinimum, l: int, r: int) -> int:
    return q.query(l, r)


# --------------------------------------------------------------------------
# Wavelet tree
# --------------------------------------------------------------------------


@dataclass
class Shape:
    """Node of a wavelet-tree shape.

    Leaves cover a symbol interval ``[lo..hi]``; a leaf wider than one symbol
    is expanded into a balanced binary subtree at build time. Internal nodes
    must be branching and their children's intervals must be consecutive and
    increasing. ``tag`` is free for callers (the engines store category node
    ids there).
    """

    lo: int = 0
    hi: int = 0
    children: list = field(default_factory=list)
    tag: int = -1

    @classmethod
    def leaf(cls, lo: int, hi: int | None = None, tag: int = -1) -> Shape:
        return cls(lo=lo, hi=lo if hi is None else hi, tag=tag)

    @classmethod
    def node(cls, children, tag: int = -1) -> Shape:
        children = list(children)
        if len(children) < 2:
            raise ValueError("internal shape nodes must have at least two children")
        for a, b in zip(children, children[1:]):
            if b.lo != a.hi + 1:
                raise ValueError("child intervals must be consecutive and increasing")
        return cls(lo=children[0].lo, hi=children[-1].hi, children=children, tag=tag)

    @property
    def is_leaf(self) -> bool:
        return not self.children


def balanced_shape(lo: int, hi: int) -> Shape:
    """Single leaf over [lo..hi]; expands to a balanced binary wavelet tree."""
    return Shape.leaf(lo, hi)


class WaveletTree:
    """Wavelet tree (or forest) over shaped alphabets with local binarization.

    A shape node with d children becomes a binary subtree of ceil(log2 d)
    levels splitting the children list in halves (left gets ceil(d/2)).
    All node bitvectors are concatenated into one ``BitVector``; per binary
    node we keep its bit offset, length, children, symbol interval start,
    split symbol and the ones preceding its offset.

    Every binary node also records the shape node that owns it and whether it
    is the top of that shape node's local tree, so callers can run
    shape-aware traversals.
    """

    def __init__(self, seq=(), shape: Shape | None = None):
        seq = np.asarray(seq, dtype=np.int64)
        if shape is None:
            if seq.size == 0:
                shape = Shape.leaf(0, 0)
            else:
                shape = balanced_shape(int(seq.min()), int(seq.max()))
        self._build([(seq, shape)])

    @classmethod
    def forest(cls, items) -> WaveletTree:
        """Build several trees sharing one node table and one bitvector."""
        wt = cls.__new__(cls)
        wt._build([(np.asarray(s, dtype=np.int64), sh) for s, sh in items])
        return wt

    def _build(self, items):
        off, length, left, right, lo, mid, owner, top = ([] for _ in range(8))
        chunks = []
        shape_tags = []
        shape_nodes = []
        roots = []
        bit_pos = 0

        def new_node(n, o, is_top):
            off.append(0)
            length.append(n)
            left.append(-1)
            right.append(-1)
            lo.append(0)
            mid.append(0)
            owner.append(o)
            top.append(is_top)
            return len(off) - 1

        def register(sh):
            shape_tags.append(sh.tag)
            shape_nodes.append(sh)
            return len(shape_tags) - 1

        for seq, shape in items:
            if seq.size and (seq.min() < shape.lo or seq.max() > shape.hi):
                raise ValueError(
                    f"symbol outside shape coverage [{shape.lo}..{shape.hi}]"
                )
            # task: (group of shape nodes, seq, owner id, is_top, parent, side)
            stack = [([shape], seq, -1, True, -1, 0)]
            while stack:
                group, s, o, is_top, parent, side = stack.pop()
                if len(group) == 1:
                    sh = group[0]
                    o = register(sh)
                    is_top = True
                    if sh.is_leaf and sh.lo == sh.hi:
                        k = new_node(s.size, o, True)
                        lo[k] = sh.lo
                        mid[k] = sh.lo
                        self._link(left, right, roots, parent, side, k)
                        continue
                    if sh.is_leaf:
                        group = [Shape.leaf(c) for c in range(sh.lo, sh.hi + 1)]
                    else:
                        group = sh.children
                k = new_node(s.size, o, is_top)
                self._link(left, right, roots, parent, side, k)
                half = -(-len(group) // 2)
                split = group[half].lo
                bits = s >= split
                off[k] = bit_pos
                bit_pos += s.size
                chunks.append(bits)
                lo[k] = group[0].lo
                mid[k] = split
                stack.append((group[half:], s[bits], o, False, k, 1))
                stack.append((group[:half], s[~bits], o, False, k, 0))

        all_bits = np.concatenate(chunks) if chunks else np.zeros(0, dtype=bool)
        self.bv = BitVector(all_bits)
        self.off = np.asarray(off, dtype=np.int64)
        self.length = np.asarray(length, dtype=np.int64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.lo = np.asarray(lo, dtype=np.int64)
        self.mid = np.asarray(mid, dtype=np.int64)
        self.owner = np.asarray(owner, dtype=np.int64)
        self.is_top = np.asarray(top, dtype=bool)
        self.shape_tags = np.asarray(shape_tags, dtype=np.int64)
        self.roots = np.asarray(roots, dtype=np.int64)
        self._finish()

    @staticmethod
    def _link(left, right, roots, parent, side, k):
        if parent < 0:
            roots.append(k)
        elif side:
            right[parent] = k
        else:
            left[parent] = k

    def _finish(self):
        internal = self.left >= 0
        self.ones = np.zeros(self.off.size, dtype=np.int64)
        for k in np.flatnonzero(internal):
            self.ones[k] = rank1_kernel(self.bv.arrays, int(self.off[k]))
        # symbol interval end per node, needed for validation only
        hi = self.lo.copy()
        order = np.argsort(-self._depths(), kind="stable")
        for k in order:
            if self.left[k] >= 0:
                hi[k] = hi[self.right[k]]
        self.hi = hi
        self.max_depth = int(self._depths().max()) + 1 if self.off.size else 1

    def _depths(self):
        depth = np.zeros(self.off.size, dtype=np.int64)
        for r in self.roots:
            stack = [int(r)]
            while stack:
                k = stack.pop()
                for c in (self.left[k], self.right[k]):
                    if c >= 0:
                        depth[c] = depth[k] + 1
                        stack.append(int(c))
        return depth

    @property
    def arrays(self):
        return (
            self.bv.arrays,
            self.off,
            self.length,
            self.left,
            self.right,
            self.lo,
            self.mid,
            self.ones,
        )

    def __len__(self):
        return int(self.length[self.roots[0]]) if self.roots.size else 0

    def size_of(self, tree: int = 0) -> int:
        return int(self.length[self.roots[tree]])

    def _check_symbol(self, c, tree):
        root = self.roots[tree]
        if not self.lo[root] <= c <= self.hi[root]:
            raise KeyError(f"symbol {c} outside alphabet [{self.lo[root]}..{self.hi[root]}]")

    def rank(self, c: int, i: int, tree: int = 0) -> int:
        n = self.size_of(tree)
        if not 0 <= i <= n:
            raise IndexError(f"prefix length {i} outside [0..{n}]")
        self._check_symbol(c, tree)
        if i == 0:
            return 0
        return int(wt_rank_kernel(self.arrays, int(self.roots[tree]), c, i))

    def select(self, c: int, j: int, tree: int = 0) -> int:
        self._check_symbol(c, tree)
        if j < 1:
            raise IndexError(f"occurrence index {j} < 1")
        path = np.zeros(self.max_depth + 1, dtype=np.int64)
        p = int(wt_select_kernel(self.arrays, int(self.roots[tree]), c, j, path))
        if p < 0:
            raise IndexError(f"symbol {c} occurs fewer than {j} times")
        return p + 1

    def access(self, i: int, tree: int = 0) -> int:
        n = self.size_of(tree)
        if not 1 <= i <= n:
            raise IndexError(f"position {i} outside [1..{n}]")
        sym, _ = wt_access_rank_kernel(self.arrays, int(self.roots[tree]), i - 1)
        return int(sym)

    def range_distinct(self, l: int, r: int, sym_hi: int | None = None, tree: int = 0):
        """[(symbol, count)] for distinct symbols <= sym_hi in positions l..r (1-based)."""
        n = self.size_of(tree)
        if not 1 <= l <= r <= n:
            raise IndexError(f"invalid range [{l}..{r}]")
        root = int(self.roots[tree])
        if sym_hi is None:
            sym_hi = int(self.hi[root])
        cap = int(self.hi[root] - self.lo[root] + 1)
        out_sym = np.zeros(cap, dtype=np.int64)
        out_lo = np.zeros(cap, dtype=np.int64)
        out_hi = np.zeros(cap, dtype=np.int64)
        stack = np.zeros((self.max_depth + 2, 3), dtype=np.int64)
        counters = np.zeros(1, dtype=np.int64)
        k = wt_range_distinct_kernel(
            self.arrays, root, l - 1, r, sym_hi, out_sym, out_lo, out_hi, stack, counters
        )
        return [(int(out_sym[x]), int(out_hi[x] - out_lo[x])) for x in range(k)]

    def node_bits(self, k: int) -> np.ndarray:
        bits = self.bv.to_numpy()
        if self.left[k] < 0:
            return np.zeros(0, dtype=bool)
        return bits[self.off[k] : self.off[k] + self.length[k]]

    def bitvector_bits(self) -> int:
        return self.bv.space_bits()

    def space_bits(self) -> int:
        per_node = (self.off, self.length, self.left, self.right, self.lo, self.mid, self.ones)
        return self.bv.space_bits() + int(sum(a.size * 64 for a in per_node))

    def state(self):
        return {
            "bv": self.bv.state(),
            "off": self.off,
            "length": self.length,
            "left": self.left,
            "right": self.right,
            "lo": self.lo,
            "mid": self.mid,
            "owner": self.owner,
            "is_top": self.is_top.astype(np.uint8),
            "shape_tags": self.shape_tags,
            "roots": self.roots,
        }

    @classmethod
    def from_state(cls, st) -> WaveletTree:
        wt = cls.__new__(cls)
        wt.bv = BitVector.from_state(st["bv"])
        for name in ("off", "length", "left", "right", "lo", "mid", "owner", "shape_tags", "roots"):
            setattr(wt, name, np.ascontiguousarray(st[name], dtype=np.int64))
        wt.is_top = np.asarray(st["is_top"]).astype(bool)
        wt._finish()
        return wt


def wt_build(seq, shape: Shape | None = None) -> WaveletTree:
    return WaveletTree(seq, shape)


def wt_rank(wt: WaveletTree, c: int, i: int) -> int:
    return wt.rank(c, i)


def wt_select(wt: WaveletTree, c: int, j: int) -> int:
    return wt.select(c, j)


def wt_access(wt: WaveletTree, i: int) -> int:
    return wt.access(i)


def bv_rank(bv: BitVector, c: int, i: int) -> int:
    return bv.rank(c, i)


def bv_select(bv: BitVector, c: int, j: int) -> int:
    return bv.select(c, j)
