"""Suffix array, BWT backward search, sampled locate and the document array.

Everything is built over ``T1$T2$...TD$`` with ``$ = 0``. Suffixes are
compared as plain byte strings (a shorter suffix precedes its extensions), so
the D separator suffixes occupy rows 1..D.

Because the D separators are equal symbols, the standard LF formula is off for
rows whose BWT symbol is ``$``: the row holding the whole text (its cyclic
predecessor is the final ``$``) is ranked by the text itself, not by the empty
suffix. Those D rows get their LF target from a small explicit table, which
keeps LF a single cycle over all rows.
"""
from __future__ import annotations

import math

import numpy as np

from ._accel import jit
from .corpus import SEPARATOR, Corpus
from .succinct import (
    BitVector,
    IntVector,
    Shape,
    WaveletTree,
    intvec_get_kernel,
    rank1_kernel,
    wt_access_rank_kernel,
    wt_rank_kernel,
)


class PatternError(ValueError):
    pass


def suffix_array(text) -> np.ndarray:
    """0-based suffix array by prefix doubling (ranks compared pairwise)."""
    text = np.asarray(text, dtype=np.int64)
    n = text.size
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    rank = np.unique(text, return_inverse=True)[1].astype(np.int64)
    k = 1
    while True:
        second = np.full(n, -1, dtype=np.int64)
        if k < n:
            second[: n - k] = rank[k:]
        sa = np.lexsort((second, rank))
        r, s = rank[sa], second[sa]
        step = np.empty(n, dtype=np.int64)
        step[0] = 0
        step[1:] = (r[1:] != r[:-1]) | (s[1:] != s[:-1])
        new_rank = np.empty(n, dtype=np.int64)
        new_rank[sa] = np.cumsum(step)
        rank = new_rank
        if rank[sa[-1]] == n - 1 or k >= n:
            return sa.astype(np.int64)
        k <<= 1


@jit
def backward_search_kernel(bwt_wt, root, c_table, sigma, n, pattern):
    sp = 0
    ep = n
    for k in range(pattern.shape[0] - 1, -1, -1):
        c = pattern[k]
        if c < 1 or c > sigma:
            return 0, 0
        sp = c_table[c] + wt_rank_kernel(bwt_wt, root, c, sp)
        ep = c_table[c] + wt_rank_kernel(bwt_wt, root, c, ep)
        if sp >= ep:
            return 0, 0
    return sp, ep


@jit
def lf_kernel(loc, i):
    bwt_wt, root, c_table, dollar_lf, sampled, samples = loc
    c, r = wt_access_rank_kernel(bwt_wt, root, i)
    if c == 0:
        return dollar_lf[r - 1]
    return c_table[c] + r - 1


@jit
def locate_kernel(loc, i):
    """(0-based text position of row i, LF steps taken)."""
    bwt_wt, root, c_table, dollar_lf, sampled, samples = loc
    steps = 0
    words = sampled[0]
    while not ((words[i >> 6] >> np.uint64(i & 63)) & np.uint64(1)):
        i = lf_kernel(loc, i)
        steps += 1
    return intvec_get_kernel(samples, rank1_kernel(sampled, i)) + steps, steps


class SuffixIndex:
    """BWT index over the corpus concatenation with text-position SA sampling.

    Rows whose SA value is a multiple of ``sample_rate`` (0-based) keep their
    SA value; any other row reaches one within ``sample_rate - 1`` LF steps.
    """

    def __init__(self, corpus: Corpus, sample_rate: int | None = None):
        text = corpus.concat
        n = text.size
        self.n_prime = int(n)
        self.sigma = int(corpus.sigma)
        self.D = corpus.D
        if sample_rate is None:
            sample_rate = default_sample_rate(n)
        if sample_rate < 1:
            raise ValueError("sample rate must be >= 1")
        self.sample_rate = int(sample_rate)
        sa = suffix_array(text)
        bwt = text[(sa - 1) % n]
        counts = np.bincount(text, minlength=self.sigma + 1)
        self.c_table = np.zeros(self.sigma + 2, dtype=np.int64)
        np.cumsum(counts, out=self.c_table[1:])
        self.occ = WaveletTree(bwt, Shape.leaf(0, self.sigma))
        isa = np.empty(n, dtype=np.int64)
        isa[sa] = np.arange(n)
        dollar_rows = np.flatnonzero(bwt == SEPARATOR)
        self.dollar_lf = isa[(sa[dollar_rows] - 1) % n].astype(np.int64)
        marked = sa % self.sample_rate == 0
        self.sampled = BitVector(marked)
        self.samples = IntVector(sa[marked], width=max(1, (n - 1).bit_length()))
        # build-time only; never serialized, never read by queries
        self.sa = sa

    @property
    def locate_arrays(self):
        return (
            self.occ.arrays,
            int(self.occ.roots[0]),
            self.c_table,
            self.dollar_lf,
            self.sampled.arrays,
            self.samples.arrays,
        )

    def count(self, pattern) -> range:
        """Rows (1-based) whose suffixes start with ``pattern``; empty range if none.

        Bytes above sigma cannot occur and give an empty range.
        """
        p = as_pattern(pattern)
        sp, ep = backward_search_kernel(
            self.occ.arrays, int(self.occ.roots[0]), self.c_table, self.sigma, self.n_prime, p
        )
        return range(int(sp) + 1, int(ep) + 1)

    def locate(self, i: int) -> int:
        return self.locate_with_steps(i)[0]

    def locate_with_steps(self, i: int) -> tuple[int, int]:
        if not 1 <= i <= self.n_prime:
            raise IndexError(f"row {i} outside [1..{self.n_prime}]")
        pos, steps = locate_kernel(self.locate_arrays, i - 1)
        return int(pos) + 1, int(steps)

    def lf(self, i: int) -> int:
        if not 1 <= i <= self.n_prime:
            raise IndexError(f"row {i} outside [1..{self.n_prime}]")
        return int(lf_kernel(self.locate_arrays, i - 1)) + 1

    def space_bits(self) -> dict:
        return {
            "bwt_wavelet": self.occ.space_bits(),
            "c_table": int(self.c_table.size * 64),
            "dollar_lf": int(self.dollar_lf.size * 64),
            "sa_sample_marks": self.sampled.space_bits(),
            "sa_samples": self.samples.space_bits(),
        }

    def state(self):
        return {
            "n_prime": self.n_prime,
            "sigma": self.sigma,
            "D": self.D,
            "sample_rate": self.sample_rate,
            "c_table": self.c_table,
            "occ": self.occ.state(),
            "dollar_lf": self.dollar_lf,
            "sampled": self.sampled.state(),
            "samples": self.samples.state(),
        }

    @classmethod
    def from_state(cls, st) -> SuffixIndex:
        idx = cls.__new__(cls)
        idx.n_prime = int(st["n_prime"])
        idx.sigma = int(st["sigma"])
        idx.D = int(st["D"])
        idx.sample_rate = int(st["sample_rate"])
        idx.c_table = np.ascontiguousarray(st["c_table"], dtype=np.int64)
        idx.occ = WaveletTree.from_state(st["occ"])
        idx.dollar_lf = np.ascontiguousarray(st["dollar_lf"], dtype=np.int64)
        idx.sampled = BitVector.from_state(st["sampled"])
        idx.samples = IntVector.from_state(st["samples"])
        idx.sa = None
        return idx


def default_sample_rate(n_prime: int) -> int:
    return max(1, math.ceil(math.log2(n_prime))) if n_prime > 1 else 1


def as_pattern(pattern) -> np.ndarray:
    if isinstance(pattern, str):
        pattern = pattern.encode("utf-8")
    if isinstance(pattern, np.ndarray):
        p = pattern.astype(np.int64, copy=False)
    else:
        p = np.frombuffer(bytes(pattern), dtype=np.uint8).astype(np.int64)
    if p.size == 0:
        raise PatternError("empty pattern")
    if (p == SEPARATOR).any():
        raise PatternError("pattern contains the separator byte 0")
    return p


def build_suffix_index(corpus: Corpus, sample_rate: int | None = None) -> SuffixIndex:
    return SuffixIndex(corpus, sample_rate)


def count(idx: SuffixIndex, pattern) -> range:
    return idx.count(pattern)


def locate(idx: SuffixIndex, i: int) -> int:
    return idx.locate(i)


@jit
def doc_at_steps_kernel(dacc, i):
    """(document id of 0-based row i or 0 for separator rows, LF steps spent)."""
    compact, a, D, sep, loc = dacc
    if i < D:
        return 0, 0
    if compact:
        pos, steps = locate_kernel(loc, i)
        return rank1_kernel(sep, pos) + 1, steps
    return intvec_get_kernel(a, i), 0


@jit
def doc_at_kernel(dacc, i):
    doc, steps = doc_at_steps_kernel(dacc, i)
    return doc


class DocumentArray:
    """Row -> document map, stored packed or computed through locate.

    ``mode='stored'`` keeps A in ceil(log2(D+1)) bits per row; ``'compact'``
    keeps only the separator bitmap and answers through the sampled SA.
    """

    def __init__(self, corpus: Corpus, index: SuffixIndex, mode: str = "stored", values=None):
        if mode not in ("stored", "compact"):
            raise ValueError(f"unknown document array mode {mode!r}")
        self.mode = mode
        self.D = corpus.D
        self.n_prime = corpus.n_prime
        seps = corpus.concat == SEPARATOR
        self.sep_bitmap = BitVector(seps)
        self.index = index
        if values is None:
            values = document_array(corpus, index)
        self.width = max(1, int(self.D).bit_length())
        self.a = IntVector(values if mode == "stored" else (), width=self.width)

    @property
    def arrays(self):
        return (self.mode == "compact", self.a.arrays, self.D, self.sep_bitmap.arrays,
                self.index.locate_arrays)

    def view(self, mode: str) -> DocumentArray:
        """Same rows answered in another mode; compact views drop the packed array."""
        if mode == self.mode:
            return self
        if mode == "stored":
            raise ValueError("a compact document array cannot back a stored view")
        out = DocumentArray.__new__(DocumentArray)
        out.__dict__.update(self.__dict__)
        out.mode = "compact"
        out.a = IntVector((), width=self.width)
        return out

    def __len__(self):
        return self.n_prime

    def doc_at(self, i: int) -> int:
        if not 1 <= i <= self.n_prime:
            raise IndexError(f"row {i} outside [1..{self.n_prime}]")
        return int(doc_at_kernel(self.arrays, i - 1))

    def to_numpy(self) -> np.ndarray:
        if self.mode == "stored":
            return self.a.to_numpy()
        return np.array([self.doc_at(i) for i in range(1, self.n_prime + 1)], dtype=np.int64)

    def space_bits(self) -> dict:
        out = {"sep_bitmap": self.sep_bitmap.space_bits()}
        if self.mode == "stored":
            out["document_array"] = self.a.space_bits()
        return out

    def state(self):
        return {
            "mode": self.mode,
            "D": self.D,
            "n_prime": self.n_prime,
            "sep_bitmap": self.sep_bitmap.state(),
            "a": self.a.state(),
        }

    @classmethod
    def from_state(cls, st, index: SuffixIndex) -> DocumentArray:
        da = cls.__new__(cls)
        da.mode = str(st["mode"])
        da.D = int(st["D"])
        da.n_prime = int(st["n_prime"])
        da.sep_bitmap = BitVector.from_state(st["sep_bitmap"])
        da.a = IntVector.from_state(st["a"])
        da.width = da.a.width
        da.index = index
        return da


def document_array(corpus: Corpus, index: SuffixIndex) -> np.ndarray:
    """A[i-1] for every row, computed from the SA (build time)."""
    sa = index.sa
    if sa is None:
        sa = suffix_array(corpus.concat)
    seps = corpus.concat == SEPARATOR
    before = np.cumsum(seps) - seps  # separators strictly before each position
    a = before[sa] + 1
    a[seps[sa]] = 0
    return a.astype(np.int64)


def doc_at(da: DocumentArray, i: int) -> int:
    return da.doc_at(i)
