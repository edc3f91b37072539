"""Brute-force reference answers. Shares nothing with the engines but the input types."""
from __future__ import annotations

from .corpus import CategoryTree, Corpus
from .query import LevelError, QueryResult


def oracle_count(text: bytes, pattern: bytes) -> int:
    """Occurrences of pattern in text, overlaps included."""
    if not pattern:
        raise ValueError("empty pattern")
    hits, start = 0, text.find(pattern)
    while start >= 0:
        hits += 1
        start = text.find(pattern, start + 1)
    return hits


def oracle_suffix_array(text: bytes) -> list[int]:
    """1-based suffix array by sorting the suffixes themselves."""
    return [i + 1 for i in sorted(range(len(text)), key=lambda i: text[i:])]


class OracleIndex:
    def __init__(self, corpus: Corpus, tree: CategoryTree):
        self.documents = list(corpus.documents)
        self.height = tree.height
        parent = tree.parent.tolist()
        self.anc = []
        for leaf in tree.leaves.tolist():
            chain = [leaf]
            while parent[chain[-1]] >= 0:
                chain.append(parent[chain[-1]])
            chain.reverse()  # chain[i-1] is the level-i ancestor
            self.anc.append(chain)

    def query(self, pattern, level: int) -> QueryResult:
        if isinstance(pattern, str):
            pattern = pattern.encode()
        if not pattern:
            raise ValueError("empty pattern")
        if 0 in pattern:
            raise ValueError("pattern contains the separator byte 0")
        if not 1 <= level <= self.height:
            raise LevelError(f"level {level} outside [1..{self.height}]")
        hits = {self.anc[j][level - 1] for j, d in enumerate(self.documents) if pattern in d}
        return QueryResult(level, sorted(hits))

    def count(self, pattern) -> int:
        if isinstance(pattern, str):
            pattern = pattern.encode()
        return sum(oracle_count(d, pattern) for d in self.documents)


def oracle_query(oracle: OracleIndex, pattern, level: int) -> QueryResult:
    return oracle.query(pattern, level)
