"""Document collection and category tree: parsing, validation, id spaces.

Documents are 1-based (manifest order), category nodes are dense 0-based ids
taken from the tree file. The separator is symbol 0 and terminates every
document, including the last one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SEPARATOR = 0


class CorpusError(ValueError):
    pass


class EmptyCorpus(CorpusError):
    pass


class TreeError(ValueError):
    pass


class RaggedLeaves(TreeError):
    pass


class LeafCountMismatch(TreeError):
    pass


class MalformedTree(TreeError):
    pass


@dataclass
class Corpus:
    documents: list[bytes]
    sigma: int
    concat: np.ndarray = field(repr=False)

    @property
    def D(self) -> int:
        return len(self.documents)

    @property
    def n(self) -> int:
        return int(self.concat.size) - len(self.documents)

    @property
    def n_prime(self) -> int:
        return int(self.concat.size)

    @classmethod
    def from_documents(cls, documents, sigma: int | None = None) -> Corpus:
        docs = [d.encode() if isinstance(d, str) else bytes(d) for d in documents]
        if not docs:
            raise EmptyCorpus("corpus has no documents")
        for j, d in enumerate(docs, 1):
            if not d:
                raise CorpusError(f"document {j} is empty")
            if SEPARATOR in d:
                raise CorpusError(f"document {j} contains the separator byte 0")
        observed = max(max(d) for d in docs)
        if sigma is None:
            sigma = observed
        elif sigma < observed:
            raise CorpusError(f"declared sigma {sigma} < largest symbol {observed}")
        sep = bytes([SEPARATOR])
        concat = np.frombuffer(sep.join(docs) + sep, dtype=np.uint8).astype(np.int64)
        return cls(documents=docs, sigma=int(sigma), concat=concat)

    def entropy0(self) -> float:
        """Empirical zero-order entropy (bits/symbol) of the document text."""
        body = self.concat[self.concat != SEPARATOR]
        freq = np.bincount(body).astype(float)
        freq = freq[freq > 0] / body.size
        return float(-(freq * np.log2(freq)).sum())


def load_corpus(manifest) -> Corpus:
    path = Path(manifest)
    try:
        spec = json.loads(path.read_text())
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise CorpusError(f"{path}: invalid JSON ({exc})") from None
    entries = spec.get("documents")
    if not isinstance(entries, list):
        raise CorpusError(f"{path}: 'documents' must be a list")
    if not entries:
        raise EmptyCorpus(f"{path}: empty document list")
    entries = sorted(entries, key=lambda e: e["id"])
    if [e["id"] for e in entries] != list(range(1, len(entries) + 1)):
        raise CorpusError(f"{path}: document ids must be 1..D contiguous")
    docs = []
    for e in entries:
        if "text" in e:
            docs.append(e["text"].encode("utf-8"))
        elif "path" in e:
            docs.append((path.parent / e["path"]).read_bytes())
        else:
            raise CorpusError(f"{path}: document {e['id']} has neither 'text' nor 'path'")
    return Corpus.from_documents(docs, spec.get("sigma"))


@dataclass
class CategoryTree:
    """Rooted category tree; leaves[j-1] is the leaf holding document j."""

    parent: np.ndarray
    leaves: np.ndarray
    level: np.ndarray = field(init=False, repr=False)
    root: int = field(init=False)

    def __post_init__(self):
        self.parent = np.asarray(self.parent, dtype=np.int64)
        self.leaves = np.asarray(self.leaves, dtype=np.int64)
        self._validate()

    @property
    def node_count(self) -> int:
        return int(self.parent.size)

    @property
    def height(self) -> int:
        return int(self.level.max())

    @property
    def D(self) -> int:
        return int(self.leaves.size)

    def _validate(self):
        n = self.parent.size
        if n == 0:
            raise MalformedTree("tree has no nodes")
        roots = np.flatnonzero(self.parent < 0)
        if roots.size != 1:
            raise MalformedTree(f"tree must have exactly one root, found {roots.size}")
        if (self.parent >= n).any():
            raise MalformedTree("parent id out of range")
        self.root = int(roots[0])
        # levels by repeated relaxation from the root; unreached nodes are on cycles
        level = np.zeros(n, dtype=np.int64)
        level[self.root] = 1
        frontier = np.array([self.root])
        children = self.children_csr()
        depth = 1
        while frontier.size:
            depth += 1
            kids = np.concatenate([children[1][children[0][v] : children[0][v + 1]] for v in frontier])
            level[kids] = depth
            frontier = kids
        if (level == 0).any():
            raise MalformedTree("tree contains a cycle or disconnected nodes")
        self.level = level
        is_leaf = np.diff(children[0]) == 0
        leaf_ids = np.flatnonzero(is_leaf)
        if self.leaves.size != leaf_ids.size:
            raise LeafCountMismatch(
                f"tree has {leaf_ids.size} leaves but {self.leaves.size} documents are mapped"
            )
        if self.leaves.size and (
            self.leaves.min() < 0
            or self.leaves.max() >= n
            or not is_leaf[self.leaves].all()
            or np.unique(self.leaves).size != self.leaves.size
        ):
            raise MalformedTree("'leaves' must be a bijection onto the leaf nodes")
        if np.unique(level[leaf_ids]).size != 1:
            raise RaggedLeaves("leaves appear at different levels")

    def children_csr(self):
        """(offsets, child ids) with children of each node sorted by id."""
        n = self.parent.size
        nonroot = np.flatnonzero(self.parent >= 0)
        order = nonroot[np.lexsort((nonroot, self.parent[nonroot]))]
        counts = np.bincount(self.parent[nonroot], minlength=n)
        offsets = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        return offsets, order.astype(np.int64)

    def children(self, v: int) -> list[int]:
        off, kids = self.children_csr()
        return kids[off[v] : off[v + 1]].tolist()

    def to_json(self) -> dict:
        return {
            "nodes": [
                {"id": i, "parent": (None if p < 0 else int(p))} for i, p in enumerate(self.parent)
            ],
            "leaves": [int(x) for x in self.leaves],
        }

    def state(self):
        return {"parent": self.parent, "leaves": self.leaves}

    @classmethod
    def from_state(cls, st) -> CategoryTree:
        return cls(st["parent"], st["leaves"])


def parse_tree(spec: dict, D: int | None = None) -> CategoryTree:
    nodes = spec.get("nodes")
    if not isinstance(nodes, list) or not nodes:
        raise MalformedTree("'nodes' must be a non-empty list")
    ids = sorted(int(nd["id"]) for nd in nodes)
    if ids != list(range(len(nodes))):
        raise MalformedTree("node ids must be dense 0..N-1")
    parent = np.full(len(nodes), -1, dtype=np.int64)
    for nd in nodes:
        p = nd.get("parent")
        parent[int(nd["id"])] = -1 if p is None else int(p)
    leaves = spec.get("leaves", [])
    if D is not None and len(leaves) != D:
        raise LeafCountMismatch(f"tree maps {len(leaves)} leaves, corpus has {D} documents")
    return CategoryTree(parent, np.asarray(leaves, dtype=np.int64))


def load_tree(tree_file, corpus: Corpus | None = None) -> CategoryTree:
    spec = json.loads(Path(tree_file).read_text())
    return parse_tree(spec, None if corpus is None else corpus.D)
