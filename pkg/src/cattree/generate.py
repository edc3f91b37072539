"""Synthetic corpora and category trees (all leaves at the same level)."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .corpus import CategoryTree, Corpus


def random_documents(rng: np.random.Generator, docs: int, doc_len: int, sigma: int,
                     fixed_len: bool = False) -> list[bytes]:
    """Byte strings over [1..sigma]; lengths uniform in [1..doc_len] unless fixed."""
    out = []
    for _ in range(docs):
        m = doc_len if fixed_len else int(rng.integers(1, doc_len + 1))
        out.append(rng.integers(1, sigma + 1, size=m, dtype=np.uint8).tobytes())
    return out


def random_tree(rng: np.random.Generator, docs: int, height: int,
                unary_density: float = 0.0) -> CategoryTree:
    """Grow the tree bottom-up from ``docs`` leaves at level ``height``.

    Going up one level, each node independently gets a private (unary) parent
    with probability ``unary_density``; the others are cut into consecutive
    groups that share a parent. Level 1 always merges everything into the root.
    """
    if height < 1:
        raise ValueError("height must be >= 1")
    if height == 1 and docs != 1:
        raise ValueError("height 1 only fits a single document")
    parent: list[int] = [-1] * docs
    current = list(range(docs))
    for lev in range(height - 1, 0, -1):
        if lev == 1:
            groups = [current]
        else:
            groups, run = [], []
            merge = rng.uniform(0.3, 0.9)
            for v in current:
                if rng.random() < unary_density:
                    if run:
                        groups.append(run)
                        run = []
                    groups.append([v])
                elif run and rng.random() < merge:
                    run.append(v)
                else:
                    if run:
                        groups.append(run)
                    run = [v]
            if run:
                groups.append(run)
        nxt = []
        for g in groups:
            p = len(parent)
            parent.append(-1)
            for v in g:
                parent[v] = p
            nxt.append(p)
        current = nxt
    return _renumber(parent, list(range(docs)))


def caterpillar_tree(docs: int, height: int) -> CategoryTree:
    """A spine of branching nodes, each shedding one unary chain down to a leaf.

    The branching depth grows with ``docs`` (capped by ``height - 1``), which is
    the regime where the shaped wavelet tree gets deep.
    """
    if docs == 1:
        return unary_chain(height)
    if height < 2:
        raise ValueError("a caterpillar with several documents needs height >= 2")
    parent: list[int] = [-1]
    leaves: list[int] = []

    def chain_to_leaf(top_parent: int, top_level: int):
        p = top_parent
        for _ in range(top_level, height + 1):
            parent.append(p)
            p = len(parent) - 1
        leaves.append(p)

    spine, lev, left = 0, 1, docs
    while left > 2 and lev < height - 1:
        chain_to_leaf(spine, lev + 1)
        parent.append(spine)
        spine, lev, left = len(parent) - 1, lev + 1, left - 1
    for _ in range(left):
        chain_to_leaf(spine, lev + 1)
    return _renumber(parent, leaves)


def unary_chain(height: int, docs: int = 1) -> CategoryTree:
    """Root, a unary chain down to level height-1, then ``docs`` leaves."""
    if height < 2:
        if docs != 1:
            raise ValueError("height 1 only fits a single document")
        return CategoryTree([-1], [0])
    parent = [-1] + list(range(height - 2))
    last = height - 2
    leaves = []
    for _ in range(docs):
        parent.append(last)
        leaves.append(len(parent) - 1)
    return CategoryTree(parent, leaves)


def deepen(tree: CategoryTree, extra: int) -> CategoryTree:
    """Insert ``extra`` unary nodes above every leaf; branching is unchanged."""
    parent = tree.parent.tolist()
    leaves = tree.leaves.tolist()
    for leaf in leaves:
        p = parent[leaf]
        for _ in range(extra):
            parent.append(p)
            p = len(parent) - 1
        parent[leaf] = p
    return _renumber(parent, leaves)


def _renumber(parent: list[int], leaves: list[int]) -> CategoryTree:
    """BFS ids from the root so that ids grow with level."""
    par = np.asarray(parent, dtype=np.int64)
    n = par.size
    root = int(np.flatnonzero(par < 0)[0])
    kids: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        if par[v] >= 0:
            kids[par[v]].append(v)
    order, head = [root], 0
    while head < len(order):
        order.extend(kids[order[head]])
        head += 1
    new_id = np.empty(n, dtype=np.int64)
    new_id[order] = np.arange(n)
    new_parent = np.full(n, -1, dtype=np.int64)
    nonroot = par >= 0
    new_parent[new_id[nonroot]] = new_id[par[nonroot]]
    return CategoryTree(new_parent, new_id[np.asarray(leaves, dtype=np.int64)])


def random_instance(rng: np.random.Generator, docs: int, doc_len: int, sigma: int, height: int,
                    unary_density: float = 0.0, shape: str = "random"):
    if shape == "caterpillar":
        tree = caterpillar_tree(docs, height)
    elif shape == "chain":
        tree = unary_chain(height, docs)
    else:
        tree = random_tree(rng, docs, height, unary_density)
    corpus = Corpus.from_documents(random_documents(rng, docs, doc_len, sigma), sigma)
    return corpus, tree


def write_instance(out_dir, corpus: Corpus, tree: CategoryTree) -> tuple[Path, Path]:
    """Write documents, manifest.json and tree.json; returns the two JSON paths."""
    out = Path(out_dir)
    (out / "docs").mkdir(parents=True, exist_ok=True)
    entries = []
    for j, d in enumerate(corpus.documents, 1):
        name = f"docs/{j:06d}.bin"
        (out / name).write_bytes(d)
        entries.append({"id": j, "path": name})
    manifest = out / "manifest.json"
    manifest.write_text(json.dumps({"sigma": corpus.sigma, "documents": entries}, indent=1))
    tree_file = out / "tree.json"
    tree_file.write_text(json.dumps(tree.to_json()))
    return manifest, tree_file
