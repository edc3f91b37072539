import math

import numpy as np
import pytest

from cattree.corpus import CategoryTree
from cattree.generate import caterpillar_tree, random_tree, unary_chain
from cattree.topology import (
    LevelAncestorIndex,
    ancestor_table,
    decompose_heavy,
    dfs_leaf_order,
    laq,
    leafselect,
)
from conftest import R, U, V


def test_laq_examples(tree):
    idx = LevelAncestorIndex(tree)
    l3 = 5
    assert laq(idx, l3, 1) == R
    assert laq(idx, l3, 2) == V
    assert laq(idx, l3, 3) == l3
    with pytest.raises(IndexError):
        laq(idx, l3, 4)
    with pytest.raises(IndexError):
        laq(idx, U, 3)


def test_leafselect(tree):
    idx = LevelAncestorIndex(tree)
    assert leafselect(idx, 1) == 3
    assert leafselect(idx, 2) == 4
    with pytest.raises(IndexError):
        leafselect(idx, 5)


def _walk(parent, v, lev, level):
    while level[v] > lev:
        v = parent[v]
    return v


def test_laq_matches_parent_walk():
    rng = np.random.default_rng(11)
    checked = 0
    for seed in range(8):
        t = random_tree(np.random.default_rng(seed), int(rng.integers(50, 400)),
                        int(rng.integers(2, 40)), float(rng.uniform(0, 0.8)))
        idx = LevelAncestorIndex(t)
        par, level = t.parent, t.level
        for _ in range(1250):
            v = int(rng.integers(t.node_count))
            lev = int(rng.integers(1, level[v] + 1))
            assert idx.laq(v, lev) == _walk(par, v, lev, level)
            checked += 1
    assert checked == 10_000


def test_ancestor_table(tree):
    anc = ancestor_table(tree)
    assert anc.tolist() == [[R] * 4, [U, U, V, V], [3, 4, 5, 6]]


def test_dfs_leaf_order(tree):
    order, lo, hi = dfs_leaf_order(tree)
    assert order.tolist() == [3, 4, 5, 6]
    assert (lo[U], hi[U], lo[V], hi[V], lo[R], hi[R]) == (0, 2, 2, 4, 0, 4)


def test_heavy_running_example(tree):
    hpd = decompose_heavy(tree)
    assert [hpd.path_nodes(p) for p in range(hpd.path_count)] == [[R, U, 3], [V, 5], [4], [6]]
    assert hpd.light_children(0) == [V, 4]  # ordered by increasing depth
    assert hpd.weight[R] == 4 and hpd.heavy[R] == U


def test_heavy_unary_chain():
    t = CategoryTree([-1, 0, 1], [2])
    hpd = decompose_heavy(t)
    assert hpd.path_count == 1 and hpd.path_nodes(0) == [0, 1, 2]
    assert hpd.light_children(0) == []


def test_heavy_invariants_and_caterpillar():
    t = caterpillar_tree(8, 12)
    hpd = decompose_heavy(t)
    assert sum(len(hpd.path_nodes(p)) for p in range(hpd.path_count)) == t.node_count
    assert max(hpd.light_edges_to(int(v), t.parent) for v in t.leaves) <= 3
    off, kids = t.children_csr()
    for v in range(t.node_count):
        ch = kids[off[v] : off[v + 1]]
        if ch.size:
            h = hpd.heavy[v]
            assert hpd.weight[v] >= hpd.weight[h] >= hpd.weight[ch].max()


def test_light_edge_bound_small_random():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        D = int(rng.integers(1, 300))
        t = random_tree(rng, D, int(rng.integers(2, 30)), 0.3) if D > 1 else unary_chain(4)
        hpd = decompose_heavy(t)
        bound = int(math.floor(math.log2(D)))
        assert max(hpd.light_edges_to(int(v), t.parent) for v in t.leaves) <= bound
