import numpy as np
import pytest

from cattree import CategoricalIndex, CategoryTree, Corpus, EngineSpec, LevelError, OracleIndex, QueryStats
from cattree.engine_colored import (
    InvalidAlpha,
    LevelReporter,
    level_colors,
    previous_occurrence,
)
from cattree.engine_wavelet import contracted_shape
from cattree.generate import deepen, random_instance
from cattree.index import verification_specs
from conftest import R, U, V


def test_previous_occurrence():
    assert previous_occurrence(np.array([1, 2, 1, 3])).tolist() == [0, 0, 1, 0]


def test_reporter_block_boundary():
    colors = np.array([1, 2, 1, 3])
    assert LevelReporter(1, colors, alpha=4).indexed_cells == 1
    assert LevelReporter(1, colors, alpha=1).indexed_cells == 4
    with pytest.raises(InvalidAlpha):
        LevelReporter(1, colors, alpha=0)


@pytest.mark.parametrize("pattern,level,want", [
    ("a", 2, [U, V]),
    ("bb", 2, [V]),
    ("zz", 1, []),
    ("zz", 3, []),
    ("a", 1, [R]),
    ("a", 3, [3, 4, 5]),
    ("ab", 3, [3]),
])
def test_running_example_all_engines(running_index, pattern, level, want):
    assert len(running_index.engines) == 5
    for tag, eng in running_index.engines.items():
        assert eng.query(pattern, level).nodes == want, tag


def test_level_errors(running_index):
    for eng in running_index.engines.values():
        with pytest.raises(LevelError):
            eng.query("a", 0)
        with pytest.raises(LevelError):
            eng.query("a", 4)


def test_report_distinct_on_rows(running_index, corpus, tree):
    eng = running_index.engine("colored-a1-stored")
    a = running_index.da.to_numpy()
    cols = level_colors(a, tree)[1]
    for l in range(corpus.D + 1, corpus.n_prime + 1):
        for r in range(l, corpus.n_prime + 1):
            want = sorted(set(cols[l - 1 : r].tolist()))
            assert eng.report_distinct(2, l, r) == want
    with pytest.raises(IndexError):
        eng.report_distinct(2, 3, 2)


def test_contracted_shape_running(tree):
    shape, leaf_rank = contracted_shape(tree)
    assert shape.tag == R and [c.tag for c in shape.children] == [U, V]
    assert leaf_rank.tolist() == [1, 2, 3, 4]


def test_contracted_shape_keeps_lowest_depth():
    # r -> x -> {l1, l2}: x absorbs r and the shape root carries level 2
    t = CategoryTree([-1, 0, 1, 1], [2, 3])
    shape, _ = contracted_shape(t)
    assert shape.tag == 1 and t.level[shape.tag] == 2
    idx = CategoricalIndex.build(Corpus.from_documents(["ab", "b"]), t, [EngineSpec("wavelet")])
    assert idx.query("a", 1).nodes == [0]
    assert idx.query("a", 2).nodes == [1]
    assert idx.query("b", 3).nodes == [2, 3]


def test_single_document():
    t = CategoryTree([-1, 0, 1], [2])
    idx = CategoricalIndex.build(Corpus.from_documents(["abc"]), t, verification_specs(2))
    for eng in idx.engines.values():
        for lev in (1, 2, 3):
            assert eng.query("bc", lev).nodes == [lev - 1]
            assert eng.query("cb", lev).nodes == []


def test_heavy_unary_chain_reports_laq():
    t = CategoryTree([-1, 0, 1, 2], [3])
    idx = CategoricalIndex.build(Corpus.from_documents(["xy"]), t, [EngineSpec("heavy")])
    eng = idx.engine("heavy")
    assert eng.hpd.path_count == 1
    assert [eng.query("y", i).nodes for i in (1, 2, 3, 4)] == [[0], [1], [2], [3]]


def test_scratch_clean_and_reused(running_index):
    eng = running_index.engine("colored-a2-stored")
    scratch = eng.new_scratch()
    for p in ("a", "b", "ab", "zz", "bb"):
        for lev in (1, 2, 3):
            eng.query(p, lev, scratch=scratch)
            assert scratch.is_clear()


def test_stats_filled(running_index):
    st = QueryStats()
    running_index.query("a", 2, engine="colored-a1-stored", stats=st)
    assert (st.pattern_len, st.interval, st.t) == (1, 4, 2)
    assert st.rmq_calls <= 2 * st.t + 1 and st.a_accesses <= 2 * st.t + 1


def test_engine_selection(running_index):
    assert running_index.engine("heavy").kind == "heavy"
    assert running_index.engine("colored").tag == "colored-a1-stored"
    with pytest.raises(KeyError):
        running_index.engine("nope")


def test_heavy_counters_ignore_unary_depth():
    rng = np.random.default_rng(2)
    corpus, base = random_instance(rng, 24, 200, 4, 5, 0.0)
    short = CategoricalIndex.build(corpus, base, [EngineSpec("heavy"), EngineSpec("wavelet")])
    deep = CategoricalIndex.build(corpus, deepen(base, 40), [EngineSpec("heavy"), EngineSpec("wavelet")])
    for p in (b"\x01", b"\x02\x03", b"\x04\x04\x01"):
        a, b = QueryStats(), QueryStats()
        short.query(p, base.height, "heavy", a)
        deep.query(p, deep.height, "heavy", b)
        assert a.node_visits == b.node_visits and a.t == b.t


def test_random_instances_against_oracle():
    for seed in range(25):
        rng = np.random.default_rng(seed)
        D = int(rng.integers(1, 20))
        corpus, tree = random_instance(rng, D, 40, int(rng.choice([2, 4, 26])),
                                       int(rng.integers(2, 10)), 0.4)
        idx = CategoricalIndex.build(corpus, tree, verification_specs(3))
        oracle = OracleIndex(corpus, tree)
        for d in corpus.documents[:5]:
            p = d[: 1 + len(d) // 3]
            for lev in range(1, tree.height + 1):
                want = oracle.query(p, lev).nodes
                for eng in idx.engines.values():
                    assert eng.query(p, lev).nodes == want
