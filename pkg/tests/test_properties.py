import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from cattree import CategoricalIndex, Corpus, OracleIndex
from cattree.generate import random_tree
from cattree.index import verification_specs
from cattree.oracle import oracle_suffix_array
from cattree.succinct import BitVector, RangeMinimum, WaveletTree, balanced_shape
from cattree.text_index import SuffixIndex

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@SETTINGS
@given(st.lists(st.booleans(), min_size=1, max_size=1500))
def test_bitvector_rank_select_inverse(bits):
    bv = BitVector(bits)
    for j in range(1, bv.count(1) + 1):
        p = bv.select(1, j)
        assert bv.rank(1, p) == j and bv[p] == 1
    for j in range(1, bv.count(0) + 1):
        p = bv.select(0, j)
        assert bv.rank(0, p) == j and bv[p] == 0


@SETTINGS
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=300), st.data())
def test_rmq_leftmost_min(values, data):
    q = RangeMinimum(values)
    l = data.draw(st.integers(1, len(values)))
    r = data.draw(st.integers(l, len(values)))
    assert q.query(l, r) == l + int(np.argmin(values[l - 1 : r]))


@SETTINGS
@given(st.integers(1, 9).flatmap(
    lambda s: st.tuples(st.just(s), st.lists(st.integers(1, s), min_size=1, max_size=200))))
def test_wavelet_access_rank(case):
    sigma, seq = case
    wt = WaveletTree(seq, balanced_shape(1, sigma))
    arr = np.array(seq)
    assert [wt.access(i) for i in range(1, len(seq) + 1)] == seq
    for c in range(1, sigma + 1):
        assert wt.rank(c, len(seq)) == int((arr == c).sum())


docs_strategy = st.lists(st.binary(min_size=1, max_size=30).map(lambda b: bytes(1 + x % 3 for x in b)),
                         min_size=1, max_size=8)


@SETTINGS
@given(docs_strategy, st.sampled_from([1, 2, 5, 32]))
def test_locate_equals_naive(docs, s):
    c = Corpus.from_documents(docs, 3)
    idx = SuffixIndex(c, s)
    naive = oracle_suffix_array(bytes(c.concat.astype(np.uint8)))
    assert [idx.locate(i) for i in range(1, c.n_prime + 1)] == naive


@SETTINGS
@given(docs_strategy, st.integers(2, 7), st.floats(0, 0.9), st.integers(0, 2**31),
       st.binary(min_size=1, max_size=3).map(lambda b: bytes(1 + x % 3 for x in b)))
def test_engines_equal_oracle(docs, height, unary, seed, pattern):
    c = Corpus.from_documents(docs, 3)
    tree = random_tree(np.random.default_rng(seed), c.D, height if c.D > 1 else max(height, 1), unary)
    idx = CategoricalIndex.build(c, tree, verification_specs(2))
    oracle = OracleIndex(c, tree)
    for lev in range(1, tree.height + 1):
        want = oracle.query(pattern, lev).nodes
        for eng in idx.engines.values():
            got = eng.query(pattern, lev).nodes
            assert got == want
            assert all(tree.level[v] == lev for v in got)
