import numpy as np
import pytest

from cattree.succinct import (
    BitVector,
    IntVector,
    RangeMinimum,
    Shape,
    WaveletTree,
    balanced_shape,
    bv_rank,
    bv_select,
    rmq,
    rmq_build,
    wt_access,
    wt_build,
    wt_rank,
    wt_select,
)

B = BitVector([1, 0, 1, 1, 0])


def test_bitvector_examples():
    assert bv_rank(B, 1, 4) == 3
    assert bv_rank(B, 0, 0) == 0
    assert bv_rank(B, 0, 5) == 2
    assert bv_select(B, 1, 2) == 3
    assert bv_select(B, 0, 1) == 2
    with pytest.raises(IndexError):
        bv_select(B, 1, 4)
    assert [B[i] for i in range(1, 6)] == [1, 0, 1, 1, 0]


@pytest.mark.parametrize("n", [1, 63, 64, 65, 511, 512, 513, 3000])
def test_bitvector_against_prefix_sums(n):
    rng = np.random.default_rng(n)
    bits = rng.random(n) < 0.3
    bv = BitVector(bits)
    pref = np.concatenate([[0], np.cumsum(bits)])
    for i in range(n + 1):
        assert bv.rank(1, i) == pref[i]
    ones = np.flatnonzero(bits) + 1
    zeros = np.flatnonzero(~bits) + 1
    for j, p in enumerate(ones, 1):
        assert bv.select(1, j) == p
    for j, p in enumerate(zeros, 1):
        assert bv.select(0, j) == p
    assert np.array_equal(bv.to_numpy(), bits)


def test_intvector_widths():
    vals = np.array([0, 5, 7, 1, 6, 2, 3])
    iv = IntVector(vals, width=3)
    assert [iv[i] for i in range(len(vals))] == vals.tolist()
    big = np.arange(0, 2**40, 2**33 + 12345)
    iv = IntVector(big)
    assert np.array_equal(iv.to_numpy(), big)
    with pytest.raises(ValueError):
        IntVector([8], width=3)


def test_rmq_examples():
    q = rmq_build([5, 2, 7, 2])
    assert rmq(q, 1, 4) == 2  # leftmost of the tied minima
    assert rmq(q, 3, 3) == 3
    assert rmq(q, 3, 4) == 4
    with pytest.raises(IndexError):
        rmq(q, 3, 2)


def test_rmq_bruteforce():
    rng = np.random.default_rng(3)
    vals = rng.integers(0, 20, size=300)
    q = RangeMinimum(vals)
    for _ in range(2000):
        l, r = sorted(rng.integers(1, 301, size=2))
        assert q.query(l, r) == l + int(np.argmin(vals[l - 1 : r]))


def test_wavelet_root_bits():
    wt = wt_build([1, 2, 1, 3], balanced_shape(1, 3))
    root = int(wt.roots[0])
    # partition {1,2}|{3}: only the final 3 goes right
    assert wt.node_bits(root).astype(int).tolist() == [0, 0, 0, 1]
    assert [wt_access(wt, i) for i in range(1, 5)] == [1, 2, 1, 3]
    assert wt_rank(wt, 1, 3) == 2
    assert wt_select(wt, 1, 2) == 3
    with pytest.raises(IndexError):
        wt_select(wt, 3, 2)


def test_wavelet_empty_and_constant():
    wt = wt_build([], balanced_shape(1, 3))
    with pytest.raises(IndexError):
        wt_access(wt, 1)
    with pytest.raises(IndexError):
        wt_rank(wt, 1, 1)
    wt = wt_build([2, 2, 2], Shape.leaf(2))
    assert [wt_access(wt, i) for i in range(1, 4)] == [2, 2, 2]
    assert wt_rank(wt, 2, 3) == 3


def test_wavelet_multiary_shape():
    # root with three children, one of which is itself a wide leaf interval
    shape = Shape.node([Shape.leaf(1, 2), Shape.leaf(3), Shape.node([Shape.leaf(4), Shape.leaf(5)])])
    rng = np.random.default_rng(9)
    seq = rng.integers(1, 6, size=400)
    wt = WaveletTree(seq, shape)
    for c in range(1, 6):
        pos = np.flatnonzero(seq == c) + 1
        for i in (0, 1, 57, 200, 400):
            assert wt.rank(c, i) == int((seq[:i] == c).sum())
        for j, p in enumerate(pos[:20], 1):
            assert wt.select(c, j) == p
    assert all(wt.access(i) == seq[i - 1] for i in range(1, 401))
    got = wt.range_distinct(10, 90, sym_hi=3)
    sub = seq[9:90]
    want = [(c, int((sub == c).sum())) for c in range(1, 4) if (sub == c).any()]
    assert sorted(got) == want


def test_shape_validation():
    with pytest.raises(ValueError):
        Shape.node([Shape.leaf(1)])
    with pytest.raises(ValueError):
        Shape.node([Shape.leaf(1), Shape.leaf(3)])


def test_forest_trees_are_independent():
    a, b = [1, 2, 2, 1], [3, 3, 1]
    wt = WaveletTree.forest([(a, balanced_shape(1, 2)), (b, balanced_shape(1, 3))])
    assert [wt.access(i, tree=0) for i in range(1, 5)] == a
    assert [wt.access(i, tree=1) for i in range(1, 4)] == b
    assert wt.rank(3, 2, tree=1) == 2


def test_state_roundtrip():
    wt = WaveletTree([4, 1, 3, 3, 2], balanced_shape(1, 4))
    wt2 = WaveletTree.from_state(wt.state())
    assert [wt2.access(i) for i in range(1, 6)] == [4, 1, 3, 3, 2]
    bv = BitVector.from_state(B.state())
    assert bv.rank(1, 5) == 3
