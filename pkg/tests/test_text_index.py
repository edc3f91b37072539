import numpy as np
import pytest

from cattree.corpus import Corpus
from cattree.oracle import oracle_count, oracle_suffix_array
from cattree.text_index import (
    DocumentArray,
    PatternError,
    SuffixIndex,
    count,
    doc_at,
    document_array,
    locate,
    suffix_array,
)


def _text(c: Corpus) -> bytes:
    return bytes(c.concat.astype(np.uint8))


def test_sa_two_suffixes():
    c = Corpus.from_documents(["a"])
    assert (suffix_array(c.concat) + 1).tolist() == [2, 1]


def test_sa_running_matches_naive(corpus):
    assert (suffix_array(corpus.concat) + 1).tolist() == oracle_suffix_array(_text(corpus))


def test_count_examples(corpus):
    idx = SuffixIndex(corpus)
    assert len(count(idx, "a")) == 4
    assert len(count(idx, "zz")) == 0
    assert len(count(idx, "ba")) == 1
    assert len(count(idx, "bb")) == 1
    with pytest.raises(PatternError):
        count(idx, "")
    with pytest.raises(PatternError):
        count(idx, b"a\0")


@pytest.mark.parametrize("s", [1, 2, 4, 32])
def test_locate_all_rows(corpus, s):
    idx = SuffixIndex(corpus, s)
    naive = oracle_suffix_array(_text(corpus))
    for i in range(1, corpus.n_prime + 1):
        pos, steps = idx.locate_with_steps(i)
        assert pos == naive[i - 1] and steps <= s - 1
    assert locate(idx, 1) == naive[0]
    with pytest.raises(IndexError):
        locate(idx, corpus.n_prime + 1)


def test_lf_is_one_cycle():
    rng = np.random.default_rng(4)
    docs = [rng.integers(1, 3, size=int(rng.integers(1, 20)), dtype=np.uint8).tobytes() for _ in range(15)]
    c = Corpus.from_documents(docs)
    idx = SuffixIndex(c)
    seen, i = set(), 1
    for _ in range(c.n_prime):
        seen.add(i)
        i = idx.lf(i)
    assert i == 1 and len(seen) == c.n_prime


def test_document_array_modes(corpus):
    idx = SuffixIndex(corpus, 4)
    stored = DocumentArray(corpus, idx, "stored")
    compact = DocumentArray(corpus, idx, "compact")
    a = [doc_at(stored, i) for i in range(1, 13)]
    assert a[: corpus.D] == [0] * corpus.D and a[0] == 0
    assert a == [doc_at(compact, i) for i in range(1, 13)]
    # row -> document of the naive suffix start
    text = _text(corpus)
    naive = oracle_suffix_array(text)
    want = [0 if text[p - 1] == 0 else text[: p - 1].count(0) + 1 for p in naive]
    assert a == want == document_array(corpus, idx).tolist()
    assert compact.space_bits().keys() == {"sep_bitmap"}


def test_count_fuzz_small():
    rng = np.random.default_rng(8)
    for _ in range(50):
        sigma = int(rng.choice([2, 4, 26]))
        docs = [rng.integers(1, sigma + 1, size=int(rng.integers(1, 60)), dtype=np.uint8).tobytes()
                for _ in range(int(rng.integers(1, 10)))]
        c = Corpus.from_documents(docs, sigma)
        idx = SuffixIndex(c)
        for _ in range(20):
            p = rng.integers(1, sigma + 1, size=int(rng.integers(1, 5)), dtype=np.uint8).tobytes()
            assert len(idx.count(p)) == sum(oracle_count(d, p) for d in docs)


def test_state_roundtrip(corpus):
    idx = SuffixIndex(corpus, 3)
    idx2 = SuffixIndex.from_state(idx.state())
    assert [idx2.locate(i) for i in range(1, 13)] == [idx.locate(i) for i in range(1, 13)]
    assert idx2.count("a") == idx.count("a")
