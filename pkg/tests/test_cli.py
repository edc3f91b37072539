import csv
import io
import json

import numpy as np
import pytest

from cattree import container
from cattree.cli import BENCH_COLUMNS, main, trial_workload
from cattree.generate import random_instance
from conftest import RUNNING_DOCS, RUNNING_LEAVES, RUNNING_PARENT, U, V


@pytest.fixture
def inputs(tmp_path):
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps(
        {"documents": [{"id": j, "text": d} for j, d in enumerate(RUNNING_DOCS, 1)]}))
    tree = tmp_path / "tree.json"
    tree.write_text(json.dumps({
        "nodes": [{"id": i, "parent": (None if p < 0 else p)} for i, p in enumerate(RUNNING_PARENT)],
        "leaves": RUNNING_LEAVES,
    }))
    return manifest, tree


@pytest.fixture
def built(tmp_path, inputs, capsys):
    out = tmp_path / "idx.ctix"
    m, t = inputs
    assert main(["build", "--manifest", str(m), "--tree", str(t), "--engine", "all",
                 "--alpha", "1,4", "-o", str(out)]) == 0
    capsys.readouterr()
    return out


def test_build_prints_space_breakdown(tmp_path, inputs, capsys):
    m, t = inputs
    out = tmp_path / "i.ctix"
    assert main(["build", "--manifest", str(m), "--tree", str(t), "-o", str(out)]) == 0
    text = capsys.readouterr().out
    assert "document array" in text and "n*ceil(log D)" in text and "H0=" in text


def test_query_text_and_json(built, capsys):
    assert main(["query", str(built), "-p", "a", "-i", "2"]) == 0
    assert capsys.readouterr().out == f"{U}\n{V}\n"
    assert main(["query", str(built), "-p", "6262", "--hex", "-i", "2", "--format", "json",
                 "--engine", "heavy"]) == 0
    assert json.loads(capsys.readouterr().out) == {"level": 2, "t": 1, "nodes": [V]}


def test_query_every_engine_tag(built, capsys):
    tags = container.engine_tags(built.read_bytes())
    assert tags == ["colored-a1-stored", "colored-a4-stored", "wavelet", "heavy"]
    for tag in tags:
        assert main(["query", str(built), "-p", "a", "-i", "2", "--engine", tag]) == 0
        assert capsys.readouterr().out == f"{U}\n{V}\n"


def test_query_exit_codes(built, tmp_path, capsys):
    assert main(["query", str(built), "-p", "zz", "-i", "1"]) == 0
    assert capsys.readouterr().out == ""
    assert main(["query", str(built), "-p", "a", "-i", "99"]) == 2
    assert main(["query", str(built), "-p", "a", "-i", "2", "--engine", "bogus"]) == 2
    assert main(["query", str(built), "-p", "zz", "--hex", "-i", "1"]) == 2
    bad = tmp_path / "bad.ctix"
    bad.write_bytes(built.read_bytes()[:64])
    assert main(["query", str(bad), "-p", "a", "-i", "2"]) == 3
    data = bytearray(built.read_bytes())
    data[-3] ^= 0x10
    bad.write_bytes(bytes(data))
    assert main(["query", str(bad), "-p", "a", "-i", "2"]) == 3
    bad.write_bytes(b"NOPE" + bytes(data[4:]))
    assert main(["query", str(bad), "-p", "a", "-i", "2"]) == 3
    assert main(["query", str(tmp_path / "missing"), "-p", "a", "-i", "2"]) == 3
    out = capsys.readouterr()
    assert out.out == ""


def test_build_invalid_alpha(tmp_path, inputs, capsys):
    m, t = inputs
    assert main(["build", "--manifest", str(m), "--tree", str(t), "--alpha", "0",
                 "-o", str(tmp_path / "x")]) == 2
    assert "alpha" in capsys.readouterr().err


def test_build_heavy_on_chain(tmp_path, capsys):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"documents": [{"id": 1, "text": "abc"}]}))
    t = tmp_path / "t.json"
    t.write_text(json.dumps({"nodes": [{"id": 0, "parent": None}, {"id": 1, "parent": 0},
                                       {"id": 2, "parent": 1}], "leaves": [2]}))
    out = tmp_path / "c.ctix"
    assert main(["build", "--manifest", str(m), "--tree", str(t), "--engine", "heavy", "-o", str(out)]) == 0
    idx = container.load(out)
    assert idx.engine("heavy").hpd.path_count == 1


def test_verify(inputs, capsys):
    m, t = inputs
    assert main(["verify", "--manifest", str(m), "--tree", str(t), "--trials", "1000", "--seed", "3"]) == 0
    assert main(["verify", "--manifest", str(m), "--tree", str(t), "--trials", "50", "--inject-fault"]) == 1
    assert "mismatch" in capsys.readouterr().err


def test_verify_workload_deterministic(corpus):
    assert trial_workload(corpus, 3, 200, 9) == trial_workload(corpus, 3, 200, 9)
    assert trial_workload(corpus, 3, 200, 9) != trial_workload(corpus, 3, 200, 10)


def test_bench_csv(inputs, capsys):
    m, t = inputs
    args = ["bench", "--manifest", str(m), "--tree", str(t), "--alpha", "1,8", "--queries", "5"]
    assert main(args) == 0
    first = capsys.readouterr().out
    rows = list(csv.DictReader(io.StringIO(first)))
    assert list(rows[0].keys()) == BENCH_COLUMNS
    assert {r["engine"] for r in rows} == {"colored-a1-stored", "colored-a8-stored", "wavelet", "heavy"}
    assert main(args) == 0
    assert capsys.readouterr().out.splitlines()[0] == first.splitlines()[0]


def test_bench_from_index(built, capsys):
    assert main(["bench", "--index", str(built), "--queries", "3"]) == 0
    assert len(capsys.readouterr().out.splitlines()) == 1 + 3 * 4


def test_gen_then_verify(tmp_path, capsys):
    out = tmp_path / "g"
    assert main(["gen", "--docs", "12", "--doc-len", "80", "--height", "6", "--unary-density", "0.5",
                 "--seed", "4", "--out", str(out)]) == 0
    assert main(["verify", "--manifest", str(out / "manifest.json"), "--tree", str(out / "tree.json"),
                 "--trials", "200"]) == 0
    assert main(["gen", "--docs", "9", "--height", "12", "--shape", "caterpillar",
                 "--out", str(tmp_path / "c")]) == 0


def test_container_roundtrip_random():
    from cattree import CategoricalIndex
    from cattree.index import verification_specs
    for seed in range(10):
        rng = np.random.default_rng(seed)
        corpus, tree = random_instance(rng, int(rng.integers(1, 30)), 60, 4, int(rng.integers(2, 12)), 0.3)
        idx = CategoricalIndex.build(corpus, tree, verification_specs(3))
        idx2 = container.loads(container.dumps(idx))
        assert list(idx2.engines) == list(idx.engines)
        for p, lev in trial_workload(corpus, tree.height, 30, seed):
            for tag in idx.engines:
                assert idx.engines[tag].query(p, lev).nodes == idx2.engines[tag].query(p, lev).nodes
