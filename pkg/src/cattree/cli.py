"""``ct``: build, query, verify, bench and gen subcommands.

Exit codes: 0 ok, 1 verification mismatch or unexpected failure, 2 bad
arguments or invalid input, 3 malformed or unreadable index file.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time

import numpy as np

from . import container
from .corpus import CorpusError, TreeError, load_corpus, load_tree
from .engine_colored import InvalidAlpha
from .generate import random_instance, write_instance
from .index import CategoricalIndex, EngineSpec, verification_specs
from .oracle import OracleIndex
from .query import LevelError, QueryStats
from .text_index import PatternError

BENCH_COLUMNS = [
    "engine", "alpha", "doc_array", "query", "pattern_len", "level", "t",
    "rmq_calls", "a_accesses", "node_visits", "lf_steps", "seconds",
    "text_index_bits", "doc_array_bits", "engine_bits", "total_bits",
]


class UsageError(Exception):
    pass


def _err(msg: str):
    print(f"ct: {msg}", file=sys.stderr)


def _alpha_list(text: str | None) -> list[int | None]:
    if text is None:
        return [None]
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"--alpha expects integers, got {text!r}") from None


def engine_specs(engines: str, alphas: list, doc_array: str) -> list[EngineSpec]:
    kinds = [k.strip() for k in engines.split(",") if k.strip()]
    if kinds == ["all"]:
        kinds = ["colored", "wavelet", "heavy"]
    specs = []
    for kind in kinds:
        if kind == "colored":
            specs.extend(EngineSpec("colored", a, doc_array) for a in alphas)
        else:
            specs.append(EngineSpec(kind))
    return specs


def _load_inputs(args):
    corpus = load_corpus(args.manifest)
    tree = load_tree(args.tree, corpus)
    return corpus, tree


# build ----------------------------------------------------------------------

def cmd_build(args) -> int:
    specs = engine_specs(args.engine, _alpha_list(args.alpha), args.doc_array)
    corpus, tree = _load_inputs(args)
    t0 = time.perf_counter()
    idx = CategoricalIndex.build(corpus, tree, specs, args.sample_rate)
    size = container.save(idx, args.output)
    _err(f"built {', '.join(idx.engines)} in {time.perf_counter() - t0:.2f}s; wrote {size} bytes to {args.output}")
    m = idx.meta
    print(f"n={m['n']} n'={m['n_prime']} D={m['D']} sigma={m['sigma']} h={m['height']} "
          f"nodes={m['nodes']} H0={m['entropy0']:.4f} bits/symbol")
    print(f"{'structure':48s} {'bits':>14s}  target")
    for name, bits, label, ref in idx.space_report():
        print(f"{name:48s} {bits:14d}  {label} = {ref}")
    print(f"{'total':48s} {idx.total_bits():14d}")
    return 0


# query ----------------------------------------------------------------------

def _pattern(args) -> bytes:
    if args.hex:
        try:
            return bytes.fromhex(args.pattern)
        except ValueError:
            raise UsageError(f"--hex pattern is not valid hex: {args.pattern!r}") from None
    return args.pattern.encode("utf-8", "surrogateescape")


def cmd_query(args) -> int:
    idx = container.load(args.index)
    try:
        engine = idx.engine(args.engine)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    stats = QueryStats() if args.stats else None
    res = engine.query(_pattern(args), args.level, stats=stats)
    if args.format == "json":
        print(json.dumps(res.to_json()))
    elif res.nodes:
        print("\n".join(str(v) for v in res.nodes))
    if stats is not None:
        _err(json.dumps(stats.__dict__))
    return 0


# verify ---------------------------------------------------------------------

def trial_workload(corpus, height: int, trials: int, seed: int, max_len: int = 8):
    """Deterministic (pattern, level) pairs: document substrings and random strings."""
    rng = np.random.default_rng(seed)
    docs = corpus.documents
    out = []
    for _ in range(trials):
        if rng.random() < 0.7:
            d = docs[int(rng.integers(len(docs)))]
            m = int(rng.integers(1, min(max_len, len(d)) + 1))
            s = int(rng.integers(0, len(d) - m + 1))
            p = d[s : s + m]
        else:
            m = int(rng.integers(1, max_len + 1))
            p = rng.integers(1, corpus.sigma + 1, size=m, dtype=np.uint8).tobytes()
        out.append((p, int(rng.integers(1, height + 1))))
    return out


def cmd_verify(args) -> int:
    corpus, tree = _load_inputs(args)
    idx = CategoricalIndex.build(corpus, tree, verification_specs(args.alpha), args.sample_rate)
    oracle = OracleIndex(corpus, tree)
    work = trial_workload(corpus, tree.height, args.trials, args.seed)
    for k, (p, lev) in enumerate(work):
        want = oracle.query(p, lev).nodes
        for tag, eng in idx.engines.items():
            got = eng.query(p, lev).nodes
            if args.inject_fault and k == len(work) - 1 and tag == next(iter(idx.engines)):
                got = got[:-1] if got else [0]
            if got != want:
                _err(f"mismatch at trial {k}: engine={tag} pattern={p.hex()} level={lev} "
                     f"got={got} expected={want}")
                return 1
    _err(f"ok: {len(work)} trials x {len(idx.engines)} engines agree with the oracle (seed {args.seed})")
    return 0


# bench ----------------------------------------------------------------------

def bench_rows(idx: CategoricalIndex, work, repeat: int = 1):
    text_bits = sum(idx.text.space_bits().values())
    da_bits = idx.da.space_bits()
    for tag, eng in idx.engines.items():
        eng_bits = sum(v for k, v in eng.space_bits().items() if k != "reporter_cells")
        # stored mode reads the packed array, compact mode only the separator bitmap
        if eng.kind != "colored":
            da_used = 0
        elif eng.da.mode == "compact":
            da_used = da_bits["sep_bitmap"]
        else:
            da_used = da_bits["document_array"]
        scratch = eng.new_scratch() if eng.kind == "colored" else None
        alpha = getattr(eng, "alpha", "")
        mode = eng.da.mode if eng.kind == "colored" else ""
        for q, (p, lev) in enumerate(work):
            st = QueryStats()
            t0 = time.perf_counter()
            for _ in range(repeat):
                st = QueryStats()
                eng.query(p, lev, scratch=scratch, stats=st)
            secs = (time.perf_counter() - t0) / repeat
            yield {
                "engine": tag, "alpha": alpha, "doc_array": mode, "query": q,
                "pattern_len": len(p), "level": lev, "t": st.t,
                "rmq_calls": st.rmq_calls, "a_accesses": st.a_accesses,
                "node_visits": st.node_visits, "lf_steps": st.lf_steps,
                "seconds": f"{secs:.6g}", "text_index_bits": text_bits,
                "doc_array_bits": da_used, "engine_bits": eng_bits,
                "total_bits": text_bits + da_used + eng_bits + idx.laq.space_bits(),
            }


def cmd_bench(args) -> int:
    if args.index:
        idx = container.load(args.index)
        corpus = None
    else:
        if not (args.manifest and args.tree):
            raise UsageError("bench needs --index or both --manifest and --tree")
        corpus, tree = _load_inputs(args)
        specs = engine_specs(args.engine, _alpha_list(args.alpha), args.doc_array)
        idx = CategoricalIndex.build(corpus, tree, specs, args.sample_rate)
    if corpus is None:
        # workload patterns come from random strings only when documents are unavailable
        rng = np.random.default_rng(args.seed)
        work = [(rng.integers(1, idx.meta["sigma"] + 1, size=int(rng.integers(1, args.max_len + 1)),
                              dtype=np.uint8).tobytes(), int(rng.integers(1, idx.height + 1)))
                for _ in range(args.queries)]
    else:
        work = trial_workload(corpus, idx.height, args.queries, args.seed, args.max_len)
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=BENCH_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in bench_rows(idx, work, args.repeat):
            w.writerow(row)
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# gen ------------------------------------------------------------------------

def cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    corpus, tree = random_instance(rng, args.docs, args.doc_len, args.sigma, args.height,
                                   args.unary_density, args.shape)
    manifest, tree_file = write_instance(args.out, corpus, tree)
    _err(f"wrote {manifest} and {tree_file}: D={corpus.D} n={corpus.n} h={tree.height} "
         f"nodes={tree.node_count}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ct", description="Categorical document retrieval index.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def inputs(p, required=True):
        p.add_argument("--manifest", required=required, help="corpus manifest JSON")
        p.add_argument("--tree", required=required, help="category tree JSON")

    def engines(p, default):
        p.add_argument("--engine", default=default,
                       help="comma list of colored,wavelet,heavy or 'all' (default %(default)s)")
        p.add_argument("--alpha", default=None,
                       help="sparsification factor(s) for colored, comma separated")
        p.add_argument("--doc-array", choices=("stored", "compact"), default="stored")
        p.add_argument("--sample-rate", type=int, default=None, help="SA sampling rate s")

    b = sub.add_parser("build", help="build an index file")
    inputs(b)
    engines(b, "colored")
    b.add_argument("-o", "--output", required=True)
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="query an index file")
    q.add_argument("index")
    q.add_argument("-p", "--pattern", required=True)
    q.add_argument("-i", "--level", type=int, required=True)
    q.add_argument("--engine", default=None, help="engine tag or kind (default: first in file)")
    q.add_argument("--format", choices=("text", "json"), default="text")
    q.add_argument("--hex", action="store_true", help="pattern is hex-encoded bytes")
    q.add_argument("--stats", action="store_true", help="print work counters to stderr")
    q.set_defaults(func=cmd_query)

    v = sub.add_parser("verify", help="fuzz every engine against the brute-force oracle")
    inputs(v)
    v.add_argument("--trials", type=int, default=1000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--alpha", type=int, default=4, help="alpha of the sparsified stored engine")
    v.add_argument("--sample-rate", type=int, default=None)
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    be = sub.add_parser("bench", help="per-query counters and space as CSV")
    inputs(be, required=False)
    be.add_argument("--index", default=None, help="bench a saved index instead of building")
    engines(be, "all")
    be.add_argument("--queries", type=int, default=200)
    be.add_argument("--max-len", type=int, default=8)
    be.add_argument("--repeat", type=int, default=1)
    be.add_argument("--seed", type=int, default=0)
    be.add_argument("-o", "--output", default=None, help="CSV path (default stdout)")
    be.set_defaults(func=cmd_bench)

    g = sub.add_parser("gen", help="generate a synthetic corpus and tree")
    g.add_argument("--docs", type=int, default=32)
    g.add_argument("--doc-len", type=int, default=256)
    g.add_argument("--sigma", type=int, default=4)
    g.add_argument("--height", type=int, default=6)
    g.add_argument("--unary-density", type=float, default=0.2)
    g.add_argument("--shape", choices=("random", "caterpillar", "chain"), default="random")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except container.ContainerError as exc:
        _err(str(exc))
        return 3
    except LevelError as exc:
        _err(str(exc))
        return 2
    except (UsageError, InvalidAlpha, PatternError, CorpusError, TreeError, OSError, ValueError) as exc:
        _err(str(exc))
        return 2


if __name__ == "__main__":
    sys.exit(main())
