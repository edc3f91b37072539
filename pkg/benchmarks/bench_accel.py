"""Time the numba kernels against the pure-Python fallback on one workload.

Each path runs in its own interpreter because the switch is read at import:

    python3 benchmarks/bench_accel.py [--docs 48] [--doc-len 2000] [--queries 300]
"""
import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from cattree import CategoricalIndex, EngineSpec, JIT_ENABLED
from cattree.cli import trial_workload
from cattree.generate import random_instance

docs, doc_len, queries, height = map(int, sys.argv[1:5])
rng = np.random.default_rng(7)
corpus, tree = random_instance(rng, docs, doc_len, 4, height, 0.3)
specs = [EngineSpec("colored", 1), EngineSpec("colored", 8),
         EngineSpec("colored", None, "compact"), EngineSpec("wavelet"), EngineSpec("heavy")]
t0 = time.perf_counter()
idx = CategoricalIndex.build(corpus, tree, specs)
build = time.perf_counter() - t0
work = trial_workload(corpus, tree.height, queries, 1)
out = {"jit": JIT_ENABLED, "build": build, "engines": {}}
for tag, eng in idx.engines.items():
    eng.query(*work[0])  # compile / warm up
    t0 = time.perf_counter()
    total = 0
    for p, lev in work:
        total += eng.query(p, lev).t
    out["engines"][tag] = {"seconds": time.perf_counter() - t0, "reported": total}
print(json.dumps(out))
"""


def run(disable_jit: bool, args) -> dict:
    env = dict(os.environ, CATTREE_DISABLE_JIT="1" if disable_jit else "0")
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(args.docs), str(args.doc_len), str(args.queries),
         str(args.height)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(proc.stdout)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--docs", type=int, default=48)
    ap.add_argument("--doc-len", type=int, default=2000)
    ap.add_argument("--height", type=int, default=8)
    ap.add_argument("--queries", type=int, default=300)
    args = ap.parse_args()

    t0 = time.perf_counter()
    fast = run(False, args)
    slow = run(True, args)
    print(f"workload: {args.docs} docs x <= {args.doc_len} bytes, h={args.height}, "
          f"{args.queries} queries ({time.perf_counter() - t0:.1f}s wall)")
    print(f"{'engine':22s} {'numba s':>10s} {'python s':>10s} {'speedup':>8s}")
    for tag, f in fast["engines"].items():
        s = slow["engines"][tag]
        assert f["reported"] == s["reported"], f"{tag}: paths disagree"
        print(f"{tag:22s} {f['seconds']:10.4f} {s['seconds']:10.4f} {s['seconds'] / f['seconds']:8.1f}x")
    print(f"{'build (all engines)':22s} {fast['build']:10.4f} {slow['build']:10.4f}")


if __name__ == "__main__":
    main()
