#!/usr/bin/env python3
"""Time the compiled reachability kernel against the pure-python fallback.

Two views per graph size: end-to-end d_connected calls (query parsing and
mask building included), and the bare kernels on precomputed bitmasks. The
fallback is selected per call through the CCDKIT_NO_NUMBA environment
variable, so a single process covers both. Kernel compilation happens in
warmup and is excluded from the timed windows.
"""
import argparse
import os
import random
import time

import numpy as np

from ccdkit import d_connected, random_graph
from ccdkit import _reach

ENV_DISABLE = "CCDKIT_NO_NUMBA"


def make_workload(n, n_queries, rng):
    labels = tuple(f"V{i:02d}" for i in range(n))
    g = random_graph(labels, 0.3, rng)
    queries = []
    for _ in range(n_queries):
        x, y = rng.sample(labels, 2)
        s = tuple(v for v in labels if v not in (x, y) and rng.random() < 0.3)
        queries.append((x, y, s))
    return g, queries


def mask_workload(g, queries):
    index = {v: i for i, v in enumerate(g.vertices)}
    parent = [sum(1 << index[p] for p in g.parents(v)) for v in g.vertices]
    child = [sum(1 << index[c] for c in g.children(v)) for v in g.vertices]
    desc = [sum(1 << index[d] for d in g.descendants(v)) for v in g.vertices]
    triples = [
        (
            1 << index[x],
            1 << index[y],
            sum(1 << index[v] for v in s),
        )
        for x, y, s in queries
    ]
    return parent, child, desc, triples


def timed(fn):
    t0 = time.perf_counter()
    hits = fn()
    return time.perf_counter() - t0, hits


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--queries", type=int, default=4000)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    saved = os.environ.get(ENV_DISABLE)
    os.environ.pop(ENV_DISABLE, None)
    header = (
        f"{'vertices':>8} {'queries':>8} "
        f"{'call jit':>9} {'call py':>9} {'x':>5} "
        f"{'kern jit':>9} {'kern py':>9} {'x':>5}   (ms)"
    )
    print(header)
    try:
        for n in (8, 16, 32, 60):
            rng = random.Random(args.seed + n)
            g, queries = make_workload(n, args.queries, rng)
            parent, child, desc, triples = mask_workload(g, queries)
            pm = np.array(parent, dtype=np.int64)
            cm = np.array(child, dtype=np.int64)
            dm = np.array(desc, dtype=np.int64)
            kern = _reach.numba_kernel()

            d_connected(g, *queries[0][:2], queries[0][2])  # compile before timing
            call_jit, hits = timed(
                lambda: sum(d_connected(g, x, y, s) for x, y, s in queries)
            )
            os.environ[ENV_DISABLE] = "1"
            try:
                call_py, hits_py = timed(
                    lambda: sum(d_connected(g, x, y, s) for x, y, s in queries)
                )
            finally:
                os.environ.pop(ENV_DISABLE, None)

            kern_jit, hits_kj = timed(
                lambda: sum(
                    bool(kern(pm, cm, dm, np.int64(x), np.int64(y), np.int64(z)))
                    for x, y, z in triples
                )
            )
            kern_py, hits_kp = timed(
                lambda: sum(
                    _reach.python_reach(n, parent, child, desc, x, y, z)
                    for x, y, z in triples
                )
            )
            if len({hits, hits_py, hits_kj, hits_kp}) != 1:
                raise SystemExit(f"backend disagreement on n={n}")
            print(
                f"{n:>8} {len(queries):>8} "
                f"{call_jit * 1e3:>9.1f} {call_py * 1e3:>9.1f} {call_py / call_jit:>4.1f}x "
                f"{kern_jit * 1e3:>9.1f} {kern_py * 1e3:>9.1f} {kern_py / kern_jit:>4.1f}x"
            )
    finally:
        if saved is not None:
            os.environ[ENV_DISABLE] = saved


if __name__ == "__main__":
    main()
