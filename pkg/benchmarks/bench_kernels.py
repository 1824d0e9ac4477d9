"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both backends are run on identical inputs and their outputs compared, so a
speed-up is only reported for matching results.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from echochamber import kernels
from echochamber.bipartite import BipartiteGraph, WeightedGraph, _hub_csr
from echochamber.community import label_propagation, multilevel

NAMES = ("cooccurrence", "louvain_local_moves", "label_propagation_sweep", "label_propagation_stable")


def use(impl):
    for name in NAMES:
        setattr(kernels, name, getattr(impl, name))


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def planted_graph(rng, n, blocks, p_in, p_out):
    block = rng.integers(0, blocks, n)
    iu, ju = np.triu_indices(n, 1)
    prob = np.where(block[iu] == block[ju], p_in, p_out)
    keep = rng.random(iu.size) < prob
    w = rng.integers(1, 10, keep.sum()).astype(float)
    return WeightedGraph([f"n{i}" for i in range(n)], iu[keep], ju[keep], w)


def cases(rng):
    m = rng.random((200, 20000)) < 0.05
    b = BipartiteGraph.from_incidence(m)
    indptr, indices = _hub_csr(b.right_idx, b.left_idx, len(b.right_nodes))
    g = planted_graph(rng, 1500, 8, 0.05, 0.002)
    return {
        "cooccurrence 200 pages x 20000 users": lambda: kernels.cooccurrence(indptr, indices, 200),
        "multilevel 1500 nodes": lambda: multilevel(g, 42).labels,
        "label propagation 1500 nodes": lambda: label_propagation(g, 42).labels,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    impls = kernels.implementations()
    if "cython" not in impls:
        print("compiled extension not available; build it with `pip install -e . --no-build-isolation`")
        return
    rng = np.random.default_rng(0)
    work = cases(rng)
    print(f"{'case':42s} {'python':>10s} {'cython':>10s} {'speed-up':>9s}")
    for label, fn in work.items():
        use(impls["python"])
        t_py, out_py = best_of(fn, args.repeat)
        use(impls["cython"])
        t_cy, out_cy = best_of(fn, args.repeat)
        same = all(np.array_equal(a, b) for a, b in zip(out_py, out_cy)) if isinstance(out_py, tuple) \
            else np.array_equal(out_py, out_cy)
        flag = "" if same else "  OUTPUTS DIFFER"
        print(f"{label:42s} {t_py:9.3f}s {t_cy:9.3f}s {t_py / t_cy:8.1f}x{flag}")


if __name__ == "__main__":
    main()
