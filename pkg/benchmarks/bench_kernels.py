"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py --nodes 20000 --repeat 3
"""
import argparse
import time

import numpy as np

from cascade_lens._kernels import _pykernels
from cascade_lens.synth import SynthGraphConfig, generate_graph

try:
    from cascade_lens._kernels import _ckernels
except ImportError:
    _ckernels = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def cases(g, pair_nodes):
    ui, ux = g.undirected()
    seeds = np.arange(0, g.node_count, max(1, g.node_count // 100), dtype=np.int32)
    sub = generate_graph(SynthGraphConfig(node_count=pair_nodes, seed=1))
    si, sx = sub.undirected()
    return {
        "scc_labels": lambda k: k.scc_labels(g.out_indptr, g.out_indices),
        "wcc_labels": lambda k: k.wcc_labels(g.out_indptr, g.out_indices, g.in_indptr, g.in_indices),
        "bfs_levels": lambda k: k.bfs_levels(g.in_indptr, g.in_indices, seeds),
        "triangle_counts": lambda k: k.triangle_counts(ui, ux),
        f"bfs_pair_stats (n={pair_nodes})": lambda k: k.bfs_pair_stats(si, sx),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=20000)
    ap.add_argument("--pair-nodes", type=int, default=1000, help="graph size for all-pairs BFS")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    g = generate_graph(SynthGraphConfig(node_count=args.nodes, seed=args.seed))
    print(f"graph: {g.node_count} nodes, {g.edge_count} edges")
    if _ckernels is None:
        print("compiled extension not built; timing the fallback only")
    print(f"{'kernel':32s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}")
    for name, fn in cases(g, args.pair_nodes).items():
        py = best_of(lambda: fn(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:32s} {py:10.4f} {'-':>10s} {'-':>8s}")
            continue
        cy = best_of(lambda: fn(_ckernels), args.repeat)
        print(f"{name:32s} {py:10.4f} {cy:10.4f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
