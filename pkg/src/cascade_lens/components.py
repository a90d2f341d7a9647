"""Connectivity: weak/strong components, bowtie decomposition, path metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import UndefinedMetricError
from .graph_core import FollowerGraph

BOWTIE_LABELS = ("LSCC", "IN", "OUT", "TENDRILS", "DISCONNECTED")
LSCC, IN, OUT, TENDRILS, DISCONNECTED = range(5)


@dataclass(frozen=True, eq=False)
class ComponentLabeling:
    """``labels[k]`` is the component of dense node ``k``.

    Component 0 is the largest; ties are ordered by smallest member id.
    """

    labels: np.ndarray
    sizes: list[int]
    kind: str

    @property
    def count(self) -> int:
        return len(self.sizes)

    def members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label)


def _canonical(raw: np.ndarray, kind: str) -> ComponentLabeling:
    n = len(raw)
    if n == 0:
        return ComponentLabeling(np.empty(0, np.int32), [], kind)
    k = int(raw.max()) + 1
    sizes = np.bincount(raw, minlength=k)
    first = np.full(k, n, dtype=np.int64)
    np.minimum.at(first, raw, np.arange(n))
    order = np.lexsort((first, -sizes))
    remap = np.empty(k, dtype=np.int32)
    remap[order] = np.arange(k, dtype=np.int32)
    labels = remap[raw]
    labels.setflags(write=False)
    return ComponentLabeling(labels, sizes[order].tolist(), kind)


def weak_components(g: FollowerGraph) -> ComponentLabeling:
    raw = _kernels.wcc_labels(g.out_indptr, g.out_indices, g.in_indptr, g.in_indices)
    return _canonical(raw, "weak")


def strong_components(g: FollowerGraph) -> ComponentLabeling:
    return _canonical(_kernels.scc_labels(g.out_indptr, g.out_indices), "strong")


@dataclass(frozen=True, eq=False)
class BowtieDecomposition:
    labels: np.ndarray  # uint8 codes indexing BOWTIE_LABELS
    counts: dict[str, int]
    percentages: dict[str, float]

    def label_names(self) -> list[str]:
        return [BOWTIE_LABELS[c] for c in self.labels.tolist()]


def bowtie(g: FollowerGraph, flow: str = "followee_to_follower") -> BowtieDecomposition:
    """Bowtie labels around the largest strongly connected component.

    With the default flow direction, content moves from a followee to its
    followers: IN nodes feed the core, OUT nodes only receive from it. Pass
    ``flow="follower_to_followee"`` for the stored edge direction instead.
    TENDRILS are the remaining nodes of the weak component holding the core.
    """
    n = g.node_count
    labels = np.full(n, DISCONNECTED, dtype=np.uint8)
    if n:
        scc = strong_components(g)
        wcc = weak_components(g)
        core = scc.members(0).astype(np.int32)
        if flow == "followee_to_follower":
            fwd = (g.in_indptr, g.in_indices)
            back = (g.out_indptr, g.out_indices)
        elif flow == "follower_to_followee":
            fwd = (g.out_indptr, g.out_indices)
            back = (g.in_indptr, g.in_indices)
        else:
            raise ValueError(f"unknown flow direction {flow!r}")
        downstream = _kernels.bfs_levels(*fwd, core) >= 0
        upstream = _kernels.bfs_levels(*back, core) >= 0
        giant = wcc.labels == wcc.labels[core[0]]
        labels[giant] = TENDRILS
        labels[upstream] = IN
        labels[downstream] = OUT
        labels[core] = LSCC
    labels.setflags(write=False)
    counts_arr = np.bincount(labels, minlength=len(BOWTIE_LABELS))
    counts = {name: int(c) for name, c in zip(BOWTIE_LABELS, counts_arr)}
    pct = {name: (100.0 * c / n if n else 0.0) for name, c in counts.items()}
    return BowtieDecomposition(labels, counts, pct)


def induced_subgraph(g: FollowerGraph, nodes) -> FollowerGraph:
    """Subgraph on ``nodes`` (external ids) with exactly the edges among them."""
    nodes = np.unique(np.asarray(list(nodes), dtype=np.uint64))
    if len(nodes) == 0:
        return FollowerGraph.from_dense(np.empty(0, np.uint64), [], [])
    idx = g.index_of(nodes)
    local = np.full(g.node_count, -1, dtype=np.int64)
    local[idx] = np.arange(len(idx))
    starts = g.out_indptr[idx]
    lens = g.out_indptr[idx + 1] - starts
    src = np.repeat(np.arange(len(idx)), lens)
    offsets = np.arange(lens.sum()) - np.repeat(np.cumsum(lens) - lens, lens)
    dst = local[g.out_indices[np.repeat(starts, lens) + offsets]]
    keep = dst >= 0
    return FollowerGraph.from_dense(nodes, src[keep], dst[keep])


@dataclass(frozen=True)
class PathMetrics:
    average_shortest_path: float
    diameter: int
    pair_coverage: float
    connected_pairs: int


def path_metrics(g: FollowerGraph) -> PathMetrics:
    """Shortest-path statistics on the undirected projection.

    The average runs over connected unordered pairs only; the diameter is taken
    over the largest weak component.
    """
    n = g.node_count
    if n < 2:
        raise UndefinedMetricError("path metrics need at least 2 nodes")
    indptr, indices = g.undirected()
    reached, dsum, ecc = _kernels.bfs_pair_stats(indptr, indices)
    pairs = int(reached.sum()) // 2
    total = int(dsum.sum()) // 2
    wcc = weak_components(g)
    giant = wcc.labels == 0
    diameter = int(ecc[giant].max())
    avg = total / pairs if pairs else float("nan")
    return PathMetrics(avg, diameter, pairs / (n * (n - 1) / 2), pairs)
