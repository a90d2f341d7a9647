import random

import numpy as np
import pytest

from cascade_lens import components as cp
from cascade_lens.cascade import wiener_index
from cascade_lens.errors import UndefinedMetricError, UnknownNodeError
from cascade_lens.graph_core import load_edges

from conftest import build, random_digraph, random_tree, tree_cascade
import oracles


def _sizes(g, fn):
    return fn(g).sizes


def test_two_disjoint_edges_weak():
    g, _ = load_edges([(1, 2), (3, 4)])
    assert _sizes(g, cp.weak_components) == [2, 2]


def test_cycle_plus_pendant_strong():
    g, _ = load_edges([(1, 2), (2, 3), (3, 1), (3, 4)])
    lab = cp.strong_components(g)
    assert lab.sizes == [3, 1]
    assert lab.kind == "strong"
    assert lab.labels[g.index_of(4)] == 1


def test_dag_singletons():
    g, _ = load_edges([(1, 2), (2, 3), (1, 3), (3, 4), (4, 5)])
    assert _sizes(g, cp.strong_components) == [1] * 5


def test_component_order_is_deterministic():
    g, _ = load_edges([(9, 8), (8, 9), (1, 2), (2, 1), (5, 5)])
    lab = cp.strong_components(g)
    assert lab.sizes == [2, 2, 1]
    assert lab.labels[g.index_of(1)] == 0 and lab.labels[g.index_of(9)] == 1


def test_components_match_oracle():
    rng = random.Random(21)
    for _ in range(300):
        nodes, edges = random_digraph(rng)
        g = build(nodes, edges)
        for fn, oracle in ((cp.strong_components, oracles.scc_partition),
                           (cp.weak_components, oracles.wcc_partition)):
            lab = fn(g)
            got = {frozenset(g.ids[lab.members(k)].tolist()) for k in range(lab.count)}
            assert got == oracle(nodes, edges)
            assert sum(lab.sizes) == g.node_count
            assert lab.sizes == sorted(lab.sizes, reverse=True)


def test_bowtie_hand_example():
    # 1 and 2 follow each other, 3 follows 1, 2 follows 4
    g, _ = load_edges([(1, 2), (2, 1), (3, 1), (2, 4)])
    names = dict(zip(g.ids.tolist(), cp.bowtie(g).label_names()))
    assert names == {1: "LSCC", 2: "LSCC", 3: "OUT", 4: "IN"}
    flipped = dict(zip(g.ids.tolist(), cp.bowtie(g, flow="follower_to_followee").label_names()))
    assert flipped == {1: "LSCC", 2: "LSCC", 3: "IN", 4: "OUT"}


def test_bowtie_strongly_connected():
    g, _ = load_edges([(1, 2), (2, 3), (3, 1)])
    bt = cp.bowtie(g)
    assert bt.counts["LSCC"] == 3 and bt.percentages["LSCC"] == 100.0


def test_bowtie_matches_oracle():
    rng = random.Random(22)
    for _ in range(300):
        nodes, edges = random_digraph(rng)
        g = build(nodes, edges)
        bt = cp.bowtie(g)
        got = dict(zip(g.ids.tolist(), bt.label_names()))
        assert got == oracles.bowtie_labels(nodes, edges)
        assert sum(bt.counts.values()) == g.node_count
        assert sum(bt.percentages.values()) == pytest.approx(100.0)


def test_lscc_inside_giant_weak():
    rng = random.Random(23)
    for _ in range(100):
        g = build(*random_digraph(rng))
        scc, wcc = cp.strong_components(g), cp.weak_components(g)
        core = scc.members(0)
        assert len(set(wcc.labels[core].tolist())) == 1


def test_induced_subgraph_examples():
    g, _ = load_edges([(1, 2), (2, 3), (3, 1)])
    sub = cp.induced_subgraph(g, {1, 2})
    assert sub.edges() == [(1, 2)]
    assert cp.induced_subgraph(g, set()).node_count == 0
    with pytest.raises(UnknownNodeError):
        cp.induced_subgraph(g, {1, 99})


def test_induced_subgraph_matches_filter():
    rng = random.Random(24)
    for _ in range(200):
        nodes, edges = random_digraph(rng, 15)
        g = build(nodes, edges)
        keep = set(rng.sample(nodes, rng.randint(0, len(nodes))))
        sub = cp.induced_subgraph(g, keep)
        assert set(sub.edges()) == {(a, b) for a, b in edges if a in keep and b in keep}
        assert set(sub.ids.tolist()) == keep


def test_path_metrics_examples():
    g, _ = load_edges([(1, 2), (2, 3), (3, 4)])
    pm = cp.path_metrics(g)
    assert pm.average_shortest_path == pytest.approx(5 / 3) and pm.diameter == 3
    g, _ = load_edges([(a, b) for a in range(5) for b in range(5) if a < b])
    pm = cp.path_metrics(g)
    assert (pm.average_shortest_path, pm.diameter, pm.pair_coverage) == (1.0, 1, 1.0)
    g, _ = load_edges([(1, 2), (3, 4)])
    pm = cp.path_metrics(g)
    assert (pm.average_shortest_path, pm.diameter) == (1.0, 1)
    assert pm.pair_coverage == pytest.approx(2 / 6)


def test_path_metrics_undefined():
    g, _ = load_edges([(1, 1)])
    with pytest.raises(UndefinedMetricError):
        cp.path_metrics(g)


def test_path_metrics_no_connected_pairs():
    g, _ = load_edges([(1, 1), (2, 2)])
    pm = cp.path_metrics(g)
    assert np.isnan(pm.average_shortest_path) and pm.pair_coverage == 0.0 and pm.diameter == 0


def test_path_metrics_match_oracle():
    rng = random.Random(25)
    for _ in range(200):
        nodes, edges = random_digraph(rng, 20, p=rng.uniform(0.03, 0.3))
        if len(nodes) < 2:
            continue
        g = build(nodes, edges)
        pm = cp.path_metrics(g)
        avg, diam, cov = oracles.path_metrics(nodes, edges)
        if np.isnan(avg):
            assert np.isnan(pm.average_shortest_path)
        else:
            assert pm.average_shortest_path == pytest.approx(avg, abs=1e-9)
            assert pm.diameter >= pm.average_shortest_path >= 1
        assert pm.diameter == diam
        assert pm.pair_coverage == pytest.approx(cov, abs=1e-12)


def test_isomorphism_invariance():
    rng = random.Random(26)
    for _ in range(50):
        nodes, edges = random_digraph(rng, 15)
        g = build(nodes, edges)
        perm = rng.sample(range(1000, 1000 + len(nodes)), len(nodes))
        h = g.relabel(dict(zip(nodes, perm)))
        assert cp.strong_components(g).sizes == cp.strong_components(h).sizes
        assert cp.weak_components(g).sizes == cp.weak_components(h).sizes
        sizes = cp.strong_components(g).sizes
        if len(sizes) == 1 or sizes[0] > sizes[1]:
            # the core is only label-free when the largest SCC is unique
            assert cp.bowtie(g).counts == cp.bowtie(h).counts
        if len(nodes) >= 2:
            a, b = cp.path_metrics(g), cp.path_metrics(h)
            assert a.diameter == b.diameter and a.pair_coverage == b.pair_coverage


def test_tree_path_average_equals_wiener():
    rng = random.Random(27)
    for _ in range(50):
        parent = random_tree(rng, rng.randint(2, 60))
        g, _ = load_edges([(c, p) for c, p in parent.items() if p is not None])
        assert cp.path_metrics(g).average_shortest_path == pytest.approx(
            wiener_index(tree_cascade(parent)), abs=1e-12)
