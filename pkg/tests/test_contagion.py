import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cascade_lens import contagion as ct
from cascade_lens.errors import NoDataError, UndefinedMetricError
from cascade_lens.events import Event, EventLog

from conftest import build, make_log, random_digraph
import oracles


def test_hand_trace():
    # b and c follow a; a posts, then b and c
    g = build([1, 2, 3], [(2, 1), (3, 1)])
    log = make_log([(1, 1, 0), (2, 2, 5), (3, 3, 9)])
    cur = ct.exposure_curve(g, log, "vicodin", support_threshold=1)
    assert cur.E.tolist() == [3, 2] and cur.I.tolist() == [1, 2]
    assert cur.p.tolist() == pytest.approx([1 / 3, 1.0])
    assert (cur.stickiness, cur.argmax_k, cur.adopters) == (1.0, 1, 3)


def test_no_adoption_after_exposure():
    g = build([1, 2, 3], [(2, 1), (3, 1)])
    log = make_log([(1, 1, 0)])
    cur = ct.exposure_curve(g, log, "vicodin", support_threshold=1)
    assert cur.p[1:].tolist() == [0.0]
    assert cur.I.tolist() == [1, 0]


def test_absent_token():
    g = build([1, 2], [(2, 1)])
    with pytest.raises(NoDataError):
        ct.exposure_curve(g, make_log([(1, 1, 0)]), "lortab")


def test_support_truncation():
    # 12 followers of a hub; only 3 of them post after seeing it
    nodes = list(range(13))
    g = build(nodes, [(f, 0) for f in range(1, 13)])
    log = make_log([(0, 0, 0)] + [(f, f, 10 + f) for f in (1, 2, 3)])
    cur = ct.exposure_curve(g, log, "vicodin", support_threshold=10)
    assert cur.K == 1 and cur.E.tolist() == [13, 12] and cur.I.tolist() == [1, 3]
    cur = ct.exposure_curve(g, log, "vicodin", support_threshold=13)
    assert cur.K == 0 and cur.persistence is None


def test_stickiness_examples():
    assert ct.stickiness([0.1, 0.5, 0.2]) == (0.5, 1)
    assert ct.stickiness([0.3, 0.3, 0.3]) == (0.3, 0)
    with pytest.raises(UndefinedMetricError):
        ct.stickiness([])


@given(st.lists(st.floats(0, 1), min_size=1, max_size=30))
def test_stickiness_linear_scan(p):
    best, arg = p[0], 0
    for k, v in enumerate(p):
        if v > best:
            best, arg = v, k
    assert ct.stickiness(p) == (best, arg)


def test_persistence_examples():
    assert ct.persistence([0.4, 0.4, 0.4, 0.4]) == 1.0
    assert ct.persistence([1, 0, 0]) == 0.25
    for bad in ([0.5], [0, 0, 0]):
        with pytest.raises(UndefinedMetricError):
            ct.persistence(bad)


@given(st.lists(st.floats(0, 1), min_size=2, max_size=30))
def test_persistence_bounds(p):
    if max(p) <= 0:
        return
    v = ct.persistence(p)
    assert 0 <= v <= 1 + 1e-12
    if v == pytest.approx(1.0, abs=1e-15):
        assert min(p) == pytest.approx(max(p), rel=1e-9)


def _random_token_log(rng, nodes, n_events):
    evs = []
    for eid in range(n_events):
        toks = frozenset(rng.sample(["a", "b", "c"], rng.randint(1, 2)))
        evs.append(Event(eid, rng.choice(nodes + [9999]), rng.randrange(50), tokens=toks))
    return EventLog.from_events(evs)


def test_matches_replay_oracle():
    rng = random.Random(51)
    for _ in range(150):
        nodes, edges = random_digraph(rng, 40, p=rng.uniform(0.02, 0.3))
        g = build(nodes, edges)
        log = _random_token_log(rng, nodes, rng.randint(1, 80))
        rows = [(e.timestamp, e.event_id, e.user, e.tokens) for e in log.events]
        for token in [None, "a", "b"]:
            E, I = ct.exposure_counts(g, log, token)
            wE, wI = oracles.exposure_replay(nodes, edges, rows, token)
            assert E.tolist() == wE and I.tolist() == wI
            assert (I <= E).all() and (np.diff(E[1:]) <= 0).all()
            adopters = {r[2] for r in rows if r[2] in nodes and (token is None or token in r[3])}
            assert I.sum() == len(adopters)


def test_relabel_and_time_shift_invariance():
    rng = random.Random(52)
    nodes, edges = random_digraph(rng, 30, p=0.2)
    g = build(nodes, edges)
    log = _random_token_log(rng, nodes, 60)
    mapping = dict(zip(nodes + [9999], rng.sample(range(10**6, 10**6 + 200), len(nodes) + 1)))
    h = g.relabel({v: mapping[v] for v in nodes})
    moved = EventLog.from_events(
        Event(e.event_id, mapping[e.user], e.timestamp + 12345, tokens=e.tokens) for e in log.events)
    for token in ("a", "c"):
        a = ct.exposure_curve(g, log, token, 1)
        b = ct.exposure_curve(h, moved, token, 1)
        assert a.E.tolist() == b.E.tolist() and a.I.tolist() == b.I.tolist()


def test_write_curve_csv(tmp_path):
    g = build([1, 2, 3], [(2, 1), (3, 1)])
    cur = ct.exposure_curve(g, make_log([(1, 1, 0), (2, 2, 5)]), "vicodin", 1)
    p = tmp_path / "c.csv"
    ct.write_curve_csv(cur, p, "# hdr")
    lines = p.read_text().splitlines()
    assert lines[:2] == ["# hdr", "k,E,I,p"] and lines[3].startswith("1,2,1,0.5")
