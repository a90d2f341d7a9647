import random

import pytest

from cascade_lens import graph_core
from cascade_lens.events import Event, EventLog

DAY = 24 * 3600


def random_digraph(rng: random.Random, n_max: int = 12, p=None):
    """Random simple digraph on ids ``10..10+n-1`` (non-contiguous ids catch dense-index leaks)."""
    n = rng.randint(1, n_max)
    p = rng.uniform(0.05, 0.5) if p is None else p
    nodes = [10 + 3 * i for i in range(n)]
    edges = [(a, b) for a in nodes for b in nodes if a != b and rng.random() < p]
    return nodes, edges


def build(nodes, edges):
    g, _ = graph_core.from_pairs([a for a, _ in edges], [b for _, b in edges], nodes=nodes)
    return g


def make_log(rows):
    """``rows``: ``(event_id, user, ts[, kind, parent, tokens])``."""
    events = []
    for r in rows:
        eid, user, ts, *rest = r
        kind = rest[0] if len(rest) > 0 else "original"
        parent = rest[1] if len(rest) > 1 else None
        tokens = frozenset(rest[2]) if len(rest) > 2 else frozenset({"vicodin"})
        events.append(Event(eid, user, ts, kind, parent, tokens))
    return EventLog.from_events(events)


@pytest.fixture
def chain_fixture():
    """b follows a, c follows b; a tweets at 0, b at 1 day, c retweets b at 2 days."""
    a, b, c = 1, 2, 3
    g = build([a, b, c], [(b, a), (c, b)])
    log = make_log([(100, a, 0), (101, b, DAY), (102, c, 2 * DAY, "retweet", 101)])
    return g, log


def tree_cascade(parent: dict):
    """Cascade object from a ``child -> parent`` map (root maps to None)."""
    from cascade_lens.cascade import Cascade, Member

    root = next(u for u, p in parent.items() if p is None)
    c = Cascade(0, root)
    order, depth = [root], {root: 0}
    kids = {}
    for u, p in parent.items():
        if p is not None:
            kids.setdefault(p, []).append(u)
    for u in order:
        for k in kids.get(u, []):
            depth[k] = depth[u] + 1
            order.append(k)
    for i, u in enumerate(order):
        c.members[u] = Member(parent[u], i, i, depth[u])
        c.member_events.append(i)
        c.event_users.append(u)
    return c


def random_tree(rng: random.Random, n: int):
    return {i: (None if i == 0 else rng.randrange(i)) for i in range(n)}


_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and item.name.startswith("test_criterion_"):
        doc = (item.function.__doc__ or item.name).strip().splitlines()[0]
        if rep.when == "call" or (rep.when == "setup" and not rep.passed):
            _ACCEPTANCE[item.name] = ("PASS" if rep.passed else "SKIP" if rep.skipped else "FAIL", doc)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        status, doc = _ACCEPTANCE[name]
        num = int(name.split("_")[2])
        terminalreporter.write_line(f"[{status}] criterion {num:2d}: {doc}")
