"""Windowed cascade extraction over a follower graph and per-cascade metrics."""
from __future__ import annotations

import json
import logging
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import components, graph_core
from .errors import MissingRoleError, UndefinedMetricError, UnsortedLogError
from .events import EventLog
from .graph_core import FollowerGraph
from .user_metrics import FRINGE, RoleAssignment

log = logging.getLogger(__name__)

NINE_DAYS = 9 * 24 * 3600


@dataclass(frozen=True, slots=True)
class Member:
    parent: int | None
    join_event: int
    join_time: int
    depth: int


@dataclass(eq=False)
class Cascade:
    cascade_id: int
    root: int
    members: dict[int, Member] = field(default_factory=dict)
    member_events: list[int] = field(default_factory=list)
    event_users: list[int] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.members)

    def edges(self) -> list[tuple[int, int]]:
        return [(m.parent, u) for u, m in self.members.items() if m.parent is not None]

    def children(self) -> dict[int, list[int]]:
        out = defaultdict(list)
        for u, m in self.members.items():
            if m.parent is not None:
                out[m.parent].append(u)
        return out


@dataclass
class ExtractionReport:
    cascades: int = 0
    events: int = 0
    retweets_linked: int = 0
    unresolved_retweets: int = 0
    window_joins: int = 0


def extract_cascades(g: FollowerGraph, log_: EventLog, delta: int = NINE_DAYS,
                     report: ExtractionReport | None = None) -> list[Cascade]:
    """Attribute every event to exactly one cascade in a single time-ordered pass.

    A resolved retweet joins the cascade of the retweeted event, with the
    retweeted author as parent. Any other event by ``v`` joins the cascade of
    the most recent event authored by a followee of ``v`` in ``[t - delta, t)``
    (ties go to the smaller event id), with that author as parent; failing
    that it roots a new cascade. Users already in the chosen cascade only
    contribute the event.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    report = report if report is not None else ExtractionReport()
    cascades: list[Cascade] = []
    event_cascade: dict[int, int] = {}
    # per user: parallel lists of (timestamp, event_id, cascade index), in log order
    hist_t: dict[int, list[int]] = defaultdict(list)
    hist_e: dict[int, list[tuple[int, int]]] = defaultdict(list)
    prev = None
    for ev in log_.events:
        key = ev.sort_key()
        if prev is not None and key <= prev:
            raise UnsortedLogError(f"event {ev.event_id} out of order")
        prev = key
        v, t = ev.user, ev.timestamp
        target = parent = None
        parent_ev = log_.resolved_parent(ev)
        if parent_ev is not None:
            target = event_cascade[parent_ev.event_id]
            parent = parent_ev.user
            report.retweets_linked += 1
        else:
            if ev.is_retweet:
                report.unresolved_retweets += 1
            best = None  # (timestamp, -event_id, cascade, author)
            if g.has_node(v):
                for u in g.followees(v).tolist():
                    ts = hist_t.get(u)
                    if not ts:
                        continue
                    i = bisect_left(ts, t)
                    if i == 0 or ts[i - 1] < t - delta:
                        continue
                    j = bisect_left(ts, ts[i - 1])
                    eid, cid = hist_e[u][j]
                    cand = (ts[j], -eid, cid, u)
                    if best is None or cand[:2] > best[:2]:
                        best = cand
            if best is not None:
                target, parent = best[2], best[3]
                report.window_joins += 1
        if target is None:
            c = Cascade(len(cascades), v)
            c.members[v] = Member(None, ev.event_id, t, 0)
            cascades.append(c)
            target = c.cascade_id
        else:
            c = cascades[target]
            if v not in c.members:
                c.members[v] = Member(parent, ev.event_id, t, c.members[parent].depth + 1)
        c.member_events.append(ev.event_id)
        c.event_users.append(v)
        event_cascade[ev.event_id] = target
        hist_t[v].append(t)
        hist_e[v].append((ev.event_id, target))
    report.cascades = len(cascades)
    report.events = len(log_.events)
    return cascades


def filter_large(cascades, min_size: int = 20) -> list[Cascade]:
    if min_size < 1:
        raise ValueError("min_size must be >= 1")
    return [c for c in cascades if c.size >= min_size]


def wiener_index(c: Cascade) -> float:
    """Mean distance over unordered member pairs of the cascade tree.

    Each tree edge separating ``s`` nodes from the other ``n - s`` lies on
    ``s * (n - s)`` shortest paths.
    """
    n = c.size
    if n < 2:
        raise UndefinedMetricError("structural virality needs at least 2 members")
    kids = c.children()
    order = [c.root]
    for u in order:
        order.extend(kids.get(u, ()))
    sub = dict.fromkeys(order, 1)
    total = 0
    for u in reversed(order):
        p = c.members[u].parent
        if p is not None:
            sub[p] += sub[u]
            total += sub[u] * (n - sub[u])
    return total / (n * (n - 1) / 2)


@dataclass(frozen=True)
class CascadeMetrics:
    size: int
    depth: int
    width_profile: list[int]
    max_width_depth: int | None
    structural_virality: float | None
    initiator_role: str
    first_hop_fringe: int
    first_hop_non_fringe: int
    second_hop_fringe: int
    second_hop_non_fringe: int
    second_hop_fringe_parent: int
    second_hop_non_fringe_parent: int

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _safe_role(roles: RoleAssignment):
    def lookup(u):
        try:
            return roles.role_of(u)
        except KeyError:
            return None
    return lookup


def cascade_metrics(c: Cascade, roles: RoleAssignment | dict) -> CascadeMetrics:
    lookup = roles.get if isinstance(roles, dict) else _safe_role(roles)
    role = {u: lookup(u) for u in c.members}
    missing = [u for u, r in role.items() if r is None]
    if missing:
        raise MissingRoleError(f"no role for cascade member {missing[0]}")
    depth = max(m.depth for m in c.members.values())
    width = [0] * (depth + 1)
    for m in c.members.values():
        width[m.depth] += 1
    max_width_depth = None
    if depth >= 1:
        max_width_depth = 1 + int(np.argmax(width[1:]))
    hop1 = [u for u, m in c.members.items() if m.depth == 1]
    hop2 = [(u, m.parent) for u, m in c.members.items() if m.depth == 2]

    def fringe(u):
        return role[u] == FRINGE

    return CascadeMetrics(
        size=c.size,
        depth=depth,
        width_profile=width,
        max_width_depth=max_width_depth,
        structural_virality=wiener_index(c) if c.size >= 2 else None,
        initiator_role=role[c.root],
        first_hop_fringe=sum(map(fringe, hop1)),
        first_hop_non_fringe=sum(not fringe(u) for u in hop1),
        second_hop_fringe=sum(fringe(u) for u, _ in hop2),
        second_hop_non_fringe=sum(not fringe(u) for u, _ in hop2),
        second_hop_fringe_parent=sum(fringe(p) for _, p in hop2),
        second_hop_non_fringe_parent=sum(not fringe(p) for _, p in hop2),
    )


@dataclass(frozen=True)
class SubgraphProperties:
    paths: components.PathMetrics
    reciprocity: float
    clustering: float


def cascade_subgraph_properties(c: Cascade, g: FollowerGraph) -> SubgraphProperties:
    """Path metrics, reciprocity and clustering of the graph induced by the members."""
    if c.size < 2:
        raise UndefinedMetricError("subgraph properties need at least 2 members")
    sub = components.induced_subgraph(g, c.members)
    return SubgraphProperties(
        components.path_metrics(sub),
        graph_core.reciprocity(sub),
        graph_core.clustering_coefficient(sub),
    )


def one_time_engager_fraction(c: Cascade) -> float:
    if c.size < 1:
        raise UndefinedMetricError("empty cascade")
    counts = defaultdict(int)
    for u in c.event_users:
        counts[u] += 1
    return sum(1 for u in c.members if counts[u] == 1) / c.size


def cascade_record(c: Cascade, metrics: CascadeMetrics | None = None) -> dict:
    """JSON-ready cascade dump row."""
    rec = {
        "cascade_id": c.cascade_id,
        "root": c.root,
        "edges": [[p, u] for p, u in c.edges()],
        "members": [[u, m.join_time, m.depth] for u, m in c.members.items()],
        "events": len(c.member_events),
    }
    if metrics is not None:
        rec["metrics"] = metrics.as_dict()
    return rec


def write_cascades(path, cascades, metrics=None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i, c in enumerate(cascades):
            rec = cascade_record(c, None if metrics is None else metrics[i])
            fh.write(json.dumps(rec, separators=(",", ":")) + "\n")
