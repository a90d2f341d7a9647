"""Seeded synthetic follower graphs and planted cascades with ground truth."""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .cascade import NINE_DAYS
from .errors import ConfigError
from .events import ORIGINAL, RETWEET, Event, EventLog
from .graph_core import FollowerGraph

DEFAULT_TOKENS = ("vicodin", "percocet", "oxycontin", "lortab")


def sample_discrete_power_law(size: int, alpha: float, xmin: int = 1, kmax: int = 10**6,
                              rng: np.random.Generator | None = None) -> np.ndarray:
    """Inverse-CDF draws from ``P(k) ~ k**-alpha`` on ``xmin..kmax``."""
    if alpha <= 1:
        raise ConfigError("power-law exponent must exceed 1")
    if not 1 <= xmin <= kmax:
        raise ConfigError("need 1 <= xmin <= kmax")
    rng = rng if rng is not None else np.random.default_rng()
    k = np.arange(xmin, kmax + 1, dtype=np.float64)
    cdf = np.cumsum(k ** -alpha)
    cdf /= cdf[-1]
    idx = np.searchsorted(cdf, rng.random(size), side="right")
    return (np.minimum(idx, len(k) - 1) + xmin).astype(np.int64)


@dataclass(frozen=True)
class SynthGraphConfig:
    """``reciprocity`` is the target fraction of reciprocated edges.

    ``mean_degree``, when set, trims or tops up the edge set to exactly
    ``round(mean_degree * node_count)`` edges.
    """

    node_count: int = 1000
    exponent: float = 2.5
    min_out_degree: int = 1
    reciprocity: float = 0.6
    triad_closure: float = 0.3
    mean_degree: float | None = None
    seed: int = 0

    def validate(self) -> None:
        if self.node_count < 2:
            raise ConfigError("node_count must be >= 2")
        if self.exponent <= 1:
            raise ConfigError("out-degree exponent must exceed 1")
        if not 0 <= self.reciprocity <= 1 or not 0 <= self.triad_closure <= 1:
            raise ConfigError("probabilities must lie in [0, 1]")
        if not 1 <= self.min_out_degree < self.node_count:
            raise ConfigError("min_out_degree must be in [1, node_count)")
        if self.mean_degree is not None and not 0 < self.mean_degree < self.node_count - 1:
            raise ConfigError("mean_degree out of range")


def _draw_edges(rng, n, sources, cfg, target_cdf):
    """Follow edges from ``sources`` (repeated per edge); a triad_closure share
    is redirected to a followee of a followee."""
    dst = np.searchsorted(target_cdf, rng.random(len(sources)), side="right")
    np.minimum(dst, n - 1, out=dst)
    if cfg.triad_closure > 0 and len(sources):
        deg = np.bincount(sources, minlength=n)
        start = np.zeros(n, dtype=np.int64)
        np.cumsum(deg[:-1], out=start[1:])
        order = np.argsort(sources, kind="stable")
        by_src = dst[order]
        sel = np.flatnonzero(rng.random(len(sources)) < cfg.triad_closure)
        j = sources[sel]
        mid = by_src[start[j] + (rng.random(len(sel)) * deg[j]).astype(np.int64)]
        has = deg[mid] > 0
        sel, mid = sel[has], mid[has]
        dst[sel] = by_src[start[mid] + (rng.random(len(sel)) * deg[mid]).astype(np.int64)]
    return dst.astype(np.int64)


def _keys(rng, n, sources, cfg, target_cdf, q):
    src = sources.astype(np.int64)
    dst = _draw_edges(rng, n, sources, cfg, target_cdf)
    back = rng.random(len(src)) < q
    keys = np.concatenate([src * n + dst, dst[back] * n + src[back]])
    rows = keys // n
    return keys[rows != keys - rows * n]


def _trim(rng, n, keys, target):
    """Drop edges down to ``target``, removing mutual pairs and single edges in
    proportion so the reciprocated fraction is preserved."""
    m = len(keys)
    src = keys // n
    dst = keys - src * n
    rev = dst * n + src
    pos = np.minimum(np.searchsorted(keys, rev), m - 1)
    mutual = keys[pos] == rev
    drop_total = m - target
    reps = np.flatnonzero(mutual & (src < dst))
    n_pairs = min(len(reps), int(round(mutual.sum() * drop_total / (2 * m))))
    singles = np.flatnonzero(~mutual)
    n_single = min(len(singles), drop_total - 2 * n_pairs)
    n_pairs = (drop_total - n_single) // 2
    gone = rng.choice(reps, size=n_pairs, replace=False)
    drop = np.concatenate([gone, pos[gone], rng.choice(singles, size=n_single, replace=False)])
    keys = np.delete(keys, drop)
    if len(keys) > target:
        keys = np.delete(keys, rng.choice(len(keys), size=len(keys) - target, replace=False))
    return keys


def generate_graph(cfg: SynthGraphConfig) -> FollowerGraph:
    """Power-law out-degrees, preferential in-links, reciprocation and triad closure.

    Node ids are ``0..node_count-1``. Each drawn edge is reciprocated with
    probability ``r / (2 - r)`` so that a fraction ``r`` of all edges ends up
    reciprocated.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n = cfg.node_count
    q = cfg.reciprocity / (2.0 - cfg.reciprocity) if cfg.reciprocity < 1 else 1.0
    attract = sample_discrete_power_law(n, cfg.exponent, 1, n - 1, rng).astype(np.float64)
    target_cdf = np.cumsum(attract)
    target_cdf /= target_cdf[-1]
    outdeg = sample_discrete_power_law(n, cfg.exponent, cfg.min_out_degree, n - 1, rng)
    sources = np.repeat(np.arange(n, dtype=np.int32), outdeg)
    keys = np.unique(_keys(rng, n, sources, cfg, target_cdf, q))
    del sources
    if cfg.mean_degree is not None:
        target = int(round(cfg.mean_degree * n))
        for _ in range(50):
            if len(keys) >= target:
                break
            extra = int((target - len(keys)) * 1.1 / (1 + q)) + 16
            sources = np.sort(rng.integers(0, n, size=extra)).astype(np.int32)
            keys = np.union1d(keys, _keys(rng, n, sources, cfg, target_cdf, q))
        if len(keys) > target:
            keys = _trim(rng, n, keys, target)
    src = keys // n
    dst = keys - src * n
    del keys
    return FollowerGraph.from_dense(np.arange(n, dtype=np.uint64), src, dst)


@dataclass(frozen=True)
class PlantedCascadeConfig:
    n_roots: int = 10
    activation_prob: float = 0.1
    max_delay: int = 3 * 24 * 3600
    min_delay: int = 1
    delta: int = NINE_DAYS
    retweet_prob: float = 0.5
    tokens: tuple[str, ...] = DEFAULT_TOKENS
    noise_rate: float = 0.0
    max_cascade_size: int | None = None
    start_time: int = 0
    seed: int = 0

    def validate(self) -> None:
        if self.n_roots < 1:
            raise ConfigError("n_roots must be >= 1")
        if not 0 <= self.activation_prob <= 1 or not 0 <= self.retweet_prob <= 1:
            raise ConfigError("probabilities must lie in [0, 1]")
        if not 1 <= self.min_delay <= self.max_delay:
            raise ConfigError("need 1 <= min_delay <= max_delay")
        if self.max_delay >= self.delta:
            raise ConfigError("planted delays must stay below the extraction window")
        if self.noise_rate < 0:
            raise ConfigError("noise_rate must be >= 0")
        if not self.tokens:
            raise ConfigError("need at least one token")


@dataclass
class PlantedCascade:
    root: int
    token: str
    parents: dict[int, int | None] = field(default_factory=dict)
    events: list[int] = field(default_factory=list)

    @property
    def members(self) -> set[int]:
        return set(self.parents)


@dataclass
class GroundTruth:
    cascades: list[PlantedCascade]
    event_labels: dict[int, int | None]


def _spread(g: FollowerGraph, root: int, t0: int, cfg: PlantedCascadeConfig, rng) -> dict[int, int]:
    """Independent-cascade spread from ``root``; returns activation times by dense index."""
    active: dict[int, int] = {}
    heap = [(t0, root)]
    while heap:
        t, v = heapq.heappop(heap)
        if v in active:
            continue
        active[v] = t
        if cfg.max_cascade_size is not None and len(active) >= cfg.max_cascade_size:
            break
        fol = g.in_indices[g.in_indptr[v]:g.in_indptr[v + 1]]
        if not len(fol):
            continue
        hit = fol[rng.random(len(fol)) < cfg.activation_prob]
        delays = rng.integers(cfg.min_delay, cfg.max_delay + 1, size=len(hit))
        for f, d in zip(hit.tolist(), delays.tolist()):
            if f not in active:
                heapq.heappush(heap, (t + d, f))
    return active


def plant_cascades(g: FollowerGraph, cfg: PlantedCascadeConfig) -> tuple[EventLog, GroundTruth]:
    """Spread cascades from distinct roots in time-separated epochs.

    Consecutive epochs are more than ``delta`` apart, so with no noise a
    windowed extraction sees only same-cascade events. A member's planted
    parent is its followee with the latest earlier event in the cascade
    (smaller event id on ties); retweets point at that parent's event.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n = g.node_count
    candidates = np.flatnonzero(g.in_degrees() > 0)
    if len(candidates) == 0:
        candidates = np.arange(n)
    if cfg.n_roots > len(candidates):
        raise ConfigError("more roots than eligible nodes")
    roots = rng.choice(candidates, size=cfg.n_roots, replace=False)
    tokens = [cfg.tokens[i] for i in rng.integers(0, len(cfg.tokens), size=cfg.n_roots)]

    raw = []  # (time, dense user, cascade index)
    t0 = cfg.start_time
    for ci, r in enumerate(roots.tolist()):
        active = _spread(g, r, t0, cfg, rng)
        raw.extend((t, v, ci) for v, t in active.items())
        t0 = max(active.values()) + cfg.delta + 1
    end = max(t for t, _, _ in raw)
    n_noise = int(round(cfg.noise_rate * len(raw)))
    if n_noise:
        nt = rng.integers(cfg.start_time, end + 1, size=n_noise)
        nu = rng.integers(0, n, size=n_noise)
        raw.extend((int(t), int(u), -1) for t, u in zip(nt, nu))
    raw.sort()

    ids = g.ids
    planted = [PlantedCascade(int(ids[r]), tok) for r, tok in zip(roots.tolist(), tokens)]
    labels: dict[int, int | None] = {}
    per_cascade: list[dict[int, tuple[int, int]]] = [{} for _ in planted]  # dense user -> (t, eid)
    specs = []
    for eid, (t, v, ci) in enumerate(raw):
        if ci < 0:
            labels[eid] = None
            tok = cfg.tokens[int(rng.integers(0, len(cfg.tokens)))]
            specs.append((eid, v, t, ORIGINAL, None, tok))
            continue
        pc = planted[ci]
        seen = per_cascade[ci]
        parent = None
        if seen:
            best = None
            for u in g.out_indices[g.out_indptr[v]:g.out_indptr[v + 1]].tolist():
                hit = seen.get(u)
                if hit is None or not (t - cfg.delta <= hit[0] < t):
                    continue
                if best is None or (hit[0], -hit[1]) > (best[1][0], -best[1][1]):
                    best = (u, hit)
            parent = best
        kind, parent_eid = ORIGINAL, None
        if parent is None:
            pc.parents[int(ids[v])] = None
        else:
            pc.parents[int(ids[v])] = int(ids[parent[0]])
            if rng.random() < cfg.retweet_prob:
                kind, parent_eid = RETWEET, parent[1][1]
        seen[v] = (t, eid)
        pc.events.append(eid)
        labels[eid] = ci
        specs.append((eid, v, t, kind, parent_eid, pc.token))
    events = [
        Event(eid, int(ids[v]), t, kind, pe, frozenset([tok]))
        for eid, v, t, kind, pe, tok in specs
    ]
    return EventLog.from_events(events), GroundTruth(planted, labels)


def membership_f1(truth: GroundTruth, cascades) -> float:
    """Micro-averaged member F1, pairing each planted cascade with the extracted
    cascade that holds its root event."""
    holder = {}
    for c in cascades:
        for eid in c.member_events:
            holder[eid] = c
    tp = fp = fn = 0
    for pc in truth.cascades:
        got = set(holder[pc.events[0]].members) if pc.events else set()
        want = pc.members
        tp += len(got & want)
        fp += len(got - want)
        fn += len(want - got)
    return 2 * tp / (2 * tp + fp + fn) if tp else 0.0
