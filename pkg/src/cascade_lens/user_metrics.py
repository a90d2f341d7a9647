"""User activeness, head/tail breaks, HITS scores, roles and hop-by-hop reach."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import _kernels
from .errors import DegenerateDistributionError, UndefinedMetricError
from .events import EventLog
from .graph_core import FollowerGraph

log = logging.getLogger(__name__)

HIGHLY_ACTIVE = "highly_active"
MODERATELY_ACTIVE = "moderately_active"
INACTIVE = "inactive"
ACTIVITY_CATEGORIES = (HIGHLY_ACTIVE, MODERATELY_ACTIVE, INACTIVE)

FRINGE = "fringe"
INFO_SEEKING = "info_seeking"
INFO_SHARING = "info_sharing"
LEADER = "leader"
ROLES = (FRINGE, INFO_SEEKING, INFO_SHARING, LEADER)


def activeness_from_timestamps(timestamps) -> tuple[int, float, float]:
    """``(tweet count, mean latency, activeness)`` for one user's timestamps.

    Activeness is count / mean gap between consecutive events, and 0 for users
    with at most one event. Simultaneous events (zero span) give ``inf``.
    """
    ts = sorted(timestamps)
    n = len(ts)
    if n <= 1:
        return n, 0.0, 0.0
    latency = (ts[-1] - ts[0]) / (n - 1)
    if latency == 0:
        return n, 0.0, float("inf")
    return n, latency, n / latency


def activeness(log: EventLog, user: int) -> tuple[int, float, float]:
    return activeness_from_timestamps(ev.timestamp for ev in log.user_events(user))


@dataclass(frozen=True, eq=False)
class ActivitySummary:
    """Per-user activity, aligned with ``users`` (external ids)."""

    users: np.ndarray
    tweet_count: np.ndarray
    mean_latency: np.ndarray
    activeness: np.ndarray
    category: np.ndarray | None = None
    threshold: float | None = None

    def counts(self) -> dict[str, int]:
        if self.category is None:
            return {}
        return {c: int(np.count_nonzero(self.category == c)) for c in ACTIVITY_CATEGORIES}


def activity_summary(log: EventLog, users=None) -> ActivitySummary:
    """Activity for ``users`` (default: every user with events). All events count."""
    by_user = log.timestamps_by_user()
    if users is None:
        users = sorted(by_user)
    users = np.asarray(users, dtype=np.uint64)
    stats = [activeness_from_timestamps(by_user.get(int(u), ())) for u in users.tolist()]
    arr = np.asarray(stats, dtype=np.float64).reshape(-1, 3)
    return ActivitySummary(users, arr[:, 0].astype(np.int64), arr[:, 1], arr[:, 2])


def head_tail_breaks(values, head_limit: float = 0.4) -> tuple[float, list[float]]:
    """Head/tail breaks: split at the mean while the head stays a minority.

    Recursion continues on the head (values strictly above the mean) while its
    share of the current subset is below ``head_limit`` and it has more than one
    value. Returns the last mean as the binary threshold and all means in order.
    """
    x = np.asarray(values, dtype=np.float64).ravel()
    if len(x) < 2:
        raise DegenerateDistributionError("head/tail breaks needs at least 2 values")
    if np.all(x == x[0]):
        raise DegenerateDistributionError("all values are equal")
    breaks = []
    while True:
        m = float(x.mean())
        breaks.append(m)
        head = x[x > m]
        if len(head) > 1 and len(head) / len(x) < head_limit:
            x = head
            continue
        return m, breaks


def categorize_activity(summary: ActivitySummary, threshold: float) -> ActivitySummary:
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    phi = summary.activeness
    cat = np.where(phi > threshold, HIGHLY_ACTIVE, np.where(phi > 0, MODERATELY_ACTIVE, INACTIVE))
    return ActivitySummary(summary.users, summary.tweet_count, summary.mean_latency,
                           phi, cat.astype(object), threshold)


def categorize_by_head_tail(summary: ActivitySummary) -> ActivitySummary:
    """Threshold from head/tail breaks over finite positive activeness values.

    With no positive values the threshold is ``inf``; with a single distinct
    value it is that value. Either way nobody is highly active.
    """
    phi = summary.activeness
    positive = phi[(phi > 0) & np.isfinite(phi)]
    if len(np.unique(positive)) < 2:
        threshold = float(positive.max()) if len(positive) else float("inf")
        log.warning("activeness has fewer than 2 distinct positive values; threshold set to %g", threshold)
    else:
        threshold, _ = head_tail_breaks(positive)
    return categorize_activity(summary, threshold)


@dataclass(frozen=True, eq=False)
class HitsScores:
    """Hub and authority vectors aligned with the graph's dense node order."""

    ids: np.ndarray
    hub: np.ndarray
    authority: np.ndarray
    iterations: int
    residual: float
    converged: bool


def hits(g: FollowerGraph, tolerance: float = 1e-8, max_iterations: int = 200) -> HitsScores:
    """Kleinberg hubs/authorities by power iteration.

    A node's authority sums the hub scores of its followers; a node's hub score
    sums the authorities of its followees. Both vectors are L2-normalized each
    round; iteration stops once the largest per-node change drops below
    ``tolerance``.
    """
    if g.edge_count == 0:
        raise UndefinedMetricError("HITS needs at least one edge")
    n = g.node_count
    follows = sparse.csr_matrix(
        (np.ones(g.edge_count), g.out_indices, g.out_indptr), shape=(n, n))
    followed_by = sparse.csr_matrix(
        (np.ones(g.edge_count), g.in_indices, g.in_indptr), shape=(n, n))
    hub = np.full(n, 1.0 / np.sqrt(n))
    auth = hub.copy()
    residual = np.inf
    it = 0
    for it in range(1, max_iterations + 1):
        new_auth = followed_by @ hub
        new_auth /= np.linalg.norm(new_auth)
        new_hub = follows @ new_auth
        new_hub /= np.linalg.norm(new_hub)
        residual = float(max(np.abs(new_auth - auth).max(), np.abs(new_hub - hub).max()))
        auth, hub = new_auth, new_hub
        if residual < tolerance:
            break
    converged = residual < tolerance
    if not converged:
        log.warning("HITS did not converge in %d iterations (residual %.3g)", max_iterations, residual)
    return HitsScores(g.ids, hub, auth, it, residual, converged)


@dataclass(frozen=True, eq=False)
class RoleAssignment:
    ids: np.ndarray
    roles: np.ndarray  # object array of role names, dense order
    authority_threshold: float
    hub_threshold: float

    def role_of(self, node_id: int) -> str:
        k = np.searchsorted(self.ids, np.uint64(node_id))
        if k >= len(self.ids) or self.ids[k] != node_id:
            raise KeyError(node_id)
        return self.roles[k]

    def as_dict(self) -> dict[int, str]:
        return dict(zip(self.ids.tolist(), self.roles.tolist()))

    def counts(self) -> dict[str, int]:
        return {r: int(np.count_nonzero(self.roles == r)) for r in ROLES}


def role_from_flags(high_authority: bool, high_hub: bool) -> str:
    if high_authority:
        return LEADER if high_hub else INFO_SHARING
    return INFO_SEEKING if high_hub else FRINGE


def assign_roles(scores: HitsScores) -> RoleAssignment:
    a_thr, _ = head_tail_breaks(scores.authority)
    h_thr, _ = head_tail_breaks(scores.hub)
    hi_a = scores.authority > a_thr
    hi_h = scores.hub > h_thr
    roles = np.where(hi_a, np.where(hi_h, LEADER, INFO_SHARING),
                     np.where(hi_h, INFO_SEEKING, FRINGE)).astype(object)
    return RoleAssignment(scores.ids, roles, a_thr, h_thr)


@dataclass(frozen=True)
class ReachRow:
    hop: int
    new: int
    cumulative: int
    cumulative_pct: float
    by_role: dict[str, int]


def reach_by_hop(g: FollowerGraph, seeds, roles: RoleAssignment | None = None,
                 max_hops: int = 3) -> list[ReachRow]:
    """Users newly reached at each hop when content flows from seeds to followers."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("reach needs at least one seed")
    src = g.index_of(seeds).astype(np.int32)
    dist = _kernels.bfs_levels(g.in_indptr, g.in_indices, src, max_hops)
    rows = []
    cumulative = 0
    for h in range(max_hops + 1):
        layer = dist == h
        new = int(np.count_nonzero(layer))
        cumulative += new
        by_role = {} if roles is None else {r: int(np.count_nonzero(roles.roles[layer] == r)) for r in ROLES}
        rows.append(ReachRow(h, new, cumulative, 100.0 * cumulative / g.node_count, by_role))
    return rows


def role_properties(g: FollowerGraph, roles: RoleAssignment,
                    activity: ActivitySummary | None = None) -> dict[str, dict]:
    """Count, share and mean in/out degree (and mean activeness) per role."""
    indeg = g.in_degrees()
    outdeg = g.out_degrees()
    phi = None
    if activity is not None:
        phi = np.zeros(g.node_count)
        known = np.isin(activity.users, g.ids)
        phi[g.index_of(activity.users[known])] = activity.activeness[known]
    out = {}
    for r in ROLES:
        mask = roles.roles == r
        cnt = int(mask.sum())
        row = {
            "count": cnt,
            "percentage": 100.0 * cnt / g.node_count,
            "mean_in_degree": float(indeg[mask].mean()) if cnt else None,
            "mean_out_degree": float(outdeg[mask].mean()) if cnt else None,
        }
        if phi is not None:
            vals = phi[mask]
            vals = vals[np.isfinite(vals)]
            row["mean_activeness"] = float(vals.mean()) if len(vals) else None
        out[r] = row
    return out
