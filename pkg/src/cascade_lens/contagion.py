"""Exposure curves p(k) = I(k) / E(k), stickiness and persistence per token."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import NoDataError, UndefinedMetricError
from .events import EventLog
from .graph_core import FollowerGraph

ALL_TOKENS = "__all__"


@dataclass(frozen=True, eq=False)
class ExposureCurve:
    token: str
    K: int
    E: np.ndarray
    I: np.ndarray  # noqa: E741
    p: np.ndarray
    stickiness: float
    argmax_k: int
    persistence: float | None
    support_threshold: int
    adopters: int

    def rows(self):
        return zip(range(self.K + 1), self.E.tolist(), self.I.tolist(), self.p.tolist())


def exposure_counts(g: FollowerGraph, log_: EventLog, token: str | None) -> tuple[np.ndarray, np.ndarray]:
    """Untruncated ``(E, I)`` arrays for one token (``None`` = every event).

    Exposure is the number of distinct followees with an earlier matching
    event. ``E[k]`` counts users who reached level ``k`` before their own first
    matching event; ``I[k]`` counts users whose first matching event happened at
    exactly level ``k``. Only graph users take part.
    """
    n = g.node_count
    exposure = np.zeros(n, dtype=np.int64)
    adopted = np.zeros(n, dtype=bool)
    E = [n]
    I = [0]  # noqa: E741
    for ev in log_.events:
        if token is not None and token not in ev.tokens:
            continue
        if not g.has_node(ev.user):
            continue
        u = int(g.index_of(ev.user)[0])
        if adopted[u]:
            continue
        adopted[u] = True
        k = int(exposure[u])
        I[k] += 1
        followers = g.in_indices[g.in_indptr[u]:g.in_indptr[u + 1]]
        exposure[followers] += 1
        fresh = followers[~adopted[followers]]
        if len(fresh):
            levels = exposure[fresh]
            top = int(levels.max())
            while len(E) <= top:
                E.append(0)
                I.append(0)
            for lvl, cnt in zip(*np.unique(levels, return_counts=True)):
                E[int(lvl)] += int(cnt)
    return np.asarray(E, dtype=np.int64), np.asarray(I, dtype=np.int64)


def stickiness(p) -> tuple[float, int]:
    p = np.asarray(p, dtype=np.float64)
    if p.size == 0:
        raise UndefinedMetricError("empty exposure curve")
    k = int(np.argmax(p))
    return float(p[k]), k


def persistence(p) -> float:
    """Trapezoidal area under ``p`` over ``[0, K]`` divided by ``K * max(p)``."""
    p = np.asarray(p, dtype=np.float64)
    K = len(p) - 1
    peak = float(p.max()) if p.size else 0.0
    if K < 1 or peak <= 0:
        raise UndefinedMetricError("persistence needs K >= 1 and a positive peak")
    area = float(((p[1:] + p[:-1]) / 2).sum())
    return area / (K * peak)


def exposure_curve(g: FollowerGraph, log_: EventLog, token: str | None,
                   support_threshold: int = 10) -> ExposureCurve:
    """Exposure curve for ``token``, truncated at the last ``k`` with ``E[k] >= support_threshold``."""
    if support_threshold < 1:
        raise ValueError("support_threshold must be >= 1")
    if token is not None and not any(token in ev.tokens for ev in log_.events):
        raise NoDataError(f"token {token!r} does not occur in the event log")
    E, I = exposure_counts(g, log_, token)  # noqa: E741
    adopters = int(I.sum())
    supported = np.flatnonzero(E >= support_threshold)
    K = int(supported.max()) if len(supported) else 0
    E, I = E[:K + 1], I[:K + 1]  # noqa: E741
    p = np.divide(I, E, out=np.zeros(len(E)), where=E > 0)
    peak, arg = stickiness(p)
    try:
        pers = persistence(p)
    except UndefinedMetricError:
        pers = None
    return ExposureCurve(token if token is not None else ALL_TOKENS, K, E, I, p,
                         peak, arg, pers, support_threshold, adopters)


def write_curve_csv(curve: ExposureCurve, path, header: str | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        if header:
            fh.write(header + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "E", "I", "p"])
        for k, e, i, p in curve.rows():
            w.writerow([k, e, i, repr(p)])
