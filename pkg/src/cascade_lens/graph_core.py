"""Follower graph storage, ingestion and global structure statistics.

An edge ``j -> i`` means user ``j`` follows user ``i``; content flows the other
way, from ``i`` to its followers.
"""
from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import optimize, special

from . import _kernels
from .errors import (
    DivergentFitError,
    EmptyInputError,
    InsufficientDataError,
    ParseError,
    UndefinedMetricError,
    UnknownNodeError,
)

_U64_MAX = (1 << 64) - 1


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _csr(rows: np.ndarray, cols: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """CSR from (rows, cols) already sorted by (row, col)."""
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return indptr, cols.astype(np.int32, copy=False)


@dataclass(frozen=True, eq=False)
class FollowerGraph:
    """Immutable directed follower graph in dual CSR form over dense indices.

    ``ids[k]`` is the external id of dense node ``k``; ids are sorted ascending,
    so dense order equals id order.
    """

    ids: np.ndarray
    out_indptr: np.ndarray
    out_indices: np.ndarray
    in_indptr: np.ndarray
    in_indices: np.ndarray
    _undirected: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_dense(cls, ids: np.ndarray, src: np.ndarray, dst: np.ndarray) -> "FollowerGraph":
        """Build from dense-index edge arrays that are already simple (no loops, no dups)."""
        n = len(ids)
        src = np.asarray(src, dtype=np.int64)
        dst = np.asarray(dst, dtype=np.int64)
        order = np.lexsort((dst, src))
        out_indptr, out_indices = _csr(src[order], dst[order], n)
        order = np.lexsort((src, dst))
        in_indptr, in_indices = _csr(dst[order], src[order], n)
        return cls(
            _frozen(np.asarray(ids, dtype=np.uint64)),
            _frozen(out_indptr),
            _frozen(out_indices),
            _frozen(in_indptr),
            _frozen(in_indices),
        )

    @property
    def node_count(self) -> int:
        return len(self.ids)

    @property
    def edge_count(self) -> int:
        return len(self.out_indices)

    def index_of(self, node_ids) -> np.ndarray:
        """Dense indices of external ids; raises :class:`UnknownNodeError` on misses."""
        q = np.atleast_1d(np.asarray(node_ids, dtype=np.uint64))
        pos = np.searchsorted(self.ids, q)
        pos_c = np.minimum(pos, max(self.node_count - 1, 0))
        bad = (pos >= self.node_count) | (self.ids[pos_c] != q) if self.node_count else np.ones(len(q), bool)
        if bad.any():
            raise UnknownNodeError(f"unknown node id {int(q[np.argmax(bad)])}")
        return pos.astype(np.int64)

    def has_node(self, node_id: int) -> bool:
        k = np.searchsorted(self.ids, np.uint64(node_id))
        return bool(k < self.node_count and self.ids[k] == node_id)

    def followees(self, node_id: int) -> np.ndarray:
        k = int(self.index_of(node_id)[0])
        return self.ids[self.out_indices[self.out_indptr[k]:self.out_indptr[k + 1]]]

    def followers(self, node_id: int) -> np.ndarray:
        k = int(self.index_of(node_id)[0])
        return self.ids[self.in_indices[self.in_indptr[k]:self.in_indptr[k + 1]]]

    def out_degrees(self) -> np.ndarray:
        return np.diff(self.out_indptr)

    def in_degrees(self) -> np.ndarray:
        return np.diff(self.in_indptr)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense ``(follower, followee)`` arrays in (follower, followee) order."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int32), self.out_degrees())
        return src, self.out_indices

    def edges(self) -> list[tuple[int, int]]:
        """External-id edge list (for small graphs and tests)."""
        src, dst = self.edge_arrays()
        return list(zip(self.ids[src].tolist(), self.ids[dst].tolist()))

    def undirected(self) -> tuple[np.ndarray, np.ndarray]:
        """Symmetric CSR of the undirected projection (cached)."""
        if "csr" not in self._undirected:
            n = self.node_count
            src, dst = self.edge_arrays()
            keys = np.concatenate([
                src.astype(np.int64) * n + dst,
                dst.astype(np.int64) * n + src,
            ])
            keys = np.unique(keys)
            rows = keys // n
            cols = keys - rows * n
            del keys
            self._undirected["csr"] = tuple(map(_frozen, _csr(rows, cols, n)))
        return self._undirected["csr"]

    def transpose(self) -> "FollowerGraph":
        return FollowerGraph(self.ids, self.in_indptr, self.in_indices, self.out_indptr, self.out_indices)

    def relabel(self, mapping: dict[int, int]) -> "FollowerGraph":
        src, dst = self.edge_arrays()
        new = np.array([mapping[int(i)] for i in self.ids.tolist()], dtype=np.uint64)
        graph, _ = from_pairs(new[src], new[dst], nodes=new)
        return graph


@dataclass(frozen=True)
class IngestReport:
    records: int
    duplicates: int
    self_loops: int


def from_pairs(followers, followees, nodes=None) -> tuple[FollowerGraph, IngestReport]:
    """Graph from parallel external-id arrays; drops self-loops and duplicates."""
    src = np.asarray(followers, dtype=np.uint64).ravel()
    dst = np.asarray(followees, dtype=np.uint64).ravel()
    if len(src) != len(dst):
        raise ValueError("follower and followee arrays differ in length")
    extra = np.asarray([] if nodes is None else nodes, dtype=np.uint64)
    if len(src) == 0 and len(extra) == 0:
        raise EmptyInputError("no edge records")
    ids, inv = np.unique(np.concatenate([src, dst, extra]), return_inverse=True)
    m = len(src)
    s = inv[:m].astype(np.int64)
    d = inv[m:2 * m].astype(np.int64)
    del inv
    loops = s == d
    n_loops = int(loops.sum())
    if n_loops:
        s, d = s[~loops], d[~loops]
    n = len(ids)
    keys = np.unique(s * n + d)
    dups = (m - n_loops) - len(keys)
    s = keys // n
    d = keys - s * n
    del keys
    graph = FollowerGraph.from_dense(ids, s, d)
    return graph, IngestReport(records=m, duplicates=dups, self_loops=n_loops)


def parse_edge_lines(lines: Iterable[str]) -> tuple[np.ndarray, np.ndarray]:
    """Parse ``follower<TAB>followee`` lines; ``#`` comments and blank lines are skipped."""
    src, dst = [], []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 2 fields, got {len(parts)}: {line!r}", lineno)
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer id in {line!r}", lineno) from None
        if not (0 <= a <= _U64_MAX and 0 <= b <= _U64_MAX):
            raise ParseError(f"id out of unsigned 64-bit range in {line!r}", lineno)
        src.append(a)
        dst.append(b)
    return np.asarray(src, dtype=np.uint64), np.asarray(dst, dtype=np.uint64)


def read_edge_file(path) -> tuple[np.ndarray, np.ndarray]:
    """Fast path through ``np.loadtxt``; re-scans in Python to locate a bad line."""
    if os.path.getsize(path) == 0:
        raise EmptyInputError(f"{path}: empty edge file")
    try:
        with open(path, encoding="utf-8") as fh, warnings.catch_warnings():
            # float-routed integer parsing would let "-4" or "1.5" through
            warnings.simplefilter("error", DeprecationWarning)
            warnings.filterwarnings("ignore", "loadtxt: input contained no data")
            arr = np.loadtxt(fh, dtype=np.uint64, delimiter="\t", comments="#", ndmin=2)
        if arr.shape[1] != 2 and arr.size:
            raise ValueError("wrong column count")
    except (ValueError, UnicodeDecodeError, DeprecationWarning):
        with open(path, encoding="utf-8", errors="strict") as fh:
            try:
                return parse_edge_lines(fh)
            except UnicodeDecodeError as exc:
                raise ParseError(f"not UTF-8: {exc}") from None
    if arr.size == 0:
        return np.empty(0, np.uint64), np.empty(0, np.uint64)
    return np.ascontiguousarray(arr[:, 0]), np.ascontiguousarray(arr[:, 1])


def load_edges(source, nodes=None) -> tuple[FollowerGraph, IngestReport]:
    """Load a follower graph from a TSV path, text lines, or ``(follower, followee)`` pairs."""
    if isinstance(source, (str, os.PathLike)):
        src, dst = read_edge_file(source)
    else:
        items = list(source)
        if items and isinstance(items[0], str):
            src, dst = parse_edge_lines(items)
        else:
            arr = np.asarray(items, dtype=np.uint64).reshape(-1, 2) if items else np.empty((0, 2), np.uint64)
            src, dst = arr[:, 0], arr[:, 1]
    if len(src) == 0 and not nodes:
        raise EmptyInputError("no edge records")
    return from_pairs(src, dst, nodes=nodes)


def write_edge_file(graph: FollowerGraph, path, chunk: int = 1 << 20) -> None:
    src, dst = graph.edge_arrays()
    with open(path, "w", encoding="utf-8") as fh:
        for lo in range(0, graph.edge_count, chunk):
            a = graph.ids[src[lo:lo + chunk]].tolist()
            b = graph.ids[dst[lo:lo + chunk]].tolist()
            fh.write("".join(f"{x}\t{y}\n" for x, y in zip(a, b)))


@dataclass(frozen=True)
class DegreeSummary:
    node_count: int
    edge_count: int
    mean_degree: float
    in_ccdf: list[tuple[int, float]]
    out_ccdf: list[tuple[int, float]]


def ccdf(values) -> list[tuple[int, float]]:
    """``(value, fraction of samples >= value)`` over distinct observed values."""
    v = np.asarray(values)
    if v.size == 0:
        return []
    uniq, counts = np.unique(v, return_counts=True)
    at_least = np.cumsum(counts[::-1])[::-1]
    return [(int(u), float(c) / v.size) for u, c in zip(uniq.tolist(), at_least.tolist())]


def degree_summary(g: FollowerGraph) -> DegreeSummary:
    if g.node_count == 0:
        raise EmptyInputError("empty graph")
    return DegreeSummary(
        node_count=g.node_count,
        edge_count=g.edge_count,
        mean_degree=g.edge_count / g.node_count,
        in_ccdf=ccdf(g.in_degrees()),
        out_ccdf=ccdf(g.out_degrees()),
    )


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    xmin: int
    n_tail: int
    method: str = "discrete"


def _tail(samples, xmin: int) -> np.ndarray:
    if xmin < 1:
        raise ValueError("xmin must be >= 1")
    x = np.asarray(samples, dtype=np.float64).ravel()
    x = x[x >= xmin]
    if len(x) < 2:
        raise InsufficientDataError(f"{len(x)} samples >= xmin={xmin}; need at least 2")
    if np.all(x == xmin):
        raise DivergentFitError("all tail samples equal xmin; exponent diverges")
    return x


def fit_power_law(samples, xmin: int = 1, method: str = "discrete") -> PowerLawFit:
    """Maximum-likelihood power-law exponent for integer samples ``>= xmin``.

    ``method="approx"`` is the closed form ``1 + n / sum(ln(x / (xmin - 0.5)))``.
    ``method="discrete"`` (default) maximizes the exact discrete likelihood
    ``-n ln zeta(alpha, xmin) - alpha sum(ln x)``; the closed form is badly
    biased for small ``xmin``.
    """
    x = _tail(samples, xmin)
    n = len(x)
    log_sum = float(np.log(x).sum())
    approx = 1.0 + n / float(np.log(x / (xmin - 0.5)).sum())
    if method == "approx":
        return PowerLawFit(approx, xmin, n, method)
    if method != "discrete":
        raise ValueError(f"unknown method {method!r}")
    mean_log = log_sum / n

    def nll(a):
        return math.log(special.zeta(a, xmin)) + a * mean_log

    hi = max(2.0 * approx, 10.0)
    res = optimize.minimize_scalar(nll, bounds=(1.0 + 1e-9, hi), method="bounded",
                                   options={"xatol": 1e-10})
    return PowerLawFit(float(res.x), xmin, n, method)


def reciprocity(g: FollowerGraph) -> float:
    """Fraction of directed edges whose reverse edge also exists."""
    if g.edge_count == 0:
        raise UndefinedMetricError("reciprocity of a graph with no edges")
    n = g.node_count
    src, dst = g.edge_arrays()
    keys = src.astype(np.int64) * n + dst  # sorted: CSR rows and columns are sorted
    rev = dst.astype(np.int64) * n + src
    pos = np.searchsorted(keys, rev)
    pos[pos == len(keys)] = 0
    return float(np.count_nonzero(keys[pos] == rev)) / g.edge_count


def local_clustering(g: FollowerGraph) -> np.ndarray:
    """Local clustering per node on the undirected projection (0 when degree < 2)."""
    indptr, indices = g.undirected()
    tri = _kernels.triangle_counts(indptr, indices)
    deg = np.diff(indptr).astype(np.float64)
    pairs = deg * (deg - 1) / 2
    out = np.zeros(g.node_count)
    ok = pairs > 0
    out[ok] = tri[ok] / pairs[ok]
    return out


def clustering_coefficient(g: FollowerGraph) -> float:
    if g.node_count == 0:
        return 0.0
    return float(local_clustering(g).mean())
