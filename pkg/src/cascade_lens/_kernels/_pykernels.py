"""Pure-Python graph kernels, used when the compiled extension is unavailable.

Same signatures and return conventions as the compiled ``_ckernels`` module.
"""
from collections import deque

import numpy as np


def _adjacency(indptr, indices):
    ptr = indptr.tolist()
    idx = indices.tolist()
    return [idx[ptr[v]:ptr[v + 1]] for v in range(len(ptr) - 1)]


def scc_labels(indptr, indices):
    adj = _adjacency(indptr, indices)
    n = len(adj)
    index = [-1] * n
    low = [0] * n
    onstack = [False] * n
    labels = [-1] * n
    stack = []
    counter = 0
    comp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack[root] = True
        calls = [(root, iter(adj[root]))]
        while calls:
            v, it = calls[-1]
            descended = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    onstack[w] = True
                    calls.append((w, iter(adj[w])))
                    descended = True
                    break
                if onstack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if descended:
                continue
            calls.pop()
            if calls:
                parent = calls[-1][0]
                if low[v] < low[parent]:
                    low[parent] = low[v]
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    labels[w] = comp
                    if w == v:
                        break
                comp += 1
    return np.asarray(labels, dtype=np.int32)


def wcc_labels(out_indptr, out_indices, in_indptr, in_indices):
    out_adj = _adjacency(out_indptr, out_indices)
    in_adj = _adjacency(in_indptr, in_indices)
    n = len(out_adj)
    labels = [-1] * n
    comp = 0
    for s in range(n):
        if labels[s] != -1:
            continue
        labels[s] = comp
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in out_adj[v]:
                if labels[w] == -1:
                    labels[w] = comp
                    queue.append(w)
            for w in in_adj[v]:
                if labels[w] == -1:
                    labels[w] = comp
                    queue.append(w)
        comp += 1
    return np.asarray(labels, dtype=np.int32)


def bfs_levels(indptr, indices, sources, max_depth=-1):
    adj = _adjacency(indptr, indices)
    dist = [-1] * len(adj)
    queue = deque()
    for s in sources.tolist():
        if dist[s] == -1:
            dist[s] = 0
            queue.append(s)
    while queue:
        v = queue.popleft()
        if 0 <= max_depth <= dist[v]:
            continue
        for w in adj[v]:
            if dist[w] == -1:
                dist[w] = dist[v] + 1
                queue.append(w)
    return np.asarray(dist, dtype=np.int32)


def triangle_counts(indptr, indices):
    adj = _adjacency(indptr, indices)
    n = len(adj)
    rank = {v: r for r, v in enumerate(sorted(range(n), key=lambda v: (len(adj[v]), v)))}
    forward = [[w for w in adj[v] if rank[w] > rank[v]] for v in range(n)]
    tri = [0] * n
    for u in range(n):
        fu = set(forward[u])
        for v in forward[u]:
            for w in forward[v]:
                if w in fu:
                    tri[u] += 1
                    tri[v] += 1
                    tri[w] += 1
    return np.asarray(tri, dtype=np.int64)


def bfs_pair_stats(indptr, indices):
    adj = _adjacency(indptr, indices)
    n = len(adj)
    reached = np.zeros(n, dtype=np.int64)
    dsum = np.zeros(n, dtype=np.int64)
    ecc = np.zeros(n, dtype=np.int32)
    for s in range(n):
        dist = {s: 0}
        queue = deque([s])
        last = 0
        while queue:
            v = queue.popleft()
            d = dist[v] + 1
            for w in adj[v]:
                if w not in dist:
                    dist[w] = d
                    last = d
                    queue.append(w)
        reached[s] = len(dist) - 1
        dsum[s] = sum(dist.values())
        ecc[s] = last
    return reached, dsum, ecc
