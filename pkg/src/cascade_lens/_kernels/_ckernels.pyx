# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled graph kernels.

All graphs arrive as CSR pairs ``(indptr: int64[n+1], indices: int32[m])`` over
dense node indices. Signatures mirror :mod:`cascade_lens._kernels._pykernels`.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int32_t, int64_t, uint8_t

cnp.import_array()


def scc_labels(const int64_t[::1] indptr, const int32_t[::1] indices):
    """Iterative Tarjan; labels are assigned in component completion order."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    labels_arr = np.full(n, -1, dtype=np.int32)
    cdef int32_t[::1] labels = labels_arr
    cdef int32_t[::1] index = np.full(n, -1, dtype=np.int32)
    cdef int32_t[::1] low = np.zeros(n, dtype=np.int32)
    cdef uint8_t[::1] onstack = np.zeros(n, dtype=np.uint8)
    cdef int32_t[::1] stack = np.empty(n, dtype=np.int32)
    cdef int32_t[::1] call_node = np.empty(n, dtype=np.int32)
    cdef int64_t[::1] call_edge = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t sp = 0, cp = 0, root
    cdef int32_t counter = 0, comp = 0, v, w
    cdef int64_t e
    with nogil:
        for root in range(n):
            if index[root] != -1:
                continue
            index[root] = counter
            low[root] = counter
            counter += 1
            stack[sp] = <int32_t>root
            sp += 1
            onstack[root] = 1
            call_node[cp] = <int32_t>root
            call_edge[cp] = indptr[root]
            cp += 1
            while cp > 0:
                v = call_node[cp - 1]
                e = call_edge[cp - 1]
                if e < indptr[v + 1]:
                    call_edge[cp - 1] = e + 1
                    w = indices[e]
                    if index[w] == -1:
                        index[w] = counter
                        low[w] = counter
                        counter += 1
                        stack[sp] = w
                        sp += 1
                        onstack[w] = 1
                        call_node[cp] = w
                        call_edge[cp] = indptr[w]
                        cp += 1
                    elif onstack[w] and index[w] < low[v]:
                        low[v] = index[w]
                    continue
                cp -= 1
                if cp > 0:
                    w = call_node[cp - 1]
                    if low[v] < low[w]:
                        low[w] = low[v]
                if low[v] == index[v]:
                    while True:
                        sp -= 1
                        w = stack[sp]
                        onstack[w] = 0
                        labels[w] = comp
                        if w == v:
                            break
                    comp += 1
    return labels_arr


def wcc_labels(const int64_t[::1] out_indptr, const int32_t[::1] out_indices,
               const int64_t[::1] in_indptr, const int32_t[::1] in_indices):
    """Weak components by BFS over both adjacencies; labels in discovery order."""
    cdef Py_ssize_t n = out_indptr.shape[0] - 1
    labels_arr = np.full(n, -1, dtype=np.int32)
    cdef int32_t[::1] labels = labels_arr
    cdef int32_t[::1] queue = np.empty(max(n, 1), dtype=np.int32)
    cdef Py_ssize_t head, tail, s
    cdef int32_t comp = 0, v, w
    cdef int64_t e
    with nogil:
        for s in range(n):
            if labels[s] != -1:
                continue
            labels[s] = comp
            queue[0] = <int32_t>s
            head = 0
            tail = 1
            while head < tail:
                v = queue[head]
                head += 1
                for e in range(out_indptr[v], out_indptr[v + 1]):
                    w = out_indices[e]
                    if labels[w] == -1:
                        labels[w] = comp
                        queue[tail] = w
                        tail += 1
                for e in range(in_indptr[v], in_indptr[v + 1]):
                    w = in_indices[e]
                    if labels[w] == -1:
                        labels[w] = comp
                        queue[tail] = w
                        tail += 1
            comp += 1
    return labels_arr


def bfs_levels(const int64_t[::1] indptr, const int32_t[::1] indices,
               const int32_t[::1] sources, int max_depth=-1):
    """Multi-source BFS distances (-1 = unreached). ``max_depth < 0`` means unbounded."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef int32_t[::1] dist = dist_arr
    cdef int32_t[::1] queue = np.empty(max(n, 1), dtype=np.int32)
    cdef Py_ssize_t head = 0, tail = 0, i
    cdef int32_t v, w
    cdef int64_t e
    with nogil:
        for i in range(sources.shape[0]):
            v = sources[i]
            if dist[v] == -1:
                dist[v] = 0
                queue[tail] = v
                tail += 1
        while head < tail:
            v = queue[head]
            head += 1
            if max_depth >= 0 and dist[v] >= max_depth:
                continue
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if dist[w] == -1:
                    dist[w] = dist[v] + 1
                    queue[tail] = w
                    tail += 1
    return dist_arr


def triangle_counts(const int64_t[::1] indptr, const int32_t[::1] indices):
    """Per-node triangle counts on a symmetric simple graph (degree-ordered orientation)."""
    cdef Py_ssize_t n = indptr.shape[0] - 1
    tri_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] tri = tri_arr
    deg_np = np.diff(np.asarray(indptr))
    # rank[u] < rank[v]  <=>  (deg[u], u) < (deg[v], v)
    order = np.lexsort((np.arange(n), deg_np))
    rank_np = np.empty(n, dtype=np.int64)
    rank_np[order] = np.arange(n, dtype=np.int64)
    cdef int64_t[::1] rank = rank_np
    cdef int64_t[::1] fptr = np.zeros(n + 1, dtype=np.int64)
    cdef int32_t[::1] fidx
    cdef int32_t[::1] mark = np.full(max(n, 1), -1, dtype=np.int32)
    cdef Py_ssize_t u, pos
    cdef int32_t v, w
    cdef int64_t e, f, k
    with nogil:
        for u in range(n):
            k = 0
            for e in range(indptr[u], indptr[u + 1]):
                if rank[indices[e]] > rank[u]:
                    k += 1
            fptr[u + 1] = fptr[u] + k
    fidx = np.empty(max(fptr[n], 1), dtype=np.int32)
    with nogil:
        for u in range(n):
            pos = fptr[u]
            for e in range(indptr[u], indptr[u + 1]):
                if rank[indices[e]] > rank[u]:
                    fidx[pos] = indices[e]
                    pos += 1
        for u in range(n):
            for e in range(fptr[u], fptr[u + 1]):
                mark[fidx[e]] = <int32_t>u
            for e in range(fptr[u], fptr[u + 1]):
                v = fidx[e]
                for f in range(fptr[v], fptr[v + 1]):
                    w = fidx[f]
                    if mark[w] == u:
                        tri[u] += 1
                        tri[v] += 1
                        tri[w] += 1
    return tri_arr


def bfs_pair_stats(const int64_t[::1] indptr, const int32_t[::1] indices):
    """BFS from every node of a symmetric graph.

    Returns ``(reached, dist_sum, ecc)`` per source, excluding the source itself.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    reached_arr = np.zeros(n, dtype=np.int64)
    dsum_arr = np.zeros(n, dtype=np.int64)
    ecc_arr = np.zeros(n, dtype=np.int32)
    cdef int64_t[::1] reached = reached_arr
    cdef int64_t[::1] dsum = dsum_arr
    cdef int32_t[::1] ecc = ecc_arr
    cdef int32_t[::1] dist = np.full(max(n, 1), -1, dtype=np.int32)
    cdef int32_t[::1] queue = np.empty(max(n, 1), dtype=np.int32)
    cdef Py_ssize_t s, head, tail, i
    cdef int32_t v, w
    cdef int64_t e
    with nogil:
        for s in range(n):
            dist[s] = 0
            queue[0] = <int32_t>s
            head = 0
            tail = 1
            while head < tail:
                v = queue[head]
                head += 1
                for e in range(indptr[v], indptr[v + 1]):
                    w = indices[e]
                    if dist[w] == -1:
                        dist[w] = dist[v] + 1
                        queue[tail] = w
                        tail += 1
            for i in range(1, tail):
                dsum[s] += dist[queue[i]]
            reached[s] = tail - 1
            ecc[s] = dist[queue[tail - 1]]
            for i in range(tail):
                dist[queue[i]] = -1
    return reached_arr, dsum_arr, ecc_arr
