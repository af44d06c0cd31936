"""Compiled graph traversal kernels (numba).

All kernels take a CSR adjacency ``(indptr, indices)`` over integer node ids
and run sequentially so floating point sums are reproduced bit for bit.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def brandes(indptr, indices, n, sources):
    """Unweighted Brandes dependency accumulation from ``sources``.

    Returns (betweenness, farness per source, reachable count per source).
    Betweenness is the raw (unscaled) sum over the given sources.
    """
    bc = np.zeros(n)
    far = np.zeros(sources.shape[0])
    reach = np.zeros(sources.shape[0], np.int64)
    dist = np.full(n, -1, np.int64)
    sigma = np.zeros(n)
    delta = np.zeros(n)
    order = np.empty(n, np.int64)
    for si in range(sources.shape[0]):
        s = sources[si]
        dist[s] = 0
        sigma[s] = 1.0
        order[0] = s
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            dv = dist[v]
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if dist[w] < 0:
                    dist[w] = dv + 1
                    order[tail] = w
                    tail += 1
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
        total = 0
        for i in range(1, tail):
            total += dist[order[i]]
        far[si] = total
        reach[si] = tail - 1
        for i in range(tail - 1, -1, -1):
            w = order[i]
            dw = dist[w]
            sw = sigma[w]
            acc = 0.0
            for e in range(indptr[w], indptr[w + 1]):
                x = indices[e]
                if dist[x] == dw + 1:
                    acc += sw / sigma[x] * (1.0 + delta[x])
            delta[w] = acc
            if w != s:
                bc[w] += acc
        for i in range(tail):
            w = order[i]
            dist[w] = -1
            sigma[w] = 0.0
            delta[w] = 0.0
    return bc, far, reach


@njit(cache=True)
def distance_sums_to(indptr, indices, n, targets):
    """BFS from each target over ``indices`` (pass the reversed graph to get
    distances *towards* the targets). Returns per-node distance sum and the
    number of targets reached, excluding each target's distance to itself.
    """
    sums = np.zeros(n)
    counts = np.zeros(n, np.int64)
    dist = np.full(n, -1, np.int64)
    order = np.empty(n, np.int64)
    for ti in range(targets.shape[0]):
        t = targets[ti]
        dist[t] = 0
        order[0] = t
        head = 0
        tail = 1
        while head < tail:
            v = order[head]
            head += 1
            for e in range(indptr[v], indptr[v + 1]):
                w = indices[e]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    order[tail] = w
                    tail += 1
        for i in range(1, tail):
            w = order[i]
            sums[w] += dist[w]
            counts[w] += 1
        for i in range(tail):
            dist[order[i]] = -1
    return sums, counts


@njit(cache=True)
def core_numbers(indptr, indices, n):
    """Batagelj-Zaversnik O(m) core decomposition of a simple undirected graph."""
    deg = np.empty(n, np.int64)
    md = 0
    for v in range(n):
        deg[v] = indptr[v + 1] - indptr[v]
        if deg[v] > md:
            md = deg[v]
    bins = np.zeros(md + 1, np.int64)
    for v in range(n):
        bins[deg[v]] += 1
    start = 0
    for d in range(md + 1):
        num = bins[d]
        bins[d] = start
        start += num
    pos = np.empty(n, np.int64)
    vert = np.empty(n, np.int64)
    for v in range(n):
        pos[v] = bins[deg[v]]
        vert[pos[v]] = v
        bins[deg[v]] += 1
    for d in range(md, 0, -1):
        bins[d] = bins[d - 1]
    if md >= 0:
        bins[0] = 0
    for i in range(n):
        v = vert[i]
        for e in range(indptr[v], indptr[v + 1]):
            u = indices[e]
            if deg[u] > deg[v]:
                du = deg[u]
                pu = pos[u]
                pw = bins[du]
                w = vert[pw]
                if u != w:
                    pos[u] = pw
                    vert[pu] = w
                    pos[w] = pu
                    vert[pw] = u
                bins[du] += 1
                deg[u] -= 1
    return deg
