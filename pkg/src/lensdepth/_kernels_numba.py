"""Numba-jitted hot kernels.

Mirrors the contracts of ``_kernels_numpy``. Kernels are nopython and
nogil so batch drivers can shard work across threads; cache=True keeps
recompilation off the critical path after the first run.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def single_source(w, s):
    """Dijkstra from source ``s`` on a dense weight matrix.

    Array-scan variant: O(n) extraction per round, O(n^2) per source.
    On dense graphs this beats a binary heap, which would pay O(log n)
    per relaxation for no pruning benefit.
    """
    n = w.shape[0]
    dist = np.full(n, np.inf)
    done = np.zeros(n, np.bool_)
    dist[s] = 0.0
    for _ in range(n):
        u = -1
        best = np.inf
        for i in range(n):
            if not done[i] and dist[i] < best:
                best = dist[i]
                u = i
        if u < 0:
            break
        done[u] = True
        du = dist[u]
        row = w[u]
        for v in range(n):
            nd = du + row[v]
            if nd < dist[v]:
                dist[v] = nd
    return dist


@njit(cache=True, nogil=True)
def apsp_dense(w):
    """All-pairs shortest path sums: one single-source run per row."""
    n = w.shape[0]
    out = np.empty((n, n))
    for s in range(n):
        out[s] = single_source(w, s)
    return out


@njit(cache=True, nogil=True)
def apsp_refine(dist):
    """Min-plus sweeps to an exact floating-point fixpoint.

    Afterwards dist[i, j] <= dist[i, k] + dist[k, j] holds for the
    computed values themselves, keeping structural ties in the depth
    comparisons exact.
    """
    n = dist.shape[0]
    changed = True
    while changed:
        changed = False
        for k in range(n):
            col = dist[:, k].copy()
            row = dist[k]
            for i in range(n):
                ci = col[i]
                if ci == np.inf:
                    continue
                drow = dist[i]
                for j in range(n):
                    v = ci + row[j]
                    if v < drow[j]:
                        drow[j] = v
                        changed = True
    return dist


@njit(cache=True, nogil=True)
def minplus_lengths(wq, apsp):
    """Min-plus product: out[t, i] = min_j wq[t, j] + apsp[j, i]."""
    q, n = wq.shape
    out = np.empty((q, n))
    for t in range(q):
        row = out[t]
        for i in range(n):
            row[i] = np.inf
        for j in range(n):
            wj = wq[t, j]
            if wj == np.inf:
                continue
            arow = apsp[j]
            for i in range(n):
                v = wj + arow[i]
                if v < row[i]:
                    row[i] = v
    return out


@njit(cache=True, nogil=True)
def lens_count_batch(qvals, pairmat, closed):
    """Per-query lens membership counts plus exact-tie counts."""
    q, n = qvals.shape
    counts = np.zeros(q, np.int64)
    ties = np.zeros(q, np.int64)
    for t in range(q):
        c = 0
        tt = 0
        for i in range(n - 1):
            a = qvals[t, i]
            prow = pairmat[i]
            for j in range(i + 1, n):
                r = prow[j]
                b = qvals[t, j]
                if closed:
                    if a <= r and b <= r:
                        c += 1
                elif a < r and b < r:
                    c += 1
                if a == r or b == r:
                    tt += 1
        counts[t] = c
        ties[t] = tt
    return counts, ties
