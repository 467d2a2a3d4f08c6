"""Pure-numpy implementations of the hot kernels.

Same contracts as ``_kernels_numba``; selected via the LENSDEPTH_BACKEND
environment variable (see ``backend``). All-pairs shortest paths use the
vectorized Floyd-Warshall recurrence, which beats per-source scans in
plain numpy because the inner loop is a single array operation.
"""

import numpy as np


def apsp_dense(w):
    """All-pairs shortest path sums over a dense weight matrix.

    ``w`` is (n, n) symmetric nonnegative, ``inf`` marking absent edges.
    Returns the (n, n) matrix of minimal path-weight sums.
    """
    dist = w.astype(np.float64, copy=True)
    np.fill_diagonal(dist, 0.0)
    n = dist.shape[0]
    for k in range(n):
        np.minimum(dist, dist[:, k, None] + dist[None, k, :], out=dist)
    return dist


def apsp_refine(dist):
    """Run min-plus sweeps until the table is an exact fixpoint.

    At the fixpoint dist[i, j] <= dist[i, k] + dist[k, j] holds for the
    computed floating-point values themselves, so downstream query
    attachment reproduces table entries exactly (structural ties in the
    depth comparisons stay exact instead of drifting by rounding).
    """
    n = dist.shape[0]
    while True:
        changed = False
        for k in range(n):
            cand = dist[:, k, None] + dist[None, k, :]
            if np.any(cand < dist):
                changed = True
                np.minimum(dist, cand, out=dist)
        if not changed:
            return dist


def single_source(w, s):
    """Shortest path sums from source ``s`` over dense weights ``w``."""
    n = w.shape[0]
    dist = np.full(n, np.inf)
    dist[s] = 0.0
    done = np.zeros(n, dtype=bool)
    masked = dist.copy()
    for _ in range(n):
        u = int(np.argmin(masked))
        if masked[u] == np.inf:
            break
        done[u] = True
        masked[u] = np.inf
        np.minimum(dist, dist[u] + w[u], out=dist)
        np.copyto(masked, dist, where=~done)
    return dist


def minplus_lengths(wq, apsp):
    """Min-plus product: out[t, i] = min_j wq[t, j] + apsp[j, i].

    ``wq`` holds per-query attachment weights (``inf`` where the query
    does not attach); ``apsp`` is the landmark table with zero diagonal,
    so the j = i term supplies the direct edge.
    """
    q, n = wq.shape
    out = np.full((q, n), np.inf)
    for j in range(n):
        np.minimum(out, wq[:, j, None] + apsp[None, j, :], out=out)
    return out


def lens_count_batch(qvals, pairmat, closed):
    """Count lens memberships per query row.

    For each row t of ``qvals`` counts pairs i < j with
    qvals[t, i] REL pairmat[i, j] and qvals[t, j] REL pairmat[i, j],
    REL being <= (closed) or < (strict). Also counts exact-tie hits
    (equality on either side), reported so users can judge the
    tie-free assumption on their data.
    """
    q, n = qvals.shape
    iu, ju = np.triu_indices(n, 1)
    pv = pairmat[iu, ju]
    counts = np.empty(q, dtype=np.int64)
    ties = np.empty(q, dtype=np.int64)
    for t in range(q):
        a = qvals[t, iu]
        b = qvals[t, ju]
        if closed:
            member = (a <= pv) & (b <= pv)
        else:
            member = (a < pv) & (b < pv)
        counts[t] = int(np.count_nonzero(member))
        ties[t] = int(np.count_nonzero((a == pv) | (b == pv)))
    return counts, ties
