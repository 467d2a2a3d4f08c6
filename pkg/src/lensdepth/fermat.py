"""Power-weighted shortest-path structure over a sample.

A :class:`LandmarkGraph` freezes a sample, raises its pairwise base
distances to the power p, and stores the all-pairs table of minimal
path-weight sums (the empirical Fermat lengths among sample points).
Queries attach with fresh edges and are never intermediates on
sample-to-sample paths, so one min-plus pass against the cached table
answers every query.
"""

import hashlib
import itertools
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import backend
from .metrics import MetricSpace, as_sample, cross_distances, distance, pairwise_distances

APSP_MAGIC = b"LPAPSP01"


class DisconnectedGraphError(ValueError):
    """k-NN sparsification left the graph in several components."""

    def __init__(self, components):
        self.components = components
        super().__init__(
            f"k-NN graph is disconnected ({components} components); "
            "raise k or use the complete graph"
        )


@dataclass(frozen=True)
class LandmarkGraph:
    """Frozen sample with its powered-distance shortest-path table.

    ``apsp[i, j]`` is the minimal sum of p-th powers of base distances
    over landmark chains from sample point i to j. ``sparsification`` is
    None for the complete graph or k for the symmetrized k-NN edge set.
    Immutable once built; safe for concurrent reads.
    """

    sample: np.ndarray = field(repr=False)
    space: MetricSpace
    p: float
    sparsification: int | None
    base: np.ndarray = field(repr=False)
    apsp: np.ndarray = field(repr=False)

    @property
    def n(self):
        return len(self.sample)


@dataclass(frozen=True)
class QueryLengths:
    """Per-sample-point minimal powered path lengths from one query."""

    query: np.ndarray
    lengths: np.ndarray


def _knn_weights(base, p, k):
    """Powered weights on the symmetrized k-NN edge set, inf elsewhere."""
    n = base.shape[0]
    if not 1 <= k < n:
        raise ValueError(f"knn sparsification needs 1 <= k < n, got k={k}, n={n}")
    masked = base.copy()
    np.fill_diagonal(masked, np.inf)  # ties at duplicates must not eat the self slot
    order = np.argsort(masked, axis=1, kind="stable")
    keep = np.zeros((n, n), dtype=bool)
    rows = np.repeat(np.arange(n), k)
    cols = order[:, :k].ravel()
    keep[rows, cols] = True
    keep |= keep.T
    w = np.where(keep, base, np.inf) ** p
    np.fill_diagonal(w, np.inf)
    return w, keep


def build_graph(sample, space, p, sparsification=None, base=None, cache_dir=None):
    """Build the landmark graph for ``sample`` under power ``p``.

    ``base`` may supply precomputed pairwise base distances (reused when
    several p values share one sample). ``cache_dir`` enables the binary
    apsp cache keyed by (sample, p, sparsification).
    """
    pts = as_sample(space, sample)
    if len(pts) == 0:
        raise ValueError("sample must be non-empty")
    if p < 1:
        raise ValueError(f"power parameter must be >= 1, got {p}")
    p = float(p)
    if base is None:
        base = pairwise_distances(space, pts)
    else:
        base = np.asarray(base, dtype=np.float64)
        if base.shape != (len(pts), len(pts)):
            raise ValueError("base distance matrix shape does not match the sample")

    if cache_dir is not None:
        cached = load_apsp_cache(pts, space, p, sparsification, cache_dir)
        if cached is not None:
            return LandmarkGraph(pts, space, p, sparsification, base, cached)

    if sparsification is None:
        weights = base ** p
    else:
        weights, keep = _knn_weights(base, p, int(sparsification))
        ncomp, _ = connected_components(csr_matrix(keep), directed=False)
        if ncomp > 1:
            raise DisconnectedGraphError(ncomp)
    apsp = backend.apsp_table(weights)

    graph = LandmarkGraph(pts, space, p, sparsification, base, apsp)
    if cache_dir is not None:
        save_apsp_cache(graph, cache_dir)
    return graph


def _attach_weights(graph, queries):
    """Powered attachment weights of queries to the sample (inf = no edge)."""
    dxq = cross_distances(graph.space, queries, graph.sample)
    wq = dxq ** graph.p
    if graph.sparsification is not None:
        k = graph.sparsification
        order = np.argsort(dxq, axis=1, kind="stable")[:, :k]
        masked = np.full_like(wq, np.inf)
        rows = np.repeat(np.arange(wq.shape[0]), k)
        masked[rows, order.ravel()] = wq[rows, order.ravel()]
        wq = masked
    return wq


def query_lengths_batch(graph, queries, threads=1):
    """Minimal powered path lengths from each query to each sample point.

    Row t is min(d(x_t, X_i)^p, min_j d(x_t, X_j)^p + apsp[j, i]): a path
    from the query enters the sample at some first hop and the apsp table
    already encodes optimal travel inside the sample.
    """
    wq = _attach_weights(graph, queries)
    q = wq.shape[0]
    threads = max(1, int(threads))
    if threads == 1 or q < 2 * threads:
        return backend.minplus(wq, graph.apsp)
    bounds = np.linspace(0, q, threads + 1).astype(int)
    blocks = [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    out = np.empty_like(wq)
    def run(block):
        lo, hi = block
        out[lo:hi] = backend.minplus(wq[lo:hi], graph.apsp)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        list(ex.map(run, blocks))
    return out


def query_lengths(graph, x):
    """Single-query convenience wrapper around :func:`query_lengths_batch`."""
    xs = as_sample(graph.space, x)
    lengths = query_lengths_batch(graph, xs)[0]
    return QueryLengths(query=xs[0], lengths=lengths)


def lp_oracle(points, x, y, p, space):
    """Exact minimal powered path sum by exhaustive path enumeration.

    Test-only brute force over every sequence of distinct intermediates
    drawn from ``points`` (optimal paths are simple because weights are
    positive). Limited to |points| + 2 <= 10 nodes.
    """
    pts = as_sample(space, points) if len(points) else None
    m = 0 if pts is None else len(pts)
    if m + 2 > 10:
        raise ValueError(f"lp_oracle enumerates at most 10 nodes, got {m + 2}")
    xa = as_sample(space, x)
    ya = as_sample(space, y)
    if m == 0:
        return float(cross_distances(space, xa, ya)[0, 0] ** p)
    nodes = np.concatenate([xa, pts, ya], axis=0)
    wp = cross_distances(space, nodes, nodes) ** p
    best = wp[0, m + 1]
    for r in range(1, m + 1):
        perms = np.array(list(itertools.permutations(range(1, m + 1), r)))
        cost = wp[0, perms[:, 0]]
        for i in range(r - 1):
            cost = cost + wp[perms[:, i], perms[:, i + 1]]
        cost = cost + wp[perms[:, -1], m + 1]
        best = min(best, cost.min())
    return float(best)


def pair_length(sample, space, p, x, y):
    """L_p between two probe points through a landmark sample.

    Single shortest-path run on the complete graph over the sample plus
    both probes (probes attach with fresh edges; the direct probe-probe
    edge is included).
    """
    pts = as_sample(space, sample) if len(sample) else None
    xa = as_sample(space, x)
    ya = as_sample(space, y)
    dxy = cross_distances(space, xa, ya)[0, 0]
    if pts is None:
        return float(dxy ** p)
    n = len(pts)
    w = np.empty((n + 2, n + 2))
    w[:n, :n] = pairwise_distances(space, pts) ** p
    dx = cross_distances(space, xa, pts)[0] ** p
    dy = cross_distances(space, ya, pts)[0] ** p
    w[n, :n] = dx
    w[:n, n] = dx
    w[n + 1, :n] = dy
    w[:n, n + 1] = dy
    w[n, n + 1] = w[n + 1, n] = dxy ** p
    w[n, n] = w[n + 1, n + 1] = 0.0
    return float(backend.shortest_from(w, n)[n + 1])


@dataclass(frozen=True)
class ScalingRow:
    """Rescaled probe length statistics at one sample size."""

    n: int
    mean: float
    stdev: float

    @property
    def relative_stdev(self):
        return self.stdev / self.mean if self.mean else np.inf


def fermat_scaling_diagnostic(space, sampler, p, sizes, trials, seed, x0, y0):
    """Monte-Carlo table of the rescaled probe length n**((p-1)/d) * L_p.

    ``sampler(rng, n)`` draws an i.i.d. sample; the probe pair (x0, y0)
    stays fixed. The rescaled statistic stabilizes as n grows (its limit
    constant has no closed form for p > 1, so only stabilization is
    checkable). Sample stdev uses ddof=1.
    """
    from .datagen import make_rng

    if distance(space, x0, y0) <= 0.0:
        raise ValueError("probe pair is degenerate (zero distance)")
    sizes = [int(n) for n in sizes]
    if any(n < 1 for n in sizes):
        raise ValueError("sample sizes must be >= 1")
    if trials < 2:
        raise ValueError("need at least 2 trials for a stdev")
    rng = make_rng(seed)
    d = space.dim
    rows = []
    for n in sizes:
        scale = float(n) ** ((p - 1.0) / d)
        vals = np.empty(trials)
        for t in range(trials):
            sample = sampler(rng, n)
            vals[t] = scale * pair_length(sample, space, p, x0, y0)
        rows.append(ScalingRow(n, float(vals.mean()), float(vals.std(ddof=1))))
    return rows


# --- binary apsp cache -------------------------------------------------------

def _cache_key(sample, space, p, sparsification):
    h = hashlib.sha256()
    h.update(space.kind.encode())
    h.update(struct.pack("<q", space.dim))
    if space.kind == "precomputed":
        h.update(np.ascontiguousarray(space.matrix).tobytes())
    h.update(np.ascontiguousarray(sample).tobytes())
    h.update(struct.pack("<d", float(p)))
    h.update(b"none" if sparsification is None else b"knn%d" % int(sparsification))
    return h.hexdigest()


def save_apsp_cache(graph, directory):
    """Write the apsp table to the cache; returns the file path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    key = _cache_key(graph.sample, graph.space, graph.p, graph.sparsification)
    path = directory / f"{key}.apsp"
    payload = (
        APSP_MAGIC
        + struct.pack("<Q", graph.n)
        + struct.pack("<d", graph.p)
        + graph.apsp.astype("<f8").tobytes()
    )
    path.write_bytes(payload)
    return path


def load_apsp_cache(sample, space, p, sparsification, directory):
    """Load a cached apsp table, or None on miss/corruption."""
    key = _cache_key(np.ascontiguousarray(sample), space, p, sparsification)
    path = Path(directory) / f"{key}.apsp"
    if not path.is_file():
        return None
    raw = path.read_bytes()
    head = len(APSP_MAGIC) + 8 + 8
    if len(raw) < head or raw[: len(APSP_MAGIC)] != APSP_MAGIC:
        return None
    (n,) = struct.unpack_from("<Q", raw, len(APSP_MAGIC))
    (cached_p,) = struct.unpack_from("<d", raw, len(APSP_MAGIC) + 8)
    if n != len(sample) or cached_p != float(p):
        return None
    body = np.frombuffer(raw, dtype="<f8", offset=head)
    if body.size != n * n:
        return None
    return body.reshape(n, n).astype(np.float64)
