"""Lens depth and weighted lens depth estimators.

Both empirical depths are order-2 U-statistics: the depth of a query is
the fraction of unordered sample pairs whose "lens" contains it. For
plain lens depth the lens is the intersection of the two closed balls of
common radius d(x1, x2); for the weighted variant the comparison runs on
powered shortest-path lengths from a :class:`~lensdepth.fermat.LandmarkGraph`.

Tie rules: the population definition uses closed balls, so LD defaults
to ``closed``; the empirical Fermat lens is defined with strict
inequalities, so WLD defaults to ``strict``. Exact-tie hits against the
pair radius are counted and reported (the tie-free assumption on the
data law cannot be verified, only witnessed).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import backend
from .fermat import build_graph, query_lengths_batch
from .metrics import as_sample, cross_distances, pairwise_distances, rowwise_distances

TIE_RULES = ("closed", "strict")


@dataclass(frozen=True)
class DepthConfig:
    """Which depth to compute and how.

    kind "ld" is plain lens depth; "wld" is the Fermat-weighted variant
    with power parameter ``p`` and optional k-NN sparsification of the
    landmark graph (ignored for LD). ``tie_rule`` of None picks the
    per-kind default (closed for LD, strict for WLD).
    """

    kind: str = "ld"
    p: float = 1.0
    tie_rule: str | None = None
    sparsification: int | None = None

    def __post_init__(self):
        if self.kind not in ("ld", "wld"):
            raise ValueError(f"unknown depth kind {self.kind!r}")
        if self.kind == "wld" and self.p < 1:
            raise ValueError(f"WLD power parameter must be >= 1, got {self.p}")
        if self.tie_rule is not None and self.tie_rule not in TIE_RULES:
            raise ValueError(f"tie_rule must be one of {TIE_RULES}")
        if self.kind == "ld":
            object.__setattr__(self, "sparsification", None)

    @property
    def resolved_tie_rule(self):
        if self.tie_rule is not None:
            return self.tie_rule
        return "closed" if self.kind == "ld" else "strict"

    def label(self):
        """Short name used in feature-column headers."""
        if self.kind == "ld":
            return "ld"
        return f"wld_{self.p:g}"


@dataclass(frozen=True)
class DepthValue:
    """A depth estimate with its pair bookkeeping.

    value * pair_count is the integer membership count; tie_count is the
    number of pairs where the query hit the pair radius exactly.
    """

    value: float
    pair_count: int
    tie_count: int = 0


def _pair_count(n):
    return n * (n - 1) // 2


def lens_membership(x, x1, x2, space, tie_rule="closed"):
    """Whether x lies in the lens determined by the pair (x1, x2).

    Closed rule: d(x, x1) <= d(x1, x2) and d(x, x2) <= d(x1, x2);
    strict replaces both comparisons by <.
    """
    if tie_rule not in TIE_RULES:
        raise ValueError(f"tie_rule must be one of {TIE_RULES}")
    r = cross_distances(space, x1, x2)[0, 0]
    a = cross_distances(space, x, x1)[0, 0]
    b = cross_distances(space, x, x2)[0, 0]
    if tie_rule == "closed":
        return bool(a <= r and b <= r)
    return bool(a < r and b < r)


def _ld_counts(queries, sample, space, tie_rule, base=None, threads=1):
    pts = as_sample(space, sample)
    if base is None:
        base = pairwise_distances(space, pts)
    dxq = cross_distances(space, queries, pts)
    closed = tie_rule == "closed"
    return _sharded_counts(dxq, base, closed, threads)


def _sharded_counts(qvals, pairmat, closed, threads=1):
    q = qvals.shape[0]
    threads = max(1, int(threads))
    if threads == 1 or q < 2 * threads:
        return backend.lens_counts(qvals, pairmat, closed)
    bounds = np.linspace(0, q, threads + 1).astype(int)
    blocks = [(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    counts = np.empty(q, dtype=np.int64)
    ties = np.empty(q, dtype=np.int64)
    def run(block):
        lo, hi = block
        counts[lo:hi], ties[lo:hi] = backend.lens_counts(qvals[lo:hi], pairmat, closed)
    with ThreadPoolExecutor(max_workers=threads) as ex:
        list(ex.map(run, blocks))
    return counts, ties


def empirical_lens_depth(x, sample, space, tie_rule="closed"):
    """U-statistic lens depth of one query against a sample (n >= 2)."""
    pts = as_sample(space, sample)
    n = len(pts)
    if n < 2:
        raise ValueError(f"lens depth needs at least 2 sample points, got {n}")
    counts, ties = _ld_counts(as_sample(space, x), pts, space, tie_rule)
    pairs = _pair_count(n)
    return DepthValue(counts[0] / pairs, pairs, int(ties[0]))


def empirical_wld(x, graph, tie_rule="strict"):
    """Weighted lens depth of one query against a built landmark graph.

    Membership of a pair (i1, i2) compares the query's powered path
    lengths to both endpoints against the endpoints' mutual apsp entry.
    """
    if tie_rule not in TIE_RULES:
        raise ValueError(f"tie_rule must be one of {TIE_RULES}")
    n = graph.n
    if n < 2:
        raise ValueError(f"weighted lens depth needs at least 2 sample points, got {n}")
    lengths = query_lengths_batch(graph, as_sample(graph.space, x))
    counts, ties = backend.lens_counts(lengths, graph.apsp, tie_rule == "closed")
    pairs = _pair_count(n)
    return DepthValue(counts[0] / pairs, pairs, int(ties[0]))


def batch_depth_arrays(queries, sample, space, config, threads=1, graph=None, base=None):
    """Array-result core of :func:`batch_depth`: (values, pair_count, ties).

    Builds the landmark graph (WLD) or the pairwise base table (LD) once
    and shards independent queries across ``threads`` workers.
    """
    pts = as_sample(space, sample)
    n = len(pts)
    if n < 2:
        raise ValueError(f"depth needs at least 2 sample points, got {n}")
    qs = as_sample(space, queries)
    pairs = _pair_count(n)
    if len(qs) == 0:
        empty = np.empty(0)
        return empty, pairs, np.empty(0, dtype=np.int64)
    closed = config.resolved_tie_rule == "closed"
    if config.kind == "ld":
        if base is None:
            base = pairwise_distances(space, pts)
        dxq = cross_distances(space, qs, pts)
        counts, ties = _sharded_counts(dxq, base, closed, threads)
    else:
        if graph is None:
            graph = build_graph(pts, space, config.p, config.sparsification, base=base)
        lengths = query_lengths_batch(graph, qs, threads)
        counts, ties = _sharded_counts(lengths, graph.apsp, closed, threads)
    return counts / pairs, pairs, ties


def batch_depth(queries, sample, space, config, threads=1):
    """Depth of each query point; elementwise equal to per-query calls."""
    values, pairs, ties = batch_depth_arrays(queries, sample, space, config, threads)
    return [DepthValue(float(v), pairs, int(t)) for v, t in zip(values, ties)]


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    stderr: float
    trials: int


def population_ld_oracle(x, sampler, space, trials, seed, tie_rule="closed"):
    """Monte-Carlo estimate of the population lens depth at x.

    Averages lens membership over ``trials`` independent pairs drawn
    from ``sampler(rng, n)``; the standard error is binomial.
    """
    from .datagen import make_rng

    if trials < 1:
        raise ValueError("trials must be >= 1")
    if tie_rule not in TIE_RULES:
        raise ValueError(f"tie_rule must be one of {TIE_RULES}")
    rng = make_rng(seed)
    x1 = sampler(rng, trials)
    x2 = sampler(rng, trials)
    xs = as_sample(space, x)
    r = rowwise_distances(space, x1, x2)
    a = cross_distances(space, xs, x1)[0]
    b = cross_distances(space, xs, x2)[0]
    if tie_rule == "closed":
        hits = (a <= r) & (b <= r)
    else:
        hits = (a < r) & (b < r)
    est = hits.mean()
    se = math.sqrt(est * (1.0 - est) / trials)
    return MonteCarloEstimate(float(est), se, int(trials))


@dataclass(frozen=True)
class LevelSetGrid:
    """Depth values over a rectangular grid; values[iy, ix] pairs with
    (xs[ix], ys[iy])."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray

    def rows(self):
        """(x, y, depth) triples, row-major in y then x."""
        for iy, y in enumerate(self.ys):
            for ix, x in enumerate(self.xs):
                yield float(x), float(y), float(self.values[iy, ix])


def level_set_grid(sample, space, config, bounds, resolution, threads=1, graph=None):
    """Evaluate a depth over a 2-D grid (euclidean planes only)."""
    if space.kind != "euclidean" or space.dim != 2:
        raise ValueError("level-set grids are defined for 2-D euclidean spaces only")
    nx, ny = int(resolution[0]), int(resolution[1])
    if nx < 2 or ny < 2:
        raise ValueError("grid resolution must be at least 2x2")
    xmin, xmax, ymin, ymax = (float(v) for v in bounds)
    xs = np.linspace(xmin, xmax, nx)
    ys = np.linspace(ymin, ymax, ny)
    gx, gy = np.meshgrid(xs, ys)
    nodes = np.column_stack([gx.ravel(), gy.ravel()])
    values, _, _ = batch_depth_arrays(nodes, sample, space, config, threads, graph=graph)
    return LevelSetGrid(xs, ys, values.reshape(ny, nx))


@dataclass(frozen=True)
class RateCheckRow:
    """Deviation summary of the empirical lens depth at one sample size."""

    n: int
    median_deviation: float
    max_deviation: float
    observed: dict
    bound: dict

    def passed(self, replications):
        """Observed tail fractions within the U-statistic Hoeffding bound
        (plus 3 binomial standard errors at the bound)."""
        for delta, frac in self.observed.items():
            b = min(self.bound[delta], 1.0)
            se = math.sqrt(b * (1.0 - b) / replications)
            if frac > b + 3.0 * se:
                return False
        return True


def hoeffding_rate_check(sampler, space, x, sizes, replications, seed,
                         deltas=(0.05, 0.1), population=None, pop_trials=10**6):
    """Check empirical-depth deviations against the order-2 U-statistic
    Hoeffding bound 2 exp(-2 floor(n/2) delta^2).

    ``population`` may supply a known LD(x); otherwise a Monte-Carlo
    oracle with ``pop_trials`` pairs is run first. Returns one row per
    sample size with median/max deviations and per-delta tail fractions.
    """
    from .datagen import make_rng

    if population is None:
        population = population_ld_oracle(x, sampler, space, pop_trials, seed + 1).value
    rng = make_rng(seed)
    xs = as_sample(space, x)
    rows = []
    for n in sizes:
        n = int(n)
        devs = np.empty(replications)
        for r in range(replications):
            pts = sampler(rng, n)
            counts, _ = _ld_counts(xs, pts, space, "closed")
            devs[r] = abs(counts[0] / _pair_count(n) - population)
        observed = {d: float((devs > d).mean()) for d in deltas}
        bound = {d: 2.0 * math.exp(-2.0 * (n // 2) * d * d) for d in deltas}
        rows.append(RateCheckRow(n, float(np.median(devs)), float(devs.max()),
                                 observed, bound))
    return rows
