"""Benchmark the numba kernels against the pure-numpy fallback.

Covers the three hot paths: all-pairs shortest paths over the powered
complete graph, min-plus query attachment, and membership counting.

Run: python benchmarks/bench_kernels.py [--sizes 100 200 400] [--queries 200]
"""

import argparse
import time

import numpy as np

from lensdepth import _kernels_numpy as knp
from lensdepth.datagen import make_rng

try:
    from lensdepth import _kernels_numba as knb
    HAS_NUMBA = True
except ImportError:
    knb = None
    HAS_NUMBA = False


def timed(fn, *args, repeats=3):
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def apsp_pipeline(impl, w):
    out = impl.apsp_dense(w)
    out = np.minimum(out, out.T)
    np.fill_diagonal(out, 0.0)
    return impl.apsp_refine(out)


def bench_size(n, n_queries, p=2.0, seed=0):
    rng = make_rng(seed)
    pts = rng.random((n, 2))
    w = (np.linalg.norm(pts[:, None] - pts[None], axis=2) ** p)
    qpts = rng.random((n_queries, 2))
    wq = np.linalg.norm(qpts[:, None] - pts[None], axis=2) ** p

    print(f"\n--- n={n} sample points, {n_queries} queries, p={p} ---")
    t_np, apsp = timed(apsp_pipeline, knp, w.copy())
    rows = [("apsp (floyd-warshall numpy)", t_np, None)]
    if HAS_NUMBA:
        t_nb, apsp_nb = timed(apsp_pipeline, knb, w.copy())
        assert np.allclose(apsp, apsp_nb, rtol=1e-12)
        rows.append(("apsp (dijkstra numba)", t_nb, t_np / t_nb))

    t_np, lengths = timed(knp.minplus_lengths, wq, apsp)
    rows.append(("query min-plus (numpy)", t_np, None))
    if HAS_NUMBA:
        t_nb, lengths_nb = timed(knb.minplus_lengths, wq, apsp)
        assert np.array_equal(lengths, lengths_nb)
        rows.append(("query min-plus (numba)", t_nb, t_np / t_nb))

    t_np, (counts, _) = timed(knp.lens_count_batch, lengths, apsp, False)
    rows.append(("membership counts (numpy)", t_np, None))
    if HAS_NUMBA:
        t_nb, (counts_nb, _) = timed(knb.lens_count_batch, lengths, apsp, False)
        assert np.array_equal(counts, counts_nb)
        rows.append(("membership counts (numba)", t_nb, t_np / t_nb))

    for name, seconds, speedup in rows:
        extra = f"  ({speedup:.1f}x vs numpy)" if speedup else ""
        print(f"{name:<34}{seconds * 1e3:>10.2f} ms{extra}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400])
    ap.add_argument("--queries", type=int, default=200)
    args = ap.parse_args()

    if HAS_NUMBA:
        # compile outside the timed region
        tiny = np.array([[0.0, 1.0], [1.0, 0.0]])
        apsp_pipeline(knb, tiny.copy())
        knb.minplus_lengths(tiny.copy(), tiny.copy())
        knb.lens_count_batch(tiny.copy(), tiny.copy(), False)
    else:
        print("numba unavailable; timing the numpy path only")

    for n in args.sizes:
        bench_size(n, args.queries)


if __name__ == "__main__":
    main()
