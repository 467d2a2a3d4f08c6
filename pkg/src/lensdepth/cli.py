"""Command-line surface.

Subcommands: gen (synthetic datasets), depth (depth of query points),
levelset (depth over a 2-D grid), ddbench (replicated classification
benchmarks), validate (distance-matrix checks). Every subcommand is
deterministic given its full flag set including --seed.

Exit codes: 0 success, 1 input/runtime error (with a file:line[:col]
diagnostic for malformed CSVs), 2 usage error, 3 validate found
violations. LENSDEPTH_CACHE_DIR sets the apsp cache directory;
LENSDEPTH_BACKEND picks the kernel backend.
"""

import argparse
import os
import sys

import numpy as np

from . import io
from .bench import BENCHES
from .datagen import GeneratorSpec, generate
from .depth import DepthConfig, batch_depth_arrays, level_set_grid
from .fermat import DisconnectedGraphError, build_graph
from .metrics import (
    DimensionMismatchError,
    NotSPDError,
    euclidean_space,
    precomputed_space,
    spd_space,
    validate_distance_matrix,
)


def _out_stream(path):
    if path in (None, "-"):
        return sys.stdout
    return path


def _default_threads(value):
    if value is not None:
        return max(1, value)
    return os.cpu_count() or 1


def _add_common(p):
    p.add_argument("--seed", type=int, default=0, help="root seed (default 0)")
    p.add_argument("--out", default="-", help="output path, '-' for stdout")


def _add_depth_flags(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--ld", action="store_true", help="plain lens depth (default)")
    g.add_argument("--p", type=float, help="weighted lens depth with this power")
    p.add_argument("--tie", choices=("closed", "strict"),
                   help="tie rule (default: closed for LD, strict for WLD)")
    p.add_argument("--knn", type=int,
                   help="sparsify the landmark graph to k nearest neighbours")
    p.add_argument("--threads", type=int, help="worker cap (default: all cores)")


def _depth_config(args):
    if args.p is not None:
        return DepthConfig("wld", args.p, args.tie, args.knn)
    return DepthConfig("ld", tie_rule=args.tie)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="lensdepth",
        description="Lens depth and Fermat-weighted lens depth toolbox",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic dataset CSV")
    g.add_argument("family",
                   choices=("rings", "moons", "ring-uniform", "bexp", "wishart"))
    g.add_argument("--n", type=int, default=100,
                   help="points per group (rings, moons) or total (others)")
    g.add_argument("--noise-sd", type=float, default=0.1, help="moons noise level")
    g.add_argument("--rate", type=float, default=0.5,
                   help="rings radial exponential rate (default 1/2, mean 2)")
    g.add_argument("--k", type=int, default=5, help="wishart matrix size")
    g.add_argument("--m", type=int, default=10, help="wishart summand count")
    g.add_argument("--scale", type=float, default=1.0,
                   help="wishart covariance is scale * identity")
    g.add_argument("--label", help="constant label column for wishart output")
    _add_common(g)

    d = sub.add_parser("depth", help="depth of query points against a sample")
    d.add_argument("--data", required=True, help="sample file")
    d.add_argument("--queries", help="query file (default: the sample itself)")
    d.add_argument("--metric", choices=("euclidean", "spd", "precomputed"),
                   default="euclidean")
    d.add_argument("--dim", type=int, default=1,
                   help="declared intrinsic dimension for precomputed metrics")
    _add_depth_flags(d)
    _add_common(d)

    l = sub.add_parser("levelset", help="depth over a 2-D grid")
    l.add_argument("--data", required=True, help="2-D point file")
    l.add_argument("--bounds", type=float, nargs=4,
                   metavar=("XMIN", "XMAX", "YMIN", "YMAX"),
                   help="grid bounds (default: data bounding box + 10%%)")
    l.add_argument("--res", type=int, nargs=2, default=(50, 50),
                   metavar=("NX", "NY"), help="grid resolution (default 50 50)")
    _add_depth_flags(l)
    _add_common(l)

    b = sub.add_parser("ddbench", help="replicated depth-depth benchmarks")
    b.add_argument("example", choices=sorted(BENCHES))
    b.add_argument("--reps", type=int, default=10)
    b.add_argument("--n", type=int, help="points per group (default per example)")
    b.add_argument("--test-fraction", type=float,
                   help="validation share (default 0.3 rings, 0.25 otherwise)")
    b.add_argument("--threads", type=int, help="worker cap (default: all cores)")
    _add_common(b)

    v = sub.add_parser("validate", help="check a distance matrix CSV")
    v.add_argument("matrix", help="distance matrix file")
    v.add_argument("--triangle", action="store_true",
                   help="also run the O(n^3) triangle-inequality scan")
    return parser


def _cmd_gen(args):
    if args.family == "rings":
        spec = GeneratorSpec("interlocking-rings", args.n, args.seed,
                             {"rate": args.rate})
    elif args.family == "moons":
        spec = GeneratorSpec("two-moons", args.n, args.seed,
                             {"noise_sd": args.noise_sd})
    elif args.family == "ring-uniform":
        spec = GeneratorSpec("ring-uniform", args.n, args.seed)
    elif args.family == "bexp":
        spec = GeneratorSpec("bivariate-exponential", args.n, args.seed)
    else:
        spec = GeneratorSpec("wishart", args.n, args.seed,
                             {"k": args.k, "m": args.m, "scale": args.scale})
    result = generate(spec)
    comment = f"lensdepth gen {spec.describe()}"
    out = _out_stream(args.out)
    if spec.family == "wishart":
        labels = [args.label] * args.n if args.label is not None else None
        io.write_spd_csv(out, result, labels, comments=[comment])
    elif hasattr(result, "labels"):
        io.write_points_csv(out, result.points, result.labels, comments=[comment])
    else:
        io.write_points_csv(out, result, comments=[comment])
    return 0


def _load_sample(args):
    if args.metric == "euclidean":
        pts, labels = io.read_points_csv(args.data)
        return euclidean_space(pts.shape[1]), pts, labels
    if args.metric == "spd":
        mats, labels = io.read_spd_csv(args.data)
        return spd_space(mats.shape[1]), mats, labels
    matrix = io.read_distance_matrix_csv(args.data)
    space = precomputed_space(matrix, dim=args.dim)
    return space, np.arange(matrix.shape[0]), None


def _load_queries(args, space, sample):
    if args.queries is None:
        return sample
    if space.kind == "euclidean":
        pts, _ = io.read_points_csv(args.queries)
        return pts
    if space.kind == "spd-geodesic":
        mats, _ = io.read_spd_csv(args.queries)
        return mats
    pts, _ = io.read_points_csv(args.queries)
    return pts.ravel().astype(int)


def _cached_graph(sample, space, config):
    """Build the landmark graph through the apsp cache when configured."""
    cache_dir = os.environ.get("LENSDEPTH_CACHE_DIR")
    if config.kind != "wld" or not cache_dir:
        return None
    return build_graph(sample, space, config.p, config.sparsification,
                       cache_dir=cache_dir)


def _cmd_depth(args):
    space, sample, _ = _load_sample(args)
    queries = _load_queries(args, space, sample)
    config = _depth_config(args)
    values, pairs, ties = batch_depth_arrays(
        queries, sample, space, config, threads=_default_threads(args.threads),
        graph=_cached_graph(sample, space, config),
    )
    comment = (f"lensdepth depth kind={config.kind} p={config.p:g} "
               f"tie={config.resolved_tie_rule} pairs={pairs}")
    io.write_depth_csv(_out_stream(args.out), values, ties, comments=[comment])
    return 0


def _cmd_levelset(args):
    pts, _ = io.read_points_csv(args.data)
    if pts.shape[1] != 2:
        raise DimensionMismatchError("levelset requires 2-D point data")
    space = euclidean_space(2)
    bounds = args.bounds
    if bounds is None:
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        pad = 0.1 * (hi - lo)
        bounds = (lo[0] - pad[0], hi[0] + pad[0], lo[1] - pad[1], hi[1] + pad[1])
    config = _depth_config(args)
    grid = level_set_grid(pts, space, config, bounds, args.res,
                          threads=_default_threads(args.threads),
                          graph=_cached_graph(pts, space, config))
    comment = (f"lensdepth levelset kind={config.kind} p={config.p:g} "
               f"bounds={tuple(round(float(b), 6) for b in bounds)} res={tuple(args.res)}")
    io.write_levelset_csv(_out_stream(args.out), grid, comments=[comment])
    return 0


def _cmd_ddbench(args):
    kwargs = {"threads": _default_threads(args.threads)}
    if args.n is not None:
        kwargs["n_per_group"] = args.n
    if args.test_fraction is not None:
        kwargs["test_fraction"] = args.test_fraction
    report = BENCHES[args.example](args.reps, args.seed, **kwargs)
    text = report.render()
    if args.out in (None, "-"):
        print(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    return 0


def _cmd_validate(args):
    matrix = io.read_distance_matrix_csv(args.matrix)
    report = validate_distance_matrix(matrix, check_triangle=args.triangle)
    print(report.summary())
    return 0 if report.ok else 3


def main(argv=None):
    args = build_parser().parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "depth": _cmd_depth,
        "levelset": _cmd_levelset,
        "ddbench": _cmd_ddbench,
        "validate": _cmd_validate,
    }
    try:
        return handlers[args.command](args)
    except (io.CsvFormatError, DisconnectedGraphError, NotSPDError,
            DimensionMismatchError, ValueError, OSError) as exc:
        print(f"lensdepth: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
