"""Replicated classification benchmarks on the synthetic generators.

Each benchmark repeats generate -> split -> depth-depth transform ->
classify -> score. Replication r derives its data seed as seed + r and
its split seed from a disjoint offset, so replications are independent
but fully reproducible from the one seed.
"""

from dataclasses import dataclass

import numpy as np

from .classify import (
    depth_depth_transform,
    knn_classify,
    misclassification_rate,
    raw_knn_classify,
    train_test_split,
)
from .datagen import gen_interlocking_rings, gen_two_moons, gen_wishart_two_groups
from .depth import DepthConfig

_SPLIT_OFFSET = 2 ** 32


@dataclass(frozen=True)
class BenchReport:
    """Per-method misclassification rates over all replications."""

    example: str
    replications: int
    seed: int
    errors: dict  # method name -> np.ndarray of per-replication rates

    def mean(self, method):
        return float(self.errors[method].mean())

    def render(self):
        lines = [
            f"ddbench {self.example}: {self.replications} replication(s), seed {self.seed}",
            f"{'method':<26}{'mean error':>12}{'stdev':>10}",
        ]
        for name, errs in self.errors.items():
            sd = errs.std(ddof=1) if len(errs) > 1 else 0.0
            lines.append(f"{name:<26}{errs.mean():>12.4f}{sd:>10.4f}")
        return "\n".join(lines)


def _second_stage_k(n_train):
    return max(1, n_train // 10)


def _run_replication(data, feature_sets, test_fraction, split_seed, threads,
                     raw_k=None):
    train, test = train_test_split(data, test_fraction, split_seed, stratified=True)
    errors = {}
    if raw_k is not None:
        pred = raw_knn_classify(train, test.points, raw_k)
        errors["raw-knn"] = misclassification_rate(pred, test.labels)
    k = _second_stage_k(len(train))
    for name, configs in feature_sets.items():
        train_feats = depth_depth_transform(train, train.points, configs, threads)
        test_feats = depth_depth_transform(train, test.points, configs, threads)
        pred = knn_classify(train_feats, train.labels, test_feats, k)
        errors[name] = misclassification_rate(pred, test.labels)
    return errors


def _collect(example, reps, seed, make_data, feature_sets, test_fraction,
             threads, raw_k=None):
    acc = {name: np.empty(reps) for name in
           (["raw-knn"] if raw_k is not None else []) + list(feature_sets)}
    for r in range(reps):
        data = make_data(seed + r)
        errs = _run_replication(
            data, feature_sets, test_fraction, seed + r + _SPLIT_OFFSET, threads,
            raw_k=raw_k,
        )
        for name, e in errs.items():
            acc[name][r] = e
    return BenchReport(example, reps, seed, acc)


def bench_moons(reps, seed, n_per_group=100, noise_sd=0.1, test_fraction=0.25,
                threads=1):
    """Two-moons DD-G with WLD p=2 (plus the raw k-NN baseline)."""
    feature_sets = {"dd-wld-p2": [DepthConfig("wld", 2.0)]}
    def make_data(s):
        return gen_two_moons(n_per_group, noise_sd, s)
    return _collect("moons", reps, seed, make_data, feature_sets, test_fraction,
                    threads, raw_k=max(1, n_per_group // 10))


RINGS_P_FULL = (1.0, 1.5, 2.0, 3.0, 5.0, 10.0)


def bench_rings(reps, seed, n_per_group=300, test_fraction=0.3, threads=1):
    """Interlocking rings with the three stacked-p feature sets."""
    feature_sets = {
        "dd-p1": [DepthConfig("wld", 1.0)],
        "dd-p1-10": [DepthConfig("wld", p) for p in (1.0, 10.0)],
        "dd-p-full": [DepthConfig("wld", p) for p in RINGS_P_FULL],
    }
    def make_data(s):
        return gen_interlocking_rings(n_per_group, s)
    return _collect("rings", reps, seed, make_data, feature_sets, test_fraction,
                    threads, raw_k=max(1, n_per_group // 10))


WISHART_P = (1.0, 1.5, 2.0, 5.0)


def bench_wishart(reps, seed, n_per_group=300, k=5, m=10, scale2=2.0,
                  test_fraction=0.25, threads=1):
    """Two Wishart groups on the SPD cone, one DD-G method per p."""
    feature_sets = {
        f"dd-p{p:g}": [DepthConfig("wld", p)] for p in WISHART_P
    }
    def make_data(s):
        return gen_wishart_two_groups(n_per_group, k, m, scale2, s)
    return _collect("wishart", reps, seed, make_data, feature_sets, test_fraction,
                    threads, raw_k=max(1, n_per_group // 10))


BENCHES = {"moons": bench_moons, "rings": bench_rings, "wishart": bench_wishart}
