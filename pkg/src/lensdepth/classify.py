"""Depth-depth classification: per-class depth features plus a built-in
nearest-neighbour second stage.

Each query point maps to its vector of depths, one coordinate per
(class, depth-config) pair. Any off-the-shelf classifier can then run in
that low-dimensional space; the built-in one is a deterministic k-NN
vote (features export to CSV for external second stages).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .depth import batch_depth_arrays
from .fermat import build_graph
from .metrics import MetricSpace, as_sample, cross_distances, pairwise_distances


@dataclass(frozen=True)
class LabeledDataset:
    """Points plus class labels in a shared metric space."""

    points: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    space: MetricSpace

    def __post_init__(self):
        pts = as_sample(self.space, self.points)
        labels = np.asarray(self.labels)
        if len(pts) != len(labels):
            raise ValueError(
                f"{len(pts)} points but {len(labels)} labels"
            )
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.labels)

    @property
    def classes(self):
        return np.unique(self.labels)

    def class_points(self, cls):
        return self.points[self.labels == cls]


@dataclass(frozen=True)
class DepthFeatures:
    """Per-query depth matrix, one column per (class, DepthConfig) pair."""

    queries: np.ndarray = field(repr=False)
    columns: tuple
    matrix: np.ndarray = field(repr=False)

    def column_names(self):
        return [f"depth_{cls}_{cfg.label()}" for cls, cfg in self.columns]


def _require_classification_ready(train):
    classes = train.classes
    if len(classes) < 2:
        raise ValueError("classification needs at least 2 classes")
    for cls in classes:
        count = int((train.labels == cls).sum())
        if count < 2:
            raise ValueError(
                f"class {cls!r} has {count} point(s); depth pairs need at least 2"
            )
    return classes


def depth_depth_transform(train, queries, configs, threads=1):
    """Depth of each query with respect to each class, per config.

    Columns are ordered class-major: for each class (sorted), one column
    per config. Base distance tables and landmark graphs are built once
    per class and shared across configs.
    """
    classes = _require_classification_ready(train)
    qs = as_sample(train.space, queries)
    columns = tuple((cls, cfg) for cls in classes for cfg in configs)
    matrix = np.empty((len(qs), len(columns)))
    col = 0
    for cls in classes:
        pts = train.class_points(cls)
        base = pairwise_distances(train.space, pts)
        graphs = {}
        for cfg in configs:
            graph = None
            if cfg.kind == "wld":
                key = (cfg.p, cfg.sparsification)
                if key not in graphs:
                    graphs[key] = build_graph(
                        pts, train.space, cfg.p, cfg.sparsification, base=base
                    )
                graph = graphs[key]
            values, _, _ = batch_depth_arrays(
                qs, pts, train.space, cfg, threads, graph=graph, base=base
            )
            matrix[:, col] = values
            col += 1
    return DepthFeatures(qs, columns, matrix)


def _vote(dists, train_labels, k, classes):
    """Majority vote over the k nearest columns of a distance matrix.

    Neighbour ranking breaks distance ties by smallest index; label ties
    go to the smallest class identifier (classes come in sorted).
    """
    if not 1 <= k <= dists.shape[1]:
        raise ValueError(f"k must be in [1, {dists.shape[1]}], got {k}")
    order = np.argsort(dists, axis=1, kind="stable")[:, :k]
    neighbour_labels = train_labels[order]
    out = np.empty(dists.shape[0], dtype=classes.dtype)
    for i in range(dists.shape[0]):
        counts = np.array([(neighbour_labels[i] == c).sum() for c in classes])
        out[i] = classes[int(np.argmax(counts))]
    return out


def knn_classify(train_features, train_labels, test_features, k):
    """k-NN majority vote in euclidean depth-feature space."""
    if train_features.columns != test_features.columns:
        raise ValueError("train and test features have different column layouts")
    train_labels = np.asarray(train_labels)
    if len(train_labels) != len(train_features.matrix):
        raise ValueError("label count does not match the training feature rows")
    dists = cdist(test_features.matrix, train_features.matrix)
    return _vote(dists, train_labels, k, np.unique(train_labels))


def raw_knn_classify(train, test_points, k):
    """k-NN vote using the metric space's own distance (the baseline)."""
    _require_classification_ready(train)
    test = as_sample(train.space, test_points)
    dists = cross_distances(train.space, test, train.points)
    return _vote(dists, train.labels, k, train.classes)


def misclassification_rate(predicted, actual):
    """Fraction of mismatching labels."""
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape:
        raise ValueError("predicted and actual label arrays differ in shape")
    if predicted.size == 0:
        raise ValueError("cannot score an empty prediction set")
    return float((predicted != actual).mean())


def train_test_split(data, test_fraction, seed, stratified=False):
    """Deterministic split; stratified keeps class shares within one point."""
    from .datagen import make_rng

    if not 0.0 <= test_fraction <= 1.0:
        raise ValueError(f"test_fraction must be in [0, 1], got {test_fraction}")
    rng = make_rng(seed)
    n = len(data)
    if stratified:
        test_idx = []
        for cls in data.classes:
            cls_idx = np.nonzero(data.labels == cls)[0]
            perm = rng.permutation(len(cls_idx))
            take = int(round(test_fraction * len(cls_idx)))
            test_idx.append(cls_idx[perm[:take]])
        test_mask = np.zeros(n, dtype=bool)
        if test_idx:
            test_mask[np.concatenate(test_idx)] = True
    else:
        perm = rng.permutation(n)
        take = int(round(test_fraction * n))
        test_mask = np.zeros(n, dtype=bool)
        test_mask[perm[:take]] = True
    train = LabeledDataset(data.points[~test_mask], data.labels[~test_mask], data.space)
    test = LabeledDataset(data.points[test_mask], data.labels[test_mask], data.space)
    return train, test
