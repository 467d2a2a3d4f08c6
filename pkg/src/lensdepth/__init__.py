"""Lens depth and Fermat-weighted lens depth in general metric spaces."""

from .backend import backend_name
from .classify import (
    DepthFeatures,
    LabeledDataset,
    depth_depth_transform,
    knn_classify,
    misclassification_rate,
    raw_knn_classify,
    train_test_split,
)
from .datagen import (
    GeneratorSpec,
    gen_bivariate_exponential,
    gen_interlocking_rings,
    gen_ring_uniform,
    gen_two_moons,
    gen_wishart,
    generate,
    make_rng,
)
from .depth import (
    DepthConfig,
    DepthValue,
    batch_depth,
    empirical_lens_depth,
    empirical_wld,
    hoeffding_rate_check,
    lens_membership,
    level_set_grid,
    population_ld_oracle,
)
from .fermat import (
    DisconnectedGraphError,
    LandmarkGraph,
    QueryLengths,
    build_graph,
    fermat_scaling_diagnostic,
    lp_oracle,
    pair_length,
    query_lengths,
    query_lengths_batch,
)
from .metrics import (
    DimensionMismatchError,
    MetricSpace,
    NotSPDError,
    distance,
    euclidean_space,
    hausdorff_distance,
    pairwise_distances,
    precomputed_space,
    spd_distance,
    spd_geodesic_point,
    spd_space,
    validate_distance_matrix,
)

__version__ = "0.1.0"
