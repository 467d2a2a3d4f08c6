import numpy as np
import pytest

from lensdepth.datagen import make_rng, sampler_uniform_box
from lensdepth.depth import (
    DepthConfig,
    batch_depth,
    batch_depth_arrays,
    empirical_lens_depth,
    empirical_wld,
    hoeffding_rate_check,
    lens_membership,
    level_set_grid,
    population_ld_oracle,
)
from lensdepth.fermat import build_graph, lp_oracle
from lensdepth.metrics import euclidean_space

LINE = euclidean_space(1)
PLANE = euclidean_space(2)


def line_points(*xs):
    return np.array(xs, dtype=float)[:, None]


def quadrature_ld_uniform01(x, cells=2000):
    """Midpoint 2-D quadrature of the lens indicator for Unif[0,1]."""
    u = (np.arange(cells) + 0.5) / cells
    uu, vv = np.meshgrid(u, u)
    r = np.abs(uu - vv)
    hit = (np.abs(x - uu) <= r) & (np.abs(x - vv) <= r)
    return hit.mean()


class TestLensMembership:
    def test_interior_point(self):
        assert lens_membership(
            line_points(2), line_points(0), line_points(3), LINE, "closed"
        )

    def test_endpoint_closed_vs_strict(self):
        x1, x2 = line_points(0), line_points(3)
        assert lens_membership(x1, x1, x2, LINE, "closed")
        assert not lens_membership(x1, x1, x2, LINE, "strict")

    def test_bad_tie_rule(self):
        with pytest.raises(ValueError):
            lens_membership(line_points(0), line_points(0), line_points(1), LINE, "open")

    @pytest.mark.parametrize("seed", range(5))
    def test_against_definition_scan(self, seed):
        rng = make_rng(seed)
        x1, x2 = rng.standard_normal((2, 2))
        r = np.linalg.norm(x1 - x2)
        for x in rng.standard_normal((20, 2)):
            want = np.linalg.norm(x - x1) <= r and np.linalg.norm(x - x2) <= r
            assert lens_membership(x, x1, x2, PLANE, "closed") == want


class TestEmpiricalLensDepth:
    def test_three_point_example(self):
        dv = empirical_lens_depth(line_points(2), line_points(0, 1, 3), LINE)
        assert dv.value == pytest.approx(2.0 / 3.0)
        assert dv.pair_count == 3

    def test_far_query_zero(self):
        dv = empirical_lens_depth(line_points(5), line_points(0, 1, 3), LINE)
        assert dv.value == 0.0

    def test_sample_point_query(self):
        dv = empirical_lens_depth(line_points(0), line_points(0, 1, 3), LINE)
        assert dv.value == pytest.approx(2.0 / 3.0)

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            empirical_lens_depth(line_points(0), line_points(1), LINE)

    def test_count_is_integer(self):
        rng = make_rng(1)
        pts = rng.standard_normal((17, 2))
        dv = empirical_lens_depth(rng.standard_normal(2), pts, PLANE)
        assert dv.value * dv.pair_count == round(dv.value * dv.pair_count)
        assert 0.0 <= dv.value <= 1.0

    def test_duplicate_points_allowed(self):
        # the duplicated pair has a zero-radius lens only its own location enters
        sample = line_points(0, 0, 1)
        assert empirical_lens_depth(line_points(0), sample, LINE).value == 1.0
        # 0.25 misses only the zero-radius lens of the duplicated pair
        assert empirical_lens_depth(line_points(0.25), sample, LINE).value == pytest.approx(2.0 / 3.0)

    def test_tie_count_reported(self):
        dv = empirical_lens_depth(line_points(2), line_points(0, 1, 3), LINE)
        # d(2,1)=1 equals d(0,1)=1 on the (0,1) pair
        assert dv.tie_count == 1


class TestEmpiricalWld:
    def test_worked_example_strict(self):
        g = build_graph(line_points(0, 1, 2), LINE, 2.0)
        dv = empirical_wld(np.array([0.9]), g, "strict")
        assert dv.value == pytest.approx(2.0 / 3.0)

    def test_far_query_zero(self):
        g = build_graph(line_points(0, 1, 2), LINE, 2.0)
        assert empirical_wld(np.array([100.0]), g).value == 0.0

    @pytest.mark.parametrize("tie_rule", ["closed", "strict"])
    def test_p1_equals_lens_depth(self, tie_rule):
        rng = make_rng(2)
        pts = rng.standard_normal((60, 2))
        g = build_graph(pts, PLANE, 1.0)
        for x in rng.standard_normal((10, 2)):
            wld = empirical_wld(x, g, tie_rule)
            ld = empirical_lens_depth(x, pts, PLANE, tie_rule)
            assert wld.value == ld.value

    @pytest.mark.parametrize("seed", range(6))
    @pytest.mark.parametrize("p", [1.5, 2.0])
    def test_matches_oracle_enumeration(self, seed, p):
        rng = make_rng(100 + seed)
        n = int(rng.integers(3, 8))
        pts = rng.standard_normal((n, 2))
        g = build_graph(pts, PLANE, p)
        x = rng.standard_normal(2)
        lengths = np.array([
            lp_oracle(np.delete(pts, i, axis=0), x, pts[i], p, PLANE)
            for i in range(n)
        ])
        count = 0
        for i in range(n):
            for j in range(i + 1, n):
                mutual = lp_oracle(np.delete(pts, [i, j], axis=0), pts[i], pts[j], p, PLANE)
                if lengths[i] < mutual and lengths[j] < mutual:
                    count += 1
        want = count / (n * (n - 1) / 2)
        assert empirical_wld(x, g, "strict").value == pytest.approx(want, abs=1e-12)

    def test_query_at_sample_point_uses_standard_formula(self):
        g = build_graph(line_points(0, 1, 2), LINE, 2.0)
        dv = empirical_wld(np.array([1.0]), g, "strict")
        # lengths (1, 0, 1); pairs (0,1): 1<1 false; (0,2): 1<2, 1<2 true; (1,2): 0<1, 1<1 false
        assert dv.value == pytest.approx(1.0 / 3.0)


class TestBatchDepth:
    def test_matches_per_query_ld(self):
        rng = make_rng(3)
        pts = rng.standard_normal((20, 2))
        values = batch_depth(pts, pts, PLANE, DepthConfig("ld"))
        for x, dv in zip(pts, values):
            assert dv.value == empirical_lens_depth(x, pts, PLANE).value

    def test_matches_per_query_wld(self):
        rng = make_rng(4)
        pts = rng.standard_normal((25, 2))
        qs = rng.standard_normal((100, 2))
        cfg = DepthConfig("wld", 2.0)
        values = batch_depth(qs, pts, PLANE, cfg)
        g = build_graph(pts, PLANE, 2.0)
        for x, dv in zip(qs, values):
            assert dv.value == empirical_wld(x, g).value

    def test_empty_queries(self):
        assert batch_depth(np.empty((0, 1)), line_points(0, 1), LINE, DepthConfig("ld")) == []

    def test_thread_invariance(self):
        rng = make_rng(5)
        pts = rng.standard_normal((30, 2))
        qs = rng.standard_normal((31, 2))
        cfg = DepthConfig("wld", 2.0)
        a, _, _ = batch_depth_arrays(qs, pts, PLANE, cfg, threads=1)
        b, _, _ = batch_depth_arrays(qs, pts, PLANE, cfg, threads=4)
        np.testing.assert_array_equal(a, b)


class TestProperties:
    @pytest.mark.parametrize("seed", range(5))
    def test_vanishing_at_infinity(self, seed):
        rng = make_rng(200 + seed)
        pts = rng.standard_normal((15, 2))
        diam = np.linalg.norm(pts[:, None] - pts[None], axis=2).max()
        x = pts[0] + np.array([3.0 * diam + 1.0, 0.0])
        assert empirical_lens_depth(x, pts, PLANE, "closed").value == 0.0
        assert empirical_lens_depth(x, pts, PLANE, "strict").value == 0.0
        for p in (1.0, 2.0):
            g = build_graph(pts, PLANE, p)
            assert empirical_wld(x, g, "strict").value == 0.0
            assert empirical_wld(x, g, "closed").value == 0.0

    @pytest.mark.parametrize("seed", range(5))
    def test_monotone_tie_rule(self, seed):
        rng = make_rng(300 + seed)
        pts = rng.standard_normal((20, 2))
        g = build_graph(pts, PLANE, 2.0)
        for x in np.concatenate([pts[:3], rng.standard_normal((3, 2))]):
            assert (
                empirical_lens_depth(x, pts, PLANE, "closed").value
                >= empirical_lens_depth(x, pts, PLANE, "strict").value
            )
            assert empirical_wld(x, g, "closed").value >= empirical_wld(x, g, "strict").value

    @pytest.mark.parametrize("seed", range(3))
    def test_isometry_invariance(self, seed):
        rng = make_rng(400 + seed)
        pts = rng.standard_normal((18, 2))
        x = rng.standard_normal(2)
        theta = rng.uniform(0, 2 * np.pi)
        rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        shift = rng.standard_normal(2)
        tpts = pts @ rot.T + shift
        tx = x @ rot.T + shift
        for cfg in (DepthConfig("ld"), DepthConfig("wld", 2.0)):
            before, _, _ = batch_depth_arrays(x[None], pts, PLANE, cfg)
            after, _, _ = batch_depth_arrays(tx[None], tpts, PLANE, cfg)
            assert abs(before[0] - after[0]) <= 1e-12

    @pytest.mark.parametrize("seed", range(3))
    def test_scale_invariance(self, seed):
        rng = make_rng(500 + seed)
        pts = rng.standard_normal((18, 2))
        x = rng.standard_normal(2)
        c = float(rng.uniform(0.2, 5.0))
        for cfg in (DepthConfig("ld"), DepthConfig("wld", 3.0)):
            before, _, _ = batch_depth_arrays(x[None], pts, PLANE, cfg)
            after, _, _ = batch_depth_arrays((c * x)[None], c * pts, PLANE, cfg)
            assert before[0] == after[0]

    def test_continuity_probe(self):
        rng = make_rng(600)
        pts = rng.standard_normal((40, 2))
        base = np.linalg.norm(pts[:, None] - pts[None], axis=2)
        x = np.array([0.3, -0.2])
        direction = np.array([1.0, 1.0]) / np.sqrt(2.0)
        dx = np.linalg.norm(x - pts, axis=1)
        iu, ju = np.triu_indices(len(pts), 1)
        diffs = []
        for k in range(1, 13):
            eps = 2.0 ** -k
            y = x + eps * direction
            dv_x = empirical_lens_depth(x, pts, PLANE)
            dv_y = empirical_lens_depth(y, pts, PLANE)
            near_boundary = (
                (np.abs(dx[iu] - base[iu, ju]) <= eps)
                | (np.abs(dx[ju] - base[iu, ju]) <= eps)
            )
            bound = near_boundary.sum() / len(iu)
            diff = abs(dv_x.value - dv_y.value)
            assert diff <= bound + 1e-15
            diffs.append(diff)
        assert diffs[-1] == 0.0


class TestPopulationOracle:
    def test_uniform01_center_matches_quadrature_and_closed_form(self):
        sampler = sampler_uniform_box(0.0, 1.0, 1)
        est = population_ld_oracle(np.array([0.5]), sampler, LINE, 200_000, seed=9)
        quad = quadrature_ld_uniform01(0.5)
        # exact value for Unif[0,1] is 2 x (1 - x)
        assert quad == pytest.approx(0.5, abs=2e-3)
        assert abs(est.value - quad) <= 3.0 * est.stderr + 2e-3

    def test_center_beats_tail_and_vanishes(self):
        sampler = sampler_uniform_box(0.0, 1.0, 1)
        center = population_ld_oracle(np.array([0.5]), sampler, LINE, 50_000, seed=10)
        tail = population_ld_oracle(np.array([0.99]), sampler, LINE, 50_000, seed=10)
        far = population_ld_oracle(np.array([5.0]), sampler, LINE, 50_000, seed=10)
        assert center.value >= tail.value
        assert far.value == 0.0

    def test_trials_validated(self):
        sampler = sampler_uniform_box(0.0, 1.0, 1)
        with pytest.raises(ValueError):
            population_ld_oracle(np.array([0.5]), sampler, LINE, 0, seed=1)


class TestLevelSetGrid:
    def test_grid_matches_batch_depth(self):
        rng = make_rng(700)
        pts = rng.standard_normal((30, 2))
        cfg = DepthConfig("ld")
        grid = level_set_grid(pts, PLANE, cfg, (-1, 1, -1, 1), (5, 4))
        nodes = np.array([[x, y] for _, y in zip(range(4), grid.ys) for x in grid.xs])
        gx, gy = np.meshgrid(grid.xs, grid.ys)
        nodes = np.column_stack([gx.ravel(), gy.ravel()])
        direct, _, _ = batch_depth_arrays(nodes, pts, PLANE, cfg)
        np.testing.assert_array_equal(grid.values.ravel(), direct)

    def test_all_far_nodes_zero(self):
        rng = make_rng(701)
        pts = rng.standard_normal((15, 2))
        grid = level_set_grid(pts, PLANE, DepthConfig("ld"), (100, 101, 100, 101), (3, 3))
        assert np.all(grid.values == 0.0)

    def test_unimodal_peak_near_center(self):
        rng = make_rng(702)
        pts = rng.standard_normal((120, 2))
        grid = level_set_grid(pts, PLANE, DepthConfig("ld"), (-3, 3, -3, 3), (13, 13))
        iy, ix = np.unravel_index(np.argmax(grid.values), grid.values.shape)
        assert abs(grid.xs[ix]) <= 1.0 and abs(grid.ys[iy]) <= 1.0

    def test_requires_2d(self):
        with pytest.raises(ValueError):
            level_set_grid(line_points(0, 1), LINE, DepthConfig("ld"), (0, 1, 0, 1), (3, 3))

    def test_resolution_validated(self):
        rng = make_rng(703)
        pts = rng.standard_normal((5, 2))
        with pytest.raises(ValueError):
            level_set_grid(pts, PLANE, DepthConfig("ld"), (0, 1, 0, 1), (1, 3))

    def test_rows_row_major_in_y_then_x(self):
        rng = make_rng(704)
        pts = rng.standard_normal((8, 2))
        grid = level_set_grid(pts, PLANE, DepthConfig("ld"), (0, 1, 0, 1), (2, 2))
        rows = list(grid.rows())
        assert [(r[0], r[1]) for r in rows] == [(0, 0), (1, 0), (0, 1), (1, 1)]


class TestHoeffdingRateCheck:
    def test_large_delta_never_exceeded(self):
        sampler = sampler_uniform_box(0.0, 1.0, 1)
        rows = hoeffding_rate_check(
            sampler, LINE, np.array([0.5]), [50], 30, seed=11,
            deltas=(1.0,), population=0.5,
        )
        assert rows[0].observed[1.0] == 0.0

    def test_deviation_medians_shrink(self):
        sampler = sampler_uniform_box(0.0, 1.0, 1)
        rows = hoeffding_rate_check(
            sampler, LINE, np.array([0.5]), [50, 200], 40, seed=12, population=0.5,
        )
        assert rows[1].median_deviation <= rows[0].median_deviation
        assert all(r.passed(40) for r in rows)

    def test_n500_tail_fraction_within_bound(self):
        sampler = sampler_uniform_box(0.0, 1.0, 1)
        rows = hoeffding_rate_check(
            sampler, LINE, np.array([0.5]), [500], 200, seed=13,
            deltas=(0.1,), population=0.5,
        )
        assert rows[0].bound[0.1] == pytest.approx(2.0 * np.exp(-5.0))
        assert rows[0].observed[0.1] <= rows[0].bound[0.1]


class TestDepthConfig:
    def test_defaults(self):
        assert DepthConfig("ld").resolved_tie_rule == "closed"
        assert DepthConfig("wld", 2.0).resolved_tie_rule == "strict"

    def test_ld_ignores_sparsification(self):
        assert DepthConfig("ld", sparsification=5).sparsification is None

    def test_validation(self):
        with pytest.raises(ValueError):
            DepthConfig("wld", 0.5)
        with pytest.raises(ValueError):
            DepthConfig("tukey")
        with pytest.raises(ValueError):
            DepthConfig("ld", tie_rule="open")

    def test_labels(self):
        assert DepthConfig("ld").label() == "ld"
        assert DepthConfig("wld", 1.5).label() == "wld_1.5"
        assert DepthConfig("wld", 10.0).label() == "wld_10"
