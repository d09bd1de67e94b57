import numpy as np
import pytest

from fdepth import FunctionalSample
from fdepth.functional import (
    band_depth,
    estimate_derivative,
    fit_pca,
    graph_depth,
    grid_depth,
    halfgraph_depth,
    location_slope_depth,
    location_slope_sample,
    pc_depth,
    trapezoid_weights,
)
from fdepth.multivariate import halfspace_depth_1d, mahalanobis_depth, zonoid_depth


def _sample(x, grid=None):
    return FunctionalSample.from_array(np.asarray(x, dtype=float), grid=grid)


class TestGraphDepth:
    def test_constant_functions(self, rng):
        a = rng.standard_normal(9)
        cloud = _sample(np.repeat(a[:, None], 5, axis=1))
        for c in (-0.5, 0.0, a[3]):
            assert graph_depth(np.full(5, c), cloud) == halfspace_depth_1d(c, a)

    def test_above_maximum_somewhere(self, rng):
        x = rng.standard_normal((8, 6))
        z = np.median(x, axis=0)
        z[4] = x[:, 4].max() + 1
        assert graph_depth(z, _sample(x)) == 0.0

    def test_two_function_example(self):
        cloud = _sample([np.zeros(4), np.ones(4)])
        assert graph_depth(np.full(4, 0.5), cloud) == 0.5

    def test_permutation_of_grid(self, rng):
        x = rng.integers(-2, 3, size=(10, 7)).astype(float)
        z = rng.integers(-2, 3, size=(20, 7)).astype(float)
        perm = rng.permutation(7)
        before = graph_depth(z, _sample(x))
        after = graph_depth(z[:, perm], _sample(x[:, perm]))
        np.testing.assert_array_equal(before, after)

    @pytest.mark.parametrize("kind", ["halfspace", "mahalanobis", "zonoid"])
    def test_pointwise_scaling(self, rng, kind):
        x = rng.standard_normal((12, 6))
        z = rng.standard_normal((5, 6)) * 0.5
        a = rng.uniform(0.5, 2.0, size=6) * rng.choice([-1, 1], size=6)
        np.testing.assert_allclose(
            graph_depth(a * z, _sample(a * x), kind=kind), graph_depth(z, _sample(x), kind=kind), atol=1e-9
        )

    def test_bounded_by_every_cross_section(self, rng):
        x = rng.standard_normal((11, 5))
        z = rng.standard_normal(5) * 0.4
        gd = graph_depth(z, _sample(x))
        assert all(gd <= halfspace_depth_1d(z[j], x[:, j]) for j in range(5))

    def test_subset(self, rng):
        x = rng.standard_normal((9, 5))
        z = np.median(x, axis=0)
        z[0] = 100.0
        assert graph_depth(z, _sample(x)) == 0.0
        assert graph_depth(z, _sample(x), subset=[1, 2, 3, 4]) > 0

    def test_bivariate(self, gait2):
        depth = graph_depth(gait2.values, gait2)
        assert np.all((depth >= 1 / gait2.n) & (depth <= 1))

    def test_simplicial_rejected_for_bivariate(self, gait2):
        with pytest.raises(ValueError):
            graph_depth(gait2.values, gait2, kind="simplicial")


class TestHalfgraph:
    def test_matches_graph_depth(self, gait):
        np.testing.assert_array_equal(halfgraph_depth(gait.values, gait), graph_depth(gait.values, gait))

    def test_sample_functions_have_positive_depth(self, gait):
        depth = halfgraph_depth(gait.values, gait)
        assert depth.min() >= 1 / 39
        assert np.all(np.isin(np.round(depth * 39), np.arange(1, 21)))

    def test_shifted_copies(self):
        t = np.linspace(0, 1, 15)
        shape = np.sin(3 * t)
        n = 9
        x = shape[None, :] + np.arange(n)[:, None]
        cloud = _sample(x, t)
        depth = halfgraph_depth(np.median(x, axis=0), cloud)
        assert depth == pytest.approx(np.ceil(n / 2) / n)

    def test_rejects_bivariate(self, gait2):
        with pytest.raises(ValueError):
            halfgraph_depth(gait2.values, gait2)


class TestBand:
    def test_below_everything(self, rng):
        x = rng.standard_normal((5, 4))
        assert band_depth(x.min(axis=0) - 1, _sample(x)) == 0.0

    def test_two_ordered_functions(self):
        x = np.array([[0.0, 0.0, 0.0], [1.0, 2.0, 3.0]])
        assert band_depth(x[0], _sample(x)) == 1.0

    def test_middle_of_three(self):
        x = np.array([[0.0, 1.0, 2.0], [-1.0, -1.0, -1.0], [3.0, 3.0, 3.0]])
        assert band_depth(x[0], _sample(x)) == 1.0

    def test_needs_two_functions(self):
        with pytest.raises(ValueError):
            band_depth(np.zeros(3), _sample(np.zeros((1, 3))))

    def test_monotonicity_counterexample(self):
        # constant curves at levels 0..3; the depth along z* + s rises again
        cloud = _sample(np.repeat(np.arange(4.0)[:, None], 3, axis=1))
        ray = [band_depth(np.full(3, 1.0 + s), cloud) for s in (0.0, 0.5, 1.0)]
        assert ray == [5 / 6, 4 / 6, 5 / 6]
        assert ray[2] > ray[1]


class TestDerivative:
    def test_linear(self, rng):
        t = np.sort(rng.uniform(0, 5, 9))
        np.testing.assert_allclose(estimate_derivative(2 * t, t), 2.0, atol=1e-12)

    def test_constant(self):
        t = np.linspace(0, 1, 5)
        np.testing.assert_array_equal(estimate_derivative(np.full(5, 3.0), t), 0.0)

    def test_quadratic_uniform_grid(self):
        h = 0.25
        t = np.arange(6) * h
        est = estimate_derivative(t**2, t)
        np.testing.assert_allclose(est[1:-1], 2 * t[1:-1], atol=1e-12)
        assert est[0] == pytest.approx(2 * t[0] + h)
        assert est[-1] == pytest.approx(2 * t[-1] - h)

    def test_needs_three_points(self):
        with pytest.raises(ValueError):
            estimate_derivative([0.0, 1.0], [0.0, 1.0])

    def test_sample_input(self, gait):
        slopes = estimate_derivative(gait)
        assert isinstance(slopes, FunctionalSample) and slopes.values.shape == gait.values.shape


class TestLocationSlope:
    def test_shared_slope_reduces_to_intercepts(self, rng):
        # dyadic values keep the difference quotients exact, so all pairs
        # are exactly collinear
        t = np.arange(6) / 4
        a = rng.integers(-16, 17, size=8) / 8
        x = a[:, None] + 1.5 * t[None, :]
        for c in (a[2], 0.125, -3.0):
            assert location_slope_depth(c + 1.5 * t, _sample(x, t)) == halfspace_depth_1d(c, a)

    def test_data_functions_at_least_one_over_n(self, gait):
        depth = location_slope_depth(gait.values, gait)
        assert depth.min() >= 1 / gait.n

    def test_pairs_sample(self, gait):
        pairs = location_slope_sample(gait)
        assert pairs.d == 2
        np.testing.assert_array_equal(pairs.values[:, :, 0], gait.values[:, :, 0])

    def test_rejects_simplicial(self, gait):
        with pytest.raises(ValueError):
            location_slope_depth(gait.values[0], gait, kind="simplicial")

    @pytest.mark.parametrize("kind", ["halfspace", "mahalanobis", "zonoid"])
    def test_multiplication_by_affine_weight(self, rng, kind):
        # affine data times an affine weight is quadratic, so interior
        # central differences are exact
        t = np.linspace(0, 1, 7)
        x = rng.standard_normal((10, 1)) + rng.standard_normal((10, 1)) * t
        z = 0.2 + 0.3 * t
        w = 1.5 - t
        interior = range(1, 6)
        before = location_slope_depth(z, _sample(x, t), interior, kind)
        after = location_slope_depth(w * z, _sample(w * x, t), interior, kind)
        assert after == pytest.approx(before, abs=1e-9)


class TestGridDepth:
    def test_single_point_is_cross_section(self, rng):
        x = rng.standard_normal((10, 5))
        z = rng.standard_normal(5)
        assert grid_depth(z, _sample(x), grid_points=[2], direction_count=4) == halfspace_depth_1d(z[2], x[:, 2])

    def test_data_functions(self, gait):
        depth = grid_depth(gait.values, gait, grid_points=[0, 5, 10, 15], direction_count=200)
        assert depth.min() >= 1 / gait.n

    def test_zonoid_mean(self, gait):
        mean = gait.values.mean(axis=0)
        assert grid_depth(mean, gait, grid_points=[0, 5, 10], kind="zonoid") == pytest.approx(1.0, abs=1e-9)

    def test_permutation_with_mirrored_directions(self, rng, gait):
        idx = np.array([1, 4, 9, 13])
        perm = rng.permutation(4)
        r = rng.standard_normal((300, 4))
        queries = gait.values[:6]
        a = grid_depth(queries, gait, grid_points=idx, directions=r)
        b = grid_depth(queries, gait, grid_points=idx[perm], directions=r[:, perm])
        np.testing.assert_array_equal(a, b)

    def test_deterministic(self, gait):
        a = grid_depth(gait.values[:3], gait, grid_points=[0, 7, 14], direction_count=100, seed=5)
        b = grid_depth(gait.values[:3], gait, grid_points=[0, 7, 14], direction_count=100, seed=5)
        np.testing.assert_array_equal(a, b)

    def test_invalid_indices(self, gait):
        with pytest.raises(ValueError):
            grid_depth(gait.values[0], gait, grid_points=[0, 99])


class TestPca:
    def test_rank_one(self):
        t = np.linspace(0, 1, 25)
        base, shape = np.cos(t), np.sin(2 * np.pi * t)
        x = base[None, :] + np.linspace(-2, 3, 8)[:, None] * shape[None, :]
        model = fit_pca(_sample(x, t), 2)
        assert model.eigenvalues[0] > 0
        assert model.eigenvalues[1] == pytest.approx(0.0, abs=1e-9)
        np.testing.assert_allclose(model.explained_variance_ratio, [1.0, 0.0], atol=1e-9)
        comp = model.components[0, :, 0]
        cos = comp @ shape / (np.linalg.norm(comp) * np.linalg.norm(shape))
        assert abs(cos) == pytest.approx(1.0, abs=1e-9)

    def test_orthonormal_under_weights(self, gait):
        model = fit_pca(gait, 4)
        w = trapezoid_weights(gait.grid)
        gram = np.einsum("akc,bkc,k->ab", model.components, model.components, w)
        np.testing.assert_allclose(gram, np.eye(4), atol=1e-9)

    def test_scores_centered_and_eigenvalues_sorted(self, gait2):
        model = fit_pca(gait2, 5)
        np.testing.assert_allclose(model.scores.mean(axis=0), 0.0, atol=1e-9)
        assert np.all(np.diff(model.eigenvalues) <= 0)

    def test_sign_convention(self, gait):
        comps = fit_pca(gait, 3).components.reshape(3, -1)
        assert np.all(comps[np.arange(3), np.argmax(np.abs(comps), axis=1)] > 0)

    def test_full_rank_reconstruction(self, rng):
        x = rng.standard_normal((5, 12))
        model = fit_pca(_sample(x), 4)
        np.testing.assert_allclose(model.inverse_transform(model.scores), x[:, :, None], atol=1e-9)

    def test_transform_matches_scores(self, gait):
        model = fit_pca(gait, 3)
        np.testing.assert_allclose(model.transform(gait.values), model.scores, atol=1e-12)

    def test_component_range(self, gait):
        with pytest.raises(ValueError):
            fit_pca(gait, gait.n)
        with pytest.raises(ValueError):
            fit_pca(gait, 0)


class TestPcDepth:
    def test_mean_curve_zonoid(self, gait):
        mean = gait.values.mean(axis=0)
        assert pc_depth(mean, gait, 3, kind="zonoid") == pytest.approx(1.0, abs=1e-9)

    def test_one_component(self, gait):
        model = fit_pca(gait, 1)
        s = model.scores[:, 0]
        expected = [halfspace_depth_1d(v, s) for v in s]
        np.testing.assert_array_equal(pc_depth(gait.values, gait, 1, direction_count=3), expected)

    @pytest.mark.parametrize("m", [2, 3])
    def test_mahalanobis_equals_score_depth(self, gait, m):
        model = fit_pca(gait, m)
        depth = pc_depth(gait.values[:5], gait, m, kind="mahalanobis", model=model)
        direct = [mahalanobis_depth(s, model.scores) for s in model.scores[:5]]
        np.testing.assert_allclose(depth, direct, atol=1e-6)

    def test_zonoid_equals_score_depth(self, gait):
        model = fit_pca(gait, 2)
        depth = pc_depth(gait.values[:3], gait, 2, kind="zonoid", model=model)
        direct = [zonoid_depth(s, model.scores) for s in model.scores[:3]]
        np.testing.assert_allclose(depth, direct, atol=1e-6)

    def test_translation(self, rng, gait):
        b = rng.standard_normal(gait.k)[:, None]
        shifted = gait.with_values(gait.values + b)
        a = pc_depth(gait.values, gait, 3, direction_count=300)
        c = pc_depth(gait.values + b, shifted, 3, direction_count=300)
        np.testing.assert_array_equal(a, c)
