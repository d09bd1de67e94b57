"""Randomized property checks driven by hypothesis."""

from math import comb

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fdepth import (
    FunctionalSample,
    graph_depth,
    halfspace_depth_1d,
    halfspace_depth_2d,
    mahalanobis_depth,
    region_envelope,
    simplicial_depth_1d,
    zonoid_depth,
)
from fdepth.io import load_dataset, save_dataset
from fdepth.oracles import oracle_halfspace

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])

small_ints = st.integers(-6, 6)


def int_cloud(n_min, n_max, d):
    return st.integers(n_min, n_max).flatmap(lambda n: arrays(np.int64, (n, d), elements=small_ints))


def finite_floats():
    return st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


class TestHalfspace:
    @SETTINGS
    @given(x=arrays(np.int64, st.integers(1, 30), elements=small_ints), z=small_ints)
    def test_1d_counting(self, x, z):
        expected = min(np.sum(x <= z), np.sum(x >= z)) / x.size
        assert halfspace_depth_1d(float(z), x.astype(float)) == expected

    @SETTINGS
    @given(x=int_cloud(1, 12, 2), z=arrays(np.int64, 2, elements=small_ints))
    def test_2d_matches_oracle_with_ties(self, x, z):
        # small integer grids produce many collinear and coincident points
        assert halfspace_depth_2d(z.astype(float), x.astype(float)) == oracle_halfspace(z, x)

    @SETTINGS
    @given(
        x=int_cloud(3, 12, 2),
        z=arrays(np.int64, 2, elements=small_ints),
        a=arrays(np.int64, (2, 2), elements=st.integers(-3, 3)),
        b=arrays(np.int64, 2, elements=small_ints),
    )
    def test_2d_affine_invariance(self, x, z, a, b):
        if round(np.linalg.det(a)) == 0:
            return
        # integer maps keep every coordinate exactly representable
        before = halfspace_depth_2d(z.astype(float), x.astype(float))
        after = halfspace_depth_2d((a @ z + b).astype(float), (x @ a.T + b).astype(float))
        assert after == before


class TestContinuousKinds:
    @SETTINGS
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(4, 15))
    def test_mahalanobis_affine_invariance(self, seed, n):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((n, 2))
        z = rng.standard_normal(2)
        a = rng.standard_normal((2, 2)) + 2 * np.eye(2)
        b = rng.standard_normal(2)
        expected = mahalanobis_depth(z, x)
        assert mahalanobis_depth(a @ z + b, x @ a.T + b) == pytest.approx(expected, rel=1e-8)

    @SETTINGS
    @given(seed=st.integers(0, 2**32 - 1), n=st.integers(3, 12), d=st.integers(1, 2))
    def test_zonoid_range_and_mean(self, seed, n, d):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((n, d))
        z = 2 * rng.standard_normal(d)
        assert 0.0 <= zonoid_depth(z, x) <= 1.0
        assert zonoid_depth(x.mean(axis=0), x) == pytest.approx(1.0, abs=1e-9)

    @SETTINGS
    @given(x=arrays(np.int64, st.integers(2, 20), elements=small_ints), z=small_ints)
    def test_simplicial_multiple_of_pair_count(self, x, z):
        value = simplicial_depth_1d(float(z), x.astype(float))
        pairs = comb(x.size, 2)
        assert 0.0 <= value <= 1.0
        assert abs(value * pairs - round(value * pairs)) < 1e-9


class TestFunctional:
    @SETTINGS
    @given(
        x=arrays(np.int64, (8, 5), elements=small_ints),
        z=arrays(np.int64, 5, elements=small_ints),
        b=arrays(np.int64, 5, elements=small_ints),
        lam=st.integers(1, 9),
    )
    def test_graph_depth_translation_and_scale(self, x, z, b, lam):
        cloud = FunctionalSample.from_array(x.astype(float))
        moved = FunctionalSample.from_array((lam * x + b).astype(float))
        assert graph_depth((lam * z + b).astype(float), moved) == graph_depth(z.astype(float), cloud)

    @SETTINGS
    @given(x=arrays(np.int64, (9, 4), elements=small_ints), a1=st.integers(1, 9), a2=st.integers(1, 9))
    def test_regions_nested(self, x, a1, a2):
        lo, hi = sorted((a1 / 9, a2 / 9))
        cloud = FunctionalSample.from_array(x.astype(float))
        outer = region_envelope(cloud, alpha=lo)
        inner = region_envelope(cloud, alpha=hi)
        for s_out, s_in in zip(outer.sections, inner.sections):
            if not s_in.empty:
                assert s_out.lo <= s_in.lo and s_in.hi <= s_out.hi


class TestIo:
    @settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
    @given(values=arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(2, 5)), elements=finite_floats()))
    def test_round_trip(self, tmp_path, values):
        k = values.shape[1]
        sample = FunctionalSample(np.arange(k) * 0.1, values[:, :, None])
        path = tmp_path / "data.csv"
        save_dataset(sample, path)
        loaded = load_dataset(path)
        np.testing.assert_array_equal(loaded.values, sample.values)
        np.testing.assert_array_equal(loaded.grid, sample.grid)
        assert list(loaded.ids) == list(sample.ids)
