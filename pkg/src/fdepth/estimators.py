"""scikit-learn style wrappers around the functional depths."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from sklearn.base import BaseEstimator, OutlierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import functional as F
from .multivariate import DEFAULT_DIRECTIONS, KINDS
from .phi import DepthValue
from .regions import OutlierReport, deepest_functions, member_envelope, region_envelope
from .sample import FunctionalSample, as_queries, check_alpha

__all__ = ["METHODS", "resolve_config", "functional_depth", "FunctionalDepth", "FunctionalPCA"]

METHODS = ("graph", "halfgraph", "band", "locslope", "grid", "pc")
_GRAPH_TYPE = ("graph", "halfgraph", "band")


def resolve_config(method, mvdepth=None, d=None, n_components=None):
    """Check a method/depth combination and fill in the default depth.

    ``band`` forces simplicial and ``halfgraph`` forces halfspace, both for
    univariate functions only; ``locslope`` needs a bivariate depth; the
    simplicial depth is univariate.  Raises ``ValueError`` otherwise.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    forced = {"band": "simplicial", "halfgraph": "halfspace"}.get(method)
    if mvdepth is None:
        mvdepth = forced or "halfspace"
    if mvdepth not in KINDS:
        raise ValueError(f"unknown depth {mvdepth!r}; choose from {', '.join(KINDS)}")
    if forced and mvdepth != forced:
        raise ValueError(f"method {method!r} requires --mvdepth {forced}, got {mvdepth!r}")
    if method in ("band", "halfgraph") and d not in (None, 1):
        raise ValueError(f"method {method!r} needs univariate functions (d = 1)")
    if method == "locslope":
        if mvdepth == "simplicial":
            raise ValueError("method 'locslope' needs a bivariate depth (halfspace, mahalanobis, zonoid)")
        if d not in (None, 1):
            raise ValueError("method 'locslope' needs univariate functions (d = 1)")
    if method == "graph" and mvdepth == "simplicial" and d not in (None, 1):
        raise ValueError("simplicial depth is only available for d = 1")
    if method == "pc" and n_components is None:
        raise ValueError("method 'pc' needs the number of components")
    return mvdepth


def functional_depth(
    query,
    cloud,
    method="graph",
    mvdepth=None,
    subset=None,
    direction_count=DEFAULT_DIRECTIONS,
    seed=0,
    n_components=None,
    model=None,
):
    """Depths and attaining aspect labels of queries of shape (q, k, d).

    Returns
    -------
    depths : ndarray of shape (q,)
    labels : list of str
    """
    kind = resolve_config(method, mvdepth, cloud.d, n_components)
    if method == "band" and cloud.n < 2:
        raise ValueError("band depth needs at least 2 functions")
    if method in _GRAPH_TYPE:
        depth, labels, _ = F._graph(query, cloud, subset, kind)
    elif method == "locslope":
        depth, labels, _ = F._location_slope(query, cloud, subset, kind)
    elif method == "grid":
        depth, labels, _ = F._grid(query, cloud, subset, direction_count, seed, kind, None, None)
    else:
        depth, labels, _ = F._pc(query, cloud, n_components, direction_count, seed, kind, model, None)
    return np.asarray(depth, dtype=float), list(labels)


def _thread_count(n_jobs):
    if n_jobs is None:
        env = os.environ.get("FDEPTH_THREADS")
        n_jobs = int(env) if env else -1
    n_jobs = int(n_jobs)
    if n_jobs <= 0:
        n_jobs = os.cpu_count() or 1
    return n_jobs


def _as_sample(X, grid=None, ids=None):
    if isinstance(X, FunctionalSample):
        return X
    return FunctionalSample.from_array(X, grid=grid, ids=ids)


class FunctionalDepth(OutlierMixin, BaseEstimator):
    """Depth of functions with respect to a fitted reference sample.

    Parameters
    ----------
    method : {'graph', 'halfgraph', 'band', 'locslope', 'grid', 'pc'}, default='graph'
    mvdepth : {'halfspace', 'mahalanobis', 'zonoid', 'simplicial'}, optional
        Underlying multivariate depth; defaults to the one the method forces,
        else halfspace.
    subset : sequence of int, optional
        Grid indices: the time set T (graph-type, locslope) or the
        evaluation points (grid).
    direction_count : int, default=1000
        Sampled directions for grid and PC depth.
    seed : int, default=0
    n_components : int, optional
        Required for ``method='pc'``.
    alpha : float, default=0.05
        Level used by :meth:`predict`, :meth:`outliers` and :meth:`envelope`.
    loo : bool, default=False
        Leave-one-out depths for the training functions in
        :meth:`sample_depths` and :meth:`outliers`.
    n_jobs : int, optional
        Worker threads; falls back to ``FDEPTH_THREADS``, then all cores.

    Attributes
    ----------
    sample_ : FunctionalSample
    mvdepth_ : str
    pca_ : PcaModel or None
    """

    def __init__(
        self,
        method="graph",
        mvdepth=None,
        subset=None,
        direction_count=DEFAULT_DIRECTIONS,
        seed=0,
        n_components=None,
        alpha=0.05,
        loo=False,
        n_jobs=None,
    ):
        self.method = method
        self.mvdepth = mvdepth
        self.subset = subset
        self.direction_count = direction_count
        self.seed = seed
        self.n_components = n_components
        self.alpha = alpha
        self.loo = loo
        self.n_jobs = n_jobs

    def fit(self, X, y=None, grid=None, ids=None):
        """Store the reference sample.

        ``X`` is a :class:`FunctionalSample` or an array of shape (n, k) or
        (n, k, d) (then ``grid`` defaults to equispaced points on [0, 1]).
        """
        sample = _as_sample(X, grid, ids)
        self.mvdepth_ = resolve_config(self.method, self.mvdepth, sample.d, self.n_components)
        check_alpha(self.alpha)
        self.sample_ = sample
        self.pca_ = F.fit_pca(sample, self.n_components) if self.method == "pc" else None
        self.n_features_in_ = sample.k * sample.d
        return self

    def _compute(self, queries, cloud, model):
        return functional_depth(
            queries,
            cloud,
            self.method,
            self.mvdepth_,
            self.subset,
            self.direction_count,
            self.seed,
            self.n_components,
            model,
        )

    def _depths(self, X):
        check_is_fitted(self, "sample_")
        cloud = self.sample_
        queries, _ = as_queries(X, cloud.k, cloud.d)
        jobs = min(_thread_count(self.n_jobs), queries.shape[0])
        if jobs <= 1:
            return self._compute(queries, cloud, self.pca_)
        chunks = np.array_split(queries, jobs)
        with ThreadPoolExecutor(jobs) as pool:
            parts = list(pool.map(lambda c: self._compute(c, cloud, self.pca_), chunks))
        return np.concatenate([p[0] for p in parts]), [lab for p in parts for lab in p[1]]

    def score_samples(self, X):
        """Depth of each query function (higher means more central)."""
        return self._depths(X)[0]

    def depth_with_aspect(self, X):
        """List of ``(depth, aspect label)`` pairs, one per query."""
        depth, labels = self._depths(X)
        return [DepthValue(float(v), lab) for v, lab in zip(depth, labels)]

    def decision_function(self, X):
        """Depth minus alpha; negative for outlying functions."""
        return self.score_samples(X) - self.alpha

    def predict(self, X):
        """+1 for functions with depth >= alpha, -1 otherwise."""
        return np.where(self.score_samples(X) >= self.alpha, 1, -1)

    def sample_depths(self, loo=None):
        """Depths of the training functions (leave-in unless ``loo``)."""
        check_is_fitted(self, "sample_")
        loo = self.loo if loo is None else loo
        return self._sample_depths(loo)[0]

    def _sample_depths(self, loo):
        cloud = self.sample_
        if not loo:
            return self._depths(cloud.values)
        depth, labels = np.empty(cloud.n), []
        for i in range(cloud.n):
            rest = cloud.without(i)
            model = F.fit_pca(rest, self.n_components) if self.method == "pc" else None
            v, lab = self._compute(cloud.values[i : i + 1], rest, model)
            depth[i] = v[0]
            labels.extend(lab)
        return depth, labels

    def outliers(self, alpha=None):
        """:class:`OutlierReport` of training functions with depth below alpha."""
        alpha = self.alpha if alpha is None else alpha
        return OutlierReport.from_depths(self.sample_.ids, self.sample_depths(), alpha)

    def deepest(self):
        """Training functions of maximal depth, as ``(id, depth)`` pairs."""
        return deepest_functions(self.sample_, depths=self.sample_depths(loo=False))

    def envelope(self, alpha=None):
        """Central region at level alpha, one section per time point.

        Graph-type methods give the exact cross-sectional regions.  For the
        other methods the section is the hull of the training functions whose
        depth is at least alpha.
        """
        check_is_fitted(self, "sample_")
        alpha = check_alpha(self.alpha if alpha is None else alpha)
        if self.method in _GRAPH_TYPE:
            return region_envelope(self.sample_, self.subset, self.mvdepth_, alpha)
        return member_envelope(self.sample_, self.sample_depths(loo=False), alpha)


class FunctionalPCA(TransformerMixin, BaseEstimator):
    """Functional principal components with trapezoidal grid weights.

    Parameters
    ----------
    n_components : int, default=3

    Attributes
    ----------
    model_ : PcaModel
    components_ : ndarray of shape (m, k, d)
    mean_ : ndarray of shape (k, d)
    explained_variance_ : ndarray of shape (m,)
    explained_variance_ratio_ : ndarray of shape (m,)
    """

    def __init__(self, n_components=3):
        self.n_components = n_components

    def fit(self, X, y=None, grid=None):
        sample = _as_sample(X, grid)
        self.model_ = F.fit_pca(sample, self.n_components)
        self.components_ = self.model_.components
        self.mean_ = self.model_.mean_curve
        self.explained_variance_ = self.model_.eigenvalues
        self.explained_variance_ratio_ = self.model_.explained_variance_ratio
        self.n_features_in_ = sample.k * sample.d
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        if isinstance(X, FunctionalSample):
            X = X.values
        m = self.model_
        queries, _ = as_queries(X, m.grid.size, m.mean_curve.shape[1])
        return m.transform(queries)

    def inverse_transform(self, scores):
        check_is_fitted(self, "model_")
        return self.model_.inverse_transform(np.atleast_2d(scores))
