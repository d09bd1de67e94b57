"""Concrete functional depths: graph, half-graph, band, location-slope, grid and PC depth.

All functions take a :class:`~fdepth.sample.FunctionalSample` as the
reference cloud.  A query may be one function (shape ``(k, d)``, or ``(k,)``
when d = 1) or a stack of shape ``(q, k, d)``; a float is returned for one
function and an array for a stack.

The infima over infinite direction sets (grid and PC depth) are taken over
a finite sample of directions.  For the counting depths this sampled
minimum is an upper bound of the true infimum.  For depths that are
continuous in the projection (Mahalanobis, zonoid) the best sampled
directions are additionally polished by a local Nelder-Mead search, which
only ever lowers the value and can never go below the true infimum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .multivariate import DEFAULT_DIRECTIONS, MultivariateDepth, sample_directions
from .phi import _infimum, aspect_depths, time_point_aspects
from .sample import FunctionalSample, as_queries, check_grid

__all__ = [
    "as_kind",
    "graph_depth",
    "halfgraph_depth",
    "band_depth",
    "estimate_derivative",
    "location_slope_sample",
    "location_slope_depth",
    "grid_depth",
    "PcaModel",
    "fit_pca",
    "pc_depth",
    "trapezoid_weights",
]

REFINE_MAX_DIM = 10


def as_kind(kind):
    """Accept a depth kind name or a :class:`MultivariateDepth`."""
    if isinstance(kind, MultivariateDepth):
        return kind
    return MultivariateDepth(str(kind))


def _finish(values, single):
    return float(values[0]) if single else np.asarray(values, dtype=float)


# ---------------------------------------------------------------------------
# graph depths
# ---------------------------------------------------------------------------


def _graph(query, cloud, subset, kind):
    kind = as_kind(kind)
    if not kind.supports(cloud.d):
        raise ValueError(f"{kind.kind} depth does not support d={cloud.d}")
    queries, single = as_queries(query, cloud.k, cloud.d)
    aspects = time_point_aspects(cloud.grid, cloud.d, subset)
    depth, arg = _infimum(aspect_depths(queries, cloud, aspects, kind))
    return depth, [aspects.labels[i] for i in arg], single


def graph_depth(query, cloud, subset=None, kind="halfspace"):
    """Graph depth: minimum over t in T of ``D^d(z(t) | x^1(t), ..., x^n(t))``.

    Parameters
    ----------
    query : array_like
    cloud : FunctionalSample
    subset : sequence of int, optional
        Grid indices forming T; the full grid by default.
    kind : str or MultivariateDepth, default='halfspace'
    """
    depth, _, single = _graph(query, cloud, subset, kind)
    return _finish(depth, single)


def halfgraph_depth(query, cloud, subset=None):
    """Half-graph depth: graph depth with the univariate halfspace depth."""
    if cloud.d != 1:
        raise ValueError("half-graph depth needs univariate functions (d = 1)")
    return graph_depth(query, cloud, subset, "halfspace")


def band_depth(query, cloud, subset=None):
    """Band depth: graph depth with the univariate simplicial depth (closed intervals).

    Unlike the half-graph depth it is not monotone on rays.
    """
    if cloud.d != 1:
        raise ValueError("band depth needs univariate functions (d = 1)")
    if cloud.n < 2:
        raise ValueError("band depth needs at least 2 functions")
    return graph_depth(query, cloud, subset, "simplicial")


# ---------------------------------------------------------------------------
# location-slope depth
# ---------------------------------------------------------------------------


def estimate_derivative(values, grid=None):
    """First-derivative estimates on a grid.

    Central differences ``(x[j+1] - x[j-1]) / (t[j+1] - t[j-1])`` at interior
    points and first-order one-sided differences at both ends; exact for
    affine functions, and exact at interior points for quadratics on a
    uniform grid.

    Parameters
    ----------
    values : FunctionalSample or array_like
        A sample with d = 1, or an array whose last axis runs over the grid.
    grid : array_like, optional
        Required for array input.

    Returns
    -------
    FunctionalSample or ndarray
        Same type and shape as the input.
    """
    if isinstance(values, FunctionalSample):
        if values.d != 1:
            raise ValueError("derivative estimation needs d = 1")
        slopes = estimate_derivative(values.values[:, :, 0], values.grid)
        return FunctionalSample(values.grid, slopes[:, :, None], values.ids)
    if grid is None:
        raise ValueError("grid is required for array input")
    t = check_grid(grid)
    x = np.asarray(values, dtype=float)
    if x.shape[-1] != t.size:
        raise ValueError(f"grid mismatch: {t.size} grid points, values have {x.shape[-1]}")
    if t.size < 3:
        raise ValueError("derivative estimation needs k >= 3")
    out = np.empty_like(x)
    out[..., 1:-1] = (x[..., 2:] - x[..., :-2]) / (t[2:] - t[:-2])
    out[..., 0] = (x[..., 1] - x[..., 0]) / (t[1] - t[0])
    out[..., -1] = (x[..., -1] - x[..., -2]) / (t[-1] - t[-2])
    return out


def location_slope_sample(cloud):
    """The bivariate (value, slope) functions of a univariate sample."""
    if cloud.d != 1:
        raise ValueError("location-slope depth needs univariate functions (d = 1)")
    slopes = estimate_derivative(cloud).values
    return FunctionalSample(cloud.grid, np.concatenate([cloud.values, slopes], axis=2), cloud.ids)


def _location_slope_queries(query, cloud):
    queries, single = as_queries(query, cloud.k, 1)
    slopes = estimate_derivative(queries[:, :, 0], cloud.grid)[:, :, None]
    return np.concatenate([queries, slopes], axis=2), single


def _location_slope(query, cloud, subset, kind):
    kind = as_kind(kind)
    if kind.kind == "simplicial":
        raise ValueError("location-slope depth needs a bivariate depth (halfspace, mahalanobis, zonoid)")
    pairs = location_slope_sample(cloud)
    queries, single = _location_slope_queries(query, cloud)
    depth, labels, _ = _graph(queries, pairs, subset, kind)
    return depth, labels, single


def location_slope_depth(query, cloud, subset=None, kind="halfspace"):
    """Location-slope depth: minimum over t of ``D^2((z(t), z'(t)) | (X(t), X'(t)))``.

    Slopes of the query and of the cloud come from :func:`estimate_derivative`.
    """
    depth, _, single = _location_slope(query, cloud, subset, kind)
    return _finish(depth, single)


# ---------------------------------------------------------------------------
# direction infima (grid and PC depth)
# ---------------------------------------------------------------------------


def _project(r, coords):
    # coords (m, p, c); r (N, p) -> (N, m, c)
    return np.einsum("np,mpc->nmc", r, coords)


def _direction_depths(dirs, zq, xs, kind):
    images_q = _project(dirs, zq)
    images_x = _project(dirs, xs)
    if zq.shape[2] == 1:
        out = np.empty((dirs.shape[0], zq.shape[0]))
        step = max(1, 4_000_000 // max(1, zq.shape[0] * xs.shape[0]))
        for s in range(0, dirs.shape[0], step):
            out[s : s + step] = kind.univariate_batch(images_q[s : s + step, :, 0], images_x[s : s + step, :, 0])
        return out
    return np.stack([kind.depths(images_q[i], images_x[i]) for i in range(dirs.shape[0])])


def _refine(z, xs, start_dirs, kind):
    """Local minimization of the projected depth of one query over the sphere."""

    def f(r):
        norm = np.linalg.norm(r)
        if norm == 0:
            return 1.0
        r = (r / norm)[None, :]
        return float(_direction_depths(r, z[None], xs, kind)[0, 0])

    best_val, best_dir = np.inf, None
    p = start_dirs.shape[1]
    for r0 in start_dirs:
        simplex = np.vstack([r0, r0 + 0.05 * np.eye(p)])
        res = minimize(
            f,
            r0,
            method="Nelder-Mead",
            options={"initial_simplex": simplex, "xatol": 1e-11, "fatol": 1e-15, "maxiter": 600 * p, "maxfev": 800 * p},
        )
        if res.fun < best_val:
            best_val, best_dir = float(res.fun), res.x / np.linalg.norm(res.x)
    return best_val, best_dir


def _direction_infimum(zq, xs, dirs, kind, refine):
    """Minimum over directions of the projected depth; returns (depths, labels)."""
    per = _direction_depths(dirs, zq, xs, kind)  # (N, q)
    arg = np.argmin(per, axis=0)
    depth = per[arg, np.arange(zq.shape[0])]
    labels = [f"r#{i}" for i in arg]
    p = dirs.shape[1]
    if refine is None:
        refine = kind.continuous and 1 < p <= REFINE_MAX_DIM
    if refine and p > 1:
        for i in range(zq.shape[0]):
            starts = dirs[np.argsort(per[:, i], kind="stable")[:3]]
            val, _ = _refine(zq[i], xs, starts, kind)
            if val < depth[i]:
                depth[i] = val
                labels[i] = f"r#{arg[i]}+refined"
    return depth, labels


def _grid(query, cloud, grid_points, direction_count, seed, kind, directions, refine):
    kind = as_kind(kind)
    if not kind.supports(cloud.d):
        raise ValueError(f"{kind.kind} depth does not support d={cloud.d}")
    if grid_points is None or (isinstance(grid_points, str) and grid_points == "all"):
        idx = np.arange(cloud.k)
    else:
        idx = np.asarray(grid_points, dtype=int).ravel()
        if idx.size == 0 or np.any(idx < 0) or np.any(idx >= cloud.k):
            raise ValueError(f"grid points must be indices in [0, {cloud.k - 1}]")
    if directions is None:
        dirs = sample_directions(direction_count, idx.size, seed, antithetic=True)
    else:
        dirs = np.asarray(directions, dtype=float)
        if dirs.ndim != 2 or dirs.shape[1] != idx.size:
            raise ValueError(f"directions must have shape (N, {idx.size})")
    queries, single = as_queries(query, cloud.k, cloud.d)
    depth, labels = _direction_infimum(queries[:, idx, :], cloud.values[:, idx, :], dirs, kind, refine)
    return depth, labels, single


def grid_depth(
    query,
    cloud,
    grid_points=None,
    direction_count=DEFAULT_DIRECTIONS,
    seed=0,
    kind="halfspace",
    directions=None,
    refine=None,
):
    """Grid depth: infimum over r in S^{k'-1} of ``D^d(<r, z(t)> | <r, X(t)>)``.

    Parameters
    ----------
    grid_points : sequence of int, optional
        Indices of the k' evaluation points (default: the full grid).
    direction_count : int, default=1000
        Size of the sampled direction set (antithetic pairs).
    seed : int, default=0
    kind : str or MultivariateDepth, default='halfspace'
    directions : array_like of shape (N, k'), optional
        Explicit direction set; overrides sampling.
    refine : bool, optional
        Local polishing of the best directions.  By default on for
        Mahalanobis and zonoid when ``1 < k' <= 10``.
    """
    depth, _, single = _grid(query, cloud, grid_points, direction_count, seed, kind, directions, refine)
    return _finish(depth, single)


# ---------------------------------------------------------------------------
# principal components
# ---------------------------------------------------------------------------


def trapezoid_weights(grid):
    """Trapezoidal quadrature weights of a strictly increasing grid."""
    t = check_grid(grid)
    w = np.empty_like(t)
    w[0] = (t[1] - t[0]) / 2
    w[-1] = (t[-1] - t[-2]) / 2
    w[1:-1] = (t[2:] - t[:-2]) / 2
    return w


@dataclass(frozen=True, eq=False)
class PcaModel:
    """Principal components of a functional sample under the trapezoidal inner product.

    Attributes
    ----------
    grid : ndarray (k,)
    weights : ndarray (k,)
        Quadrature weights defining ``<f, g> = sum_t w_t sum_c f(t, c) g(t, c)``.
    mean_curve : ndarray (k, d)
    components : ndarray (m, k, d)
        Orthonormal eigenfunctions; each one's entry of largest absolute
        value is positive.
    eigenvalues : ndarray (m,)
        Non-increasing.
    scores : ndarray (n, m)
        Scores of the sample about the mean curve (column means 0).
    total_variance : float
        Sum of all eigenvalues of the covariance operator.
    """

    grid: np.ndarray
    weights: np.ndarray
    mean_curve: np.ndarray
    components: np.ndarray
    eigenvalues: np.ndarray
    scores: np.ndarray
    total_variance: float

    @property
    def n_components(self):
        return self.components.shape[0]

    @property
    def explained_variance_ratio(self):
        if self.total_variance == 0:
            return np.zeros_like(self.eigenvalues)
        return self.eigenvalues / self.total_variance

    def _wcomp(self):
        return self.components * self.weights[None, :, None]

    def transform(self, values):
        """Scores ``gamma_j(z - mean)`` of functions of shape (q, k, d) or (k, d)."""
        v = np.asarray(values, dtype=float)
        k, d = self.mean_curve.shape
        queries, single = as_queries(v, k, d)
        s = np.einsum("qkc,mkc->qm", queries - self.mean_curve, self._wcomp())
        return s[0] if single else s

    def linear_scores(self, values):
        """Scores without centring, ``gamma_j(z) = <z, y_j>``; linear in z."""
        k, d = self.mean_curve.shape
        queries, single = as_queries(values, k, d)
        s = np.einsum("qkc,mkc->qm", queries, self._wcomp())
        return s[0] if single else s

    def inverse_transform(self, scores):
        s = np.atleast_2d(np.asarray(scores, dtype=float))
        return self.mean_curve + np.einsum("qm,mkc->qkc", s, self.components)


def fit_pca(cloud, m):
    """Principal components of the centred sample.

    The covariance operator uses divisor n and trapezoidal grid weights; it
    is diagonalized through an SVD of the weighted, centred data matrix.

    Parameters
    ----------
    cloud : FunctionalSample
    m : int
        Number of components, ``1 <= m <= min(n - 1, k * d)``.
    """
    n, k, d = cloud.values.shape
    m = int(m)
    if n < 2:
        raise ValueError("PCA needs at least 2 functions")
    if not 1 <= m <= min(n - 1, k * d):
        raise ValueError(f"number of components must satisfy 1 <= m <= {min(n - 1, k * d)}, got {m}")
    w = trapezoid_weights(cloud.grid)
    sw = np.sqrt(np.repeat(w, d))
    flat = cloud.values.reshape(n, k * d)
    mean = flat.mean(axis=0)
    centered = flat - mean
    u, s, vt = np.linalg.svd(centered * sw, full_matrices=False)
    eig = s**2 / n
    comps = vt[:m] / sw
    flip = np.sign(comps[np.arange(m), np.argmax(np.abs(comps), axis=1)])
    flip[flip == 0] = 1.0
    comps *= flip[:, None]
    scores = u[:, :m] * s[:m] * flip
    return PcaModel(
        grid=np.array(cloud.grid),
        weights=w,
        mean_curve=mean.reshape(k, d),
        components=comps.reshape(m, k, d),
        eigenvalues=eig[:m],
        scores=scores,
        total_variance=float(eig.sum()),
    )


def _pc(query, cloud, m, direction_count, seed, kind, model, refine):
    kind = as_kind(kind)
    if model is None:
        model = fit_pca(cloud, m)
    elif model.n_components != m:
        raise ValueError("model has a different number of components")
    queries, single = as_queries(query, cloud.k, cloud.d)
    # score queries and cloud through one call so that a sample function used
    # as a query gets bitwise the same scores as its own cloud entry
    scores = model.transform(np.concatenate([queries, cloud.values]))
    zq = scores[: queries.shape[0], :, None]
    xs = scores[queries.shape[0] :, :, None]
    dirs = sample_directions(direction_count, m, seed, antithetic=True)
    depth, labels = _direction_infimum(zq, xs, dirs, kind, refine)
    return depth, labels, single


def pc_depth(
    query,
    cloud,
    m,
    direction_count=DEFAULT_DIRECTIONS,
    seed=0,
    kind="halfspace",
    model=None,
    refine=None,
):
    """Principal-component depth.

    Infimum over r in S^{m-1} of the univariate depth of ``<r, gamma(z)>``
    among ``<r, gamma(x^i)>``, where ``gamma`` are the scores on the first m
    components fitted on ``cloud`` (the aspect family depends on the data).

    Parameters
    ----------
    m : int
    model : PcaModel, optional
        A model already fitted on ``cloud``.
    """
    depth, _, single = _pc(query, cloud, m, direction_count, seed, kind, model, refine)
    return _finish(depth, single)
