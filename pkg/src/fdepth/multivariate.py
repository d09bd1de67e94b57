"""Multivariate data depths D^d used as building blocks of functional depths.

Every depth here maps a query point and a finite data cloud in R^d to a
value in [0, 1]:

* halfspace (Tukey) depth: exact for d = 1 and d = 2, random-direction
  approximation (an upper bound) for d >= 3;
* Mahalanobis depth with moment estimates, covariance divisor n;
* zonoid depth, solved as a linear program;
* univariate simplicial depth with closed intervals.

Ties are always counted with closed halfspaces / closed intervals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.linalg import cho_factor, cho_solve
from scipy.optimize import linprog

__all__ = [
    "KINDS",
    "DEFAULT_DIRECTIONS",
    "DepthError",
    "DegenerateCloudError",
    "MultivariateDepth",
    "halfspace_depth_1d",
    "halfspace_depth_2d",
    "halfspace_depth_approx",
    "mahalanobis_depth",
    "zonoid_depth",
    "simplicial_depth_1d",
    "sample_directions",
]

KINDS = ("halfspace", "mahalanobis", "zonoid", "simplicial")
DEFAULT_DIRECTIONS = 1000

# Tolerance used by the zonoid LP (primal and dual feasibility).
ZONOID_TOL = 1e-9


class DepthError(ValueError):
    """Raised for invalid depth inputs (empty cloud, dimension mismatch...)."""


class DegenerateCloudError(DepthError):
    """Raised when a depth needs a nonsingular scatter and the cloud has none."""


# ---------------------------------------------------------------------------
# input helpers
# ---------------------------------------------------------------------------


def _as_cloud(data, dim=None):
    x = np.asarray(data, dtype=float)
    if x.ndim == 1:
        x = x[:, None] if dim in (None, 1) else x[None, :]
    if x.ndim != 2:
        raise DepthError(f"data must be a 2-D array of points, got shape {x.shape}")
    if x.shape[0] == 0:
        raise DepthError("empty cloud")
    if dim is not None and x.shape[1] != dim:
        raise DepthError(f"dimension mismatch: expected d={dim}, got d={x.shape[1]}")
    if not np.all(np.isfinite(x)):
        raise DepthError("data contain NaN or infinite coordinates")
    return x


def _as_point(query, dim):
    z = np.atleast_1d(np.asarray(query, dtype=float))
    if z.ndim != 1 or z.shape[0] != dim:
        raise DepthError(f"dimension mismatch: query has shape {z.shape}, cloud has d={dim}")
    if not np.all(np.isfinite(z)):
        raise DepthError("query contains NaN or infinite coordinates")
    return z


def _as_univariate(data):
    x = np.asarray(data, dtype=float)
    if x.ndim == 2 and x.shape[1] == 1:
        x = x[:, 0]
    if x.ndim != 1:
        raise DepthError(f"univariate data expected, got shape {x.shape}")
    if x.size == 0:
        raise DepthError("empty cloud")
    if not np.all(np.isfinite(x)):
        raise DepthError("data contain NaN or infinite values")
    return x


def sample_directions(count, dim, seed=0, antithetic=False):
    """Draw unit vectors uniformly on the sphere S^{dim-1}.

    Directions are normalized standard Gaussian draws from
    ``numpy.random.default_rng(seed)`` (PCG64), so the result is a pure
    function of ``(count, dim, seed, antithetic)``.  With ``antithetic=True``
    every drawn r is followed by -r.
    """
    count = int(count)
    if count < 1:
        raise DepthError("direction_count must be >= 1")
    rng = np.random.default_rng(seed)
    draws = (count + 1) // 2 if antithetic else count
    r = rng.standard_normal((draws, dim))
    norms = np.linalg.norm(r, axis=1)
    # a zero Gaussian vector has probability zero; replace it anyway
    r[norms == 0] = 1.0
    norms[norms == 0] = math.sqrt(dim)
    r /= norms[:, None]
    if antithetic:
        r = np.stack([r, -r], axis=1).reshape(-1, dim)[:count]
    return r


# ---------------------------------------------------------------------------
# halfspace depth
# ---------------------------------------------------------------------------


def halfspace_depth_1d(query, data):
    """Univariate halfspace depth ``min(#{x_i <= z}, #{x_i >= z}) / n``.

    Examples
    --------
    >>> halfspace_depth_1d(2, [1, 2, 3])
    0.6666666666666666
    >>> halfspace_depth_1d(1.5, [1, 2, 3, 4])
    0.25
    """
    x = _as_univariate(data)
    z = float(query)
    below = int(np.count_nonzero(x <= z))
    above = int(np.count_nonzero(x >= z))
    return min(below, above) / x.size


def _halfspace_1d_many(queries, data):
    xs = np.sort(_as_univariate(data))
    q = np.asarray(queries, dtype=float).ravel()
    below = np.searchsorted(xs, q, side="right")
    above = xs.size - np.searchsorted(xs, q, side="left")
    return np.minimum(below, above) / xs.size


_EPS = 2.0**-53
_ORIENT_BOUND = (3.0 + 16.0 * _EPS) * _EPS


def _orientation(ax, ay, bx, by, cx, cy):
    """Exact sign of the cross product (a - c) x (b - c).

    Floating-point filter with the classic orient2d error bound; falls back
    to rational arithmetic when the filter cannot certify the sign.
    """
    left = (ax - cx) * (by - cy)
    right = (ay - cy) * (bx - cx)
    det = left - right
    bound = _ORIENT_BOUND * (abs(left) + abs(right))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    fa, fb, fc = (Fraction(ax), Fraction(ay)), (Fraction(bx), Fraction(by)), (Fraction(cx), Fraction(cy))
    exact = (fa[0] - fc[0]) * (fb[1] - fc[1]) - (fa[1] - fc[1]) * (fb[0] - fc[0])
    return (exact > 0) - (exact < 0)


def halfspace_depth_2d(query, data):
    """Exact bivariate halfspace depth.

    The minimum over closed halfplanes with the query on their boundary is
    found by sweeping a line through the query over the angularly sorted
    data.  Points are folded into the upper half-plane so that every line
    through the query is visited once; collinear points (lines through the
    query) are grouped with an exact orientation predicate, which keeps
    collinear and tied configurations correct.

    Parameters
    ----------
    query : array_like, shape (2,)
    data : array_like, shape (n, 2)

    Returns
    -------
    float
        A multiple of 1/n in [0, 1].
    """
    x = _as_cloud(data, dim=2)
    z = _as_point(query, 2)
    n = x.shape[0]
    zx, zy = float(z[0]), float(z[1])
    px, py = x[:, 0], x[:, 1]

    at_query = (px == zx) & (py == zy)
    k0 = int(np.count_nonzero(at_query))
    idx = np.flatnonzero(~at_query)
    m = idx.size
    if m == 0:
        return 1.0

    upper = (py[idx] > zy) | ((py[idx] == zy) & (px[idx] > zx))
    sign = np.where(upper, 1, -1)
    # approximate angles of the folded vectors, used only to seed the sort
    key = np.arctan2(sign * (py[idx] - zy), sign * (px[idx] - zx))
    order = list(np.argsort(key, kind="stable"))

    def cross(i, j):
        a, b = idx[i], idx[j]
        return int(sign[i] * sign[j]) * _orientation(px[a], py[a], px[b], py[b], zx, zy)

    # insertion pass with the exact predicate; O(m) when the seed is right
    for pos in range(1, m):
        cur = pos
        while cur > 0 and cross(order[cur], order[cur - 1]) > 0:
            order[cur], order[cur - 1] = order[cur - 1], order[cur]
            cur -= 1

    pos_counts, neg_counts = [], []
    prev = None
    for i in order:
        if prev is not None and cross(prev, i) == 0:
            if sign[i] > 0:
                pos_counts[-1] += 1
            else:
                neg_counts[-1] += 1
        else:
            pos_counts.append(1 if sign[i] > 0 else 0)
            neg_counts.append(0 if sign[i] > 0 else 1)
        prev = i

    pos_counts = np.asarray(pos_counts)
    neg_counts = np.asarray(neg_counts)
    # open side count with the sweep line just past group g:
    # positives of later groups plus negatives of groups up to g
    later_pos = pos_counts.sum() - np.cumsum(pos_counts)
    count = later_pos + np.cumsum(neg_counts)
    best = int(np.min(np.minimum(count, m - count)))
    return (k0 + best) / n


def halfspace_depth_approx(query, data, direction_count=DEFAULT_DIRECTIONS, seed=0):
    """Random Tukey depth: minimum univariate halfspace depth over random directions.

    Always an upper bound of the exact halfspace depth; deterministic for a
    fixed ``seed``.
    """
    x = _as_cloud(data)
    z = _as_point(query, x.shape[1])
    dirs = sample_directions(direction_count, x.shape[1], seed)
    return float(_approx_depths(z[None, :], x, dirs)[0])


def _approx_depths(queries, x, dirs):
    n = x.shape[0]
    out = np.empty(queries.shape[0])
    for i, z in enumerate(queries):
        proj = (x - z) @ dirs.T
        below = np.count_nonzero(proj <= 0, axis=0)
        above = np.count_nonzero(proj >= 0, axis=0)
        out[i] = np.min(np.minimum(below, above)) / n
    return out


# ---------------------------------------------------------------------------
# Mahalanobis depth
# ---------------------------------------------------------------------------


def _moments(x):
    n, d = x.shape
    mean = x.mean(axis=0)
    centered = x - mean
    if n < 2 or np.linalg.matrix_rank(centered) < d:
        raise DegenerateCloudError("degenerate cloud: sample covariance is singular")
    cov = centered.T @ centered / n
    return mean, cho_factor(cov, lower=True)


def mahalanobis_depth(query, data):
    """Mahalanobis depth ``1 / (1 + (z - mean)' S^{-1} (z - mean))``.

    ``S`` is the moment covariance with divisor n.  A singular ``S`` raises
    :class:`DegenerateCloudError`; there is no regularization.

    >>> mahalanobis_depth(1.0, [-1.0, 1.0])
    0.5
    """
    x = _as_cloud(data)
    z = _as_point(query, x.shape[1])
    return float(_mahalanobis_many(z[None, :], x)[0])


def _mahalanobis_many(queries, x):
    mean, factor = _moments(x)
    diff = queries - mean
    dist2 = np.einsum("ij,ij->i", diff, cho_solve(factor, diff.T).T)
    return 1.0 / (1.0 + np.maximum(dist2, 0.0))


# ---------------------------------------------------------------------------
# zonoid depth
# ---------------------------------------------------------------------------


def _affine_frame(x):
    """Centre and whiten the cloud inside its affine hull.

    Returns ``(mean, basis, scale)`` such that ``(p - mean) @ basis / scale``
    gives coordinates with identity covariance; ``basis`` is empty for a
    single repeated point.
    """
    n, d = x.shape
    mean = x.mean(axis=0)
    centered = x - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return mean, np.zeros((d, 0)), np.zeros(0)
    rank = int(np.count_nonzero(s > s[0] * max(n, d) * np.finfo(float).eps))
    return mean, vt[:rank].T, s[:rank] / math.sqrt(n)


def zonoid_depth(query, data):
    """Zonoid depth by linear programming.

    The depth is the largest alpha in (0, 1] such that the query is a convex
    combination ``sum(lambda_i x_i)`` with every ``lambda_i <= 1 / (n alpha)``;
    equivalently ``1 / (n * min max_i lambda_i)``.  Points outside the convex
    hull have depth 0.  The LP runs in whitened coordinates of the cloud's
    affine hull (the depth is affine invariant), which keeps the feasibility
    tolerance meaningful at any scale.

    >>> round(zonoid_depth(0.75, [0.0, 1.0]), 9)
    0.666666667
    """
    x = _as_cloud(data)
    z = _as_point(query, x.shape[1])
    return _zonoid_lp(z, x)


def _zonoid_lp(z, x):
    n = x.shape[0]
    mean, basis, scale = _affine_frame(x)
    if basis.shape[1] == 0:
        return 1.0 if np.array_equal(z, x[0]) else 0.0
    offset = z - mean
    inside = offset @ basis
    residual = offset - basis @ inside
    if np.linalg.norm(residual) > ZONOID_TOL * scale[0] * max(1.0, math.sqrt(n)):
        return 0.0
    coords = (x - mean) @ basis / scale
    target = inside / scale
    if np.any(target < coords.min(axis=0) - ZONOID_TOL) or np.any(target > coords.max(axis=0) + ZONOID_TOL):
        return 0.0

    r = coords.shape[1]
    # variables: lambda_1..lambda_n, gamma ; minimize gamma
    c = np.zeros(n + 1)
    c[-1] = 1.0
    a_eq = np.zeros((r + 1, n + 1))
    a_eq[:r, :n] = coords.T
    a_eq[r, :n] = 1.0
    b_eq = np.append(target, 1.0)
    a_ub = np.hstack([np.eye(n), -np.ones((n, 1))])
    b_ub = np.zeros(n)
    res = linprog(
        c,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=[(0, None)] * (n + 1),
        method="highs",
        options={"primal_feasibility_tolerance": ZONOID_TOL, "dual_feasibility_tolerance": ZONOID_TOL},
    )
    if res.status == 2:
        return 0.0
    if res.status != 0:
        raise DepthError(f"zonoid LP failed: {res.message}")
    gamma = res.x[-1]
    return float(min(1.0, 1.0 / (n * gamma)))


def _zonoid_1d_many(queries, data):
    """Closed-form univariate zonoid depth via trimmed means.

    For z above the mean the depth is the alpha at which the upper trimmed
    mean (weights 1/(n alpha) on the largest values) equals z; symmetric
    below the mean.
    """
    x = _as_univariate(data)
    n = x.size
    q = np.asarray(queries, dtype=float).ravel()
    mean = x.mean()
    lo, hi = x.min(), x.max()
    out = np.empty(q.size)
    desc = np.sort(x)[::-1]
    asc = desc[::-1]
    sums_desc = np.cumsum(desc)
    sums_asc = np.cumsum(asc)
    j = np.arange(1, n + 1)
    for i, z in enumerate(q):
        if z < lo or z > hi:
            out[i] = 0.0
        elif z == mean:
            out[i] = 1.0
        elif z > mean:
            out[i] = _trimmed_alpha(z, desc, sums_desc / j, sums_desc, n, upper=True)
        else:
            out[i] = _trimmed_alpha(z, asc, sums_asc / j, sums_asc, n, upper=False)
    return out


def _trimmed_alpha(z, ordered, running_means, sums, n, upper):
    # ordered: values from the extreme inwards; running_means[j-1] = mean of first j
    if upper:
        ok = np.flatnonzero(running_means >= z)
    else:
        ok = np.flatnonzero(running_means <= z)
    jstar = int(ok[-1]) + 1
    if jstar >= n:
        return 1.0
    s_j = sums[jstar - 1]
    nxt = ordered[jstar]
    frac = (s_j - z * jstar) / (z - nxt)
    return float(min(1.0, max(0.0, (jstar + frac) / n)))


# ---------------------------------------------------------------------------
# simplicial depth
# ---------------------------------------------------------------------------


def simplicial_depth_1d(query, data):
    """Fraction of the C(n, 2) closed data intervals that contain the query.

    Not monotone on rays for finite samples.  Requires n >= 2.

    >>> simplicial_depth_1d(1, [1, 2, 3])
    0.6666666666666666
    """
    x = _as_univariate(data)
    return float(_simplicial_1d_many([float(query)], x)[0])


def _simplicial_1d_many(queries, data):
    xs = np.sort(_as_univariate(data))
    n = xs.size
    if n < 2:
        raise DepthError("simplicial depth needs at least 2 data points")
    q = np.asarray(queries, dtype=float).ravel()
    below = np.searchsorted(xs, q, side="left")
    above = n - np.searchsorted(xs, q, side="right")
    total = n * (n - 1) // 2
    missing = below * (below - 1) // 2 + above * (above - 1) // 2
    return (total - missing) / total


# ---------------------------------------------------------------------------
# depth selector
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MultivariateDepth:
    """Selector for the underlying d-variate depth.

    Parameters
    ----------
    kind : {'halfspace', 'mahalanobis', 'zonoid', 'simplicial'}
    direction_count : int, default=1000
        Random directions for the approximate halfspace depth (d >= 3 only).
    seed : int, default=0
        Seed of the direction sampler.
    """

    kind: str = "halfspace"
    direction_count: int = DEFAULT_DIRECTIONS
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DepthError(f"unknown depth kind {self.kind!r}; expected one of {KINDS}")
        if int(self.direction_count) < 1:
            raise DepthError("direction_count must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise DepthError("seed must be a 64-bit unsigned integer")

    @property
    def continuous(self):
        """Whether the depth is continuous in the data (Mahalanobis, zonoid)."""
        return self.kind in ("mahalanobis", "zonoid")

    def supports(self, dim):
        return dim == 1 or self.kind != "simplicial"

    def depth(self, query, data):
        x = _as_cloud(data)
        z = _as_point(query, x.shape[1])
        return float(self.depths(z[None, :], x)[0])

    def depths(self, queries, data):
        """Depths of several query points, shape (q, d), w.r.t. one cloud."""
        x = _as_cloud(data)
        d = x.shape[1]
        q = np.asarray(queries, dtype=float).reshape(-1, d)
        if not self.supports(d):
            raise DepthError("simplicial depth is only implemented for d = 1")
        if self.kind == "halfspace":
            if d == 1:
                return _halfspace_1d_many(q[:, 0], x[:, 0])
            if d == 2:
                return np.array([halfspace_depth_2d(p, x) for p in q])
            dirs = sample_directions(self.direction_count, d, self.seed)
            return _approx_depths(q, x, dirs)
        if self.kind == "mahalanobis":
            return _mahalanobis_many(q, x)
        if self.kind == "zonoid":
            if d == 1:
                return _zonoid_1d_many(q[:, 0], x[:, 0])
            return np.array([_zonoid_lp(p, x) for p in q])
        return _simplicial_1d_many(q[:, 0], x[:, 0])

    def univariate_batch(self, queries, data):
        """Univariate depths for many clouds at once.

        ``queries`` has shape (a, q) and ``data`` shape (a, n): row ``i`` of
        the result holds the depths of ``queries[i]`` in cloud ``data[i]``.
        """
        qs = np.asarray(queries, dtype=float)
        xs = np.asarray(data, dtype=float)
        n = xs.shape[1]
        if self.kind == "halfspace":
            diff = xs[:, None, :] - qs[:, :, None]
            below = np.count_nonzero(diff <= 0, axis=2)
            above = np.count_nonzero(diff >= 0, axis=2)
            return np.minimum(below, above) / n
        if self.kind == "simplicial":
            if n < 2:
                raise DepthError("simplicial depth needs at least 2 data points")
            diff = xs[:, None, :] - qs[:, :, None]
            below = np.count_nonzero(diff < 0, axis=2)
            above = np.count_nonzero(diff > 0, axis=2)
            total = n * (n - 1) // 2
            return (total - below * (below - 1) // 2 - above * (above - 1) // 2) / total
        if self.kind == "mahalanobis":
            mean = xs.mean(axis=1, keepdims=True)
            var = ((xs - mean) ** 2).mean(axis=1, keepdims=True)
            degenerate = np.ptp(xs, axis=1) == 0
            if n < 2 or np.any(degenerate):
                raise DegenerateCloudError("degenerate cloud: sample variance is zero")
            return 1.0 / (1.0 + (qs - mean) ** 2 / var)
        return np.vstack([_zonoid_1d_many(q, x) for q, x in zip(qs, xs)])
