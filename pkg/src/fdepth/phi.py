"""Infimum of d-variate depths over a finite family of linear aspects.

An *aspect* is a linear map sending a discretized function (k time points,
d coordinates) to a point of R^p.  The functional depth of ``z`` is the
smallest p-variate depth of its image among all aspects, optionally with a
weight per aspect.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .multivariate import MultivariateDepth
from .sample import FunctionalSample, as_queries, check_alpha, check_subset

__all__ = [
    "DEPTH_ATOL",
    "Aspect",
    "AspectSet",
    "DepthValue",
    "SurjectionProbe",
    "SurjectionReport",
    "time_point_aspects",
    "projection_aspects",
    "aspect_depths",
    "phi_depth",
    "weighted_phi_depth",
    "is_in_central_region",
    "deepest_condition",
    "surjection_check",
]

logger = logging.getLogger(__name__)

# "depth equals 1" is decided up to this tolerance (LP-based zonoid depth).
DEPTH_ATOL = 1e-9


@dataclass(frozen=True, eq=False)
class Aspect:
    """A linear evaluation ``phi(z)[o] = sum_{t,c} coefficients[o, t, c] * z[t, c]``.

    Parameters
    ----------
    coefficients : ndarray of shape (p, k, d)
    label : str
    weight : float, default=1.0
        Non-negative weight for the weighted infimum.
    time_index : int or None
        Set when the aspect is a plain evaluation at one grid point.
    """

    coefficients: np.ndarray
    label: str
    weight: float = 1.0
    time_index: Optional[int] = None

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float)
        if coef.ndim != 3:
            raise ValueError("aspect coefficients must have shape (p, k, d)")
        if not np.isfinite(self.weight) or self.weight < 0:
            raise ValueError("aspect weight must be finite and non-negative")
        coef = coef.copy()
        coef.flags.writeable = False
        object.__setattr__(self, "coefficients", coef)
        object.__setattr__(self, "weight", float(self.weight))

    @property
    def dim(self):
        return self.coefficients.shape[0]

    def __call__(self, values):
        v = np.asarray(values, dtype=float)
        return np.einsum("okc,...kc->...o", self.coefficients, v)


class AspectSet:
    """Non-empty finite family of aspects with a common output dimension."""

    def __init__(self, aspects):
        aspects = tuple(aspects)
        if not aspects:
            raise ValueError("empty aspect set")
        shape = aspects[0].coefficients.shape
        for a in aspects:
            if a.coefficients.shape != shape:
                raise ValueError("all aspects must share input grid and output dimension")
        self.aspects = aspects
        self.coefficients = np.stack([a.coefficients for a in aspects])
        self.weights = np.array([a.weight for a in aspects])
        self.labels = [a.label for a in aspects]

    def __len__(self):
        return len(self.aspects)

    def __iter__(self):
        return iter(self.aspects)

    def __getitem__(self, i):
        return self.aspects[i]

    @property
    def dim(self):
        return self.coefficients.shape[1]

    @property
    def k(self):
        return self.coefficients.shape[2]

    @property
    def d(self):
        return self.coefficients.shape[3]

    def apply(self, values):
        """Images of functions of shape (m, k, d); returns shape (A, m, p)."""
        return np.einsum("aokc,mkc->amo", self.coefficients, np.asarray(values, dtype=float))

    def with_weights(self, weights):
        w = np.broadcast_to(np.asarray(weights, dtype=float), (len(self),))
        return AspectSet(
            Aspect(a.coefficients, a.label, float(wi), a.time_index) for a, wi in zip(self.aspects, w)
        )


class DepthValue(NamedTuple):
    """A functional depth together with the aspect that attains the infimum."""

    depth: float
    aspect: str


def time_point_aspects(grid, d=1, subset=None):
    """Evaluations ``z -> z(t)`` for every t in ``subset`` (default: full grid)."""
    t = np.asarray(grid, dtype=float)
    k = t.size
    out = []
    for j in check_subset(subset, k):
        coef = np.zeros((d, k, d))
        coef[np.arange(d), j, np.arange(d)] = 1.0
        out.append(Aspect(coef, f"t={t[j]:.17g}", time_index=int(j)))
    return AspectSet(out)


def _ordered_indices(indices, k):
    if indices is None or (isinstance(indices, str) and indices == "all"):
        return np.arange(k)
    idx = np.asarray(indices, dtype=int).ravel()
    if idx.size == 0:
        raise ValueError("grid point list must not be empty")
    if np.any(idx < 0) or np.any(idx >= k) or np.unique(idx).size != idx.size:
        raise ValueError(f"grid points must be distinct indices in [0, {k - 1}]")
    return idx


def projection_aspects(directions, k, d=1, indices=None, labels=None):
    """Aspects ``z -> (<r, z_1(t)>, ..., <r, z_d(t)>)`` over selected grid indices.

    ``directions`` has shape (N, k') with k' = ``len(indices)``.
    """
    idx = _ordered_indices(indices, k)
    r = np.asarray(directions, dtype=float)
    if r.ndim != 2 or r.shape[1] != idx.size:
        raise ValueError(f"directions must have shape (N, {idx.size})")
    if labels is None:
        labels = [f"r#{i}" for i in range(r.shape[0])]
    out = []
    for row, lab in zip(r, labels):
        coef = np.zeros((d, k, d))
        for c in range(d):
            coef[c, idx, c] = row
        out.append(Aspect(coef, lab))
    return AspectSet(out)


def _check_compatible(cloud, aspects):
    if not isinstance(cloud, FunctionalSample):
        raise TypeError("cloud must be a FunctionalSample")
    if aspects.k != cloud.k or aspects.d != cloud.d:
        raise ValueError(
            f"grid mismatch: aspects expect (k={aspects.k}, d={aspects.d}), "
            f"cloud has (k={cloud.k}, d={cloud.d})"
        )


_BATCH_LIMIT = 4_000_000


def aspect_depths(queries, cloud, aspects, kind):
    """Per-aspect depths, shape (q, A), of queries of shape (q, k, d)."""
    _check_compatible(cloud, aspects)
    q = np.asarray(queries, dtype=float)
    images_q = aspects.apply(q)
    images_x = aspects.apply(cloud.values)
    n_aspects = len(aspects)
    out = np.empty((q.shape[0], n_aspects))
    if aspects.dim == 1:
        step = max(1, _BATCH_LIMIT // max(1, q.shape[0] * cloud.n))
        for start in range(0, n_aspects, step):
            sl = slice(start, start + step)
            out[:, sl] = kind.univariate_batch(images_q[sl, :, 0], images_x[sl, :, 0]).T
    else:
        for a in range(n_aspects):
            out[:, a] = kind.depths(images_q[a], images_x[a])
    return out


def _infimum(per_aspect, weights=None):
    vals = per_aspect if weights is None else per_aspect * weights
    arg = np.argmin(vals, axis=1)  # first occurrence on ties
    return vals[np.arange(vals.shape[0]), arg], arg


def _phi(query, cloud, aspects, kind, weighted):
    queries, single = as_queries(query, cloud.k, cloud.d)
    per = aspect_depths(queries, cloud, aspects, kind)
    depth, arg = _infimum(per, aspects.weights if weighted else None)
    results = [DepthValue(float(v), aspects.labels[i]) for v, i in zip(depth, arg)]
    return results[0] if single else results


def phi_depth(query, cloud, aspects, kind):
    """Φ-depth: minimum over aspects of ``D^p(phi(z) | phi(X))``.

    Returns a :class:`DepthValue` for a single query function (shape (k, d),
    or (k,) when d = 1) and a list of them for a stack of queries.  Ties in
    the minimum go to the first aspect in order.
    """
    return _phi(query, cloud, aspects, kind, weighted=False)


def weighted_phi_depth(query, cloud, aspects, kind):
    """Weighted Φ-depth ``min_a w_a * D^p(phi_a(z) | phi_a(X))``.

    Not renormalized: weights above 1 may give values above 1.
    """
    return _phi(query, cloud, aspects, kind, weighted=True)


def is_in_central_region(query, cloud, aspects, kind, alpha):
    """Membership in the depth region via the per-aspect regions.

    True iff every aspect image lies in the corresponding p-variate
    alpha-region, which is the same as ``phi_depth >= alpha``.
    """
    alpha = check_alpha(alpha)
    queries, single = as_queries(query, cloud.k, cloud.d)
    per = aspect_depths(queries, cloud, aspects, kind)
    inside = np.all(per >= alpha, axis=1)
    return bool(inside[0]) if single else inside


def deepest_condition(query, cloud, aspects, kind):
    """Whether the query has depth 1 under every aspect (up to ``DEPTH_ATOL``)."""
    queries, single = as_queries(query, cloud.k, cloud.d)
    per = aspect_depths(queries, cloud, aspects, kind)
    ok = np.all(per >= 1.0 - DEPTH_ATOL, axis=1)
    return bool(ok[0]) if single else ok


# ---------------------------------------------------------------------------
# surjection property
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SurjectionProbe:
    aspect: str
    point: Optional[np.ndarray]
    target_depth: float
    witness_depth: float
    passed: bool
    note: str = ""


@dataclass(frozen=True)
class SurjectionReport:
    alpha: float
    probes: tuple = field(default=())

    @property
    def passed(self):
        return sum(p.passed for p in self.probes)

    @property
    def failures(self):
        return [p for p in self.probes if not p.passed]

    @property
    def all_passed(self):
        return not self.failures


def _deepest_point(kind, pts):
    """A point of (near) maximal depth in the cloud ``pts`` (n, d)."""
    cand = np.vstack([pts, pts.mean(axis=0), np.median(pts, axis=0)])
    depths = kind.depths(cand, pts)
    return cand[int(np.argmax(depths))]


def surjection_check(cloud, aspects, kind, alpha, probe_count=50, seed=0, candidates=64):
    """Search planted witnesses for the surjection property of a graph-type depth.

    Each probe picks an aspect ``phi_t`` (evaluation at ``t*``) and a point
    ``y`` with ``D^d(y | X(t*)) >= alpha``, then builds ``z`` with
    ``z(t*) = y`` and ``z(t)`` equal to a deepest cross-sectional point at
    every other grid point.  The probe passes when ``phi_depth(z) >= alpha``.
    A failure means "no witness found by this construction".  Probes whose
    cross-section has no point at level alpha are vacuous and pass.
    """
    alpha = check_alpha(alpha)
    _check_compatible(cloud, aspects)
    if any(a.time_index is None for a in aspects):
        raise ValueError("surjection_check needs time-point evaluation aspects")
    rng = np.random.default_rng(seed)
    x = cloud.values
    centers = np.stack([_deepest_point(kind, x[:, j, :]) for j in range(cloud.k)])

    probes = []
    for _ in range(int(probe_count)):
        a = int(rng.integers(len(aspects)))
        aspect = aspects[a]
        t = aspect.time_index
        pts = x[:, t, :]
        j = rng.integers(cloud.n, size=candidates)
        u = rng.random(candidates)[:, None]
        cand = np.vstack([centers[t], centers[t] + u * (pts[j] - centers[t])])
        depth_c = kind.depths(cand, pts)
        ok = np.flatnonzero(depth_c >= alpha)
        if ok.size == 0:
            probes.append(SurjectionProbe(aspect.label, None, float("nan"), float("nan"), True, "no point at level"))
            continue
        pick = int(ok[rng.integers(ok.size)])
        y = cand[pick]
        z = centers.copy()
        z[t] = y
        witness = phi_depth(z, cloud, aspects, kind).depth
        passed = witness >= alpha
        probe = SurjectionProbe(aspect.label, y, float(depth_c[pick]), witness, passed)
        if not passed:
            logger.info(
                "surjection probe failed at %s: D(y)=%.6g, witness depth=%.6g < alpha=%.6g",
                aspect.label, probe.target_depth, witness, alpha,
            )
        probes.append(probe)
    return SurjectionReport(alpha, tuple(probes))
