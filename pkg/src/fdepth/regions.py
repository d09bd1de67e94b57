"""Depth-trimmed central regions, deepest functions and outlier reports.

For a graph-type depth the alpha-region of functions factorizes over time
points: a function is in the region iff its value at every t in T lies in
the cross-sectional alpha-region of ``X(t)``.  This module computes those
cross-sections:

=============  =====================================  ===========================
depth          d = 1                                  d = 2
=============  =====================================  ===========================
halfspace      order statistics (exact)               halfplane intersection
simplicial     union of closed intervals (exact)      not supported
Mahalanobis    closed-form interval                   ellipse
zonoid         trimmed means (closed form)            polygon from greedy weights
=============  =====================================  ===========================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .functional import as_kind, graph_depth
from .multivariate import DegenerateCloudError, _simplicial_1d_many
from .sample import check_alpha, check_subset

__all__ = [
    "IntervalSection",
    "PolygonSection",
    "EllipseSection",
    "CentralRegionEnvelope",
    "OutlierReport",
    "region_envelope",
    "member_envelope",
    "deepest_functions",
    "classify_outliers",
    "convex_hull",
]


# ---------------------------------------------------------------------------
# cross-sections
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalSection:
    """Univariate region at one time point: a union of disjoint closed intervals.

    ``slack`` widens membership tests by an absolute amount; it is zero for
    counting depths, whose sections are exact order statistics.
    """

    t: float
    index: int
    intervals: tuple = ()
    slack: float = 0.0

    @property
    def empty(self):
        return not self.intervals

    @property
    def lo(self):
        return self.intervals[0][0] if self.intervals else math.nan

    @property
    def hi(self):
        return self.intervals[-1][1] if self.intervals else math.nan

    def contains(self, y, tol=0.0):
        y = float(np.asarray(y).ravel()[0])
        tol = tol + self.slack
        return any(lo - tol <= y <= hi + tol for lo, hi in self.intervals)


@dataclass(frozen=True, eq=False)
class PolygonSection:
    """Bivariate convex region at one time point.

    ``halfplanes`` rows ``(u1, u2, q)`` describe the region as
    ``u . y >= q``; ``vertices`` lists the boundary counterclockwise.  A
    degenerate region may have one or two vertices.
    """

    t: float
    index: int
    vertices: np.ndarray
    halfplanes: Optional[np.ndarray] = None
    scale: float = 1.0

    @property
    def empty(self):
        return len(self.vertices) == 0

    def contains(self, y, tol=1e-9):
        if self.empty:
            return False
        y = np.asarray(y, dtype=float).ravel()
        slack = tol * self.scale
        if self.halfplanes is not None:
            return bool(np.all(self.halfplanes[:, :2] @ y >= self.halfplanes[:, 2] - slack))
        return _in_convex(self.vertices, y, slack)


@dataclass(frozen=True, eq=False)
class EllipseSection:
    """``{y : (y - center)' S^{-1} (y - center) <= radius2}``."""

    t: float
    index: int
    center: np.ndarray
    covariance: np.ndarray
    radius2: float

    empty = False

    def contains(self, y, tol=1e-9):
        diff = np.asarray(y, dtype=float).ravel() - self.center
        return float(diff @ np.linalg.solve(self.covariance, diff)) <= self.radius2 * (1 + tol) + tol

    @property
    def vertices(self):
        return self.boundary(64)

    def boundary(self, count=64):
        theta = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        chol = np.linalg.cholesky(self.covariance)
        circle = np.stack([np.cos(theta), np.sin(theta)], axis=1) * math.sqrt(self.radius2)
        return self.center + circle @ chol.T


@dataclass(frozen=True, eq=False)
class CentralRegionEnvelope:
    """Cross-sectional representation of a functional alpha-region."""

    alpha: float
    kind: str
    sections: tuple = field(default=())

    @property
    def empty(self):
        return any(s.empty for s in self.sections)

    @property
    def first_empty_t(self):
        for s in self.sections:
            if s.empty:
                return s.t
        return None

    def contains(self, function, tol=0.0):
        """Whether a function of shape (k, d) (or (k,)) lies in the region."""
        z = np.asarray(function, dtype=float)
        if z.ndim == 1:
            z = z[:, None]
        if self.empty:
            return False
        for s in self.sections:
            ok = s.contains(z[s.index], tol) if tol else s.contains(z[s.index])
            if not ok:
                return False
        return True


# ---------------------------------------------------------------------------
# univariate sections
# ---------------------------------------------------------------------------


def _min_count(alpha, n):
    """Smallest integer c with c / n >= alpha (as evaluated in floating point)."""
    c = max(0, math.ceil(alpha * n) - 1)
    while c / n < alpha:
        c += 1
    return c


def _halfspace_interval(x, alpha):
    xs = np.sort(x)
    n = xs.size
    c = _min_count(alpha, n)
    if c > n or xs[c - 1] > xs[n - c]:
        return ()
    return ((float(xs[c - 1]), float(xs[n - c])),)


def _simplicial_intervals(x, alpha):
    xs = np.sort(x)
    n = xs.size
    if n < 2:
        raise ValueError("simplicial depth needs at least 2 data points")
    u = np.unique(xs)
    point_ok = _simplicial_1d_many(u, xs) >= alpha
    # open gap (u[i], u[i+1]): below = #x <= u[i]
    below = np.searchsorted(xs, u[:-1], side="right")
    above = n - below
    total = n * (n - 1) // 2
    gap_ok = (total - below * (below - 1) // 2 - above * (above - 1) // 2) / total >= alpha
    out = []
    start = None
    for i in range(u.size):
        if point_ok[i] and start is None:
            start = i
        if start is not None:
            closes = i == u.size - 1 or not gap_ok[i]
            if closes:
                out.append((float(u[start]), float(u[i])))
                start = None
    return tuple(out)


def _mahalanobis_interval(x, alpha):
    mean = x.mean()
    var = ((x - mean) ** 2).mean()
    if var == 0:
        raise DegenerateCloudError("degenerate cloud: sample variance is zero")
    half = math.sqrt(var * (1.0 / alpha - 1.0))
    return ((float(mean - half), float(mean + half)),)


def _trimmed_mean(values_desc, alpha):
    """Mean with weights 1/(n alpha) on the leading values (greedy)."""
    n = values_desc.size
    cap = 1.0 / (n * alpha)
    full = min(n, int(math.floor(1.0 / cap + 1e-12)))
    rest = max(0.0, 1.0 - full * cap)
    total = cap * values_desc[:full].sum()
    if full < n and rest > 0:
        total += rest * values_desc[full]
    return float(total)


def _zonoid_interval(x, alpha):
    desc = np.sort(x)[::-1]
    hi = _trimmed_mean(desc, alpha)
    lo = _trimmed_mean(desc[::-1], alpha)
    return ((min(lo, hi), max(lo, hi)),)


# ---------------------------------------------------------------------------
# bivariate sections
# ---------------------------------------------------------------------------


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points):
    """Counterclockwise convex hull (monotone chain); tolerates degenerate input."""
    pts = sorted(set(map(tuple, np.asarray(points, dtype=float))))
    if len(pts) <= 2:
        return np.array(pts, dtype=float).reshape(-1, 2)
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1], dtype=float)


def _in_convex(vertices, y, slack):
    v = np.asarray(vertices, dtype=float)
    if len(v) == 1:
        return bool(np.linalg.norm(y - v[0]) <= slack)
    if len(v) == 2:
        a, b = v
        ab = b - a
        s = np.clip(np.dot(y - a, ab) / np.dot(ab, ab), 0.0, 1.0)
        return bool(np.linalg.norm(a + s * ab - y) <= slack)
    nxt = np.roll(v, -1, axis=0)
    edge = nxt - v
    rel = y - v
    cr = edge[:, 0] * rel[:, 1] - edge[:, 1] * rel[:, 0]
    return bool(np.all(cr >= -slack * np.linalg.norm(edge, axis=1)))


def _critical_directions(pts):
    """Unit normals and parallels of all pairwise difference vectors, both signs."""
    diff = (pts[None, :, :] - pts[:, None, :])[np.triu_indices(len(pts), 1)]
    norm = np.linalg.norm(diff, axis=1)
    diff = diff[norm > 0] / norm[norm > 0, None]
    normals = np.stack([-diff[:, 1], diff[:, 0]], axis=1)
    axes = np.array([[1.0, 0.0], [0.0, 1.0]])
    base = np.vstack([normals, diff, axes])
    return np.vstack([base, -base])


def _clip(poly, u, q, tol):
    """Clip a convex polygon (list of points) with ``u . y >= q - tol``."""
    if not poly:
        return poly
    out = []
    vals = [u[0] * p[0] + u[1] * p[1] - q for p in poly]
    m = len(poly)
    for i in range(m):
        p, vp = poly[i], vals[i]
        nq, vn = poly[(i + 1) % m], vals[(i + 1) % m]
        if vp >= -tol:
            out.append(p)
        if (vp >= -tol) != (vn >= -tol):
            s = vp / (vp - vn)
            out.append((p[0] + s * (nq[0] - p[0]), p[1] + s * (nq[1] - p[1])))
    return out


def _dedupe(vertices, tol):
    out = []
    for v in vertices:
        if not out or math.dist(v, out[-1]) > tol:
            out.append(v)
    while len(out) > 1 and math.dist(out[0], out[-1]) <= tol:
        out.pop()
    return np.array(out, dtype=float).reshape(-1, 2)


def _halfspace_polygon(pts, alpha, t, j):
    n = len(pts)
    c = _min_count(alpha, n)
    scale = max(1.0, float(np.max(np.abs(pts))))
    if c > n:
        return PolygonSection(t, j, np.zeros((0, 2)), None, scale)
    dirs = _critical_directions(pts)
    proj = dirs @ pts.T
    q = np.partition(proj, c - 1, axis=1)[:, c - 1]
    halfplanes = np.column_stack([dirs, q])
    tol = 1e-12 * scale
    lo, hi = pts.min(axis=0) - 1.0, pts.max(axis=0) + 1.0
    poly = [(lo[0], lo[1]), (hi[0], lo[1]), (hi[0], hi[1]), (lo[0], hi[1])]
    for u1, u2, qq in halfplanes:
        poly = _clip(poly, (u1, u2), qq, tol)
        if not poly:
            break
    verts = _dedupe(poly, 1e-9 * scale) if poly else np.zeros((0, 2))
    return PolygonSection(t, j, verts, halfplanes, scale)


def _zonoid_polygon(pts, alpha, t, j):
    n = len(pts)
    scale = max(1.0, float(np.max(np.abs(pts))))
    dirs = _critical_directions(pts)
    ang = np.unique(np.arctan2(dirs[:, 1], dirs[:, 0]))
    mids = (ang + np.roll(ang, -1)) / 2
    mids[-1] = (ang[-1] + ang[0] + 2 * np.pi) / 2
    cap = 1.0 / (n * alpha)
    verts = []
    for a in mids:
        u = np.array([math.cos(a), math.sin(a)])
        order = np.argsort(-(pts @ u), kind="stable")
        w = np.zeros(n)
        remaining = 1.0
        for i in order:
            w[i] = min(cap, remaining)
            remaining -= w[i]
            if remaining <= 0:
                break
        verts.append(w @ pts)
    hull = convex_hull(np.array(verts))
    return PolygonSection(t, j, hull, None, scale)


def _mahalanobis_ellipse(pts, alpha, t, j):
    n = len(pts)
    mean = pts.mean(axis=0)
    centered = pts - mean
    if n < 2 or np.linalg.matrix_rank(centered) < 2:
        raise DegenerateCloudError("degenerate cloud: sample covariance is singular")
    cov = centered.T @ centered / n
    return EllipseSection(t, j, mean, cov, 1.0 / alpha - 1.0)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def _section(pts, kind, alpha, t, j):
    d = pts.shape[1]
    if d == 1:
        x = pts[:, 0]
        if kind == "halfspace":
            iv = _halfspace_interval(x, alpha)
        elif kind == "simplicial":
            iv = _simplicial_intervals(x, alpha)
        elif kind == "mahalanobis":
            iv = _mahalanobis_interval(x, alpha)
        else:
            iv = _zonoid_interval(x, alpha)
        slack = 0.0 if kind in ("halfspace", "simplicial") else 1e-12 * max(1.0, float(np.max(np.abs(x))))
        return IntervalSection(t, j, iv, slack)
    if kind == "halfspace":
        return _halfspace_polygon(pts, alpha, t, j)
    if kind == "zonoid":
        return _zonoid_polygon(pts, alpha, t, j)
    if kind == "mahalanobis":
        return _mahalanobis_ellipse(pts, alpha, t, j)
    raise ValueError("simplicial regions are only available for d = 1")


def region_envelope(cloud, subset=None, kind="halfspace", alpha=0.5):
    """Central region of a graph depth as per-time cross-sections.

    A grid function belongs to the region iff its value at every t in T lies
    in that time point's section, which is equivalent to
    ``graph_depth(z) >= alpha``.

    Parameters
    ----------
    cloud : FunctionalSample
        d must be 1 or 2.
    subset : sequence of int, optional
    kind : str or MultivariateDepth
    alpha : float in (0, 1]

    Returns
    -------
    CentralRegionEnvelope
        Sections may be empty when alpha exceeds the largest attainable
        cross-sectional depth; ``first_empty_t`` then names the first one.
    """
    alpha = check_alpha(alpha)
    kind = as_kind(kind)
    if cloud.d > 2:
        raise ValueError("region envelopes are supported for d <= 2 only")
    sections = tuple(
        _section(cloud.values[:, j, :], kind.kind, alpha, float(cloud.grid[j]), int(j))
        for j in check_subset(subset, cloud.k)
    )
    return CentralRegionEnvelope(alpha, kind.kind, sections)


def member_envelope(cloud, depths, alpha):
    """Pointwise hull of the sample functions with depth >= alpha.

    Used for depths whose regions do not factorize over time points (grid
    and PC depth): the band (d = 1) or hull (d = 2) spanned by member curves.
    """
    alpha = check_alpha(alpha)
    keep = np.asarray(depths) >= alpha
    members = cloud.values[keep]
    sections = []
    for j in range(cloud.k):
        t = float(cloud.grid[j])
        if members.shape[0] == 0:
            empty = IntervalSection(t, j, ()) if cloud.d == 1 else PolygonSection(t, j, np.zeros((0, 2)))
            sections.append(empty)
        elif cloud.d == 1:
            col = members[:, j, 0]
            sections.append(IntervalSection(t, j, ((float(col.min()), float(col.max())),)))
        else:
            pts = members[:, j, :]
            scale = max(1.0, float(np.max(np.abs(pts))))
            sections.append(PolygonSection(t, j, convex_hull(pts), None, scale))
    return CentralRegionEnvelope(alpha, "sample", tuple(sections))


def deepest_functions(cloud, subset=None, kind="halfspace", depths=None):
    """Sample functions of maximal graph depth, as a list of ``(id, depth)``.

    All tied maximizers are returned, in sample order.
    """
    if depths is None:
        depths = graph_depth(cloud.values, cloud, subset, kind)
    depths = np.asarray(depths, dtype=float)
    top = depths.max()
    return [(cloud.ids[i], float(depths[i])) for i in np.flatnonzero(depths >= top - 1e-12)]


@dataclass(frozen=True)
class OutlierReport:
    """Sample functions with depth below alpha, sorted by ascending depth."""

    alpha: float
    entries: tuple = ()

    @classmethod
    def from_depths(cls, ids, depths, alpha):
        alpha = check_alpha(alpha)
        depths = np.asarray(depths, dtype=float)
        idx = np.flatnonzero(depths < alpha)
        idx = idx[np.argsort(depths[idx], kind="stable")]
        return cls(alpha, tuple((ids[i], float(depths[i])) for i in idx))

    @property
    def ids(self):
        return [e[0] for e in self.entries]

    def __len__(self):
        return len(self.entries)


def classify_outliers(cloud, subset=None, kind="halfspace", alpha=0.05, depths=None):
    """Sample functions whose graph depth falls below alpha.

    The complement, within the sample, of the functions in
    ``region_envelope(cloud, subset, kind, alpha)``.
    """
    if depths is None:
        depths = graph_depth(cloud.values, cloud, subset, kind)
    return OutlierReport.from_depths(cloud.ids, depths, alpha)
