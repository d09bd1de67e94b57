"""Discretized functional samples and input validation helpers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["FunctionalSample", "check_functions", "check_grid", "check_alpha", "check_subset"]


def check_grid(grid, k=None):
    t = np.asarray(grid, dtype=float)
    if t.ndim != 1:
        raise ValueError("grid must be one-dimensional")
    if t.size < 2:
        raise ValueError("grid needs at least 2 time points")
    if k is not None and t.size != k:
        raise ValueError(f"grid mismatch: grid has {t.size} points, values have {k}")
    if not np.all(np.isfinite(t)):
        raise ValueError("grid contains non-finite values")
    if np.any(np.diff(t) <= 0):
        raise ValueError("grid must be strictly increasing")
    return t


def check_functions(values, d=None):
    """Coerce function values to a float array of shape (n, k, d).

    A 2-D input is read as n univariate functions on k points.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim == 2:
        v = v[:, :, None]
    if v.ndim != 3:
        raise ValueError(f"expected values of shape (n, k) or (n, k, d), got {v.shape}")
    if v.shape[0] < 1:
        raise ValueError("empty cloud")
    if d is not None and v.shape[2] != d:
        raise ValueError(f"dimension mismatch: expected d={d}, got d={v.shape[2]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("function values contain NaN or infinite entries")
    return v


def check_alpha(alpha):
    """Validate a depth level: 0 < alpha <= 1."""
    a = float(alpha)
    if not 0.0 < a <= 1.0:
        raise ValueError(f"alpha must satisfy 0 < alpha <= 1, got {alpha!r}")
    return a


def check_subset(subset, k):
    """Normalize a grid-index subset; ``None`` or ``'all'`` means every index."""
    if subset is None or (isinstance(subset, str) and subset == "all"):
        return np.arange(k)
    idx = np.asarray(subset, dtype=int).ravel()
    if idx.size == 0:
        raise ValueError("subset T must not be empty")
    if np.any(idx < 0) or np.any(idx >= k):
        raise ValueError(f"subset indices must lie in [0, {k - 1}]")
    return np.unique(idx)


@dataclass(frozen=True, eq=False)
class FunctionalSample:
    """n functions observed as d-variate values on a shared grid of k points.

    Attributes
    ----------
    grid : ndarray of shape (k,)
        Strictly increasing time points.
    values : ndarray of shape (n, k, d)
    ids : tuple of str
        One label per function; defaults to ``'0', '1', ...``.
    """

    grid: np.ndarray
    values: np.ndarray
    ids: tuple = field(default=None)

    def __post_init__(self):
        values = check_functions(self.values)
        grid = check_grid(self.grid, values.shape[1])
        ids = self.ids
        if ids is None:
            ids = tuple(str(i) for i in range(values.shape[0]))
        ids = tuple(str(i) for i in ids)
        if len(ids) != values.shape[0]:
            raise ValueError(f"got {len(ids)} ids for {values.shape[0]} functions")
        values = values.copy()
        grid = grid.copy()
        values.flags.writeable = False
        grid.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "ids", ids)

    @classmethod
    def from_array(cls, values, grid=None, ids=None):
        v = check_functions(values)
        if grid is None:
            grid = np.linspace(0.0, 1.0, v.shape[1])
        return cls(grid=grid, values=v, ids=ids)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def k(self):
        return self.values.shape[1]

    @property
    def d(self):
        return self.values.shape[2]

    def with_values(self, values):
        """Same grid and ids, new values (shape must match)."""
        return FunctionalSample(self.grid, check_functions(values, d=self.d), self.ids)

    def without(self, i):
        """The sample with function ``i`` removed (for leave-one-out depths)."""
        keep = np.arange(self.n) != i
        return FunctionalSample(self.grid, self.values[keep], tuple(np.asarray(self.ids)[keep]))

    def as_queries(self, query):
        """Coerce ``query`` to shape (q, k, d); also report whether it was a single function."""
        return as_queries(query, self.k, self.d)


def as_queries(query, k, d):
    if isinstance(query, FunctionalSample):
        query = query.values
    q = np.asarray(query, dtype=float)
    if q.ndim == 1:
        if d != 1 or q.shape[0] != k:
            raise ValueError(f"grid mismatch: query of shape {q.shape} for k={k}, d={d}")
        out, single = q[None, :, None], True
    elif q.ndim == 2:
        if q.shape == (k, d):
            out, single = q[None], True
        elif d == 1 and q.shape[1] == k:
            out, single = q[:, :, None], False
        else:
            raise ValueError(f"grid mismatch: query of shape {q.shape} for k={k}, d={d}")
    elif q.ndim == 3:
        if q.shape[1:] != (k, d):
            raise ValueError(f"grid mismatch: queries of shape {q.shape} for k={k}, d={d}")
        out, single = q, False
    else:
        raise ValueError(f"cannot interpret query of shape {q.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError("query contains NaN or infinite entries")
    return out, single
