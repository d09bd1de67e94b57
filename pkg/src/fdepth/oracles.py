"""Brute-force reference depths, kept separate from the production paths.

These are slow by design and only meant for checking the fast algorithms.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .multivariate import DepthError

__all__ = ["oracle_halfspace", "oracle_zonoid"]


def oracle_halfspace(query, data):
    """Halfspace depth by exhaustive enumeration, for d <= 2 and n <= 200.

    d = 1 counts directly.  d = 2 examines every critical direction, i.e. the
    normal of each query-to-point vector (both orientations), and for each
    one the two limits obtained by rotating slightly either way: points on
    the critical line then fall on the side given by their dot product with
    the rotation direction.  Every sign is evaluated in exact rational
    arithmetic, so ties and collinearities are decided exactly.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n, d = x.shape
    if d > 2:
        raise DepthError("oracle supports d <= 2")
    if n == 0:
        raise DepthError("empty cloud")
    if n > 200:
        raise DepthError("oracle supports n <= 200")
    z = np.atleast_1d(np.asarray(query, dtype=float))
    if d == 1:
        below = sum(1 for v in x[:, 0] if v <= z[0])
        above = sum(1 for v in x[:, 0] if v >= z[0])
        return min(below, above) / n

    zq = [Fraction(float(c)) for c in z]
    vecs = [(Fraction(float(p[0])) - zq[0], Fraction(float(p[1])) - zq[1]) for p in x]
    at_query = sum(1 for v in vecs if v == (0, 0))
    others = [v for v in vecs if v != (0, 0)]
    if not others:
        return 1.0
    best = len(others)
    for a in others:
        for side in (1, -1):
            for tilt in (1, -1):
                count = 0
                for b in others:
                    cr = a[0] * b[1] - a[1] * b[0]
                    if cr * side > 0:
                        count += 1
                    elif cr == 0 and (a[0] * b[0] + a[1] * b[1]) * tilt > 0:
                        count += 1
                best = min(best, count)
    return (at_query + best) / n


def _zonoid_feasible(z, x, alpha):
    n = x.shape[0]
    cap = 1.0 / (n * alpha)
    a_eq = np.vstack([x.T, np.ones(n)])
    b_eq = np.append(z, 1.0)
    res = linprog(
        np.zeros(n),
        A_eq=a_eq,
        b_eq=b_eq,
        bounds=[(0.0, cap)] * n,
        method="highs-ipm",
        options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10},
    )
    return res.status == 0


def oracle_zonoid(query, data, tol=1e-10):
    """Zonoid depth by bisection on alpha with an LP feasibility test.

    Uses plain feasibility problems (interior point, no objective) on the
    raw coordinates, independent of the min-max formulation.
    """
    x = np.asarray(data, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    z = np.atleast_1d(np.asarray(query, dtype=float))
    n = x.shape[0]
    if not _zonoid_feasible(z, x, 1.0 / n):
        return 0.0
    if _zonoid_feasible(z, x, 1.0):
        return 1.0
    lo, hi = 1.0 / n, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _zonoid_feasible(z, x, mid):
            lo = mid
        else:
            hi = mid
    return lo
