"""Hausdorff distance across representations.

Every routine returns ``(value, err)`` with the true distance in
``[value, value + err]`` (or ``[value - err, value + err]`` for grid pairs,
whose cells are compared through their centers).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from ..core import DimensionError, Dyadic
from .grid import GridSet
from .intervals import IntervalUnion, hausdorff_1d
from .pointset import FinitePointSet
from .polygon import ConvexPolygon, hausdorff_convex

BNB_MAX_BOXES = 400_000


def point_excess(P: np.ndarray, Q: np.ndarray) -> float:
    """sup over p in P of dist(p, Q) for finite point arrays."""
    d, _ = cKDTree(Q).query(P)
    return float(d.max())


def polygon_over_points(poly: ConvexPolygon, pts: np.ndarray, rel_tol: float = 1e-12):
    """sup over x in ``poly`` of dist(x, pts), by Lipschitz branch and bound.

    The distance field is 1-Lipschitz, so a box with center ``c`` and
    half-diagonal ``r`` cannot beat ``f(c) + r``.  Returns ``(lower, gap)``.
    """
    tree = cKDTree(pts)
    v = poly.vertices
    best = float(tree.query(v)[0].max())
    scale = max(poly.diameter(), float(np.ptp(pts, axis=0).max()) if len(pts) > 1 else 0.0, 1e-300)
    eps = rel_tol * scale
    if len(v) == 1:
        return best, 0.0
    if len(v) == 2:
        exact = _collinear_segment_gap(v[0], v[1], pts)
        if exact is not None:
            return exact, 0.0
        return _segment_over_points(v[0], v[1], tree, best, eps)
    lo, hi = v.min(axis=0), v.max(axis=0)
    half = float((hi - lo).max()) / 2
    centers = ((lo + hi) / 2)[None, :]
    while True:
        r = half * math.sqrt(2)
        f, _ = tree.query(centers)
        sd = poly.signed_distance(centers)
        inside = sd <= 0
        if inside.any():
            best = max(best, float(f[inside].max()))
        # drop boxes that miss the polygon or cannot beat the incumbent
        keep = (sd <= r) & (f + r > best + eps)
        centers = centers[keep]
        if not len(centers):
            return best, eps
        if r <= eps or len(centers) * 4 > BNB_MAX_BOXES:
            return best, float((f[keep] + r).max() - best)
        half /= 2
        offs = np.array([[-1, -1], [-1, 1], [1, -1], [1, 1]]) * half
        centers = (centers[:, None, :] + offs[None]).reshape(-1, 2)


def _collinear_segment_gap(a, b, pts):
    """Exact sup over [a, b] of dist(x, pts) when every point lies on the segment."""
    d = b - a
    L2 = float(d @ d)
    rel = pts - a
    if np.any(rel[:, 0] * d[1] - rel[:, 1] * d[0] != 0):
        return None
    t = np.sort(rel @ d) / L2
    if t[0] < 0 or t[-1] > 1:
        return None
    t = np.concatenate([[0.0], t, [1.0]])
    g = np.diff(t)
    ends = max(g[0], g[-1])
    inner = g[1:-1].max(initial=0.0) / 2
    return float(max(ends, inner) * math.sqrt(L2))


def _segment_over_points(a, b, tree, best, eps):
    L = float(np.linalg.norm(b - a))
    if L == 0:
        return best, 0.0
    half = 0.5
    ts = np.array([0.5])
    while True:
        r = half * L
        f, _ = tree.query(a[None, :] + ts[:, None] * (b - a)[None, :])
        best = max(best, float(f.max()))
        keep = f + r > best + eps
        ts = ts[keep]
        if not len(ts):
            return best, eps
        if r <= eps or len(ts) * 2 > BNB_MAX_BOXES:
            return best, float((f[keep] + r).max() - best)
        half /= 2
        ts = np.concatenate([ts - half, ts + half])


def _points_polygon(A: FinitePointSet, P: ConvexPolygon):
    pts = A.points
    e1 = float(np.maximum(P.signed_distance(pts), 0.0).max())
    e2, gap = polygon_over_points(P, pts)
    return max(e1, e2), gap


def _grid_frame(A: GridSet, B: GridSet):
    a, b, lo, h = A._frame(B)
    return a, b, h


def _grid_grid(A: GridSet, B: GridSet):
    a, b, h = _grid_frame(A, B)
    n = a.ndim
    if np.array_equal(a, b):
        return 0.0, 0.0  # same cells, same union
    pad = [(1, 1)] * n

    def excess(x, y):
        # distance from every x-cell center to the nearest y-cell center
        if not (x & ~y).any():
            return 0.0
        dt = ndimage.distance_transform_edt(np.pad(~y, pad, constant_values=True))
        return float(dt[tuple(slice(1, -1) for _ in range(n))][x].max())

    val = max(excess(a, b), excess(b, a)) * float(h)
    return val, float(h) * math.sqrt(n)


def grid_to_intervals(G: GridSet) -> IntervalUnion:
    c = G.cell_array[:, 0]
    return IntervalUnion([(Dyadic(int(i), 0) * G.spacing, Dyadic(int(i) + 1, 0) * G.spacing)
                          for i in c])


def points_to_intervals(A: FinitePointSet) -> IntervalUnion:
    vals = [v[0] for v in A.vectors()]
    return IntervalUnion.points(vals if A.exact else [Dyadic.from_float(x) for x in vals])


def hausdorff_with_error(A, B) -> tuple:
    """Hausdorff distance and an error bound for any pair of set types."""
    if A.ambient_dim != B.ambient_dim:
        raise DimensionError("sets live in different dimensions")
    if A.ambient_dim == 1:
        return hausdorff_1d(_as_intervals(A), _as_intervals(B)), 0.0
    ka, kb = _kind(A), _kind(B)
    if ka > kb:
        A, B, ka, kb = B, A, kb, ka
    if (ka, kb) == ("grid", "grid"):
        return _grid_grid(A, B)
    if (ka, kb) == ("points", "points"):
        pa, pb = A.points, B.points
        return max(point_excess(pa, pb), point_excess(pb, pa)), 0.0
    if (ka, kb) == ("polygon", "polygon"):
        return hausdorff_convex(A, B), 0.0
    if ka == "grid":
        # compare cell centers against the other set; centers sit within
        # h*sqrt(n)/2 of every realized point
        coll = float(A.spacing) * math.sqrt(A.ambient_dim) / 2
        C = FinitePointSet.from_float_array(A.centers(), float(A.spacing) / 1024)
        v, e = hausdorff_with_error(C, B)
        return v, e + coll
    if (ka, kb) == ("points", "polygon"):
        return _points_polygon(A, B)
    raise TypeError(f"no Hausdorff routine for {type(A).__name__} and {type(B).__name__}")


def _kind(A) -> str:
    if isinstance(A, GridSet):
        return "grid"
    if isinstance(A, FinitePointSet):
        return "points"
    if isinstance(A, ConvexPolygon):
        return "polygon"
    raise TypeError(f"unsupported set type {type(A).__name__}")


def _as_intervals(A) -> IntervalUnion:
    if isinstance(A, IntervalUnion):
        return A
    if isinstance(A, GridSet):
        return grid_to_intervals(A)
    if isinstance(A, FinitePointSet):
        return points_to_intervals(A)
    raise TypeError(f"{type(A).__name__} has no 1-D interval form")
