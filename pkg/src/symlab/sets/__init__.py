"""Compact-set representations and the representation-generic toolkit."""

from __future__ import annotations

import math
from functools import singledispatch


from ..core import DEFAULT_TOL, DimensionError, Dyadic
from ._lattice import SizeLimitError
from .grid import GridSet, GridSpacingError, points_to_grid, polygon_to_grid
from .intervals import IntervalUnion, hausdorff_1d
from .metrics import grid_to_intervals, hausdorff_with_error, points_to_intervals
from .pointset import FinitePointSet, default_snap
from .polygon import ConvexPolygon, hausdorff_convex, minkowski_sum_many

SetRep = IntervalUnion | FinitePointSet | GridSet | ConvexPolygon

__all__ = [
    "ConvexPolygon", "FinitePointSet", "GridSet", "IntervalUnion", "SetRep",
    "GridSpacingError", "SizeLimitError", "RepresentationError",
    "minkowski_sum", "scale", "convex_hull", "hausdorff_distance", "diameter",
    "support_function", "mean_width_2d", "volume", "to_grid", "reflect_set",
    "default_snap", "minkowski_sum_many", "hausdorff_1d", "hausdorff_convex",
]


class RepresentationError(TypeError):
    """Operands of different set representations."""


def minkowski_sum(A, B):
    """{a + b : a in A, b in B} for two sets of one representation."""
    if type(A) is not type(B):
        raise RepresentationError(f"cannot add {type(A).__name__} and {type(B).__name__}")
    if A.ambient_dim != B.ambient_dim:
        raise DimensionError("operands live in different dimensions")
    return A + B


@singledispatch
def scale(A, t):
    raise RepresentationError(f"unsupported set type {type(A).__name__}")


@scale.register
def _(A: IntervalUnion, t):
    return A.scale(t)


@scale.register
def _(A: FinitePointSet, t):
    return A.scale(t)


@scale.register
def _(A: GridSet, t):
    return A.scale(t)


@scale.register
def _(A: ConvexPolygon, t):
    if float(t) < 0:
        raise ValueError("scale factor must be nonnegative")
    return A.scale(float(t))


@singledispatch
def convex_hull(A):
    raise RepresentationError(f"unsupported set type {type(A).__name__}")


@convex_hull.register
def _(A: IntervalUnion):
    return A.hull()


@convex_hull.register
def _(A: ConvexPolygon):
    return A


@convex_hull.register
def _(A: FinitePointSet):
    if A.ambient_dim == 1:
        return points_to_intervals(A).hull()
    if A.ambient_dim == 2:
        return ConvexPolygon.hull_of(A.points)
    if A.exact:
        keep = {tuple(r) for r in A.hull_vertices().tolist()}
        return FinitePointSet([v for v, p in zip(A.vectors(), A.points.tolist()) if tuple(p) in keep],
                              exact=True)
    return FinitePointSet.from_float_array(A.hull_vertices(), A.snap)


@convex_hull.register
def _(A: GridSet):
    if A.ambient_dim == 1:
        return grid_to_intervals(A).hull()
    if A.ambient_dim == 2:
        return ConvexPolygon.hull_of(A.hull_vertices())
    # corners are dyadic, so the extreme-point set is exact
    return FinitePointSet([[Dyadic.from_float(c) for c in p] for p in A.hull_vertices()], exact=True)


def hausdorff_distance(A, B, with_error: bool = False):
    """Hausdorff distance; ``with_error`` also returns the metric error bound.

    Exact for interval unions (a Dyadic) and polygon pairs; point-set pairs
    are exact up to float rounding; a grid enters through its cell centers.
    """
    val, err = hausdorff_with_error(A, B)
    return (val, err) if with_error else val


@singledispatch
def diameter(A):
    raise RepresentationError(f"unsupported set type {type(A).__name__}")


@diameter.register
def _(A: IntervalUnion):
    return A.diameter()


@diameter.register
def _(A: FinitePointSet):
    return A.diameter()


@diameter.register
def _(A: GridSet):
    return A.diameter()


@diameter.register
def _(A: ConvexPolygon):
    return A.diameter()


def support_function(A, u) -> float:
    return A.support(u)


def mean_width_2d(A: ConvexPolygon) -> float:
    if not isinstance(A, ConvexPolygon):
        raise RepresentationError("mean width is defined here for convex polygons")
    return A.mean_width()


@singledispatch
def volume(A):
    raise RepresentationError(f"unsupported set type {type(A).__name__}")


@volume.register
def _(A: IntervalUnion):
    return A.volume()


@volume.register
def _(A: GridSet):
    return A.volume()


@volume.register
def _(A: ConvexPolygon):
    return A.area()


@volume.register
def _(A: FinitePointSet):
    return Dyadic(0)


def to_grid(A, h) -> GridSet:
    if float(h) <= 0:
        raise ValueError("grid spacing must be positive")
    if isinstance(A, ConvexPolygon):
        return polygon_to_grid(A, h)
    if isinstance(A, FinitePointSet):
        return points_to_grid(A.points, h)
    raise RepresentationError(f"cannot grid a {type(A).__name__}")


def reflect_set(A, H):
    """Image R_H A for any representation."""
    if isinstance(A, IntervalUnion):
        if H.dim != 0:
            raise DimensionError("a subset of the line only reflects through the origin")
        return -A
    if isinstance(A, ConvexPolygon):
        return A.transform(H.reflection_matrix())
    return A.reflect(H)


def grid_collar(G: GridSet) -> float:
    """One-cell tolerance h*sqrt(n) used for grid convexity verdicts."""
    return float(G.spacing) * math.sqrt(G.ambient_dim)


def close_sets(A, B, tol: float = DEFAULT_TOL) -> bool:
    val, err = hausdorff_with_error(A, B)
    return float(val) <= tol + (err if isinstance(A, GridSet) or isinstance(B, GridSet) else 0.0)
