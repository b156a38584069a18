"""Minkowski, fiber and Steiner symmetrizations of compact sets, with exact
arithmetic where the representation allows it."""

from .core import DimensionError, Dyadic, Subspace, project, reflect, rotation_2d
from .orbit import OrbitMean
from .sequences import ScheduleSpec, run_schedule
from .sets import ConvexPolygon, FinitePointSet, GridSet, IntervalUnion
from .symmetrize import (blaschke_rotation_mean, central_symmetrize, fiber_symmetrize,
                         isometry_mean, minkowski_symmetrize, steiner_symmetrize_grid)

__version__ = "0.1.0"

__all__ = [
    "Dyadic", "Subspace", "DimensionError", "project", "reflect", "rotation_2d",
    "ConvexPolygon", "FinitePointSet", "GridSet", "IntervalUnion", "OrbitMean",
    "minkowski_symmetrize", "central_symmetrize", "fiber_symmetrize",
    "steiner_symmetrize_grid", "isometry_mean", "blaschke_rotation_mean",
    "ScheduleSpec", "run_schedule",
]
