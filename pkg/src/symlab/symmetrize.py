"""Symmetrization maps, dispatched on the set representation."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np
from scipy import signal

from .core import DimensionError, Dyadic, Subspace, rotation_2d
from .orbit import OrbitMean
from .sets import (ConvexPolygon, FinitePointSet, GridSet, IntervalUnion,
                   RepresentationError, minkowski_sum_many)
from .sets.pointset import MAX_PAIRS


def max_workers() -> int:
    try:
        return max(1, int(os.environ.get("SYMLAB_THREADS", "")))
    except ValueError:
        return min(8, os.cpu_count() or 1)


def _check_dim(A, H: Subspace) -> None:
    if A.ambient_dim != H.ambient_dim:
        raise DimensionError(f"set in R^{A.ambient_dim}, subspace in R^{H.ambient_dim}")


def minkowski_symmetrize(A, H: Subspace):
    """M_H A = (A + R_H A) / 2."""
    _check_dim(A, H)
    if isinstance(A, IntervalUnion):
        if H.dim != 0:
            raise ValueError("on the line only the origin is a proper subspace")
        return (A + (-A)).half()
    if isinstance(A, GridSet):
        if not H.axis_aligned:
            raise ValueError("grid symmetrization needs an axis-aligned subspace")
        return (A + A.reflect(H)).half()
    if isinstance(A, FinitePointSet):
        return (A + A.reflect(H)).half()
    if isinstance(A, ConvexPolygon):
        return minkowski_sum_many([A, A.transform(H.reflection_matrix())], [0.5, 0.5], A.tol)
    if isinstance(A, OrbitMean):
        return A.symmetrize(H)
    raise RepresentationError(f"unsupported set type {type(A).__name__}")


def central_symmetrize(A):
    """(A - A) / 2."""
    return minkowski_symmetrize(A, Subspace.origin(A.ambient_dim))


def _fiber_frame(A: GridSet, H: Subspace):
    _check_dim(A, H)
    if not H.axis_aligned:
        raise ValueError("fiber symmetrization needs an axis-aligned subspace")
    return list(H.axes), list(H.complement_axes)


def fiber_symmetrize(A: GridSet, H: Subspace) -> GridSet:
    """Central symmetrization of every section A ∩ (x + H^perp), centered at x in H.

    The spacing halves once: each H-layer j becomes layers 2j and 2j+1 and each
    section S becomes the realized set (S - S)/2 in the perpendicular axes.
    """
    if not isinstance(A, GridSet):
        raise RepresentationError("fiber symmetrization is implemented on grids")
    h_axes, f_axes = _fiber_frame(A, H)
    if not 1 <= len(h_axes) <= A.ambient_dim - 1:
        raise ValueError("fiber symmetrization needs 1 <= dim H <= n-1")
    m = np.moveaxis(A.mask, h_axes + f_axes, range(A.ambient_dim))
    hs = m.shape[:len(h_axes)]
    fs = m.shape[len(h_axes):]
    k = len(f_axes)
    box = np.ones((2,) * k, dtype=np.int32)
    out = np.zeros(tuple(2 * s for s in hs) + tuple(2 * s for s in fs), dtype=bool)
    for idx in np.ndindex(*hs):
        sec = m[idx]
        if not sec.any():
            continue
        neg = np.flip(sec, axis=tuple(range(k)))
        # realized [c, c+1] + [-d-1, -d] gives cells c-d-1 + {0, 1}
        s = signal.convolve(sec.astype(np.int32), neg.astype(np.int32))
        s = signal.convolve((s > 0).astype(np.int32), box) > 0
        for layer in np.ndindex(*((2,) * len(h_axes))):
            out[tuple(2 * i + l for i, l in zip(idx, layer))] = s
    origin_h = [2 * A.origin[ax] for ax in h_axes]
    origin_f = [-s for s in fs]
    inv = np.argsort(h_axes + f_axes)
    mask = np.moveaxis(out, range(A.ambient_dim), h_axes + f_axes)
    origin = np.array(origin_h + origin_f)[inv]
    return GridSet.from_mask(mask, tuple(int(v) for v in origin), A.spacing.half())


def steiner_symmetrize_grid(A: GridSet, H: Subspace) -> GridSet:
    """Replace each line section orthogonal to H by a run centered on H.

    A section of c cells becomes the run [-c/2, c/2] (realized).  When some c
    is odd the run is not cell-aligned, so the whole grid is refined once and
    every section becomes 2c cells; volume is preserved exactly either way.
    """
    if not isinstance(A, GridSet):
        raise RepresentationError("Steiner symmetrization is implemented on grids")
    h_axes, f_axes = _fiber_frame(A, H)
    if len(f_axes) != 1:
        raise ValueError("Steiner symmetrization needs dim H = n-1")
    ax = f_axes[0]
    counts = A.mask.sum(axis=ax)
    refine = bool((counts % 2).any())
    f = 2 if refine else 1
    counts = counts * f
    if refine:
        for a in range(counts.ndim):
            counts = np.repeat(counts, 2, axis=a)
    half = int(counts.max()) // 2
    pos = np.arange(-half, half)
    shape_c = counts.shape
    run = np.abs(pos + 0.5)[(None,) * len(shape_c)] < (counts[..., None] / 2)
    mask = np.moveaxis(run, -1, ax)
    origin = [A.origin[a] * f for a in range(A.ambient_dim) if a != ax]
    origin.insert(ax, -half)
    spacing = A.spacing.half() if refine else A.spacing
    return GridSet.from_mask(mask, tuple(origin), spacing)


def _as_matrix(T, n: int) -> np.ndarray:
    if isinstance(T, Subspace):
        return T.reflection_matrix()
    if isinstance(T, str) and T == "id":
        return np.eye(n)
    M = np.asarray(T, dtype=float)
    if M.shape != (n, n) or not np.allclose(M @ M.T, np.eye(n), atol=1e-9):
        raise ValueError("isometries must be orthogonal n x n matrices")
    return M


def _signed_permutation(M: np.ndarray) -> bool:
    return bool(np.all(np.isin(M, (-1.0, 0.0, 1.0))) and np.all(np.abs(M).sum(axis=0) == 1)
                and np.all(np.abs(M).sum(axis=1) == 1))


def _grid_image(A: GridSet, M: np.ndarray) -> GridSet:
    if not _signed_permutation(M):
        raise ValueError("grid isometries must be signed coordinate permutations")
    perm = [int(np.flatnonzero(M[i])[0]) for i in range(A.ambient_dim)]
    sign = [int(M[i, perm[i]]) for i in range(A.ambient_dim)]
    # output axis i takes input axis perm[i]
    g = GridSet.from_mask(np.transpose(A.mask, perm), [A.origin[p] for p in perm], A.spacing)
    return g.flip([i for i in range(A.ambient_dim) if sign[i] < 0])


def isometry_mean(A, isometries: Sequence):
    """(1/m) sum_j A_j(A) for linear isometries given as matrices, Subspaces
    (meaning their reflections) or ``"id"``."""
    m = len(isometries)
    if m == 0:
        raise ValueError("need at least one isometry")
    n = A.ambient_dim
    mats = [_as_matrix(T, n) for T in isometries]
    pow2 = m & (m - 1) == 0
    if isinstance(A, OrbitMean):
        return A.isometry_mean(mats)
    if isinstance(A, ConvexPolygon):
        return minkowski_sum_many([A.transform(M) for M in mats], [1.0 / m] * m, A.tol)
    if isinstance(A, IntervalUnion):
        if not all(abs(M[0, 0]) == 1 for M in mats):
            raise ValueError("isometries of the line are +1 and -1")
        terms = [A if M[0, 0] > 0 else -A for M in mats]
        scale = Dyadic(1, -(m.bit_length() - 1)) if pow2 else None
        if scale is None:
            raise ValueError("interval means need a power-of-two number of terms")
    elif isinstance(A, GridSet):
        if not pow2:
            raise ValueError("grid means need a power-of-two number of terms")
        terms = [_grid_image(A, M) for M in mats]
        scale = Dyadic(1, -(m.bit_length() - 1))
    elif isinstance(A, FinitePointSet):
        with ThreadPoolExecutor(max_workers()) as ex:
            terms = list(ex.map(A.transform, mats))
        scale = Dyadic(1, -(m.bit_length() - 1)) if pow2 else 1.0 / m
        if not pow2 and terms[0].exact:
            terms = [t.to_snapped(_default_snap(A)) for t in terms]
    else:
        raise RepresentationError(f"unsupported set type {type(A).__name__}")
    acc = terms[0]
    for t in terms[1:]:
        acc = acc + t
    return acc.scale(scale)


def _default_snap(A: FinitePointSet) -> float:
    from .sets.pointset import default_snap
    return default_snap(float(A.diameter()))


def blaschke_rotation_mean(A, N: int):
    """(1/N) sum_k R_{2 pi k / N} A, the rotation-mean approximation of
    Minkowski-Blaschke symmetrization in the plane."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if A.ambient_dim != 2:
        raise DimensionError("rotation means are planar")
    if N == 1:
        return A
    mats = [rotation_2d(2 * np.pi * k / N) for k in range(N)]
    if isinstance(A, FinitePointSet):
        if len(A) ** min(N, 64) > MAX_PAIRS:
            return OrbitMean(A).isometry_mean(mats)
        return isometry_mean(A, mats)
    return isometry_mean(A, mats)
