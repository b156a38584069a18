"""Finite point sets in R^n with exact dyadic or snapped-float coordinates."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from ..core import DEFAULT_TOL, Dyadic, Subspace
from . import _lattice as lat

MAX_PAIRS = 4_000_000
SNAP_RELATIVE = 1e-6


def default_snap(diameter: float) -> float:
    """Largest power of two not exceeding ``1e-6 * diameter``.

    A power-of-two resolution keeps every lattice coordinate a dyadic, so sums
    of lattice points are exact in binary64 and only halving/rotation snap.
    """
    base = SNAP_RELATIVE * diameter if diameter > 0 else SNAP_RELATIVE
    return math.ldexp(1.0, math.floor(math.log2(base)))


def _signed_permutation(M: np.ndarray) -> bool:
    M = np.asarray(M)
    if not np.all(np.isin(M, (-1.0, 0.0, 1.0))):
        return False
    return bool(np.all(np.abs(M).sum(axis=0) == 1) and np.all(np.abs(M).sum(axis=1) == 1))


class FinitePointSet:
    """Nonempty finite subset of R^n.

    Coordinates are integer lattice indices.  In exact mode (``snap is None``)
    the lattice step is ``2**exp`` and all arithmetic is exact.  In snapped
    mode the step is the snap resolution ``delta``; results of halving and of
    non-axis isometries are rounded to the lattice, moving each point by at
    most ``delta * sqrt(n) / 2``.
    """

    __slots__ = ("_idx", "_exp", "snap", "ambient_dim")

    def __init__(self, points: Iterable[Sequence], *, exact: bool = False,
                 snap: float | None = None, _raw=None):
        if _raw is not None:
            idx, self._exp, self.snap = _raw
        else:
            rows = [tuple(p) for p in points]
            if not rows:
                raise ValueError("FinitePointSet must be nonempty")
            n = len(rows[0])
            if any(len(r) != n for r in rows):
                raise ValueError("points of differing dimension")
            if exact:
                idx, self._exp = lat.to_scaled(rows)
                self.snap = None
            else:
                pts = np.asarray([[float(c) for c in r] for r in rows])
                self.snap = float(snap) if snap is not None else default_snap(_raw_diameter(pts))
                if self.snap <= 0:
                    raise ValueError("snap resolution must be positive")
                idx = np.rint(pts / self.snap).astype(np.int64)
                self._exp = 0
        idx = lat.unique_rows(np.atleast_2d(idx))
        if self.snap is None:
            idx, self._exp = lat.normalize(idx, self._exp)
        self._idx = idx
        self.ambient_dim = idx.shape[1]

    @classmethod
    def _exact(cls, idx, exp) -> "FinitePointSet":
        return cls((), _raw=(idx, exp, None))

    @classmethod
    def _snapped(cls, idx, snap) -> "FinitePointSet":
        return cls((), _raw=(idx, 0, snap))

    @classmethod
    def from_float_array(cls, pts: np.ndarray, snap: float) -> "FinitePointSet":
        return cls._snapped(np.rint(np.asarray(pts, dtype=float) / snap).astype(np.int64), snap)

    # -- views ---------------------------------------------------------

    @property
    def exact(self) -> bool:
        return self.snap is None

    @property
    def points(self) -> np.ndarray:
        if self.exact:
            return lat.to_float(self._idx, self._exp)
        return self._idx.astype(float) * self.snap

    def vectors(self) -> list[tuple]:
        if self.exact:
            return [tuple(Dyadic(int(c), self._exp) for c in r) for r in self._idx]
        return [tuple(r) for r in self.points.tolist()]

    def __len__(self) -> int:
        return len(self._idx)

    def __iter__(self):
        return iter(self.vectors())

    def __repr__(self) -> str:
        mode = "exact" if self.exact else f"snap={self.snap:g}"
        shown = ", ".join("(" + ", ".join(str(c) for c in v) + ")" for v in self.vectors()[:6])
        more = f", ... {len(self)} points" if len(self) > 6 else ""
        return f"FinitePointSet[{mode}]({shown}{more})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinitePointSet):
            return NotImplemented
        if self.exact != other.exact or len(self) != len(other):
            return False
        if self.exact:
            return self._exp == other._exp and bool(np.all(self._idx == other._idx))
        if self.snap == other.snap:
            return bool(np.all(self._idx == other._idx))
        return bool(np.allclose(self.points, other.points, atol=max(self.snap, other.snap)))

    __hash__ = None

    # -- arithmetic ----------------------------------------------------

    def _common(self, other: "FinitePointSet"):
        """Both operands on one lattice: (idx_a, idx_b, exp, snap)."""
        if self.ambient_dim != other.ambient_dim:
            from ..core import DimensionError
            raise DimensionError("point sets live in different dimensions")
        if self.exact and other.exact:
            a, b, e = lat.align(self._idx, self._exp, other._idx, other._exp)
            return a, b, e, None
        snap = min(s for s in (self.snap, other.snap) if s is not None)
        fa = self._idx if self.snap == snap else np.rint(self.points / snap).astype(np.int64)
        fb = other._idx if other.snap == snap else np.rint(other.points / snap).astype(np.int64)
        return fa, fb, 0, snap

    def _wrap(self, idx, exp, snap) -> "FinitePointSet":
        return FinitePointSet._exact(idx, exp) if snap is None else FinitePointSet._snapped(idx, snap)

    def __add__(self, other: "FinitePointSet") -> "FinitePointSet":
        if not isinstance(other, FinitePointSet):
            return NotImplemented
        a, b, e, snap = self._common(other)
        if len(a) * len(b) > MAX_PAIRS:
            raise lat.SizeLimitError(f"{len(a)} x {len(b)} pairwise sums exceed the budget")
        a, b = lat.widen(a), lat.widen(b)
        s = (a[:, None, :] + b[None, :, :]).reshape(-1, a.shape[1])
        return self._wrap(s, e, snap)

    def union(self, other: "FinitePointSet") -> "FinitePointSet":
        a, b, e, snap = self._common(other)
        return self._wrap(np.concatenate([a, b]), e, snap)

    def scale(self, t) -> "FinitePointSet":
        if float(t) < 0:
            raise ValueError("scale factor must be nonnegative")
        if float(t) == 0:
            return self._wrap(np.zeros((1, self.ambient_dim), dtype=np.int64),
                              0, self.snap)
        if self.exact:
            t = Dyadic.coerce(t)
            return FinitePointSet._exact(lat.widen(self._idx) * t.mantissa, self._exp + t.exponent)
        # rescaling the lattice step moves no point off the lattice
        return FinitePointSet._snapped(self._idx, self.snap * float(t))

    def half(self) -> "FinitePointSet":
        if self.exact:
            return FinitePointSet._exact(self._idx, self._exp - 1)
        return self.from_float_array(self.points / 2.0, self.snap)

    def translate(self, v) -> "FinitePointSet":
        if self.exact and all(not isinstance(c, float) or float(c).is_integer() or True for c in v):
            try:
                vv, ve = lat.to_scaled([list(v)])
            except (TypeError, ValueError):
                vv = None
            if vv is not None:
                a, b, e = lat.align(self._idx, self._exp, vv, ve)
                return FinitePointSet._exact(lat.widen(a) + b[0], e)
        return self.from_float_array(self.points + np.asarray(v, dtype=float), self.snap)

    def transform(self, M: np.ndarray) -> "FinitePointSet":
        """Image under the linear map ``x -> M x``."""
        M = np.asarray(M, dtype=float)
        if _signed_permutation(M):
            return self._wrap(self._idx @ M.T.astype(np.int64) if self._idx.dtype != object
                              else np.array([[sum(int(M[i, j]) * int(r[j]) for j in range(len(r)))
                                              for i in range(len(r))] for r in self._idx], dtype=object),
                              self._exp, self.snap)
        snap = self.snap if self.snap is not None else default_snap(self.diameter())
        return self.from_float_array(self.points @ M.T, snap)

    def reflect(self, H: Subspace) -> "FinitePointSet":
        if H.ambient_dim != self.ambient_dim:
            from ..core import DimensionError
            raise DimensionError("subspace and point set dimensions differ")
        if H.axis_aligned:
            sign = np.array([1 if i in H.axes else -1 for i in range(self.ambient_dim)])
            return self._wrap(self._idx * sign, self._exp, self.snap)
        return self.transform(H.reflection_matrix())

    def to_snapped(self, snap: float) -> "FinitePointSet":
        return self.from_float_array(self.points, snap)

    # -- queries -------------------------------------------------------

    def rows(self) -> set[tuple]:
        return {tuple(int(c) for c in r) for r in self._idx}

    def issubset(self, other: "FinitePointSet", tol: float = DEFAULT_TOL) -> bool:
        if self.exact and other.exact:
            a, b, _, _ = self._common(other)
            return {tuple(map(int, r)) for r in a} <= {tuple(map(int, r)) for r in b}
        from scipy.spatial import cKDTree
        d, _ = cKDTree(other.points).query(self.points)
        return bool(d.max() <= tol + (other.snap or 0.0) * 0.5)

    def contains(self, p, tol: float = DEFAULT_TOL) -> bool:
        q = FinitePointSet([p], exact=self.exact, snap=self.snap)
        return q.issubset(self, tol)

    def support(self, u) -> float:
        u = np.asarray(u, dtype=float)
        if not np.any(u):
            raise ValueError("support function needs a nonzero direction")
        return float((self.points @ u).max())

    def hull_vertices(self) -> np.ndarray:
        """Extreme points of the convex hull as a float array."""
        pts = self.points
        n = self.ambient_dim
        if len(pts) <= n + 1:
            return pts
        if n == 1:
            return np.array([[pts.min()], [pts.max()]])
        if n == 2:
            from .polygon import monotone_chain
            return monotone_chain(pts)
        from scipy.spatial import ConvexHull, QhullError
        try:
            return pts[ConvexHull(pts).vertices]
        except QhullError:
            return pts

    def diameter(self):
        if self.exact and self.ambient_dim == 1:
            col = self._idx[:, 0]
            return Dyadic(int(col.max()) - int(col.min()), self._exp)
        return _raw_diameter(self.points, self.hull_vertices())


def _raw_diameter(pts: np.ndarray, hull: np.ndarray | None = None) -> float:
    if len(pts) <= 1:
        return 0.0
    if hull is None:
        if pts.shape[1] == 2 and len(pts) > 3:
            from .polygon import monotone_chain
            hull = monotone_chain(pts)
        else:
            hull = pts
    if pts.shape[1] == 2 and len(hull) > 2:
        from .polygon import rotating_calipers_diameter
        return rotating_calipers_diameter(hull)
    from scipy.spatial.distance import pdist
    return float(pdist(hull).max()) if len(hull) > 1 else 0.0
