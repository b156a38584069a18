"""Implicit iterated symmetrals of planar point sets.

Every Minkowski-symmetrization schedule started at a finite set C produces a
weighted isometry mean ``K = (1/T) sum_g c_g * g C`` where ``c_g * gC`` is the
sum of ``c_g`` copies.  Enumerating K costs up to ``|C|**T`` points, but its
hull is ``sum_g (c_g/T) g conv C`` and the distance from K to that hull is
controlled by a covering radius of C.  ``OrbitMean`` stores only (C, counts).
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Iterable

import numpy as np
from scipy.spatial import Delaunay, QhullError

from .core import Subspace
from .sets.pointset import MAX_PAIRS, FinitePointSet
from .sets.polygon import ConvexPolygon, minkowski_sum_many

_KEY_DIGITS = 9


def _key(M: np.ndarray) -> tuple:
    # isometries built from a finite family repeat; rounding merges them
    return tuple((np.round(M, _KEY_DIGITS) + 0.0).ravel().tolist())


def triangle_cover_radius(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """max over each triangle of the distance to its nearest vertex (vectorized).

    Candidates are the circumcenter when it lies inside and the points where
    a perpendicular bisector of two vertices meets an edge.
    """
    V = np.stack([a, b, c], axis=1)  # (t, 3, 2)
    best = np.zeros(len(V))

    def nearest(P):
        return np.min(np.linalg.norm(P[:, None, :] - V, axis=2), axis=1)

    def inside(P):
        s = []
        for i in range(3):
            p, q = V[:, i], V[:, (i + 1) % 3]
            s.append((q[:, 0] - p[:, 0]) * (P[:, 1] - p[:, 1]) - (q[:, 1] - p[:, 1]) * (P[:, 0] - p[:, 0]))
        s = np.stack(s, axis=1)
        tol = 1e-12 * np.abs(s).max(axis=1, initial=0.0)
        return np.all(s >= -tol[:, None], axis=1) | np.all(s <= tol[:, None], axis=1)

    ax, ay, bx, by, cx, cy = a[:, 0], a[:, 1], b[:, 0], b[:, 1], c[:, 0], c[:, 1]
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    ok = np.abs(d) > 0
    dd = np.where(ok, d, 1.0)
    ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay) + (cx**2 + cy**2) * (ay - by)) / dd
    uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx) + (cx**2 + cy**2) * (bx - ax)) / dd
    cc = np.stack([ux, uy], axis=1)
    m = ok & inside(cc)
    best = np.where(m, np.maximum(best, nearest(cc)), best)
    for i, j in ((0, 1), (1, 2), (0, 2)):
        mid = (V[:, i] + V[:, j]) / 2
        nrm = V[:, j] - V[:, i]
        for k in range(3):
            p, q = V[:, k], V[:, (k + 1) % 3]
            e = q - p
            den = np.einsum("tk,tk->t", e, nrm)
            good = np.abs(den) > 1e-300
            t = np.einsum("tk,tk->t", mid - p, nrm) / np.where(good, den, 1.0)
            good &= (t >= 0) & (t <= 1)
            P = p + np.clip(t, 0, 1)[:, None] * e
            best = np.where(good, np.maximum(best, nearest(P)), best)
    return best


def cover_radius(points: np.ndarray) -> float:
    """Largest triangle cover radius over a triangulation of the points.

    This is the per-copy error of approximating ``c * conv C`` by a sum of
    ``c`` points of C in the plane.
    """
    pts = np.unique(np.asarray(points, dtype=float), axis=0)
    if len(pts) <= 1:
        return 0.0
    centered = pts - pts.mean(axis=0)
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    if len(pts) == 2 or sv[-1] <= 1e-12 * sv[0]:
        s = np.sort(centered @ vt[0])
        return float(np.diff(s).max() / 2)
    try:
        tri = Delaunay(pts)
    except QhullError:
        s = np.sort(centered @ vt[0])
        return float(np.diff(s).max() / 2)
    S = pts[tri.simplices]
    return float(triangle_cover_radius(S[:, 0], S[:, 1], S[:, 2]).max())


class OrbitMean:
    """K = (1/T) sum_g c_g * g(C) for linear isometries g of the plane."""

    __slots__ = ("base", "terms", "total", "_cov", "_hull", "ambient_dim")

    def __init__(self, base: FinitePointSet, terms: dict | None = None, total: int = 1,
                 _cov: float | None = None):
        if base.ambient_dim != 2:
            raise ValueError("OrbitMean is implemented for planar sets")
        self.base = base
        self.terms = terms if terms is not None else {_key(np.eye(2)): (np.eye(2), 1)}
        self.total = total
        self._cov = _cov
        self._hull = None
        self.ambient_dim = 2

    @property
    def cover(self) -> float:
        if self._cov is None:
            self._cov = cover_radius(self.base.points)
        return self._cov

    def _derive(self, terms: dict, total: int) -> "OrbitMean":
        return OrbitMean(self.base, terms, total, self._cov)

    def isometry_mean(self, mats: Iterable[np.ndarray]) -> "OrbitMean":
        """(1/m) sum_j A_j K for the given orthogonal matrices."""
        mats = [np.asarray(A, dtype=float) for A in mats]
        acc: Counter = Counter()
        store = {}
        for A in mats:
            for M, c in self.terms.values():
                G = A @ M
                k = _key(G)
                store.setdefault(k, G)
                acc[k] += c
        return self._derive({k: (store[k], acc[k]) for k in sorted(acc)}, self.total * len(mats))

    def symmetrize(self, H: Subspace) -> "OrbitMean":
        return self.isometry_mean([np.eye(2), H.reflection_matrix()])

    def reflect(self, H: Subspace) -> "OrbitMean":
        return self.transform(H.reflection_matrix())

    def transform(self, A: np.ndarray) -> "OrbitMean":
        out = {}
        for M, c in self.terms.values():
            G = A @ M
            out[_key(G)] = (G, c)
        return self._derive(out, self.total)

    @property
    def n_terms(self) -> int:
        return len(self.terms)

    def hull(self) -> ConvexPolygon:
        if self._hull is None:
            P = ConvexPolygon.hull_of(self.base.points)
            polys = [P.transform(M) for M, _ in self.terms.values()]
            w = [c / self.total for _, c in self.terms.values()]
            self._hull = minkowski_sum_many(polys, w)
        return self._hull

    def gap_bound(self) -> float:
        """Certified upper bound on d_H(K, conv K)."""
        if self.total == 1:
            return self.cover
        return self.n_terms * self.cover / self.total

    def cardinality_bound(self) -> int:
        n = len(self.base)
        out = 1
        for _, c in self.terms.values():
            out *= math.comb(n + c - 1, c)
        return out

    def materialize(self, snap: float | None = None, budget: int = MAX_PAIRS) -> FinitePointSet:
        """Enumerate K on the snap lattice (exact when possible)."""
        if self.cardinality_bound() > budget:
            from .sets import SizeLimitError
            raise SizeLimitError("orbit mean too large to enumerate")
        acc = None
        for M, c in self.terms.values():
            g = self.base.transform(M) if not np.allclose(M, np.eye(2)) else self.base
            if snap is not None and g.exact:
                g = g.to_snapped(snap)
            part = _repeat_sum(g, c)
            acc = part if acc is None else acc + part
        return acc.scale(_inv(self.total, acc.exact))

    def diameter(self) -> float:
        # the diameter of a set equals the diameter of its hull
        return self.hull().diameter()

    def support(self, u) -> float:
        return self.hull().support(u)

    def __repr__(self) -> str:
        return f"OrbitMean(|C|={len(self.base)}, terms={self.n_terms}, T={self.total})"


def _inv(T: int, exact: bool):
    from .core import Dyadic
    if T & (T - 1) == 0:
        return Dyadic(1, -(T.bit_length() - 1))
    if exact:
        raise ValueError("exact orbit mean needs a power-of-two total")
    return 1.0 / T


def _repeat_sum(A: FinitePointSet, c: int) -> FinitePointSet:
    out, base = None, A
    while c:
        if c & 1:
            out = base if out is None else out + base
        c >>= 1
        if c:
            base = base + base
    return out
