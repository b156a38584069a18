"""Convex polygons in the plane, vertex representation, counter-clockwise."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from ..core import DEFAULT_TOL


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _akl_toussaint(pts: np.ndarray) -> np.ndarray:
    """Discard points strictly inside the polygon of 8 directional extremes."""
    dirs = np.array([[1, 0], [1, 1], [0, 1], [-1, 1], [-1, 0], [-1, -1], [0, -1], [1, -1]], float)
    ext = pts[np.argmax(pts @ dirs.T, axis=0)]
    ext = ext[np.r_[True, np.any(np.diff(ext, axis=0) != 0, axis=1)]]
    if len(ext) > 1 and np.all(ext[-1] == ext[0]):
        ext = ext[:-1]
    if len(ext) < 3:
        return pts
    e = np.roll(ext, -1, axis=0) - ext
    # extremes in angular order are CCW; a point is inside if left of every edge
    cr = e[None, :, 0] * (pts[:, None, 1] - ext[None, :, 1]) - e[None, :, 1] * (pts[:, None, 0] - ext[None, :, 0])
    scale = max(float(np.abs(pts).max()), 1.0)
    inside = np.all(cr > 1e-9 * scale * scale, axis=1)
    return pts[~inside]


def monotone_chain(points: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Andrew's monotone chain; drops collinear points.  Returns CCW vertices."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts) > 64:
        pts = _akl_toussaint(pts)
    pts = np.unique(pts, axis=0)
    if len(pts) <= 2:
        return pts
    scale = max(float(np.abs(pts).max()), 1.0)
    eps = tol * scale * scale

    def half(seq):
        out: list = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= eps:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) == 0:
        hull = pts[[0, -1]]
    return hull


class ConvexPolygon:
    """Compact convex set in R^2: a point, a segment, or a strictly convex polygon.

    ``degenerate`` is true for points and segments; all operations accept them
    because lower-dimensional limits are common.
    """

    ambient_dim = 2
    __slots__ = ("vertices", "tol")

    def __init__(self, vertices: Iterable[Sequence[float]], tol: float = DEFAULT_TOL,
                 _trusted: bool = False):
        v = np.asarray(vertices, dtype=float).reshape(-1, 2)
        if len(v) == 0:
            raise ValueError("ConvexPolygon needs at least one vertex")
        if not _trusted:
            v = monotone_chain(v, tol=0.0)
        self.vertices = _canonical_start(_prune(v, tol))
        self.tol = tol

    @classmethod
    def hull_of(cls, points, tol: float = DEFAULT_TOL) -> "ConvexPolygon":
        return cls(points, tol=tol)

    @classmethod
    def box(cls, x0, y0, x1, y1) -> "ConvexPolygon":
        return cls([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])

    @classmethod
    def regular(cls, k: int, radius: float = 1.0, phase: float = 0.0) -> "ConvexPolygon":
        t = phase + 2 * math.pi * np.arange(k) / k
        return cls(np.stack([radius * np.cos(t), radius * np.sin(t)], axis=1))

    @property
    def degenerate(self) -> bool:
        return len(self.vertices) <= 2

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        kind = {1: "point", 2: "segment"}.get(len(self.vertices), f"{len(self.vertices)}-gon")
        return f"ConvexPolygon<{kind}>({np.round(self.vertices, 6).tolist()[:6]}...)"

    # -- geometry ------------------------------------------------------

    def edges(self) -> np.ndarray:
        v = self.vertices
        if len(v) == 1:
            return np.zeros((0, 2))
        return np.roll(v, -1, axis=0) - v

    def support(self, u) -> float:
        u = np.asarray(u, dtype=float)
        if not np.any(u):
            raise ValueError("support function needs a nonzero direction")
        return float((self.vertices @ u).max())

    def support_many(self, U: np.ndarray) -> np.ndarray:
        return (self.vertices @ np.asarray(U).T).max(axis=0)

    def perimeter(self) -> float:
        if len(self.vertices) == 1:
            return 0.0
        return float(np.linalg.norm(self.edges(), axis=1).sum())

    def mean_width(self) -> float:
        """Cauchy's formula in the plane: perimeter / pi."""
        return self.perimeter() / math.pi

    def area(self) -> float:
        if len(self.vertices) < 3:
            return 0.0
        x, y = self.vertices[:, 0], self.vertices[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def centroid(self) -> np.ndarray:
        v = self.vertices
        if len(v) < 3:
            return v.mean(axis=0)
        x, y = v[:, 0], v[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        c = x * yn - xn * y
        a = c.sum() / 2
        return np.array([((x + xn) * c).sum(), ((y + yn) * c).sum()]) / (6 * a)

    def diameter(self) -> float:
        return rotating_calipers_diameter(self.vertices)

    def contains(self, p, tol: float | None = None) -> bool:
        return bool(self.contains_many(np.asarray(p, dtype=float)[None, :], tol)[0])

    def contains_many(self, P: np.ndarray, tol: float | None = None) -> np.ndarray:
        tol = self.tol if tol is None else tol
        return self.signed_distance(P) <= tol

    def signed_distance(self, P: np.ndarray) -> np.ndarray:
        """Distance to the polygon for outside points, minus depth for inside ones."""
        P = np.atleast_2d(np.asarray(P, dtype=float))
        v = self.vertices
        if len(v) == 1:
            return np.linalg.norm(P - v[0], axis=1)
        if len(v) == 2:
            return _dist_to_segments(P, v[:1], v[1:])
        e = self.edges()
        n = np.stack([e[:, 1], -e[:, 0]], axis=1) / np.linalg.norm(e, axis=1)[:, None]
        depth = np.einsum("pk,ek->pe", P, n) - np.einsum("ek,ek->e", v, n)[None, :]
        inside = (depth <= 0).all(axis=1)
        out = _dist_to_segments(P, v, np.roll(v, -1, axis=0))
        return np.where(inside, depth.max(axis=1), out)

    # -- maps ----------------------------------------------------------

    def transform(self, M: np.ndarray, offset=None) -> "ConvexPolygon":
        w = self.vertices @ np.asarray(M, dtype=float).T
        if offset is not None:
            w = w + np.asarray(offset, dtype=float)
        if np.linalg.det(M) < 0:
            w = w[::-1]
        return ConvexPolygon(w, tol=self.tol, _trusted=True)

    def translate(self, v) -> "ConvexPolygon":
        return ConvexPolygon(self.vertices + np.asarray(v, dtype=float), tol=self.tol, _trusted=True)

    def scale(self, t: float) -> "ConvexPolygon":
        t = float(t)
        if t < 0:
            raise ValueError("scale factor must be nonnegative")
        return ConvexPolygon(self.vertices * t, tol=self.tol, _trusted=t > 0)

    def __add__(self, other: "ConvexPolygon") -> "ConvexPolygon":
        if not isinstance(other, ConvexPolygon):
            return NotImplemented
        return minkowski_sum_many([self, other], tol=min(self.tol, other.tol))

    def radii(self, center=None) -> tuple[float, float]:
        """(circumradius, inradius) about ``center`` (origin by default)."""
        c = np.zeros(2) if center is None else np.asarray(center, dtype=float)
        v = self.vertices - c
        R = float(np.linalg.norm(v, axis=1).max())
        if self.degenerate:
            return R, 0.0
        e = self.edges()
        n = np.stack([e[:, 1], -e[:, 0]], axis=1) / np.linalg.norm(e, axis=1)[:, None]
        r = float(np.min(np.einsum("ek,ek->e", v, n)))
        return R, max(r, 0.0)


def _prune(v: np.ndarray, tol: float) -> np.ndarray:
    """Drop repeated and collinear vertices from a CCW cycle."""
    if len(v) <= 1:
        return v
    scale = max(float(np.abs(v).max()), 1.0)
    changed = True
    while changed and len(v) > 2:
        changed = False
        prev, nxt = np.roll(v, 1, axis=0), np.roll(v, -1, axis=0)
        a, b = v - prev, nxt - v
        cr = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        la, lb = np.linalg.norm(a, axis=1), np.linalg.norm(b, axis=1)
        dup = la <= tol * scale
        flat = np.abs(cr) <= tol * scale * np.maximum(la + lb, tol)
        drop = dup | flat
        if drop.any() and not drop.all():
            v = v[~drop]
            changed = True
        elif drop.all():
            # everything collinear: keep the two extreme points
            d = v - v[0]
            axis = d[np.argmax(np.linalg.norm(d, axis=1))]
            if not np.any(axis):
                return v[:1]
            t = d @ axis
            return v[[np.argmin(t), np.argmax(t)]]
    if len(v) == 2 and np.linalg.norm(v[1] - v[0]) <= tol * scale:
        return v[:1]
    return v


def _canonical_start(v: np.ndarray) -> np.ndarray:
    """Rotate the vertex cycle to start at the lowest (then leftmost) vertex."""
    if len(v) <= 1:
        return v
    i = int(np.lexsort((v[:, 0], v[:, 1]))[0])
    return np.roll(v, -i, axis=0)


def _dist_to_segments(P: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Distance from each point of ``P`` to the closest segment [A_i, B_i]."""
    d = B - A
    L2 = np.einsum("ek,ek->e", d, d)
    rel = P[:, None, :] - A[None, :, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(L2 > 0, np.einsum("pek,ek->pe", rel, d) / np.where(L2 > 0, L2, 1), 0.0)
    t = np.clip(t, 0.0, 1.0)
    closest = A[None, :, :] + t[..., None] * d[None, :, :]
    return np.linalg.norm(P[:, None, :] - closest, axis=2).min(axis=1)


def minkowski_sum_many(polys: Sequence[ConvexPolygon], weights: Sequence[float] | None = None,
                       tol: float = DEFAULT_TOL) -> ConvexPolygon:
    """Edge-angle merge of ``sum_j w_j P_j`` for convex polygons.

    Each summand contributes its edge vectors sorted by polar angle from its
    lowest vertex; merging all lists by angle and walking from the sum of the
    lowest vertices traces the boundary of the sum.
    """
    if weights is None:
        weights = [1.0] * len(polys)
    start = np.zeros(2)
    target = np.zeros(2)
    edge_list, angle_list = [], []
    for p, w in zip(polys, weights):
        if w == 0:
            continue
        v = p.vertices * float(w)
        start += v[0]
        target += v.max(axis=0)
        e = np.roll(v, -1, axis=0) - v if len(v) > 1 else np.zeros((0, 2))
        if len(e):
            e = e[np.linalg.norm(e, axis=1) > 0]
            edge_list.append(e)
            angle_list.append(np.mod(np.arctan2(e[:, 1], e[:, 0]), 2 * math.pi))
    if not edge_list:
        return ConvexPolygon([start], tol=tol, _trusted=True)
    edges = np.concatenate(edge_list)
    ang = np.concatenate(angle_list)
    # angles within rounding of 2*pi belong at the start
    ang[ang > 2 * math.pi - 1e-12] = 0.0
    order = np.argsort(ang, kind="stable")
    walk = np.concatenate([np.zeros((1, 2)), np.cumsum(edges[order], axis=0)[:-1]])
    # place the walk by support values on the axes; the lowest-vertex anchor
    # is fragile when a rotated edge is within rounding of horizontal
    walk += target - walk.max(axis=0)
    return ConvexPolygon(walk, tol=tol, _trusted=_is_ccw_convex(walk))


def _is_ccw_convex(v: np.ndarray) -> bool:
    if len(v) < 3:
        return True
    a = np.roll(v, -1, axis=0) - v
    b = np.roll(a, -1, axis=0)
    cr = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    scale = max(float(np.abs(v).max()), 1.0)
    return bool((cr >= -1e-12 * scale * scale).all())


def rotating_calipers_diameter(v: np.ndarray) -> float:
    """Diameter of a convex CCW polygon via antipodal vertex pairs."""
    k = len(v)
    if k == 1:
        return 0.0
    if k == 2:
        return float(np.linalg.norm(v[1] - v[0]))
    best = 0.0
    j = 1
    for i in range(k):
        ni = (i + 1) % k
        e = v[ni] - v[i]
        # advance j while the triangle area keeps increasing
        while True:
            nj = (j + 1) % k
            if abs(e[0] * (v[nj, 1] - v[i, 1]) - e[1] * (v[nj, 0] - v[i, 0])) > \
                    abs(e[0] * (v[j, 1] - v[i, 1]) - e[1] * (v[j, 0] - v[i, 0])):
                j = nj
            else:
                break
        best = max(best, float(np.linalg.norm(v[i] - v[j])), float(np.linalg.norm(v[ni] - v[j])))
    return best


def hausdorff_convex(P: ConvexPolygon, Q: ConvexPolygon) -> float:
    """Exact d_H of two convex polygons: sup over unit u of |h_P(u) - h_Q(u)|.

    Between consecutive edge normals of either polygon both support points
    are fixed vertices, so the difference is ``r cos(theta - phi)`` on the arc
    and its extremum is available in closed form.
    """
    normals = []
    for poly in (P, Q):
        e = poly.edges()
        if len(e):
            normals.append(np.arctan2(-e[:, 0], e[:, 1]))
    breaks = np.mod(np.concatenate(normals + [np.zeros(1), np.array([math.pi / 2, math.pi, 3 * math.pi / 2])]), 2 * math.pi)
    breaks = np.unique(breaks)
    lo = breaks
    hi = np.append(breaks[1:], breaks[0] + 2 * math.pi)
    mid = 0.5 * (lo + hi)
    U = np.stack([np.cos(mid), np.sin(mid)], axis=1)
    vp = P.vertices[np.argmax(P.vertices @ U.T, axis=0)]
    vq = Q.vertices[np.argmax(Q.vertices @ U.T, axis=0)]
    d = vp - vq
    r = np.linalg.norm(d, axis=1)
    phi = np.arctan2(d[:, 1], d[:, 0])
    best = 0.0
    for theta in (lo, hi):
        best = max(best, float(np.abs(r * np.cos(theta - phi)).max()))
    # interior critical points where the arc contains phi or phi + pi
    for shift in (0.0, math.pi):
        c = np.mod(phi + shift - lo, 2 * math.pi)
        inside = c <= (hi - lo)
        if inside.any():
            best = max(best, float(r[inside].max()))
    return best
