"""Occupancy sets on dyadic lattices in R^1..R^3.

A cell with integer index ``c`` realizes the closed cube ``[c*h, (c+1)*h]``.
Minkowski sums of such unions are again unions of cubes at the same spacing,
so every operation here except the metric queries is exact.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage, signal

from ..core import DimensionError, Dyadic, Subspace
from ._lattice import SizeLimitError

MAX_CELLS = 64_000_000


class GridSpacingError(ValueError):
    """Grid operands with different spacings."""


class GridSet:
    """Nonempty finite union of closed grid cubes of side ``spacing``."""

    __slots__ = ("mask", "origin", "spacing", "ambient_dim")

    def __init__(self, cells: Iterable[Sequence[int]], spacing=1):
        arr = np.asarray([tuple(int(v) for v in c) for c in cells], dtype=np.int64)
        if arr.size == 0:
            raise ValueError("GridSet must be nonempty")
        if arr.ndim != 2 or not 1 <= arr.shape[1] <= 3:
            raise DimensionError("cells must be integer tuples of length 1..3")
        lo = arr.min(axis=0)
        mask = np.zeros(tuple(arr.max(axis=0) - lo + 1), dtype=bool)
        mask[tuple((arr - lo).T)] = True
        self._set(mask, tuple(int(v) for v in lo), spacing)

    def _set(self, mask, origin, spacing):
        spacing = Dyadic.coerce(spacing)
        if spacing <= 0:
            raise ValueError("grid spacing must be positive")
        self.mask = mask
        self.origin = origin
        self.spacing = spacing
        self.ambient_dim = mask.ndim

    @classmethod
    def from_mask(cls, mask: np.ndarray, origin: Sequence[int] | None = None,
                  spacing=1) -> "GridSet":
        mask = np.asarray(mask, dtype=bool)
        if not mask.any():
            raise ValueError("GridSet must be nonempty")
        origin = tuple(origin) if origin is not None else (0,) * mask.ndim
        if len(origin) != mask.ndim:
            raise DimensionError("origin length differs from mask dimension")
        # crop to the bounding box so equal sets share one representation
        nz = np.nonzero(mask)
        lo = [int(a.min()) for a in nz]
        hi = [int(a.max()) + 1 for a in nz]
        out = object.__new__(cls)
        out._set(mask[tuple(slice(a, b) for a, b in zip(lo, hi))].copy(),
                 tuple(int(o) + a for o, a in zip(origin, lo)), spacing)
        return out

    @classmethod
    def box(cls, shape: Sequence[int], origin: Sequence[int] | None = None, spacing=1) -> "GridSet":
        return cls.from_mask(np.ones(tuple(shape), dtype=bool), origin, spacing)

    # -- views ---------------------------------------------------------

    @property
    def cell_array(self) -> np.ndarray:
        return np.argwhere(self.mask) + np.asarray(self.origin)

    @property
    def cells(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in r) for r in self.cell_array]

    def cell_set(self) -> set[tuple[int, ...]]:
        return set(self.cells)

    def __len__(self) -> int:
        return int(self.mask.sum())

    @property
    def shape(self) -> tuple[int, ...]:
        return self.mask.shape

    def centers(self) -> np.ndarray:
        return (self.cell_array + 0.5) * float(self.spacing)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Realized bounding box corners as floats."""
        h = float(self.spacing)
        o = np.asarray(self.origin, dtype=float)
        return o * h, (o + np.asarray(self.mask.shape)) * h

    def __repr__(self) -> str:
        return (f"GridSet(dim={self.ambient_dim}, h={self.spacing}, origin={self.origin}, "
                f"shape={self.mask.shape}, cells={len(self)})")

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridSet):
            return NotImplemented
        a, b = self.normalize(), other.normalize()
        return (a.spacing == b.spacing and a.origin == b.origin
                and a.mask.shape == b.mask.shape and bool(np.array_equal(a.mask, b.mask)))

    __hash__ = None

    # -- spacing control -----------------------------------------------

    def refine(self, k: int = 1) -> "GridSet":
        """Same realized set at spacing ``h / 2**k``."""
        if k == 0:
            return self
        f = 1 << k
        _check_budget(self.mask.size * f ** self.ambient_dim)
        m = self.mask
        for ax in range(self.ambient_dim):
            m = np.repeat(m, f, axis=ax)
        return GridSet.from_mask(m, tuple(o * f for o in self.origin), self.spacing.ldexp(-k))

    def at_spacing(self, h) -> "GridSet":
        h = Dyadic.coerce(h)
        k = 0
        s = self.spacing
        while s > h:
            s = s.half()
            k += 1
        if s != h:
            raise GridSpacingError(f"spacing {h} is not {self.spacing} / 2^k")
        return self.refine(k)

    def normalize(self) -> "GridSet":
        """Coarsest spacing that realizes the same set."""
        g = self
        while True:
            c = g._coarsen()
            if c is None:
                return g
            g = c

    def _coarsen(self) -> "GridSet | None":
        n = self.ambient_dim
        pad_lo = [o % 2 for o in self.origin]
        pad_hi = [(s + p) % 2 for s, p in zip(self.mask.shape, pad_lo)]
        m = np.pad(self.mask, list(zip(pad_lo, pad_hi)))
        blocks = m.reshape(sum(([s // 2, 2] for s in m.shape), []))
        axes = tuple(range(1, 2 * n, 2))
        full, any_ = blocks.all(axis=axes), blocks.any(axis=axes)
        if not np.array_equal(full, any_):
            return None
        origin = tuple((o - p) // 2 for o, p in zip(self.origin, pad_lo))
        return GridSet.from_mask(full, origin, self.spacing.ldexp(1))

    # -- exact set algebra ---------------------------------------------

    def _frame(self, other: "GridSet"):
        """Both masks embedded in one common box at the finer spacing."""
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError("grid sets live in different dimensions")
        h = min(self.spacing, other.spacing)
        a, b = self.at_spacing(h), other.at_spacing(h)
        lo = np.minimum(a.origin, b.origin)
        hi = np.maximum(np.add(a.origin, a.shape), np.add(b.origin, b.shape))
        out = []
        for g in (a, b):
            m = np.zeros(tuple(hi - lo), dtype=bool)
            off = np.subtract(g.origin, lo)
            m[tuple(slice(int(s), int(s) + d) for s, d in zip(off, g.shape))] = g.mask
            out.append(m)
        return out[0], out[1], tuple(int(v) for v in lo), h

    def union(self, other: "GridSet") -> "GridSet":
        a, b, lo, h = self._frame(other)
        return GridSet.from_mask(a | b, lo, h)

    def intersection(self, other: "GridSet") -> "GridSet | None":
        a, b, lo, h = self._frame(other)
        m = a & b
        return GridSet.from_mask(m, lo, h) if m.any() else None

    def difference(self, other: "GridSet") -> "GridSet | None":
        a, b, lo, h = self._frame(other)
        m = a & ~b
        return GridSet.from_mask(m, lo, h) if m.any() else None

    def issubset(self, other: "GridSet") -> bool:
        a, b, _, _ = self._frame(other)
        return not bool((a & ~b).any())

    def contains_point(self, x) -> bool:
        """Closed-set membership of a point."""
        h = float(self.spacing)
        x = np.asarray(x, dtype=float) / h - np.asarray(self.origin)
        # a point on a cell face belongs to every cube sharing that face
        ranges = []
        for xi, s in zip(x, self.mask.shape):
            f = np.floor(xi)
            cand = {int(f)} | ({int(f) - 1} if xi == f else set())
            ranges.append([c for c in cand if 0 <= c < s])
        return any(self.mask[idx] for idx in itertools.product(*ranges))

    def __add__(self, other: "GridSet") -> "GridSet":
        if not isinstance(other, GridSet):
            return NotImplemented
        if self.ambient_dim != other.ambient_dim:
            raise DimensionError("grid sets live in different dimensions")
        if self.spacing != other.spacing:
            raise GridSpacingError(f"spacing {self.spacing} != {other.spacing}")
        n = self.ambient_dim
        out_shape = [a + b for a, b in zip(self.shape, other.shape)]
        _check_budget(int(np.prod(out_shape)))
        # [c, c+1] + [d, d+1] = [c+d, c+d+2]: cells c+d and c+d+{0,1}^n
        k = signal.convolve(other.mask.astype(np.int32), np.ones((2,) * n, dtype=np.int32))
        s = signal.convolve(self.mask.astype(np.int32), (k > 0).astype(np.int32))
        return GridSet.from_mask(s > 0, tuple(a + b for a, b in zip(self.origin, other.origin)),
                                 self.spacing)

    def reflect(self, H: Subspace) -> "GridSet":
        if H.ambient_dim != self.ambient_dim:
            raise DimensionError("subspace and grid dimensions differ")
        if not H.axis_aligned:
            raise ValueError("grid reflection needs an axis-aligned subspace")
        return self.flip(H.complement_axes)

    def flip(self, axes: Iterable[int]) -> "GridSet":
        """Negate the given coordinates: cell index c maps to -c-1."""
        m, origin = self.mask, list(self.origin)
        for ax in axes:
            m = np.flip(m, axis=ax)
            origin[ax] = -origin[ax] - self.mask.shape[ax]
        return GridSet.from_mask(m, origin, self.spacing)

    def __neg__(self) -> "GridSet":
        return self.flip(range(self.ambient_dim))

    def half(self) -> "GridSet":
        return GridSet.from_mask(self.mask, self.origin, self.spacing.half())

    def scale(self, t) -> "GridSet":
        t = Dyadic.coerce(t)
        if t <= 0 or t.mantissa != 1:
            raise ValueError("grid scale factor must be a positive power of two")
        return GridSet.from_mask(self.mask, self.origin, self.spacing * t)

    def translate_cells(self, v: Sequence[int]) -> "GridSet":
        return GridSet.from_mask(self.mask, tuple(o + int(d) for o, d in zip(self.origin, v)),
                                 self.spacing)

    # -- measures ------------------------------------------------------

    def volume(self) -> Dyadic:
        return Dyadic(len(self), 0) * _power(self.spacing, self.ambient_dim)

    def corners(self) -> np.ndarray:
        """Corners of the cubes of rim cells; their hull is conv of the set."""
        rim = self.mask & ~ndimage.binary_erosion(self.mask, border_value=0)
        idx = np.argwhere(rim) + np.asarray(self.origin)
        offs = np.array(list(itertools.product((0, 1), repeat=self.ambient_dim)))
        pts = (idx[:, None, :] + offs[None, :, :]).reshape(-1, self.ambient_dim)
        return np.unique(pts, axis=0) * float(self.spacing)

    def hull_vertices(self) -> np.ndarray:
        pts = self.corners()
        if self.ambient_dim == 1:
            return np.array([[pts.min()], [pts.max()]])
        if self.ambient_dim == 2:
            from .polygon import monotone_chain
            return monotone_chain(pts)
        from scipy.spatial import ConvexHull
        return pts[ConvexHull(pts).vertices]

    def diameter(self):
        if self.ambient_dim == 1:
            return Dyadic(self.shape[0], 0) * self.spacing
        v = self.hull_vertices()
        if self.ambient_dim == 2:
            from .polygon import rotating_calipers_diameter
            return rotating_calipers_diameter(v)
        from scipy.spatial.distance import pdist
        return float(pdist(v).max())

    def support(self, u) -> float:
        u = np.asarray(u, dtype=float)
        if not np.any(u):
            raise ValueError("support function needs a nonzero direction")
        return float((self.hull_vertices() @ u).max())

    def is_box(self) -> bool:
        """True iff the realized set is convex (a convex union of cubes is a box)."""
        return bool(self.mask.all())

    def section(self, axes: Sequence[int], index: Sequence[int]) -> "GridSet | None":
        """Cells whose coordinates on ``axes`` equal ``index``, as a lower-dim grid."""
        sl = [slice(None)] * self.ambient_dim
        for ax, i in zip(axes, index):
            j = int(i) - self.origin[ax]
            if not 0 <= j < self.shape[ax]:
                return None
            sl[ax] = j
        m = self.mask[tuple(sl)]
        if not m.any():
            return None
        rest = [ax for ax in range(self.ambient_dim) if ax not in axes]
        return GridSet.from_mask(m, [self.origin[ax] for ax in rest], self.spacing)

    def filled_box(self) -> "GridSet":
        """Bounding box of the cells: conv of the set when that hull is a box."""
        return GridSet.box(self.shape, self.origin, self.spacing)


def _power(d: Dyadic, k: int) -> Dyadic:
    out = Dyadic(1, 0)
    for _ in range(k):
        out = out * d
    return out


def _check_budget(cells: int) -> None:
    if cells > MAX_CELLS:
        raise SizeLimitError(f"grid of {cells} cells exceeds the budget of {MAX_CELLS}")


def _separated(lo: np.ndarray, hi: np.ndarray, poly_pts: np.ndarray, normals: np.ndarray,
               strict: bool) -> np.ndarray:
    """Separating-axis test between boxes ``[lo, hi]`` and a convex polygon.

    ``strict`` treats touching as separated, so only cubes meeting the
    polygon's interior are kept.
    """
    sep = np.zeros(len(lo), dtype=bool)
    for ax in range(2):
        pmin, pmax = poly_pts[:, ax].min(), poly_pts[:, ax].max()
        sep |= (hi[:, ax] <= pmin) | (lo[:, ax] >= pmax) if strict else \
            (hi[:, ax] < pmin) | (lo[:, ax] > pmax)
    corners = np.stack([lo, np.c_[hi[:, 0], lo[:, 1]], hi, np.c_[lo[:, 0], hi[:, 1]]], axis=1)
    for nv in normals:
        proj = poly_pts @ nv
        c = corners @ nv
        if strict:
            sep |= (c.max(axis=1) <= proj.min()) | (c.min(axis=1) >= proj.max())
        else:
            sep |= (c.max(axis=1) < proj.min()) | (c.min(axis=1) > proj.max())
    return sep


def polygon_to_grid(P, h) -> GridSet:
    """Cells whose cube meets ``P``: interior contact for a full polygon,
    closed contact for a point or segment."""
    h = Dyadic.coerce(h)
    hf = float(h)
    v = P.vertices
    lo = np.floor(v.min(axis=0) / hf).astype(np.int64) - 1
    hi = np.ceil(v.max(axis=0) / hf).astype(np.int64) + 1
    _check_budget(int(np.prod(hi - lo)))
    ii, jj = np.meshgrid(np.arange(lo[0], hi[0]), np.arange(lo[1], hi[1]), indexing="ij")
    idx = np.stack([ii.ravel(), jj.ravel()], axis=1)
    blo, bhi = idx * hf, (idx + 1) * hf
    if len(v) >= 3:
        e = np.roll(v, -1, axis=0) - v
        normals = np.stack([e[:, 1], -e[:, 0]], axis=1)
        keep = ~_separated(blo, bhi, v, normals, strict=True)
    else:
        if len(v) == 2:
            e = v[1] - v[0]
            normals = np.array([[e[1], -e[0]]])
        else:
            normals = np.zeros((0, 2))
        keep = ~_separated(blo, bhi, v, normals, strict=False)
    return GridSet(idx[keep], h)


def points_to_grid(points: np.ndarray, h) -> GridSet:
    h = Dyadic.coerce(h)
    return GridSet(np.floor(np.asarray(points, dtype=float) / float(h)).astype(np.int64), h)
