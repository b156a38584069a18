"""Compact subsets of the line as finite unions of closed dyadic intervals."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from ..core import Dyadic
from . import _lattice as lat

MAX_PAIRS = 20_000_000


class IntervalUnion:
    """Sorted, maximal, pairwise disjoint closed intervals with dyadic ends.

    Endpoints are held as an integer array ``(k, 2)`` scaled by ``2**exp``;
    every operation here is exact.  Touching intervals are merged, so two
    unions are equal as sets iff their canonical arrays are equal.
    """

    __slots__ = ("_ends", "_exp")
    ambient_dim = 1

    def __init__(self, intervals: Iterable[Sequence] | None = None, *, _raw=None):
        if _raw is not None:
            ends, exp = _raw
        else:
            pairs = []
            for iv in intervals or ():
                if not isinstance(iv, (tuple, list)):
                    iv = (iv, iv)
                a, b = iv
                pairs.append((a, b))
            if not pairs:
                raise ValueError("IntervalUnion must be nonempty")
            ends, exp = lat.to_scaled(pairs)
            if any(int(a) > int(b) for a, b in ends):
                raise ValueError("interval with left end greater than right end")
        ends = _merge(ends)
        self._ends, self._exp = lat.normalize(ends, exp)

    @classmethod
    def _from_scaled(cls, ends: np.ndarray, exp: int) -> "IntervalUnion":
        return cls(_raw=(ends, exp))

    @classmethod
    def points(cls, values: Iterable) -> "IntervalUnion":
        return cls([(v, v) for v in values])

    # -- views ---------------------------------------------------------

    @property
    def intervals(self) -> list[tuple[Dyadic, Dyadic]]:
        e = self._exp
        return [(Dyadic(int(a), e), Dyadic(int(b), e)) for a, b in self._ends]

    def __len__(self) -> int:
        return len(self._ends)

    @property
    def lo(self) -> Dyadic:
        return Dyadic(int(self._ends[0, 0]), self._exp)

    @property
    def hi(self) -> Dyadic:
        return Dyadic(int(self._ends[-1, 1]), self._exp)

    def as_float_array(self) -> np.ndarray:
        return lat.to_float(self._ends, self._exp)

    def is_convex(self) -> bool:
        return len(self._ends) == 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        return self._exp == other._exp and self._ends.shape == other._ends.shape \
            and bool(np.all(self._ends == other._ends))

    def __hash__(self):
        return hash((self._exp, tuple(map(tuple, self._ends.tolist()))))

    def __repr__(self) -> str:
        body = ", ".join(f"[{a}, {b}]" if a != b else f"{{{a}}}" for a, b in self.intervals[:8])
        more = f", ... ({len(self)} intervals)" if len(self) > 8 else ""
        return f"IntervalUnion({body}{more})"

    # -- set algebra ---------------------------------------------------

    def __add__(self, other: "IntervalUnion") -> "IntervalUnion":
        if not isinstance(other, IntervalUnion):
            return NotImplemented
        a, b, e = lat.align(self._ends, self._exp, other._ends, other._exp)
        if len(a) * len(b) > MAX_PAIRS:
            raise lat.SizeLimitError(f"{len(a)} x {len(b)} interval sums exceed budget")
        a, b = lat.widen(a), lat.widen(b)
        lo = (a[:, 0][:, None] + b[:, 0][None, :]).ravel()
        hi = (a[:, 1][:, None] + b[:, 1][None, :]).ravel()
        return IntervalUnion._from_scaled(np.stack([lo, hi], axis=1), e)

    def __neg__(self) -> "IntervalUnion":
        return IntervalUnion._from_scaled(-self._ends[::-1, ::-1], self._exp)

    def scale(self, t) -> "IntervalUnion":
        t = Dyadic.coerce(t)
        if t < 0:
            raise ValueError("scale factor must be nonnegative")
        if not t:
            return IntervalUnion([(0, 0)])
        ends = lat.widen(self._ends) * t.mantissa
        return IntervalUnion._from_scaled(ends, self._exp + t.exponent)

    def half(self) -> "IntervalUnion":
        return IntervalUnion._from_scaled(self._ends, self._exp - 1)

    def translate(self, v) -> "IntervalUnion":
        v = Dyadic.coerce(v)
        ends, vv, e = lat.align(self._ends, self._exp, lat.int_array([[v.mantissa]]), v.exponent)
        return IntervalUnion._from_scaled(lat.widen(ends) + vv[0, 0], e)

    def hull(self) -> "IntervalUnion":
        return IntervalUnion._from_scaled(
            np.array([[self._ends[0, 0], self._ends[-1, 1]]], dtype=self._ends.dtype), self._exp)

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        a, b, e = lat.align(self._ends, self._exp, other._ends, other._exp)
        return IntervalUnion._from_scaled(np.concatenate([a, b]), e)

    def contains(self, x) -> bool:
        x = Dyadic.coerce(x)
        return any(a <= x <= b for a, b in self.intervals)

    def issubset(self, other: "IntervalUnion") -> bool:
        return self.union(other) == other

    def volume(self) -> Dyadic:
        return Dyadic(int((self._ends[:, 1] - self._ends[:, 0]).sum()), self._exp)

    def diameter(self) -> Dyadic:
        return self.hi - self.lo

    def gaps(self) -> list[Dyadic]:
        e = self._exp
        return [Dyadic(int(self._ends[i + 1, 0] - self._ends[i, 1]), e)
                for i in range(len(self._ends) - 1)]

    def end_runs(self) -> tuple[Dyadic, Dyadic]:
        """Lengths of the intervals containing the left and right extremes."""
        e = self._exp
        return (Dyadic(int(self._ends[0, 1] - self._ends[0, 0]), e),
                Dyadic(int(self._ends[-1, 1] - self._ends[-1, 0]), e))


def _merge(ends: np.ndarray) -> np.ndarray:
    if len(ends) <= 1:
        return ends
    order = np.lexsort((ends[:, 1], ends[:, 0]))
    ends = ends[order]
    lo, hi = ends[:, 0], ends[:, 1]
    reach = np.maximum.accumulate(hi)
    # a new component starts where the left end exceeds everything seen so far
    start = np.ones(len(ends), dtype=bool)
    start[1:] = lo[1:] > reach[:-1]
    idx = np.flatnonzero(start)
    last = np.append(idx[1:] - 1, len(ends) - 1)
    return np.stack([lo[idx], reach[last]], axis=1)


def hausdorff_1d(a: IntervalUnion, b: IntervalUnion) -> Dyadic:
    """Exact Hausdorff distance between two interval unions."""
    return max(_excess_1d(a, b), _excess_1d(b, a))


def _excess_1d(a: IntervalUnion, b: IntervalUnion) -> Dyadic:
    """sup over x in ``b`` of dist(x, a), computed exactly."""
    A, B, e = lat.align(a._ends, a._exp, b._ends, b._exp)
    # doubled coordinates keep gap midpoints integral
    A, B = lat.widen(A) * 2, lat.widen(B) * 2
    cands = np.concatenate([B.ravel(), (A[:-1, 1] + A[1:, 0]) // 2])
    jb = np.searchsorted(B[:, 0], cands, side="right") - 1
    inside_b = (jb >= 0) & (cands <= B[np.maximum(jb, 0), 1])
    cands = cands[inside_b]
    ja = np.searchsorted(A[:, 0], cands, side="right") - 1
    left = np.maximum(ja, 0)
    right = np.minimum(ja + 1, len(A) - 1)
    d_left = np.where(ja >= 0, np.maximum(cands - A[left, 1], 0), cands * 0 + (A[0, 0] - cands))
    d_right = np.where(ja + 1 < len(A), np.maximum(A[right, 0] - cands, 0), d_left)
    d = np.minimum(d_left, d_right)
    best = int(d.max()) if d.size else 0
    return Dyadic(best, e - 1)
