"""Deterministic SVG output for 1-D and 2-D sets."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .orbit import OrbitMean
from .sets import ConvexPolygon, FinitePointSet, GridSet, IntervalUnion

SIZE = 480
PAD = 24


def _bounds(A) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(A, IntervalUnion):
        lo, hi = float(A.intervals[0][0]), float(A.intervals[-1][1])
        return np.array([lo, -0.5]), np.array([hi, 0.5])
    if isinstance(A, GridSet):
        lo, hi = A.bounds()
        return np.asarray(lo, float), np.asarray(hi, float)
    if isinstance(A, OrbitMean):
        v = A.hull().vertices
    elif isinstance(A, ConvexPolygon):
        v = A.vertices
    else:
        v = A.points
    return v.min(axis=0), v.max(axis=0)


class _Frame:
    def __init__(self, lo, hi):
        span = np.maximum(hi - lo, 1e-12)
        self.s = (SIZE - 2 * PAD) / span.max()
        self.lo = lo
        self.hi = hi

    def __call__(self, p) -> tuple[float, float]:
        x = PAD + (p[0] - self.lo[0]) * self.s
        y = SIZE - PAD - (p[1] - self.lo[1]) * self.s  # y up
        return round(float(x), 3), round(float(y), 3)


def _polygon_path(v, f) -> str:
    pts = [f(p) for p in v]
    d = "M " + " L ".join(f"{x} {y}" for x, y in pts) + " Z"
    return f'<path d="{d}" fill="#9ecae1" fill-opacity="0.5" stroke="#08519c" stroke-width="1.5"/>'


def svg_of(A, title: str = "") -> str:
    if A.ambient_dim > 2:
        raise ValueError("render 3-D grids one slice at a time")
    lo, hi = _bounds(A)
    f = _Frame(lo, hi)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}">', '<rect width="100%" height="100%" fill="white"/>']
    if isinstance(A, IntervalUnion):
        for a, b in A.intervals:
            (x0, y0), (x1, y1) = f((float(a), 0.1)), f((float(b), -0.1))
            if x1 - x0 < 1:  # keep singletons visible
                x0, x1 = x0 - 1, x1 + 1
            out.append(f'<rect x="{x0}" y="{y0}" width="{round(x1 - x0, 3)}" '
                       f'height="{round(y1 - y0, 3)}" fill="#3182bd"/>')
    elif isinstance(A, GridSet):
        h = float(A.spacing)
        w = round(h * f.s, 3)
        for c in A.cells:
            x, y = f((c[0] * h, (c[1] + 1) * h))
            out.append(f'<rect x="{x}" y="{y}" width="{w}" height="{w}" fill="#3182bd" '
                       f'stroke="white" stroke-width="0.5"/>')
    elif isinstance(A, (ConvexPolygon, OrbitMean)):
        P = A.hull() if isinstance(A, OrbitMean) else A
        out.append(_polygon_path(P.vertices, f))
    elif isinstance(A, FinitePointSet):
        for p in A.points:
            x, y = f(p)
            out.append(f'<circle cx="{x}" cy="{y}" r="2.5" fill="#08519c"/>')
    else:
        raise TypeError(f"cannot render {type(A).__name__}")
    if title:
        out.append(f'<text x="{PAD}" y="{PAD - 8}" font-family="monospace" font-size="12">{title}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_set(A, path, title: str = "", slice_index: int | None = None) -> None:
    if A.ambient_dim == 3:
        if slice_index is None or not isinstance(A, GridSet):
            raise ValueError("3-D input needs --slice k on a grid")
        S = A.section([2], [slice_index])
        if S is None:
            raise ValueError(f"slice z={slice_index} is empty")
        A = S
    Path(path).write_text(svg_of(A, title))
