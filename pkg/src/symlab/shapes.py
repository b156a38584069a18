"""Small generators for test and demo inputs."""

from __future__ import annotations

import numpy as np

from .core import Dyadic
from .sets import FinitePointSet, GridSet


def block(shape, origin=None, spacing=1) -> GridSet:
    origin = tuple(-(s // 2) for s in shape) if origin is None else tuple(origin)
    return GridSet.box(tuple(shape), origin, spacing)


def annulus(outer: int, thickness: int, origin=None) -> GridSet:
    """Square ring of side ``outer`` cells and wall ``thickness`` cells."""
    m = np.zeros((outer, outer), dtype=bool)
    m[:thickness] = m[-thickness:] = True
    m[:, :thickness] = m[:, -thickness:] = True
    origin = (-(outer // 2),) * 2 if origin is None else tuple(origin)
    return GridSet.from_mask(m, origin, 1)


def l_shape(a: int, b: int, cut_a: int, cut_b: int, origin=(0, 0)) -> GridSet:
    """a×b block with the top-right cut_a×cut_b corner removed."""
    m = np.ones((a, b), dtype=bool)
    m[a - cut_a:, b - cut_b:] = False
    return GridSet.from_mask(m, tuple(origin), 1)


def hollow_shell(side: int, wall: int = 1, open_face: bool = False) -> GridSet:
    """Cube boundary layer of a side^3 block, optionally missing its top face."""
    m = np.ones((side,) * 3, dtype=bool)
    m[wall:-wall, wall:-wall, wall:-wall] = False
    if open_face:
        m[wall:-wall, wall:-wall, -wall:] = False
    return GridSet.from_mask(m, (-(side // 2),) * 3, 1)


def ring_with_interior(shape, rng: np.random.Generator, fill: float = 0.3) -> GridSet:
    """Outer layer of a box plus a random subset of its interior cells."""
    m = rng.random(shape) < fill
    for ax in range(len(shape)):
        idx = [slice(None)] * len(shape)
        idx[ax] = 0
        m[tuple(idx)] = True
        idx[ax] = -1
        m[tuple(idx)] = True
    return GridSet.from_mask(m, tuple(-(s // 2) for s in shape), 1)


def random_grid(shape, rng: np.random.Generator, p: float = 0.5, origin=None) -> GridSet:
    m = rng.random(shape) < p
    if not m.any():
        m.flat[0] = True
    origin = tuple(int(v) for v in rng.integers(-4, 5, len(shape))) if origin is None else origin
    return GridSet.from_mask(m, origin, 1)


def square_boundary_points(per_edge: int = 200) -> FinitePointSet:
    """Points on the boundary of [-1, 1]^2 at dyadic spacing 2/per_edge when possible."""
    t = np.linspace(-1.0, 1.0, per_edge + 1)
    one = np.ones_like(t)
    pts = np.concatenate([np.c_[t, -one], np.c_[t, one], np.c_[-one, t], np.c_[one, t]])
    return FinitePointSet(np.unique(pts, axis=0))


def random_cloud(rng: np.random.Generator, k: int, exponent: int = -4, span: int = 16) -> FinitePointSet:
    """k planar points with dyadic coordinates i * 2**exponent, |i| <= span."""
    ij = rng.integers(-span, span + 1, size=(k, 2))
    rows = [[Dyadic(int(a), exponent), Dyadic(int(b), exponent)] for a, b in ij]
    return FinitePointSet(rows, exact=True)
