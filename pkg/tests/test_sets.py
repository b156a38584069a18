import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial import ConvexHull
from scipy.spatial.distance import cdist

from symlab.core import DimensionError, Dyadic
from symlab.sets import (ConvexPolygon, FinitePointSet, GridSet, GridSpacingError, IntervalUnion,
                         RepresentationError, convex_hull, diameter, hausdorff_distance,
                         mean_width_2d, minkowski_sum, scale, support_function, to_grid, volume)
from symlab.sets.textio import SetFormatError, dump_set, parse_set
from conftest import interval_unions, masks

D = Dyadic


def members(U: IntervalUnion, xs):
    xs = np.asarray(xs, dtype=float)
    e = np.array([[float(a), float(b)] for a, b in U.intervals])
    flat = xs.reshape(-1, 1)
    return ((flat >= e[:, 0]) & (flat <= e[:, 1])).any(axis=1).reshape(xs.shape)


# -- intervals ----------------------------------------------------------------

def test_interval_sum_example_by_sampling():
    A = IntervalUnion([(0, 1), (3, 4)])
    S = A + IntervalUnion([(0, 1)])
    assert S == IntervalUnion([(0, 2), (3, 5)])
    xs = np.linspace(-1, 6, 2801)
    # membership oracle: x in A + [0,1] iff some a in A has x - a in [0,1]
    grid = np.linspace(0, 1, 401)
    want = members(A, xs[:, None] - grid[None, :]).any(axis=1)
    assert np.array_equal(members(S, xs), want)


@given(interval_unions(), interval_unions())
def test_interval_sum_matches_pairwise_oracle(a, b):
    A, B = IntervalUnion(a), IntervalUnion(b)
    want = IntervalUnion([(x0 + y0, x1 + y1) for x0, x1 in A.intervals for y0, y1 in B.intervals])
    assert A + B == want
    assert A + B == B + A


@given(interval_unions(), interval_unions(), interval_unions())
def test_interval_sum_associative(a, b, c):
    A, B, C = map(IntervalUnion, (a, b, c))
    assert (A + B) + C == A + (B + C)


def test_interval_basics():
    A = IntervalUnion([(0, 1), (3, 4)])
    assert diameter(A) == 4
    assert volume(A) == 2
    assert convex_hull(IntervalUnion([(-1, D(-1, -1)), (D(1, -1), 1)])) == IntervalUnion([(-1, 1)])
    assert scale(IntervalUnion([(0, 2)]), D(1, -1)) == IntervalUnion([(0, 1)])
    assert IntervalUnion([(0, 1), (1, 2)]) == IntervalUnion([(0, 2)])  # touching merge
    with pytest.raises(ValueError):
        IntervalUnion([(2, 1)])
    with pytest.raises(ValueError):
        scale(A, -1)


def test_interval_hausdorff():
    assert hausdorff_distance(IntervalUnion.points([0]), IntervalUnion.points([1])) == 1
    k = 7
    pts = IntervalUnion.points(range(k + 1))
    assert hausdorff_distance(pts, IntervalUnion([(0, k)])) == D(1, -1)


# -- point sets -------------------------------------------------------------

def test_pointset_sum_example():
    C = FinitePointSet([[-1, 0], [1, 0]], exact=True)
    assert C + C == FinitePointSet([[-2, 0], [0, 0], [2, 0]], exact=True)


@given(st.lists(st.tuples(st.integers(-8, 8), st.integers(-8, 8)), min_size=1, max_size=6),
       st.lists(st.tuples(st.integers(-8, 8), st.integers(-8, 8)), min_size=1, max_size=6))
def test_pointset_sum_is_pairwise_enumeration(a, b):
    A = FinitePointSet([[D(x, -2), D(y, -2)] for x, y in a], exact=True)
    B = FinitePointSet([[D(x, -1), D(y, -1)] for x, y in b], exact=True)
    want = {(Fraction(x, 4) + Fraction(u, 2), Fraction(y, 4) + Fraction(v, 2)) for x, y in a for u, v in b}
    got = {tuple(c.as_fraction() for c in p) for p in (A + B).vectors()}
    assert got == want


def test_pointset_diameter_support_volume():
    C = FinitePointSet([[-1, 0], [1, 0]], exact=True)
    assert float(diameter(C)) == 2
    assert support_function(C, [0, 1]) == 0
    assert volume(C) == 0
    with pytest.raises(ValueError):
        support_function(C, [0, 0])


def test_pointset_hull_examples():
    seg = convex_hull(FinitePointSet([[-1, 0], [0, 0], [1, 0]]))
    assert seg.degenerate and len(seg) == 2
    sq = convex_hull(FinitePointSet([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]]))
    assert len(sq) == 4 and math.isclose(sq.area(), 1.0)


def test_pointset_snap_spacing(rng):
    pts = rng.normal(size=(30, 2))
    A = FinitePointSet(pts)
    # points are within snap/2 per coordinate of their input
    assert np.all(np.abs(np.sort(A.points, axis=0) - np.sort(pts, axis=0)) <= A.snap) or len(A) == 30
    assert A.snap <= 1e-6 * np.ptp(pts, axis=0).max() * math.sqrt(2) * 2


def test_mismatch_errors():
    A = FinitePointSet([[0, 0]], exact=True)
    with pytest.raises(RepresentationError):
        minkowski_sum(A, ConvexPolygon([[0, 0]]))
    with pytest.raises(DimensionError):
        minkowski_sum(A, FinitePointSet([[0, 0, 0]], exact=True))
    G = GridSet([(0, 0)], 1)
    with pytest.raises(GridSpacingError):
        G + GridSet([(0, 0)], D(1, -1))


# -- polygons -----------------------------------------------------------------

def random_polygon(rng, k=None):
    k = k or int(rng.integers(3, 12))
    return ConvexPolygon.hull_of(rng.normal(size=(k, 2)) * rng.uniform(0.2, 3))


def test_polygon_examples():
    sq = ConvexPolygon.box(0, 0, 1, 1)
    two = sq + sq
    assert hausdorff_distance(two, ConvexPolygon.box(0, 0, 2, 2)) < 1e-12
    assert hausdorff_distance(scale(sq, 2), ConvexPolygon.box(0, 0, 2, 2)) < 1e-12
    assert math.isclose(diameter(sq), math.sqrt(2))
    assert math.isclose(volume(sq), 1.0)
    c = ConvexPolygon.box(-0.5, -0.5, 0.5, 0.5)
    assert math.isclose(support_function(c, [1, 0]), 0.5)


def test_polygon_sum_matches_hull_oracle(rng):
    for _ in range(50):
        P, Q = random_polygon(rng), random_polygon(rng)
        S = P + Q
        sums = (P.vertices[:, None, :] + Q.vertices[None, :, :]).reshape(-1, 2)
        hull = ConvexHull(sums)
        assert len(S) == len(hull.vertices)
        assert math.isclose(S.area(), hull.volume, rel_tol=1e-9)
        U = rng.normal(size=(20, 2))
        assert np.allclose(S.support_many(U), P.support_many(U) + Q.support_many(U), atol=1e-9)


def quadrature_width(P, n=4096):
    t = np.arange(n) * 2 * np.pi / n
    U = np.c_[np.cos(t), np.sin(t)]
    h = P.support_many(U)
    # w = (1/|S^1|) * integral of h(u) + h(-u), i.e. twice the mean of h
    return 2 * h.mean()


def test_mean_width_against_quadrature(rng):
    assert math.isclose(mean_width_2d(ConvexPolygon.box(0, 0, 1, 1)), 4 / math.pi)
    assert abs(quadrature_width(ConvexPolygon.box(0, 0, 1, 1)) - 4 / math.pi) < 1e-6
    seg = ConvexPolygon([[0, 0], [3, 0]])
    assert math.isclose(mean_width_2d(seg), 6 / math.pi)
    assert abs(quadrature_width(seg) - 6 / math.pi) < 1e-6
    for _ in range(20):
        P = random_polygon(rng)
        assert abs(mean_width_2d(P) - quadrature_width(P)) < 1e-6 * max(1, mean_width_2d(P))
        assert math.isclose(mean_width_2d(scale(P, 2.5)), 2.5 * mean_width_2d(P), rel_tol=1e-12)


# -- grids ------------------------------------------------------------------

def grid_sum_oracle(A: GridSet, B: GridSet) -> set:
    n = A.ambient_dim
    out = set()
    for a in A.cells:
        for b in B.cells:
            for e in itertools.product((0, 1), repeat=n):
                out.add(tuple(x + y + z for x, y, z in zip(a, b, e)))
    return out


@given(masks(4), masks(4))
def test_grid_sum_matches_cell_oracle(m1, m2):
    A = GridSet.from_mask(m1, (0, -1), 1)
    B = GridSet.from_mask(m2, (2, 0), 1)
    assert (A + B).cell_set() == grid_sum_oracle(A, B)
    assert A + B == B + A


def test_grid_examples():
    G = GridSet([(0,), (1,)], 1)
    Hf = scale(G, D(1, -1))
    assert Hf.spacing == D(1, -1) and Hf.cell_set() == {(0,), (1,)}
    with pytest.raises(ValueError):
        scale(G, 3)
    assert to_grid(FinitePointSet([[0.3]]), 1).cell_set() == {(0,)}
    sq = to_grid(ConvexPolygon.box(0, 0, 1, 1), D(1, -1))
    assert sq.cell_set() == {(0, 0), (0, 1), (1, 0), (1, 1)}
    blk = GridSet.box((3, 3), (0, 0), 1)
    assert blk.volume() == 9
    assert math.isclose(float(diameter(blk)), 3 * math.sqrt(2))


def test_to_grid_hausdorff_bound(rng):
    for _ in range(10):
        P = random_polygon(rng)
        h = D(1, -3)
        G = to_grid(P, h)
        d, err = hausdorff_distance(G, P, with_error=True)
        assert d <= float(h) * math.sqrt(2) + err


@given(masks(5), masks(5))
def test_brunn_minkowski_on_grids(m1, m2):
    A, B = GridSet.from_mask(m1, (0, 0), 1), GridSet.from_mask(m2, (0, 0), 1)
    lhs = float((A + B).volume()) ** 0.5
    assert lhs >= float(A.volume()) ** 0.5 + float(B.volume()) ** 0.5 - 1e-12


def test_grid_normalize_equality():
    G = GridSet.box((2, 2), (0, 0), 1)
    assert G.refine(2) == G
    # a 2x2 block of unit cells is one aligned cell of side 2
    assert G.refine(2).normalize() == GridSet([(0, 0)], 2)
    assert G.refine(2).normalize().spacing == 2


# -- metric properties ------------------------------------------------------

def test_pointset_hausdorff_matches_bruteforce(rng):
    for _ in range(20):
        a, b = rng.normal(size=(15, 2)), rng.normal(size=(11, 2))
        M = cdist(a, b)
        want = max(M.min(axis=1).max(), M.min(axis=0).max())
        got = hausdorff_distance(FinitePointSet(a, snap=1e-12), FinitePointSet(b, snap=1e-12))
        assert abs(got - want) < 1e-9


def test_points_vs_interval_midpoints():
    for k in range(1, 11):
        pts = FinitePointSet([[i, 0] for i in range(k + 1)], exact=True)
        seg = ConvexPolygon([[0, 0], [k, 0]])
        assert math.isclose(hausdorff_distance(pts, seg), 0.5)


def test_points_vs_polygon_sampling_oracle(rng):
    for _ in range(8):
        P = random_polygon(rng)
        pts = rng.normal(size=(12, 2))
        d, err = hausdorff_distance(FinitePointSet(pts, snap=1e-12), P, with_error=True)
        # dense sampling of the polygon gives a lower bound on one excess
        u = rng.random((20000, 2))
        tri = P.vertices
        samples = []  # uniform samples over a triangle fan
        for i in range(1, len(tri) - 1):
            a, b = tri[i] - tri[0], tri[i + 1] - tri[0]
            s, t = u[:, 0], u[:, 1]
            flip = s + t > 1
            s, t = np.where(flip, 1 - s, s), np.where(flip, 1 - t, t)
            samples.append(tri[0] + s[:, None] * a + t[:, None] * b)
        S = np.concatenate(samples)
        e1 = cdist(S, pts).min(axis=1).max()
        e2 = np.maximum(P.signed_distance(pts), 0).max()
        lower = max(e1, e2)
        assert lower <= d + 1e-9
        assert d <= lower + err + 0.05  # sampling density bounds the gap


@given(st.integers(0, 10 ** 6))
def test_hausdorff_triangle_symmetry(seed):
    r = np.random.default_rng(seed)
    A, B, C = (FinitePointSet(r.normal(size=(int(r.integers(1, 8)), 2)), snap=1e-12) for _ in range(3))
    ab, bc, ac = hausdorff_distance(A, B), hausdorff_distance(B, C), hausdorff_distance(A, C)
    assert math.isclose(ab, hausdorff_distance(B, A))
    assert ac <= ab + bc + 1e-9
    assert hausdorff_distance(A, A) == 0


@given(st.integers(0, 10 ** 6))
def test_hull_commutes_with_sum(seed):
    r = np.random.default_rng(seed)
    A = FinitePointSet(r.normal(size=(int(r.integers(1, 9)), 2)), snap=1e-9)
    B = FinitePointSet(r.normal(size=(int(r.integers(1, 9)), 2)), snap=1e-9)
    lhs = convex_hull(A + B)
    rhs = convex_hull(A) + convex_hull(B)
    assert hausdorff_distance(lhs, rhs) < 1e-7


@given(st.integers(0, 10 ** 6))
def test_averaging_is_nonexpansive(seed):
    r = np.random.default_rng(seed)
    A, A2, B, B2 = (FinitePointSet(r.normal(size=(int(r.integers(1, 7)), 2)), snap=1e-12)
                    for _ in range(4))
    lhs = hausdorff_distance((A + B).scale(0.5), (A2 + B2).scale(0.5))
    rhs = 0.5 * hausdorff_distance(A, A2) + 0.5 * hausdorff_distance(B, B2)
    assert lhs <= rhs + 1e-9


# -- text format --------------------------------------------------------------

@given(interval_unions())
def test_interval_text_roundtrip(a):
    U = IntervalUnion(a)
    assert parse_set(dump_set(U)) == U


@given(masks(4, 3))
def test_grid_text_roundtrip(m):
    G = GridSet.from_mask(m, (1, -2, 0), D(3, -2))
    assert parse_set(dump_set(G)) == G


def test_pointset_text_roundtrip_exact():
    A = FinitePointSet([[D(1, -5), D(-3, 2)], [0, 1]], exact=True)
    assert parse_set(dump_set(A)) == A


@pytest.mark.parametrize("text, line", [
    ("rep=pointset dim=2\npoint 1\n", 2),
    ("rep=grid dim=2\ninterval 0 1\n", 2),
    ("rep=blob dim=2\n", 1),
    ("rep=pointset dim=2\npoint 1/3 0\n", 2),
])
def test_text_errors_name_line(text, line):
    with pytest.raises(SetFormatError) as exc:
        parse_set(text)
    assert exc.value.line == line
