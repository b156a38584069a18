import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symlab import shapes
from symlab.boundary import (HypothesisError, boundary_connected, boundary_sum_check,
                             boundary_sum_gate, common_boundary_witness, external_boundary,
                             fiber_klain_run, fill_holes, grid_boundary, has_holes,
                             hull_boundary_gate, is_connected, klartag_rounding_run,
                             one_step_convexification_check, points_boundary_gap,
                             sections_convex, strictly_contained_translate, strictly_inside)
from symlab.core import Subspace
from symlab.sequences import ScheduleSpec
from symlab.sets import ConvexPolygon, FinitePointSet, GridSet
from symlab.symmetrize import fiber_symmetrize, minkowski_symmetrize
from conftest import masks

X2, Y2 = Subspace.coordinate(2, 0), Subspace.coordinate(2, 1)


def rim_oracle(A: GridSet) -> set:
    cells = A.cell_set()
    n = A.ambient_dim
    out = set()
    for c in cells:
        for ax in range(n):
            for s in (-1, 1):
                nb = list(c)
                nb[ax] += s
                if tuple(nb) not in cells:
                    out.add(c)
    return out


def sum_oracle(A: GridSet, B: GridSet) -> set:
    n = A.ambient_dim
    offs = list(itertools.product((0, 1), repeat=n))
    return {tuple(a[i] + b[i] + e[i] for i in range(n))
            for a in A.cells for b in B.cells for e in offs}


# -- extraction -----------------------------------------------------------------

def test_rim_examples():
    assert len(grid_boundary(shapes.block((3, 3)))) == 8
    assert len(grid_boundary(shapes.block((4, 4)))) == 12
    one = GridSet([(2, -1)], 1)
    assert grid_boundary(one) == one
    assert external_boundary(one) == one
    B = shapes.block((5, 4))
    assert external_boundary(B) == grid_boundary(B)


def test_annulus_external_boundary_is_outer_rim():
    A = shapes.annulus(8, 2)
    ext = external_boundary(A)
    full = grid_boundary(A)
    # the four inner corners of the outer layer have no face-neighbour outside
    assert len(A) == 8 * 8 - 4 * 4 and len(full) == len(A) - 4
    assert len(ext) == 4 * 8 - 4
    assert ext == grid_boundary(fill_holes(A))


def test_topology_flags():
    A = shapes.annulus(6, 1)
    assert is_connected(A) and has_holes(A) and not boundary_connected(A)
    assert fill_holes(A) == shapes.block((6, 6))
    diag = GridSet([(0, 0), (1, 1)], 1)
    assert is_connected(diag)  # corner contact joins closed cubes
    assert not is_connected(GridSet([(0, 0), (2, 0)], 1))
    # corner-touching holes stay holes: complement uses face adjacency
    m = np.ones((4, 4), bool)
    m[1, 1] = m[2, 2] = False
    assert has_holes(GridSet.from_mask(m, (0, 0), 1))


@given(masks(7))
def test_rim_matches_neighbour_count(m):
    A = GridSet.from_mask(m, (-3, 1), 1)
    R = grid_boundary(A)
    assert R.cell_set() == rim_oracle(A)
    assert R.issubset(A)
    assert external_boundary(A).issubset(R)


# -- strict containment ----------------------------------------------------------

def test_strict_containment_examples():
    big, small = shapes.block((6, 6), (0, 0)), shapes.block((2, 2), (0, 0))
    x = strictly_contained_translate(small, big)
    assert x is not None
    moved = small.translate_cells([int(v) for v in x]) if all(float(v).is_integer() for v in x) else None
    if moved is not None:
        assert strictly_inside(moved, big)
    assert strictly_contained_translate(big, small) is None
    # a 4x4 block does not fit strictly inside another 4x4 block
    assert strictly_contained_translate(shapes.block((4, 4)), shapes.block((4, 4))) is None
    # [0, 3]^2 fits strictly inside [0, 4]^2 only at a half-cell offset
    x = strictly_contained_translate(shapes.block((3, 3), (0, 0)), shapes.block((4, 4), (0, 0)))
    assert x == (0.5, 0.5)
    assert not strictly_inside(small, big)  # touches the boundary at the origin corner
    assert strictly_inside(small.translate_cells([2, 2]), big)


# -- boundary sums --------------------------------------------------------------

def test_boundary_sum_examples():
    blk = shapes.block((5, 5))
    r = boundary_sum_check(blk, blk)
    assert r.holds and r.subset_holds and r.gate.passed and r.witness_cell is None
    r = boundary_sum_check(shapes.annulus(10, 2), shapes.block((10, 10)))
    assert r.gate.passed and r.holds
    # the small block sits strictly inside the filled ring; equality holds anyway
    r = boundary_sum_check(shapes.annulus(10, 2), shapes.block((3, 3)))
    assert not r.gate.passed and r.holds
    r = boundary_sum_check(shapes.block((16, 16)), shapes.block((2, 2)))
    assert not r.gate.passed and r.subset_holds
    assert not r.holds and r.witness_cell is not None  # the interior of K + L is missed
    with pytest.raises(ValueError):
        boundary_sum_check(GridSet([(0,)], 1), GridSet([(0,)], 1))


def test_boundary_sum_matches_cell_oracle():
    K, L = shapes.l_shape(5, 4, 2, 2), shapes.block((3, 2))
    full = K + L
    assert full.cell_set() == sum_oracle(K, L)
    rims = grid_boundary(K) + grid_boundary(L)
    assert rims.cell_set() == sum_oracle(grid_boundary(K), grid_boundary(L))
    r = boundary_sum_check(K, L)
    assert r.holds == (rims.cell_set() == full.cell_set())


def test_gate_fills_holes():
    # K fits strictly inside L only once holes are filled; the rim sum then
    # misses the centre of K + L
    K, L = shapes.annulus(21, 7), shapes.annulus(27, 8)
    r = boundary_sum_check(K, L)
    assert not r.holds and not r.gate.passed


def test_gate_rejects_disconnected():
    K = GridSet([(0, 0), (3, 0)], 1)
    g = boundary_sum_gate(K, shapes.block((2, 2)))
    assert not g.passed and any("not connected" in s for s in g.reasons)


@settings(max_examples=30)
@given(masks(6), masks(5))
def test_rim_sum_inside_full_sum(m1, m2):
    K, L = GridSet.from_mask(m1, (0, 0), 1), GridSet.from_mask(m2, (-2, 1), 1)
    r = boundary_sum_check(K, L)
    assert r.subset_holds
    if r.gate.passed:
        assert r.holds


# -- common boundary witness ----------------------------------------------------------

def test_witness_examples():
    K = shapes.block((4, 4), (0, 0))
    L = shapes.block((4, 4), (2, 0))
    w = common_boundary_witness(K, L)
    assert w.cell is not None
    assert w.cell in grid_boundary(K).cell_set()
    big = shapes.block((8, 8), (0, 0))
    w = common_boundary_witness(shapes.block((2, 2), (3, 3)), big)
    assert w.cell is None and "strict containment" in w.failed
    w = common_boundary_witness(K, K)
    assert w.cell in grid_boundary(K).cell_set()
    w = common_boundary_witness(K, shapes.block((2, 2), (10, 10)))
    assert w.cell is None and "disjoint" in w.failed
    w = common_boundary_witness(shapes.annulus(6, 1), K)
    assert w.cell is None and "not connected" in w.failed


# -- convexification ------------------------------------------------------------

def test_hull_gate():
    rng = np.random.default_rng(0)
    assert hull_boundary_gate(shapes.ring_with_interior((6, 5), rng))
    assert hull_boundary_gate(shapes.block((3, 3)))
    assert not hull_boundary_gate(GridSet([(0, 0), (3, 3)], 1))
    assert not hull_boundary_gate(shapes.l_shape(5, 5, 2, 2))


def test_convexification_examples():
    rng = np.random.default_rng(1)
    ring = shapes.ring_with_interior((7, 7), rng, fill=0.0)
    for H in (X2, Y2, Subspace.origin(2)):
        r = one_step_convexification_check(ring, H)
        assert r.gate and r.holds and r.convex
    r = one_step_convexification_check(shapes.block((4, 3)), X2)
    assert r.gate and r.exact and r.dh == 0
    r = one_step_convexification_check(GridSet([(-2, -2), (1, 1)], 1), X2)
    assert not r.gate and not r.holds
    assert one_step_convexification_check(ConvexPolygon.box(0, 0, 1, 1), X2).holds
    with pytest.raises(HypothesisError):
        one_step_convexification_check(FinitePointSet([[0, 0], [1, 1]]), X2)


@given(st.integers(2, 7), st.integers(2, 7))
def test_block_symmetral_equals_rim_symmetral(a, b):
    B = shapes.block((a, b), (0, 1))
    for H in (X2, Y2):
        lhs = minkowski_symmetrize(B, H).normalize()
        rhs = minkowski_symmetrize(grid_boundary(B), H).normalize()
        assert lhs == rhs


@settings(max_examples=25)
@given(st.integers(3, 8), st.integers(3, 8), st.integers(0, 2 ** 32 - 1))
def test_gated_symmetral_is_convex(a, b, seed):
    C = shapes.ring_with_interior((a, b), np.random.default_rng(seed))
    r = one_step_convexification_check(C, X2)
    assert r.gate and r.dh <= r.collar and r.convex


# -- fiber runs -------------------------------------------------------------------

def fiber_spec(steps=5):
    fam = [Subspace.coordinate(3, a) for a in (2, 0, 1)]
    return ScheduleSpec(fam, "cyclic", max_steps=steps, tol=1e-9, operator="fiber")


def test_fiber_shell_matches_hull_run():
    r = fiber_klain_run(shapes.hollow_shell(6), fiber_spec())
    assert r.passed and r.sections_convex and r.cauchy and r.limit_dh <= r.collar
    assert math.isclose(r.collar, math.sqrt(3) * 0.5)


def test_fiber_block_constant_after_first_step():
    B = shapes.block((4, 4, 4))
    r = fiber_klain_run(B, fiber_spec())
    assert r.passed
    assert all(float(x.dh_prev) == 0 for x in r.report.records[1:])


def test_fiber_refusals():
    with pytest.raises(HypothesisError):
        fiber_klain_run(shapes.hollow_shell(6, open_face=True), fiber_spec())
    plane = ScheduleSpec([Subspace.coordinate(3, 0, 1)], max_steps=3, operator="fiber")
    with pytest.raises(ValueError):
        fiber_klain_run(shapes.hollow_shell(6), plane)
    with pytest.raises(ValueError):
        fiber_klain_run(shapes.block((3, 3)), fiber_spec())


def test_sections_convex_after_one_fiber_step():
    C = shapes.hollow_shell(6)
    H = Subspace.coordinate(3, 2)
    assert not sections_convex(C, H)[0]
    ok, worst = sections_convex(fiber_symmetrize(C, H), H)
    assert ok and worst == 0


# -- rounding runs ------------------------------------------------------------------

def test_klartag_square_boundary():
    sq = shapes.square_boundary_points(200)
    r = klartag_rounding_run(sq, [k * math.pi / 16 for k in range(16)])
    assert math.isclose(r.records[0].ratio, math.sqrt(2), rel_tol=1e-9)
    assert r.width_constant and r.improved and r.final_ratio <= 1.05
    w0 = r.records[0].mean_width
    assert math.isclose(w0, 8 / math.pi, rel_tol=1e-12)  # perimeter / pi
    assert all(abs(x.mean_width - w0) <= 1e-9 * w0 for x in r.records)


def test_klartag_disk_and_gate():
    disk = ConvexPolygon.regular(256)
    r = klartag_rounding_run(disk, [0.0, 1.0])
    assert abs(r.records[0].ratio - 1) < 1e-3
    corners = FinitePointSet([[-1, -1], [1, -1], [1, 1], [-1, 1]])
    assert points_boundary_gap(corners) == pytest.approx(1.0)
    with pytest.raises(HypothesisError):
        klartag_rounding_run(corners, [0.0])
    with pytest.raises(HypothesisError):
        klartag_rounding_run(GridSet([(0, 0), (2, 2)], 1), [0.0])
    with pytest.raises(ValueError):
        klartag_rounding_run(shapes.block((2, 2, 2)), [0.0])


def test_klartag_pi_over_8_lines_stall_at_octagon():
    # normals stay at multiples of pi/4, so the best reachable body is an octagon
    sq = shapes.square_boundary_points(200)
    r = klartag_rounding_run(sq, [k * math.pi / 8 for k in range(8)] * 4)
    assert math.isclose(r.final_ratio, 1 / math.cos(math.pi / 8), rel_tol=1e-6)
    assert r.final_ratio > 1.05
