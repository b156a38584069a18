import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symlab.core import Dyadic, Subspace
from symlab.sequences import (CSV_HEADER, BoundViolation, ScheduleSpec, fill_index,
                              hadwiger_rounding_run, idempotency_bound, idempotency_index_1d,
                              iterated_central_limit_check, klain_limit_symmetry_check,
                              mean_index_1d, run_schedule, sfs_gap, spearman_sign)
from symlab.sets import (ConvexPolygon, FinitePointSet, GridSet, IntervalUnion, convex_hull,
                         hausdorff_distance, reflect_set)
from symlab.symmetrize import minkowski_symmetrize

D = Dyadic
X2, Y2 = Subspace.coordinate(2, 0), Subspace.coordinate(2, 1)


# -- schedule spec ------------------------------------------------------------------

def test_spec_validation():
    with pytest.raises(ValueError):
        ScheduleSpec([])
    with pytest.raises(ValueError):
        ScheduleSpec([X2], max_steps=0)
    with pytest.raises(ValueError):
        ScheduleSpec([X2], tol=0)
    with pytest.raises(ValueError):
        ScheduleSpec([X2], schedule=[0, 1])
    with pytest.raises(ValueError):
        ScheduleSpec([X2], schedule="random")  # seed required
    with pytest.raises(ValueError):
        ScheduleSpec([X2], operator="blur")


def test_random_schedule_reproducible():
    a = ScheduleSpec([X2, Y2], "random", max_steps=30, seed=2 ** 63 + 5)
    b = ScheduleSpec([X2, Y2], "random", max_steps=30, seed=2 ** 63 + 5)
    assert list(a.indices()) == list(b.indices())
    assert set(a.indices()) == {0, 1}


# -- run_schedule ---------------------------------------------------------------

def test_two_point_run_halves_distance_to_segment():
    C = FinitePointSet([[-1, 0], [1, 0]], exact=True)
    seg = ConvexPolygon([[-1, 0], [1, 0]])
    final, rep = run_schedule(C, ScheduleSpec([Y2], max_steps=10, tol=1e-9), reference=seg)
    for r in rep.records:
        assert float(r.dh_ref) == 0.5 * 2.0 ** -(r.step - 1)
        assert r.dh_ref_err == 0
    assert len(final) == 2 ** 10 + 1


def test_symmetric_polygon_stops_at_step_one():
    P = ConvexPolygon.box(-1, -2, 1, 2)
    _, rep = run_schedule(P, ScheduleSpec([X2, Y2], max_steps=10))
    assert len(rep.records) == 1 and rep.stop_reason == "tolerance_met"


def test_cloud_and_hull_runs_agree(rng):
    A = FinitePointSet(rng.normal(size=(6, 2)))
    spec = ScheduleSpec([X2, Y2], "cyclic", max_steps=40, tol=1e-6)
    fa, ra = run_schedule(A, spec)
    fb, rb = run_schedule(convex_hull(A), spec)
    assert ra.stop_reason == "tolerance_met"
    from symlab.sequences import distance
    d, err = distance(fa, fb)
    assert float(d) <= 2e-6 + err


def test_grid_cap():
    G = GridSet([(0, 0), (3, 1)], 1)
    _, rep = run_schedule(G, ScheduleSpec([X2], max_steps=20, tol=1e-12))
    assert rep.stop_reason == "cap_exceeded" and len(rep.records) == 8


def test_report_csv_and_invariants():
    C = FinitePointSet([[-1, 0], [1, 0], [0, 1]], exact=True)
    spec = ScheduleSpec([X2, Y2], max_steps=12, tol=1e-3)
    _, rep = run_schedule(C, spec, reference=convex_hull(C))
    text = rep.to_csv()
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert len(text.splitlines()) == len(rep.records) + 1
    assert len(rep.records) <= spec.max_steps
    assert all(float(r.dh_prev) >= 0 and float(r.dh_ref) >= 0 for r in rep.records)
    if rep.stop_reason == "tolerance_met":
        assert float(rep.records[-1].dh_prev) + rep.records[-1].dh_prev_err < spec.tol


def test_incompatible_operator():
    with pytest.raises(ValueError):
        run_schedule(FinitePointSet([[0, 0]]), ScheduleSpec([X2], operator="steiner"))


@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=4))
def test_monotone_growth_after_first_step(rows):
    A = FinitePointSet([[D(x, -1), D(y, -1)] for x, y in rows], exact=True)
    K = minkowski_symmetrize(A, Y2)
    for _ in range(2):
        nxt = minkowski_symmetrize(K, Y2)
        assert K.issubset(nxt)
        K = nxt


# -- central limit check ----------------------------------------------------------

def test_central_limit_two_point():
    C = FinitePointSet([[-1, 0], [1, 0]], exact=True)
    rep = iterated_central_limit_check(C, Y2, m_max=10, tol=1e-9)
    assert [float(r.dh_ref) for r in rep.records] == [0.5 * 2.0 ** -(m - 1) for m in range(1, 11)]


def test_central_limit_convex_input():
    P = ConvexPolygon.hull_of([[0, 0], [2, 0], [1, 3]])
    rep = iterated_central_limit_check(P, Y2, m_max=5)
    assert all(float(r.dh_ref) < 1e-12 for r in rep.records)


def test_central_limit_random_clouds_nonincreasing():
    for seed in range(20):
        r = np.random.default_rng(seed)
        A = FinitePointSet(r.normal(size=(10, 2)))
        rep = iterated_central_limit_check(A, Subspace.line(r.uniform(0, math.pi)), m_max=40)
        upper = [float(x.dh_ref) + x.dh_ref_err for x in rep.records]
        vals = [float(x.dh_ref) for x in rep.records]
        # each measured value is below every earlier upper bound
        assert all(v <= min(upper[:i + 1]) + 1e-12 for i, v in enumerate(vals))


def test_bound_violation_carries_step():
    e = BoundViolation("x", 7)
    assert e.step == 7 and isinstance(e, AssertionError)


# -- Shapley-Folkman-Starr ------------------------------------------------------

def test_sfs_examples():
    one = FinitePointSet([[0], [1]], exact=True)
    for k in (2, 5, 9):
        gap, bound = sfs_gap([one] * k)
        assert gap == D(1, -1) and bound == 1
    polys = [ConvexPolygon.hull_of(np.random.default_rng(i).normal(size=(5, 2))) for i in range(4)]
    gap, _ = sfs_gap(polys)
    assert float(gap) < 1e-12
    C = FinitePointSet([[-1, 0], [1, 0]], exact=True)
    gap, bound = sfs_gap([C] * 6)
    assert float(gap) <= math.sqrt(2) * 2 and math.isclose(bound, 2 * math.sqrt(2))
    with pytest.raises(ValueError):
        sfs_gap([])


# -- 1-D idempotency -----------------------------------------------------------------

def test_idempotency_examples():
    w = idempotency_index_1d(IntervalUnion([(-1, D(-1, -1)), (D(1, -1), 1)]))
    assert w.certified and w.ell == 2 and w.iterates[2] == IntervalUnion([(-1, 1)])
    assert w.M == 1 and w.eps == D(1, -1)
    assert w.eps == 2 * (w.M - w.m)
    assert fill_index(D(1), D(1, -1)) == 2
    w0 = idempotency_index_1d(IntervalUnion([(-1, 1)]))
    assert w0.certified and w0.ell == 0
    two = idempotency_index_1d(IntervalUnion.points([-1, 1]), cap=30)
    assert not two.certified


def test_mean_index_examples():
    w = mean_index_1d(IntervalUnion([(0, D(1, -2)), (D(3, -2), 1)]))
    assert w.certified and w.ell is not None
    k = w.ell
    cur = IntervalUnion([(0, D(1, -2)), (D(3, -2), 1)])
    for _ in range(k):
        cur = (cur + cur).half()
    assert cur == IntervalUnion([(0, 1)])
    assert mean_index_1d(IntervalUnion([(0, 1)])).ell == 0
    bad = mean_index_1d(IntervalUnion([(0, D(1, -2)), (1, 1)]), cap=20)
    assert not bad.certified


def test_bound_formula_by_fractions():
    # ceil(log2(4M/eps - 1)) + 1 with an independent float oracle away from ties
    for M, eps in ((D(1), D(1, -1)), (D(5), D(1, -3)), (D(3, -1), D(1, -4))):
        q = 4 * float(M) / float(eps) - 1
        assert idempotency_bound(M, eps) == math.ceil(math.log2(q)) + 1


@given(st.lists(st.tuples(st.integers(-32, 32), st.integers(0, 6)), min_size=1, max_size=4),
       st.integers(1, 8))
def test_certified_index_is_fixed_point(parts, end):
    ivs = [(D(a, -3), D(a + w, -3)) for a, w in parts] + [(D(-40, -3), D(-40 + end, -3))]
    w = idempotency_index_1d(IntervalUnion(ivs), cap=12)
    if w.certified:
        K = w.iterates[-1] if w.ell == len(w.iterates) - 1 else w.iterates[w.ell]
        nxt = (K + (-K)).half()
        assert nxt == K and K.is_convex()
        assert w.ell <= w.bound


def test_spearman_sign():
    assert spearman_sign([1, 2, 3], [2, 5, 9]) > 0
    assert spearman_sign([1, 2, 3], [9, 5, 2]) < 0


# -- limit symmetry and rounding -------------------------------------------------

def test_klain_symmetry_cyclic(rng):
    A = FinitePointSet(rng.normal(size=(7, 2)))
    spec = ScheduleSpec([X2, Y2], "cyclic", max_steps=40, tol=1e-6)
    final, rep = run_schedule(A, spec)
    checks = klain_limit_symmetry_check(rep, spec, final)
    assert {c.subspace for c in checks} == {"x", "y"} and all(c.holds for c in checks)


def test_klain_symmetry_single_and_finite_occurrence(rng):
    A = FinitePointSet(rng.normal(size=(5, 2)))
    H = Subspace.line(0.4)
    spec = ScheduleSpec([H], max_steps=40, tol=1e-6)
    final, rep = run_schedule(A, spec)
    assert all(c.holds for c in klain_limit_symmetry_check(rep, spec, final))
    once = ScheduleSpec([H, X2], [1] + [0] * 39, max_steps=40, tol=1e-6)
    final, rep = run_schedule(A, once)
    names = {c.subspace for c in klain_limit_symmetry_check(rep, once, final)}
    assert "x" not in names


def test_hadwiger_examples():
    disk = FinitePointSet(ConvexPolygon.regular(128).vertices)
    rep = hadwiger_rounding_run(disk)
    assert all(abs(r.ratio - 1) < 1e-3 for r in rep.records) and rep.passed
    sq = FinitePointSet([[-1, -1], [1, -1], [1, 1], [-1, 1]])
    rep = hadwiger_rounding_run(sq)
    assert math.isclose(rep.records[0].ratio, math.sqrt(2), rel_tol=1e-9)
    ratios = [r.ratio for r in rep.records]
    assert all(b <= a + 1e-9 for a, b in zip(ratios, ratios[1:])) and rep.passed
    with pytest.raises(ValueError):
        hadwiger_rounding_run(FinitePointSet([[-1, 0], [1, 0]]), (1,))


def test_hadwiger_two_point_means_approach_disk():
    C = FinitePointSet([[-1, 0], [1, 0]])
    rep = hadwiger_rounding_run(C, (2, 4, 8, 16, 32, 64))
    last = rep.records[-1]
    # the hull of the means tends to a disk of radius w/2
    assert abs(last.circumradius - last.mean_width / 2) < 0.01
    assert abs(last.inradius - last.mean_width / 2) < 0.01


def test_quiet_window_must_cover_remaining_lines():
    # repeating one line is idempotent on convex sets, so a quiet run of x-steps
    # says nothing about the y-step still ahead
    P = ConvexPolygon.hull_of([[0, 0], [3, 1], [1, 2]])
    spec = ScheduleSpec([X2, Y2], [0, 0, 0, 0, 0, 1, 1, 1, 1], max_steps=9, tol=1e-9)
    final, rep = run_schedule(P, spec)
    assert len(rep.records) > 5
    assert hausdorff_distance(final, reflect_set(final, Y2)) < 1e-9
