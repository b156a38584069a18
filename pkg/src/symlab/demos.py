"""Built-in reproductions with a pass/fail table each."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import shapes
from .boundary import (boundary_sum_check, fiber_klain_run, klartag_rounding_run,
                       one_step_convexification_check)
from .core import Dyadic, Subspace
from .sequences import (ScheduleSpec, hadwiger_rounding_run, idempotency_bound,
                        idempotency_index_1d, run_schedule, sfs_gap)
from .sets import ConvexPolygon, FinitePointSet, IntervalUnion
from .symmetrize import minkowski_symmetrize


@dataclass
class Check:
    statement: str
    passed: bool
    detail: str = ""


def _d(x) -> Dyadic:
    return Dyadic.coerce(x)


def klain_two_point() -> list[Check]:
    H = Subspace.coordinate(2, 1)  # the vertical axis
    C = FinitePointSet([[-1, 0], [1, 0]], exact=True)
    K1 = minkowski_symmetrize(C, H)
    K2 = minkowski_symmetrize(K1, H)
    want1 = FinitePointSet([[-1, 0], [0, 0], [1, 0]], exact=True)
    want2 = FinitePointSet([[x, 0] for x in (-1, _d(-0.5), 0, _d(0.5), 1)], exact=True)
    seg = ConvexPolygon([[-1, 0], [1, 0]])
    _, rep = run_schedule(C, ScheduleSpec([H], max_steps=24, tol=1e-6), reference=seg)
    # exact steps match the formula; later implicit steps carry an error bar around it
    exact = [r for r in rep.records if r.dh_ref_err == 0]
    ok = len(exact) >= 8 and all(float(r.dh_ref) == 0.5 * 2.0 ** -(r.step - 1) for r in exact) and all(
        float(r.dh_ref) <= 0.5 * 2.0 ** -(r.step - 1) <= float(r.dh_ref) + r.dh_ref_err for r in rep.records)
    return [
        Check("M_H{(-1,0),(1,0)} = {(-1,0),(0,0),(1,0)}", K1 == want1, repr(K1)),
        Check("M_H^2 C = {(±1,0),(±1/2,0),(0,0)}", K2 == want2, f"{len(K2)} points"),
        Check("d_H(K_m, [-1,1]x{0}) = 2^-(m-1)/2; limit is conv C, not C", ok,
              f"{len(exact)} exact steps of {len(rep.records)}"),
    ]


def idempotency_1d() -> list[Check]:
    K = IntervalUnion([(-1, _d(-0.5)), (_d(0.5), 1)])
    w = idempotency_index_1d(K)
    two = idempotency_index_1d(IntervalUnion([(-1, -1), (1, 1)]))
    return [
        Check("M_o^l K is M_o-invariant for some l <= ceil(log2(4M/eps - 1)) + 1",
              w.certified and w.ell <= idempotency_bound(w.M, w.eps),
              f"l={w.ell}, bound={w.bound}"),
        Check("M_o^2 K = [-1,1]", w.iterates[2] == IntervalUnion([(-1, 1)]), str(w.iterates[2])),
        Check("{-1,1}: no index (no filled end run)", not two.certified, two.reason),
    ]


def sfs_gap_demo(seed: int = 0) -> list[Check]:
    rng = np.random.default_rng(seed)
    out = []
    for k in (2, 4, 8):
        sets = [shapes.random_cloud(rng, 4) for _ in range(k)]
        gap, bound = sfs_gap(sets)
        out.append(Check(f"d_H(sum of {k} sets, its hull) <= sqrt(n) max D(A_j)",
                         float(gap) <= bound, f"gap={float(gap):.4f} bound={bound:.4f}"))
    # averaging: the gap of the mean of k copies shrinks like 1/k
    C = FinitePointSet([[0, 0], [1, 0], [0, 1]], exact=True)
    gaps = []
    for k in (1, 2, 4, 8):
        S = C
        for _ in range(k - 1):
            S = S + C
        g, _ = sfs_gap([S.scale(Dyadic(1, -(k.bit_length() - 1)))])
        gaps.append(float(g))
    out.append(Check("mean of k copies approaches its hull at rate O(1/k)",
                     all(g * k <= gaps[0] + 1e-12 for g, k in zip(gaps, (1, 2, 4, 8))),
                     " ".join(f"{g:.4f}" for g in gaps)))
    return out


def boundary_sum_demo() -> list[Check]:
    blk = shapes.block((5, 5))
    r1 = boundary_sum_check(blk, blk)
    r2 = boundary_sum_check(shapes.annulus(10, 2), shapes.block((10, 10)))
    # a small block fits inside the filled ring: the gate fails, equality still holds
    r2b = boundary_sum_check(shapes.annulus(10, 2), shapes.block((3, 3)))
    r3 = boundary_sum_check(shapes.block((16, 16)), shapes.block((2, 2)))
    ring = shapes.ring_with_interior((6, 6), np.random.default_rng(3))
    r4 = one_step_convexification_check(ring, Subspace.coordinate(2, 0))
    return [
        Check("K + L = dK + dL for two 5x5 blocks", r1.holds and r1.gate.passed),
        Check("K + L = dK + dL for a square annulus and a block of its width", r2.holds and r2.gate.passed,
              "; ".join(r2.gate.reasons)),
        Check("annulus and 3x3 block: hypothesis fails (block inside the filled ring), equality holds",
              r2b.holds and not r2b.gate.passed, r2b.gate.reasons[0] if r2b.gate.reasons else ""),
        Check("a small block fits strictly inside the large one: hypothesis fails", not r3.gate.passed,
              r3.gate.reasons[0] if r3.gate.reasons else ""),
        Check("dK + dL ⊆ K + L without hypotheses", all(r.subset_holds for r in (r1, r2, r2b, r3))),
        Check("d(conv C) ⊆ C implies M_H C = M_H conv C", r4.gate and r4.holds and r4.convex,
              f"exact={r4.exact}"),
    ]


def fiber_3d() -> list[Check]:
    shell = shapes.hollow_shell(8)
    fam = [Subspace.coordinate(3, a) for a in (2, 0, 1)]
    spec = ScheduleSpec(fam, "cyclic", max_steps=5, tol=1e-9, operator="fiber")
    r = fiber_klain_run(shell, spec)
    return [
        Check("sections orthogonal to H are convex after one fiber step", r.sections_convex,
              f"defect={r.section_defect:.3g}"),
        Check("fiber iterates form a Cauchy sequence", r.cauchy,
              " ".join(f"{float(x.dh_prev):.3g}" for x in r.report.records)),
        Check("limit equals the limit from conv C (within one cell)", r.limit_dh <= r.collar,
              f"d_H={r.limit_dh:.3g} collar={r.collar:.3g}"),
    ]


def hadwiger() -> list[Check]:
    tri = FinitePointSet([[0, 0], [1, 0], [0, 1]])
    rr = hadwiger_rounding_run(tri, (1, 2, 4, 8, 16, 32, 64))
    sq = shapes.square_boundary_points(200)
    lines = [k * math.pi / 16 for k in range(16)]
    kr = klartag_rounding_run(sq, lines)
    return [
        Check("rotation means of a triangle approach a disk (ratio < 1.05)", rr.passed,
              f"ratio {rr.records[-1].ratio:.4f} at N={rr.records[-1].N}"),
        Check("Minkowski symmetrization preserves mean width", kr.width_constant,
              f"w={kr.records[0].mean_width:.12f}"),
        Check("symmetrizations of a square boundary along 16 lines round it (ratio <= 1.05)",
              kr.improved and kr.final_ratio <= 1.05, f"ratio {kr.final_ratio:.4f}"),
    ]


DEMOS = {
    "klain-two-point": klain_two_point,
    "idempotency-1d": idempotency_1d,
    "sfs-gap": sfs_gap_demo,
    "boundary-sum": boundary_sum_demo,
    "fiber-3d": fiber_3d,
    "hadwiger": hadwiger,
}


def format_table(checks: list[Check]) -> str:
    w = max(len(c.statement) for c in checks)
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.statement:<{w}}  {c.detail}".rstrip() for c in checks]
    return "\n".join(lines)
