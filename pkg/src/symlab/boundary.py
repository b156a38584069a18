"""Boundary extraction on grids and the boundary-sum theorems.

A grid set realizes a union of closed cubes.  Its topological boundary lies
inside the rim (cells with a face-neighbour outside), so rim sums bracket
boundary sums: dK + dL ⊆ rim K + rim L ⊆ K + L.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import ndimage, signal

from .core import Subspace
from .sets import ConvexPolygon, FinitePointSet, GridSet, convex_hull, hausdorff_distance
from .sets.metrics import polygon_over_points
from .sequences import ConvergenceReport, ScheduleSpec, run_schedule
from .symmetrize import fiber_symmetrize, minkowski_symmetrize


class HypothesisError(ValueError):
    """The hypothesis of a theorem cannot be checked on this representation."""


def _face_structure(n: int) -> np.ndarray:
    return ndimage.generate_binary_structure(n, 1)


def _full_structure(n: int) -> np.ndarray:
    return ndimage.generate_binary_structure(n, n)


def rim_mask(mask: np.ndarray) -> np.ndarray:
    return mask & ~ndimage.binary_erosion(mask, _face_structure(mask.ndim), border_value=0)


def grid_boundary(A: GridSet) -> GridSet:
    """Cells of A with at least one face-neighbour outside A."""
    return GridSet.from_mask(rim_mask(A.mask), A.origin, A.spacing)


def _exterior(mask: np.ndarray) -> np.ndarray:
    """Unbounded component of the complement, in the padded frame.

    Complement cells meeting only at a corner are separated by the corner
    point, which belongs to the closed set, so the complement uses face
    adjacency.
    """
    free = ~np.pad(mask, 1)
    lab, _ = ndimage.label(free, _face_structure(mask.ndim))
    return lab == lab[(0,) * mask.ndim]


def external_boundary(A: GridSet) -> GridSet:
    """Rim cells adjacent to the unbounded component of the complement."""
    ext = _exterior(A.mask)
    near = ndimage.binary_dilation(ext, _face_structure(A.ambient_dim))
    inner = tuple(slice(1, -1) for _ in range(A.ambient_dim))
    return GridSet.from_mask(A.mask & near[inner], A.origin, A.spacing)


def is_connected(A: GridSet) -> bool:
    """Connectivity of the realized union of closed cubes (corner contact counts)."""
    _, k = ndimage.label(A.mask, _full_structure(A.ambient_dim))
    return k == 1


def has_holes(A: GridSet) -> bool:
    free = ~np.pad(A.mask, 1)
    _, k = ndimage.label(free, _face_structure(A.ambient_dim))
    return k > 1


def boundary_connected(A: GridSet) -> bool:
    """Whether the topological boundary is connected.

    In the plane a continuum with connected complement has connected boundary,
    and a hole adds a separate boundary component.
    """
    return is_connected(A) and not has_holes(A)


def fill_holes(A: GridSet) -> GridSet:
    ext = _exterior(A.mask)
    inner = tuple(slice(1, -1) for _ in range(A.ambient_dim))
    return GridSet.from_mask(~ext[inner], A.origin, A.spacing)


def strictly_contained_translate(A: GridSet, B: GridSet) -> tuple | None:
    """A translate x with A + x inside the interior of B, or None.

    Both grids are refined once; a closed fine cell lies in int B iff its whole
    3^n neighbourhood is in B.  Integer shifts of the fine grid (half-cell
    shifts of the original) suffice: any real x can be moved to the nearest
    half-integer without leaving int B.
    """
    h = min(A.spacing, B.spacing)
    a, b = A.at_spacing(h).refine(1), B.at_spacing(h).refine(1)
    n = a.ambient_dim
    if any(sa > sb - 2 for sa, sb in zip(a.shape, b.shape)):
        return None
    interior = ndimage.binary_erosion(b.mask, _full_structure(n), border_value=0)
    if not interior.any():
        return None
    need = int(a.mask.sum())
    corr = signal.fftconvolve(interior.astype(float), np.flip(a.mask).astype(float), mode="valid")
    hits = np.argwhere(np.rint(corr) >= need)
    if not len(hits):
        return None
    off = hits[0]
    # a-cell i sits at b-cell i + off; translate in fine cells, then original units
    shift = [int(bo + o - ao) for bo, o, ao in zip(b.origin, off, a.origin)]
    return tuple(s * float(h) / 2 for s in shift)


def strictly_inside(A: GridSet, B: GridSet) -> bool:
    """A ⊆ int B, decided on the once-refined grid."""
    h = min(A.spacing, B.spacing)
    a, b = A.at_spacing(h).refine(1), B.at_spacing(h).refine(1)
    interior = ndimage.binary_erosion(b.mask, _full_structure(b.ambient_dim), border_value=0)
    if not interior.any():
        return False
    return a.issubset(GridSet.from_mask(interior, b.origin, b.spacing))


@dataclass
class GateReport:
    passed: bool
    reasons: list[str] = field(default_factory=list)


def boundary_sum_gate(K: GridSet, L: GridSet) -> GateReport:
    """Hypotheses of the boundary-sum theorem, in its external-boundary form.

    The intersection lemma is applied to the sets with holes filled, whose
    boundaries are the external boundaries; containment is therefore tested
    against the filled sets, so a ring sitting in another ring's hole fails.
    """
    reasons = []
    for name, A in (("K", K), ("L", L)):
        if not is_connected(A):
            reasons.append(f"external boundary of {name} is not connected")
    Kf, negLf = fill_holes(K), fill_holes(-L)
    x = strictly_contained_translate(Kf, negLf)
    if x is not None:
        reasons.append(f"K + {x} is strictly contained in -L (holes filled)")
    x = strictly_contained_translate(negLf, Kf)
    if x is not None:
        reasons.append(f"-L + {x} is strictly contained in K (holes filled)")
    return GateReport(not reasons, reasons)


@dataclass
class BoundarySumResult:
    holds: bool
    subset_holds: bool
    gate: GateReport
    witness_cell: tuple | None = None


def boundary_sum_check(K: GridSet, L: GridSet) -> BoundarySumResult:
    """Compare K + L with dK + dL cell-exactly, and check the hypotheses."""
    if K.ambient_dim < 2:
        raise ValueError("the boundary-sum theorem needs n >= 2")
    if K.spacing != L.spacing:
        h = min(K.spacing, L.spacing)
        K, L = K.at_spacing(h), L.at_spacing(h)
    full = K + L
    rims = grid_boundary(K) + grid_boundary(L)
    sub = rims.issubset(full)
    extra = full.difference(rims)
    cell = extra.cells[0] if extra is not None else None
    return BoundarySumResult(holds=extra is None and sub, subset_holds=sub,
                             gate=boundary_sum_gate(K, L), witness_cell=cell)


@dataclass
class BoundaryWitness:
    cell: tuple | None
    failed: str = ""


def common_boundary_witness(K: GridSet, L: GridSet) -> BoundaryWitness:
    """A cell in dK ∩ dL under the hypotheses of the intersection lemma."""
    for name, A in (("K", K), ("L", L)):
        if not boundary_connected(A):
            return BoundaryWitness(None, f"boundary of {name} is not connected")
    h = min(K.spacing, L.spacing)
    K, L = K.at_spacing(h), L.at_spacing(h)
    grown = GridSet.from_mask(ndimage.binary_dilation(np.pad(K.mask, 1), _full_structure(K.ambient_dim)),
                              tuple(o - 1 for o in K.origin), h)
    if grown.intersection(L) is None:
        return BoundaryWitness(None, "K and L are disjoint")
    for a, b, name in ((L, K, "L in int K"), (K, L, "K in int L")):
        if strictly_inside(a, b):
            return BoundaryWitness(None, f"strict containment: {name}")
    rk, rl = grid_boundary(K), grid_boundary(L)
    both = rk.intersection(rl)
    if both is not None:
        return BoundaryWitness(both.cells[0])
    # boundaries meeting only along a shared face or corner
    near = GridSet.from_mask(ndimage.binary_dilation(np.pad(rl.mask, 1), _full_structure(K.ambient_dim)),
                             tuple(o - 1 for o in rl.origin), h).intersection(rk)
    if near is not None:
        return BoundaryWitness(near.cells[0])
    return BoundaryWitness(None, "no common boundary cell found")


def hull_boundary_gate(C: GridSet) -> bool:
    """Exact test of d(conv C) ⊆ C on a grid.

    A union of cubes covers a facet of its hull only when the facet lies in a
    grid plane, so the hull must be the bounding box and C must contain the
    box's outer layer of cells.
    """
    box = C.filled_box()
    return grid_boundary(box).issubset(C)


def points_boundary_gap(C: FinitePointSet) -> float:
    """sup over x in d(conv C) of dist(x, C): how densely C samples its hull boundary."""
    P = convex_hull(C)
    pts = C.points
    v = P.vertices
    if len(v) == 1:
        return 0.0
    worst = 0.0
    edges = [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))] if len(v) > 2 else [(v[0], v[1])]
    for a, b in edges:
        val, gap = polygon_over_points(ConvexPolygon([a, b]), pts)
        worst = max(worst, val + gap)
    return worst


@dataclass
class ConvexificationResult:
    gate: bool
    holds: bool
    exact: bool
    dh: float
    collar: float
    convex: bool
    reason: str = ""


def one_step_convexification_check(C, H: Subspace) -> ConvexificationResult:
    """Compare M_H C with M_H conv C under the gate d(conv C) ⊆ C."""
    if isinstance(C, ConvexPolygon):
        return ConvexificationResult(True, True, True, 0.0, 0.0, True)
    if not isinstance(C, GridSet):
        raise HypothesisError("d(conv C) ⊆ C is only decidable on grids")
    collar = float(C.spacing) * math.sqrt(C.ambient_dim)
    if not hull_boundary_gate(C):
        return ConvexificationResult(False, False, False, math.nan, collar, False,
                                     "hull boundary not contained in C")
    a = minkowski_symmetrize(C, H).normalize()
    b = minkowski_symmetrize(C.filled_box(), H).normalize()
    exact = a == b
    dh = 0.0 if exact else float(hausdorff_distance(a, b))
    out_collar = float(a.spacing) * math.sqrt(a.ambient_dim)
    return ConvexificationResult(True, exact or dh <= out_collar, exact, dh, out_collar, a.is_box())


def section_defect(S: GridSet) -> float:
    """Hausdorff distance from a grid set to the cells of its hull, via centers."""
    if S.is_box():
        return 0.0
    if S.ambient_dim == 1:
        return float(hausdorff_distance(S, S.filled_box()))
    hull = convex_hull(S)
    from .sets import to_grid
    return float(hausdorff_distance(S, to_grid(hull, S.spacing)))


def sections_convex(A: GridSet, H: Subspace) -> tuple[bool, float]:
    """Every section A ∩ (x + H^perp) convex up to a one-cell collar."""
    collar = float(A.spacing) * math.sqrt(A.ambient_dim)
    worst = 0.0
    axes = list(H.axes)
    for idx in np.ndindex(*[A.shape[a] for a in axes]):
        S = A.section(axes, [A.origin[a] + i for a, i in zip(axes, idx)])
        if S is not None:
            worst = max(worst, section_defect(S))
    return worst <= collar, worst


@dataclass
class FiberKlainResult:
    report: ConvergenceReport
    hull_report: ConvergenceReport
    sections_convex: bool
    section_defect: float
    cauchy: bool
    limit_dh: float
    collar: float
    passed: bool
    final: GridSet | None = None
    reasons: list[str] = field(default_factory=list)


def fiber_klain_run(C: GridSet, spec: ScheduleSpec) -> FiberKlainResult:
    """Fiber schedule on a 3-D grid whose hull boundary it contains."""
    if not isinstance(C, GridSet) or C.ambient_dim != 3:
        raise ValueError("fiber_klain_run takes a 3-D GridSet")
    if spec.operator != "fiber":
        raise ValueError("schedule operator must be 'fiber'")
    for Q in spec.family:
        if not Q.axis_aligned or Q.dim != 1:
            raise ValueError("fiber schedules here use axis-aligned lines (dim H = 1)")
    if not hull_boundary_gate(C):
        raise HypothesisError("hull boundary not contained in C; run refused")
    final, rep = run_schedule(C, spec)
    hfinal, hrep = run_schedule(C.filled_box(), spec)
    first = spec.family[next(spec.indices())]
    K1 = fiber_symmetrize(C, first)
    ok_sec, defect = sections_convex(K1, first)
    # one cell at the resolution of the first iterate; normalized limits may
    # be stored on much coarser cells
    collar = float(K1.spacing) * math.sqrt(3)
    d = [float(r.dh_prev) for r in rep.records]
    # Cauchy within the run: late step sizes shrink to the collar
    cauchy = len(d) > 0 and d[-1] <= collar and all(b <= a + collar for a, b in zip(d, d[1:]))
    limit_dh = float(hausdorff_distance(final, hfinal))
    reasons = []
    if not ok_sec:
        reasons.append(f"section defect {defect:.3g} exceeds collar")
    if not cauchy:
        reasons.append("step sizes are not settling")
    if limit_dh > collar:
        reasons.append(f"limit differs from hull run by {limit_dh:.3g}")
    return FiberKlainResult(rep, hrep, ok_sec, defect, cauchy, limit_dh, collar,
                            not reasons, final, reasons)


@dataclass
class KlartagRecord:
    step: int
    line_deg: float
    mean_width: float
    circumradius: float
    inradius: float
    ratio: float


@dataclass
class KlartagReport:
    records: list[KlartagRecord]
    width_constant: bool
    improved: bool
    final_ratio: float
    final: ConvexPolygon
    gate_detail: str = ""


def klartag_rounding_run(C, lines: Sequence, rho: float | None = None,
                         width_rtol: float = 1e-9) -> KlartagReport:
    """Minkowski symmetrizations along planar lines, tracking the ball sandwich.

    The gate d(conv C) ⊆ C makes every symmetral convex, so the run proceeds
    on conv C.  Point sets pass when their hull boundary is sampled within
    ``rho`` (default 1e-2 of the diameter).
    """
    if C.ambient_dim != 2:
        raise ValueError("rounding runs are planar")
    detail = ""
    if isinstance(C, GridSet):
        if not hull_boundary_gate(C):
            raise HypothesisError("hull boundary not contained in C")
        P = convex_hull(C)
    elif isinstance(C, FinitePointSet):
        P = convex_hull(C)
        rho = 1e-2 * P.diameter() if rho is None else rho
        gap = points_boundary_gap(C)
        if gap > rho:
            raise HypothesisError(f"hull boundary sampled only within {gap:.3g} > {rho:.3g}")
        detail = f"hull boundary sampled within {gap:.3g}"
    elif isinstance(C, ConvexPolygon):
        P = C
    else:
        raise HypothesisError(f"unsupported set type {type(C).__name__}")
    subs = [L if isinstance(L, Subspace) else Subspace.line(float(L)) for L in lines]
    w0 = P.mean_width()

    def record(step, Q, K):
        R, r = K.radii()
        ang = math.degrees(math.atan2(Q.basis[0][1], Q.basis[0][0])) % 180 if Q is not None else math.nan
        return KlartagRecord(step, ang, K.mean_width(), R, r, R / r if r > 0 else math.inf)

    recs = [record(0, None, P)]
    K = P
    for m, Q in enumerate(subs, start=1):
        K = minkowski_symmetrize(K, Q)
        recs.append(record(m, Q, K))
    width_ok = all(abs(r.mean_width - w0) <= width_rtol * w0 for r in recs)
    return KlartagReport(recs, width_ok, recs[-1].ratio < recs[0].ratio, recs[-1].ratio, K, detail)
