"""Iteration engine: symmetrization schedules, telemetry, idempotency indices."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np
from scipy import stats

from .core import Dyadic, Subspace
from .orbit import OrbitMean
from .sets import (ConvexPolygon, FinitePointSet, GridSet, IntervalUnion, SizeLimitError,
                   convex_hull, minkowski_sum, reflect_set)
from .sets.metrics import hausdorff_with_error
from .symmetrize import (blaschke_rotation_mean, fiber_symmetrize, isometry_mean,
                         minkowski_symmetrize, steiner_symmetrize_grid)

OPERATORS = ("minkowski", "fiber", "steiner", "isometry_mean")
CSV_HEADER = ("step", "subspace", "dh_prev", "dh_ref", "diameter", "volume", "mean_width")
GRID_CAP = {1: 8, 2: 8, 3: 5}
ORBIT_SWITCH_PAIRS = 2 ** 20


class BoundViolation(AssertionError):
    """A proven inequality failed; ``step`` is the offending iteration."""

    def __init__(self, msg: str, step: int):
        super().__init__(f"step {step}: {msg}")
        self.step = step


@dataclass
class ScheduleSpec:
    """A symmetrization experiment: family, schedule, operator and stopping rule.

    ``schedule`` is ``"cyclic"``, ``"random"`` (with ``seed``) or an explicit
    list of family indices; an explicit list also bounds the step count.
    """

    family: list[Subspace]
    schedule: str | Sequence[int] = "cyclic"
    max_steps: int = 40
    tol: float = 1e-6
    operator: str = "minkowski"
    seed: int | None = None
    window: int = 3
    grid_cap: int | None = None

    def __post_init__(self):
        if not self.family:
            raise ValueError("family must be nonempty")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.operator not in OPERATORS:
            raise ValueError(f"operator must be one of {OPERATORS}")
        dims = {H.ambient_dim for H in self.family}
        if len(dims) != 1:
            raise ValueError("family members live in different dimensions")
        if isinstance(self.schedule, str):
            if self.schedule not in ("cyclic", "random"):
                raise ValueError("schedule must be 'cyclic', 'random' or a list of indices")
            if self.schedule == "random" and self.seed is None:
                raise ValueError("random schedules need an explicit seed")
        else:
            self.schedule = [int(i) for i in self.schedule]
            bad = [i for i in self.schedule if not 0 <= i < len(self.family)]
            if bad:
                raise ValueError(f"schedule indices out of range: {bad}")
            if not self.schedule:
                raise ValueError("explicit schedule is empty")

    @property
    def ambient_dim(self) -> int:
        return self.family[0].ambient_dim

    @property
    def steps(self) -> int:
        if isinstance(self.schedule, list):
            return min(self.max_steps, len(self.schedule))
        return self.max_steps

    def indices(self) -> Iterator[int]:
        if self.schedule == "cyclic":
            for m in range(self.steps):
                yield m % len(self.family)
        elif self.schedule == "random":
            rng = np.random.default_rng(np.uint64(self.seed))
            yield from (int(i) for i in rng.integers(0, len(self.family), self.steps))
        else:
            yield from self.schedule[:self.steps]


@dataclass
class StepRecord:
    step: int
    subspace: str
    dh_prev: object = None
    dh_ref: object = None
    diameter: object = None
    volume: object = None
    mean_width: float | None = None
    # metric error bars; nonzero when a distance is certified rather than measured
    dh_prev_err: float = 0.0
    dh_ref_err: float = 0.0
    terms: int = 1
    index: int = -1


@dataclass
class ConvergenceReport:
    records: list[StepRecord] = field(default_factory=list)
    stop_reason: str = "max_steps"
    notes: list[str] = field(default_factory=list)
    snap_budget: float = 0.0

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.records]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.records:
            w.writerow([_fmt(getattr(r, k)) for k in CSV_HEADER])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass
class IdempotencyWitness:
    M: Dyadic
    m: Dyadic | None
    eps: Dyadic
    ell: int | None
    certified: bool
    bound: int | None = None
    fill_k: int | None = None
    reason: str = ""
    iterates: list = field(default_factory=list, repr=False)

    @property
    def hypothesis(self) -> bool:
        return self.eps > 0


# -- distances with implicit representations --------------------------------

def distance(A, B) -> tuple:
    """Hausdorff distance (value, err); an OrbitMean enters through its hull."""
    err = 0.0
    if isinstance(A, OrbitMean):
        err += A.gap_bound()
        A = A.hull()
    if isinstance(B, OrbitMean):
        err += B.gap_bound()
        B = B.hull()
    val, e = hausdorff_with_error(A, B)
    return val, err + e


def _diam(A):
    if isinstance(A, (OrbitMean, FinitePointSet, ConvexPolygon, GridSet, IntervalUnion)):
        return A.diameter()
    raise TypeError(type(A).__name__)


def _volume(A):
    if isinstance(A, OrbitMean):
        return None
    if isinstance(A, FinitePointSet):
        return Dyadic(0)
    if isinstance(A, ConvexPolygon):
        return A.area()
    return A.volume()


def apply_operator(A, op: str, H: Subspace | None, family: Sequence[Subspace] = ()):
    if op == "minkowski":
        return minkowski_symmetrize(A, H)
    if op == "fiber":
        return fiber_symmetrize(A, H)
    if op == "steiner":
        return steiner_symmetrize_grid(A, H)
    if op == "isometry_mean":
        return isometry_mean(A, list(family))
    raise ValueError(f"unknown operator {op}")


def _fixed_tol(A) -> float:
    if isinstance(A, (IntervalUnion, GridSet)) or (isinstance(A, FinitePointSet) and A.exact):
        return 0.0
    return 1e-12 * max(float(_diam(A)), 1.0)


def run_schedule(A, spec: ScheduleSpec, reference=None, explicit_budget: int | None = None,
                 on_step=None):
    """Apply ``spec.operator`` along the schedule, recording telemetry.

    Planar point sets are iterated explicitly while the pairwise-sum budget
    allows and as an ``OrbitMean`` afterwards; distances are then certified
    upper bounds (``dh_*_err`` > 0) rather than measurements.  ``on_step(m, K_m)``
    is called after each recorded step.
    """
    if A.ambient_dim != spec.ambient_dim:
        raise ValueError("set and family dimensions differ")
    op = spec.operator
    if op in ("fiber", "steiner") and not isinstance(A, GridSet):
        raise ValueError(f"operator '{op}' needs a GridSet input")
    if op == "minkowski" and isinstance(A, IntervalUnion) and any(H.dim for H in spec.family):
        raise ValueError("interval unions only admit the origin as subspace")
    report = ConvergenceReport()
    explicit, orbit = A, None
    if isinstance(A, FinitePointSet) and A.ambient_dim == 2 and op in ("minkowski", "isometry_mean"):
        orbit = OrbitMean(A)
    # past this many pairs the implicit representation is cheaper and tighter
    budget = explicit_budget if explicit_budget is not None or orbit is None else ORBIT_SWITCH_PAIRS
    cap = spec.grid_cap or GRID_CAP.get(A.ambient_dim, 5)
    snap_steps = 0
    prev = A
    terms = 1
    below = 0
    order = list(spec.indices())
    # subspaces still to be used from each step on; a quiet window must have
    # touched all of them, since repeating one line is idempotent on its fixed sets
    ahead = [set() for _ in order]
    seen: set[int] = set()
    for i in range(len(order) - 1, -1, -1):
        seen = seen | {order[i]}
        ahead[i] = seen
    quiet: set[int] = set()
    for m, j in enumerate(order, start=1):
        H = spec.family[j]
        if isinstance(A, GridSet) and m > cap:
            report.stop_reason = "cap_exceeded"
            report.notes.append(f"grid refinement cap of {cap} steps reached")
            break
        if explicit is not None:
            try:
                if budget is not None and isinstance(explicit, FinitePointSet) \
                        and len(explicit) ** 2 > budget:
                    raise SizeLimitError("explicit budget")
                explicit = apply_operator(explicit, op, H, spec.family)
                if isinstance(explicit, GridSet):
                    explicit = explicit.normalize()
                if isinstance(explicit, FinitePointSet) and not explicit.exact:
                    snap_steps += 1
            except SizeLimitError:
                if orbit is None:
                    report.stop_reason = "cap_exceeded"
                    report.notes.append(f"size limit reached at step {m}")
                    break
                explicit = None
                prev = orbit  # the previous iterate, in the representation we continue with
        if orbit is not None:
            orbit = apply_operator(orbit, op, H, spec.family)
        cur = explicit if explicit is not None else orbit
        terms *= 2 if op == "minkowski" else (len(spec.family) if op == "isometry_mean" else 1)
        rec = StepRecord(step=m, subspace="mean" if op == "isometry_mean" else str(H),
                         terms=terms, index=j)
        rec.dh_prev, rec.dh_prev_err = distance(cur, prev)
        if reference is not None:
            rec.dh_ref, rec.dh_ref_err = distance(cur, reference)
        rec.diameter = _diam(cur)
        rec.volume = _volume(cur)
        if isinstance(cur, (ConvexPolygon, OrbitMean)):
            rec.mean_width = (cur if isinstance(cur, ConvexPolygon) else cur.hull()).mean_width()
        report.records.append(rec)
        if on_step is not None:
            on_step(m, cur)
        prev = cur
        if isinstance(cur, FinitePointSet) and not cur.exact:
            report.snap_budget = snap_steps * cur.snap * math.sqrt(cur.ambient_dim) / 2
        small = float(rec.dh_prev) + rec.dh_prev_err < spec.tol
        below = below + 1 if small else 0
        quiet = quiet | {j} if small else set()
        covered = op == "isometry_mean" or quiet >= ahead[m - 1]
        if below >= spec.window and covered:
            report.stop_reason = "tolerance_met"
            break
        if float(rec.dh_prev) <= _fixed_tol(cur) and rec.dh_prev_err == 0 \
                and _fixed_under_family(cur, spec):
            report.stop_reason = "tolerance_met"
            report.notes.append(f"fixed point of every family operator at step {m}")
            break
    final = explicit if explicit is not None else orbit
    return final, report


def _fixed_under_family(K, spec: ScheduleSpec) -> bool:
    t = _fixed_tol(K)
    try:
        for H in spec.family:
            img = apply_operator(K, spec.operator, H, spec.family)
            if isinstance(img, GridSet):
                if img != K:
                    return False
            elif float(distance(img, K)[0]) > t:
                return False
            if spec.operator == "isometry_mean":
                break
    except SizeLimitError:
        return False
    return True


def iterated_central_limit_check(A, H: Subspace, m_max: int = 40, tol: float = 1e-6,
                                 explicit_budget: int | None = None) -> ConvergenceReport:
    """Check d_H(K_m, conv M_H A) <= sqrt(n) D(K_1) / 2^(m-1) + snapping budget.

    Raises ``BoundViolation`` at the first step that breaks the bound; the
    returned report's ``stop_reason`` says whether ``tol`` was reached.
    """
    n = A.ambient_dim
    limit = _limit_hull(A, H)
    K1 = minkowski_symmetrize(A, H)
    D1 = float(_diam(K1))
    explicit, orbit = A, (OrbitMean(A) if isinstance(A, FinitePointSet) and n == 2 else None)
    if explicit_budget is None and orbit is not None:
        explicit_budget = ORBIT_SWITCH_PAIRS
    report = ConvergenceReport(stop_reason="max_steps")
    snap_steps = 0
    for m in range(1, m_max + 1):
        if explicit is not None:
            try:
                if explicit_budget is not None and isinstance(explicit, FinitePointSet) \
                        and len(explicit) ** 2 > explicit_budget:
                    raise SizeLimitError("explicit budget")
                explicit = minkowski_symmetrize(explicit, H)
                if isinstance(explicit, GridSet):
                    explicit = explicit.normalize()
                if isinstance(explicit, FinitePointSet) and not explicit.exact:
                    snap_steps += 1
            except SizeLimitError:
                if orbit is None:
                    report.stop_reason = "cap_exceeded"
                    break
                explicit = None
        if orbit is not None:
            orbit = orbit.symmetrize(H)
        cur = explicit if explicit is not None else orbit
        val, err = distance(cur, limit)
        snap = cur.snap if isinstance(cur, FinitePointSet) and not cur.exact else 0.0
        budget = snap_steps * snap * math.sqrt(n) / 2
        bound = math.sqrt(n) * D1 / 2 ** (m - 1) + budget
        rec = StepRecord(step=m, subspace=str(H), dh_ref=val, dh_ref_err=err,
                         diameter=_diam(cur), volume=_volume(cur), terms=2 ** m)
        report.records.append(rec)
        report.snap_budget = budget
        if float(val) > bound + 1e-12 * max(D1, 1.0):
            raise BoundViolation(f"d_H = {float(val):.3e} exceeds {bound:.3e}", m)
        if float(val) + err < tol:
            report.stop_reason = "tolerance_met"
            break
    return report


def _limit_hull(A, H: Subspace):
    """conv(M_H A), computed from conv A so it does not share the iteration."""
    if isinstance(A, IntervalUnion):
        return minkowski_symmetrize(A.hull(), H)
    if isinstance(A, FinitePointSet) and A.ambient_dim == 1:
        return minkowski_symmetrize(convex_hull(A), H)
    if A.ambient_dim == 2 and isinstance(A, (FinitePointSet, ConvexPolygon, GridSet)):
        return minkowski_symmetrize(convex_hull(A), H)
    raise ValueError("limit hull available for 1-D and planar inputs")


def sfs_gap(sets: Sequence) -> tuple:
    """(gap, bound) for d_H(sum A_j, conv sum A_j) <= sqrt(n) max_j D(A_j)."""
    if not sets:
        raise ValueError("need at least one set")
    S = sets[0]
    for B in sets[1:]:
        S = minkowski_sum(S, B)
    n = S.ambient_dim
    C = convex_hull(S)
    gap, err = distance(S, C)
    bound = math.sqrt(n) * max(float(_diam(A)) for A in sets)
    if float(gap) > bound + err:
        raise BoundViolation(f"gap {float(gap)} exceeds bound {bound}", len(sets))
    return gap, bound


# -- exact 1-D idempotency ------------------------------------------------

def _log2_ceil(q: Fraction) -> int:
    """Smallest k >= 0 with 2**k >= q."""
    k = 0
    while Fraction(2) ** k < q:
        k += 1
    return k


def idempotency_bound(M: Dyadic, eps: Dyadic) -> int:
    """ceil(log2(4M/eps - 1)) + 1."""
    q = 4 * M.as_fraction() / eps.as_fraction() - 1
    return _log2_ceil(q) + 1


def fill_index(M: Dyadic, m: Dyadic) -> int:
    """First k with m/M <= (2^k - 1)/(2^k + 1)."""
    r = m.as_fraction() / M.as_fraction()
    k = 0
    while r > Fraction(2 ** k - 1, 2 ** k + 1):
        k += 1
    return k


def idempotency_index_1d(K: IntervalUnion, cap: int = 30) -> IdempotencyWitness:
    """Smallest l with M_o^l K a fixed point of M_o, found by exact iteration."""
    return _index_1d(K, cap, central=True)


def mean_index_1d(K: IntervalUnion, cap: int = 30) -> IdempotencyWitness:
    """Smallest l with (1/2^l) sum of 2^l copies of K equal to conv K."""
    return _index_1d(K, cap, central=False)


def _index_1d(K: IntervalUnion, cap: int, central: bool) -> IdempotencyWitness:
    M = (K.hi - K.lo).half()
    left, right = K.end_runs()
    # the central lemma needs one filled end, the means lemma both
    eps = max(left, right) if central else min(left, right)
    m = M - eps.half() if eps > 0 else None
    w = IdempotencyWitness(M=M, m=m, eps=eps, ell=None, certified=False)
    if eps > 0 and M > 0:
        w.bound = idempotency_bound(M, eps)
        w.fill_k = fill_index(M, m)
    cur = K
    target = K.hull()
    w.iterates.append(cur)
    for j in range(cap + 1):
        try:
            nxt = (cur + (-cur)).half() if central else (cur + cur).half()
        except SizeLimitError:
            w.reason = "size limit"
            break
        if (central and nxt == cur) or (not central and cur == target):
            w.ell, w.certified = j, True
            break
        if j == cap:
            w.reason = f"cap {cap} reached"
            break
        runs = nxt.end_runs()
        if central and j >= 1 and runs[0] == 0:
            # an isolated extreme of a symmetric set stays isolated: 2M is
            # reached only as M + M
            w.reason = "isolated extreme point persists"
            break
        if not central and min(runs) == 0:
            w.reason = "isolated extreme point persists"
            break
        cur = nxt
        w.iterates.append(cur)
    if w.certified and w.bound is not None and w.ell > w.bound:
        raise BoundViolation(f"index {w.ell} exceeds bound {w.bound}", w.ell)
    return w


def spearman_sign(x: Sequence[float], y: Sequence[float]) -> float:
    rho = stats.spearmanr(x, y).statistic
    return float(rho)


# -- symmetry of limits, rounding runs ----------------------------------------

@dataclass
class SymmetryCheck:
    subspace: str
    distance: float
    err: float
    holds: bool


def klain_limit_symmetry_check(report: ConvergenceReport, spec: ScheduleSpec, final,
                               tol: float | None = None) -> list[SymmetryCheck]:
    """d_H(final, R_Q final) <= 2 tol for each Q used in the last quarter of the run.

    Occurrence in the final quarter stands in for occurring infinitely often.
    """
    tol = spec.tol if tol is None else tol
    idx = [r.index for r in report.records]
    tail = idx[len(idx) - max(1, len(idx) // 4):]
    out = []
    for j in sorted(set(tail)):
        Q = spec.family[j]
        R = final.reflect(Q) if isinstance(final, OrbitMean) else reflect_set(final, Q)
        d, e = distance(final, R)
        out.append(SymmetryCheck(str(Q), float(d), e, float(d) + e <= 2 * tol))
    return out


@dataclass
class RoundingRecord:
    N: int
    circumradius: float
    inradius: float
    ratio: float
    mean_width: float


@dataclass
class RoundingReport:
    records: list[RoundingRecord]
    passed: bool
    messages: list[str]


def hadwiger_rounding_run(A, N_schedule: Sequence[int] = (1, 2, 4, 8, 16, 32, 64),
                          tol_ball: float = 0.05) -> RoundingReport:
    """Circumradius/inradius of the hull of rotation means, about its centroid."""
    recs = []
    for N in N_schedule:
        X = blaschke_rotation_mean(A, N)
        P = X.hull() if isinstance(X, OrbitMean) else convex_hull(X)
        if P.degenerate:
            R = float(np.linalg.norm(P.vertices - P.vertices.mean(axis=0), axis=1).max())
            recs.append(RoundingRecord(N, R, 0.0, math.inf, P.mean_width()))
            continue
        R, r = P.radii(P.centroid())
        recs.append(RoundingRecord(N, R, r, R / r, P.mean_width()))
    if math.isinf(recs[-1].ratio):
        raise ValueError("final hull is degenerate")
    msgs = []
    ok = True
    # ties are allowed: a rotation-invariant input keeps its ratio
    if len(recs) > 1 and not recs[-1].ratio <= recs[0].ratio + 1e-9:
        ok = False
        msgs.append("final ratio is not below the first")
    if not recs[-1].ratio < 1 + tol_ball:
        ok = False
        msgs.append(f"final ratio {recs[-1].ratio:.4f} >= {1 + tol_ball}")
    return RoundingReport(recs, ok, msgs)
