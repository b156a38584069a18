"""Steps to convergence of Minkowski schedules against the angle between two lines.

For each angle, runs cyclic two-line schedules on random clouds and records the
number of steps until the quiet window is met, with the fitted per-step
contraction of d_H(K_m, K_{m-1}).

    python scripts/convergence_sweep.py --clouds 10 --out sweep.csv
"""

import argparse
import csv
import math
import sys

import numpy as np

from symlab.core import Subspace
from symlab.sequences import ScheduleSpec, run_schedule
from symlab.sets import FinitePointSet


def contraction(dh: list[float]) -> float:
    """Geometric rate from a log-linear fit over the middle of the run."""
    y = np.array([d for d in dh if d > 1e-13])
    if len(y) < 6:
        return math.nan
    y = y[len(y) // 3:]
    slope = np.polyfit(np.arange(len(y)), np.log(y), 1)[0]
    return float(math.exp(slope))


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--clouds", type=int, default=10)
    p.add_argument("--points", type=int, default=8)
    p.add_argument("--max-steps", type=int, default=400)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    args = p.parse_args(argv)

    rows = []
    print(f"{'angle':>7} {'median steps':>12} {'rate':>7} {'cos':>7}")
    for deg in (90, 60, 45, 30, 22.5, 15):
        steps, rates = [], []
        for c in range(args.clouds):
            rng = np.random.default_rng([args.seed, c])
            A = FinitePointSet(rng.normal(size=(args.points, 2)))
            spec = ScheduleSpec([Subspace.line(0.0), Subspace.line(math.radians(deg))],
                                "cyclic", max_steps=args.max_steps, tol=args.tol)
            _, rep = run_schedule(A, spec)
            dh = [float(r.dh_prev) for r in rep.records]
            steps.append(len(rep.records))
            rates.append(contraction(dh))
            rows.append({"angle_deg": deg, "cloud": c, "steps": len(rep.records),
                         "stop": rep.stop_reason, "rate": rates[-1]})
        finite = [r for r in rates if not math.isnan(r)]
        rate = float(np.median(finite)) if finite else math.nan  # nan: settled in a few steps
        print(f"{deg:7.1f} {np.median(steps):12.0f} {rate:7.3f} "
              f"{math.cos(math.radians(deg)):7.3f}")

    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
