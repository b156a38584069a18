"""Compare line sets for rounding a square by Minkowski symmetrizations.

Reflections in lines at multiples of pi/k send the square's edge normals to
multiples of 2pi/k, so every symmetral is a polygon with normals in that set
and the circumradius/inradius ratio cannot fall below sec(pi/k), the ratio of
the regular k-gon.  This prints the ratio reached by each line set next to
that floor.

    python scripts/rounding_angles.py --steps 32
"""

import argparse
import math
import sys

from symlab import shapes
from symlab.boundary import klartag_rounding_run


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--steps", type=int, default=32)
    p.add_argument("--per-edge", type=int, default=200)
    args = p.parse_args(argv)

    sq = shapes.square_boundary_points(args.per_edge)
    print(f"{'lines':>10} {'steps':>5} {'ratio':>8} {'floor':>8}  width drift")
    for k in (4, 8, 16, 32):
        lines = [(j % k) * math.pi / k for j in range(args.steps)]
        r = klartag_rounding_run(sq, lines)
        w0 = r.records[0].mean_width
        drift = max(abs(x.mean_width - w0) / w0 for x in r.records)
        floor = 1 / math.cos(math.pi / k)
        print(f"{'pi/' + str(k):>10} {args.steps:5d} {r.final_ratio:8.5f} {floor:8.5f}  {drift:.1e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
