"""Command line entry point: ``symlab run | demo | render``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .demos import DEMOS, format_table
from .render import render_set
from .sequences import BoundViolation, ConvergenceReport, klain_limit_symmetry_check, run_schedule
from .sets import ConvexPolygon, GridSet, RepresentationError
from .sets.textio import SetFormatError, load_set

EXIT_OK, EXIT_CONFIG, EXIT_ASSERT = 0, 1, 2


def _checks(report: ConvergenceReport, cfg, final) -> list[tuple[str, bool, str]]:
    """Invariants that every run of the configured kind must satisfy."""
    out = []
    spec = cfg.spec
    recs = report.records
    A = cfg.input
    if spec.operator == "minkowski" and isinstance(A, GridSet):
        vols = [A.volume()] + [r.volume for r in recs]
        ok = all(b >= a for a, b in zip(vols, vols[1:]))
        out.append(("volume(M_H K) >= volume(K)", ok, f"{float(vols[0])} -> {float(vols[-1])}"))
    if spec.operator == "steiner":
        ok = all(r.volume == A.volume() for r in recs)
        out.append(("Steiner symmetrization preserves volume", ok, str(A.volume())))
    widths = [r.mean_width for r in recs if r.mean_width is not None]
    if spec.operator == "minkowski" and widths:
        w0 = A.mean_width() if isinstance(A, ConvexPolygon) else widths[0]
        ok = all(abs(w - w0) <= 1e-9 * w0 for w in widths)
        out.append(("Minkowski symmetrization preserves mean width", ok, f"w={w0:.12g}"))
    if (spec.operator == "minkowski" and report.stop_reason == "tolerance_met"
            and A.ambient_dim == 2 and not isinstance(A, GridSet)):
        for c in klain_limit_symmetry_check(report, spec, final):
            out.append((f"limit is symmetric under reflection in {c.subspace}", c.holds,
                        f"d_H={c.distance:.3g}+{c.err:.2g}"))
    return out


def cmd_run(path: str, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        cfg = load_config(path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    svg = cfg.outputs.svg

    def frame(m, K):
        if svg is not None and K.ambient_dim <= 2:
            p = Path(svg.format(step=m))
            p.parent.mkdir(parents=True, exist_ok=True)
            render_set(K, p, title=f"step {m}")

    try:
        final, report = run_schedule(cfg.input, cfg.spec, on_step=frame)
    except BoundViolation as exc:
        print(f"FAIL  {exc} (step {exc.step})", file=out)
        return EXIT_ASSERT
    except (RepresentationError, ValueError) as exc:
        print(f"config error: operator/representation mismatch: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if svg is not None:
        frame(0, cfg.input)
    if cfg.outputs.csv:
        report.to_csv(cfg.outputs.csv)
    print(f"steps={len(report.records)} stop={report.stop_reason}", file=out)
    for note in report.notes:
        print(f"note: {note}", file=out)
    failed = False
    for name, ok, detail in _checks(report, cfg, final):
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}", file=out)
        failed |= not ok
    return EXIT_ASSERT if failed else EXIT_OK


def cmd_demo(name: str, out=None) -> int:
    out = sys.stdout if out is None else out
    if name not in DEMOS:
        print(f"unknown demo '{name}'; choose from {', '.join(DEMOS)}", file=sys.stderr)
        return EXIT_CONFIG
    checks = DEMOS[name]()
    print(format_table(checks), file=out)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_ASSERT


def cmd_render(src: str, dst: str, slice_index: int | None = None) -> int:
    try:
        A = load_set(src)
    except (OSError, SetFormatError) as exc:
        print(f"cannot read set: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        render_set(A, dst, title=Path(src).name, slice_index=slice_index)
    except ValueError as exc:
        print(f"cannot render: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="symlab", description="Symmetrization experiments")
    sub = p.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run an experiment config")
    r.add_argument("config")
    d = sub.add_parser("demo", help="run a built-in reproduction")
    d.add_argument("name", help=", ".join(DEMOS))
    v = sub.add_parser("render", help="render a set file to SVG")
    v.add_argument("set")
    v.add_argument("out")
    v.add_argument("--slice", type=int, default=None, help="z index for 3-D grids")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.cmd == "run":
        return cmd_run(args.config)
    if args.cmd == "demo":
        return cmd_demo(args.name)
    return cmd_render(args.set, args.out, args.slice)


if __name__ == "__main__":
    sys.exit(main())
