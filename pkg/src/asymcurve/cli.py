"""Command-line entry point: build, assemble, analyze, approx, verify, export-svg.

Exit codes: 0 success (or every check passed), 1 a gating check failed,
2 an error (bad input, resource limit, a check that crashed).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .construction import ResourceError, assemble_gamma, build_gamma_n, default_budget
from .functionals import PairScanConfig, classify, uniform_approx_n
from .geometry import CurveError, SubarcRef
from .verify import RunConfig, exit_code, run_suite, write_report

log = logging.getLogger("asymcurve")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _out_paths(out: str) -> tuple[Path, Path, Path]:
    p = Path(out)
    stem = p.with_suffix("") if p.suffix == ".csv" else p
    return stem.with_suffix(".csv"), stem.with_suffix(".json"), stem.with_suffix(".svg")


def cmd_build(args) -> int:
    budget = args.budget or default_budget()
    st = build_gamma_n(args.n, args.depth, args.samples_per_bump, budget)
    csv_path, json_path, svg_path = _out_paths(args.out)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    io.write_csv(st.top, csv_path)
    io.write_json(st.manifest(), json_path)
    if args.svg:
        io.write_svg(st.top, svg_path, args.stroke)
    print(f"wrote {csv_path} ({len(st.top)} samples, length {st.top.total_length:.12g})")
    return 0


def cmd_assemble(args) -> int:
    budget = args.budget or default_budget()
    curve = assemble_gamma(args.n_max, args.depth_cap, args.samples_per_bump, budget)
    csv_path, _, svg_path = _out_paths(args.out)
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    io.write_csv(curve, csv_path)
    if args.svg:
        io.write_svg(curve, svg_path, args.stroke)
    print(f"wrote {csv_path} ({len(curve)} samples, length {curve.total_length:.12g})")
    return 0


def cmd_analyze(args) -> int:
    curve = io.read_csv(args.inp)
    stride = args.grid or max(1, len(curve) // 20_000)
    cfg = PairScanConfig(pair_budget=args.pairs, seed=args.seed, endpoint_grid=stride)
    deltas = args.deltas or None
    rep = classify(curve, deltas, args.epsilon, args.n_budget, cfg)
    text = io.dumps(rep.to_dict())
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_approx(args) -> int:
    curve = io.read_csv(args.inp)
    if args.sub:
        s0, s1 = args.sub
    else:
        s0, s1 = 0.0, curve.total_length
    res = uniform_approx_n(curve, SubarcRef(s0, s1), args.epsilon, args.n_max, args.mode)
    sys.stdout.write(io.dumps({
        "subarc": [s0, s1], "epsilon": args.epsilon, "mode": args.mode, "n_max": args.n_max,
        "n_min": res.n_min, "found": res.found, "ratio": res.ratio, "length": res.length,
    }))
    return 0


def cmd_verify(args) -> int:
    kw = {"n": args.n, "seed": args.seed, "report": args.report}
    if args.budget:
        kw["budget"] = args.budget
    cfg = RunConfig(**kw)
    reports = run_suite(args.suite, cfg)
    write_report(reports, cfg, args.report)
    for r in reports:
        print(f"{r.status.upper():8s} {r.check_id:40s} measured={r.measured!r} bound={r.bound!r}")
    return exit_code(reports)


def cmd_export_svg(args) -> int:
    curve = io.read_csv(args.inp)
    io.write_svg(curve, args.out, args.stroke)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="asymcurve", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("build", help="build gamma_n up to a refinement depth")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--depth", type=int, required=True)
    b.add_argument("--samples-per-bump", type=int, default=16)
    b.add_argument("--budget", type=int, default=None)
    b.add_argument("--out", required=True, help="output path; .csv, .json (and .svg) are written")
    b.add_argument("--svg", action="store_true", help="also write an SVG rendering")
    b.add_argument("--stroke", type=float, default=0.0005)
    b.set_defaults(func=cmd_build)

    a = sub.add_parser("assemble", help="assemble the closed curve")
    a.add_argument("--n-max", type=int, required=True)
    a.add_argument("--depth-cap", type=int, required=True)
    a.add_argument("--samples-per-bump", type=int, default=16)
    a.add_argument("--budget", type=int, default=None)
    a.add_argument("--out", required=True)
    a.add_argument("--svg", action="store_true")
    a.add_argument("--stroke", type=float, default=0.002)
    a.set_defaults(func=cmd_assemble)

    z = sub.add_parser("analyze", help="classification report for a curve CSV")
    z.add_argument("--in", dest="inp", required=True)
    z.add_argument("--deltas", type=_floats, default=None)
    z.add_argument("--pairs", type=int, default=4000)
    z.add_argument("--seed", type=int, default=0)
    z.add_argument("--grid", type=int, default=None, help="endpoint grid stride")
    z.add_argument("--epsilon", type=float, default=0.01)
    z.add_argument("--n-budget", type=int, default=1000)
    z.add_argument("--out", default=None)
    z.set_defaults(func=cmd_analyze)

    u = sub.add_parser("approx", help="minimal partition size for uniform approximation")
    u.add_argument("--in", dest="inp", required=True)
    u.add_argument("--epsilon", type=float, required=True)
    u.add_argument("--n-max", type=int, required=True)
    u.add_argument("--mode", choices=["equal", "dp"], default="equal")
    u.add_argument("--sub", type=_floats, default=None, help="S0,S1 arclength range")
    u.set_defaults(func=cmd_approx)

    v = sub.add_parser("verify", help="run the numeric checks")
    v.add_argument("--suite", default="all", help="all, or comma-separated ids L1..L12")
    v.add_argument("--n", type=int, default=5)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--budget", type=int, default=None)
    v.add_argument("--report", default=None)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("export-svg", help="render a curve CSV as SVG")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--stroke", type=float, default=0.002)
    s.set_defaults(func=cmd_export_svg)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "sub", None) is not None and len(args.sub) != 2:
        print("error: --sub expects S0,S1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (CurveError, ResourceError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
