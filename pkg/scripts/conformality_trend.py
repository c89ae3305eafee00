"""Detour and chord-arc sups along a delta ladder on the assembled curve.

The detour sup should fall toward 1 as delta shrinks while the chord-arc sup
stays bounded away from 1.

    python3 scripts/conformality_trend.py --n-max 5 --pairs 20000
"""

import argparse

from asymcurve import PairScanConfig, assemble_gamma, scan_sup
from asymcurve.functionals import ladder


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-max", type=int, default=5)
    ap.add_argument("--depth-cap", type=int, default=5)
    ap.add_argument("--pairs", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lo", type=int, default=3, help="first rung is diameter * 2^-lo")
    ap.add_argument("--hi", type=int, default=10)
    args = ap.parse_args()

    curve = assemble_gamma(args.n_max, args.depth_cap)
    stride = max(1, len(curve) // 160_000)
    cfg = PairScanConfig(pair_budget=args.pairs, seed=args.seed, endpoint_grid=stride)
    deltas = [curve.diameter() * 2.0**-j for j in range(args.lo, args.hi + 1)]
    conf = ladder([scan_sup(curve, "conformality", cfg.with_delta(d)) for d in deltas], deltas)
    smooth = ladder([scan_sup(curve, "chordarc", cfg.with_delta(d)) for d in deltas], deltas)
    print(f"{len(curve)} samples, length {curve.total_length:.6f}")
    print(f"{'delta':>12} {'detour':>9} {'chord-arc':>10}")
    for d, c, s in zip(deltas, conf, smooth):
        fmt = lambda v: f"{v:.5f}" if v is not None else "-"
        print(f"{d:12.6g} {fmt(c):>9} {fmt(s):>10}")


if __name__ == "__main__":
    main()
