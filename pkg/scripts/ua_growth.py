"""Smallest equal-partition piece count for each block of the curve.

A uniformly approximable curve would need a bounded count; here it grows
from block to block. Counts past --n-max are reported as a lower bound.

    python3 scripts/ua_growth.py --blocks 2,3,4 --epsilon 0.05
"""

import argparse
import time

from asymcurve import SubarcRef, uniform_approx_n
from asymcurve.construction import cached_gamma_n


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--blocks", default="2,3,4")
    ap.add_argument("--epsilon", type=float, default=0.05)
    ap.add_argument("--n-max", type=int, default=40_000)
    args = ap.parse_args()
    for m in (int(v) for v in args.blocks.split(",")):
        top = cached_gamma_n(m, m).top
        t0 = time.perf_counter()
        res = uniform_approx_n(top, SubarcRef(0.0, top.total_length), args.epsilon, args.n_max)
        n = res.n_min if res.found else f"> {args.n_max}"
        print(f"block {m}: {len(top)} samples, n_min {n}, length/chords {res.ratio:.6f} "
              f"({time.perf_counter() - t0:.1f} s)")


if __name__ == "__main__":
    main()
