"""Print the length ratio between consecutive refinement levels of one block.

    python3 scripts/level_ratios.py --n 5
"""

import argparse

from asymcurve import build_gamma_n


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--depth", type=int)
    args = ap.parse_args()
    st = build_gamma_n(args.n, args.depth or args.n)
    prev = None
    print(f"{'k':>3} {'samples':>9} {'length':>14} {'ratio':>9} {'(r-1)/beta':>11}")
    for k, lv in enumerate(st.levels, start=1):
        L = lv.curve.total_length
        if prev is None:
            print(f"{k:3d} {len(lv.curve):9d} {L:14.10f}")
        else:
            beta = (k - 1) / args.n**2
            r = L / prev
            print(f"{k:3d} {len(lv.curve):9d} {L:14.10f} {r:9.6f} {(r - 1) / beta:11.4f}")
        prev = L
    print(f"2^n * length = {2.0**args.n * st.top.total_length:.6f}")


if __name__ == "__main__":
    main()
