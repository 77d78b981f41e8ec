#!/usr/bin/env python3
"""Run the Cantor-spectrum construction and print the per-stage budget ledger.

Example:
    python3 scripts/run_cantor.py --eps 0.9 --stages 3 --seed 7 --out /tmp/cantor
"""

import argparse
import json
import os

from cmvspectra.construct import cantor_iterate
from cmvspectra.odometer import make_sampling


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.9)
    ap.add_argument("--stages", type=int, default=3)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--alpha", type=float, default=0.3,
                    help="initial level-1 table is (alpha, 0)")
    ap.add_argument("--r", type=float, default=0.6)
    ap.add_argument("--out", help="directory for trail.json")
    args = ap.parse_args()

    f = make_sampling((args.alpha, 0.0), args.r)
    reports, final = cantor_iterate(f, args.eps, args.stages, seed=args.seed)

    print(f"{'stage':>5} {'period':>6} {'s_norm':>12} {'budget_eps':>12} "
          f"{'movement':>12} {'budget_move':>12} {'min_gap':>12} {'open':>5}")
    for r in reports:
        print(f"{r.stage:>5} {r.period:>6} {r.s_norm:>12.4e} {r.budget_eps:>12.4e} "
              f"{(r.movement if r.movement is not None else float('nan')):>12.4e} "
              f"{(r.budget_move if r.budget_move is not None else float('nan')):>12.4e} "
              f"{r.min_gap_after:>12.4e} {r.open_gap_count:>5}")
    print(f"final period {final.period}, min open gap {reports[-1].min_gap_after:.3e}")

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "trail.json"), "w") as fh:
            json.dump({"stages": [r.to_json() for r in reports],
                       "final": final.to_json()}, fh, indent=2)
        print(f"wrote {os.path.join(args.out, 'trail.json')}")


if __name__ == "__main__":
    main()
